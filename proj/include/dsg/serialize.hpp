#pragma once

#include <json.hpp>
#include <string>

#include "dsg/cascade.hpp"
#include "dsg/fields.hpp"
#include "dsg/finite_system.hpp"

namespace dsg {

// Leaf/vertex index as a base-M digit string ("0.2.1", digits 0-based,
// most significant first).
std::string vertex_digits(const TreeShape& shape, long node, int level);

// {params, M, log_weights by leaf digit string, sort_map}.
nlohmann::json cascade_to_json(const TruncatedCascade& cascade);

// {r, G, values row-major, omega_star_coordinate}.
nlohmann::json order_param_to_json(const OrderParamH& h);
OrderParamH order_param_from_json(const nlohmann::json& j);

nlohmann::json clause_model_to_json(const ClauseModel& m);
ClauseModel clause_model_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const HamiltonianInstance& inst);
HamiltonianInstance instance_from_json(const nlohmann::json& j);

// RFC-4180 CSV field quoting.
std::string csv_quote(const std::string& field);

}  // namespace dsg
