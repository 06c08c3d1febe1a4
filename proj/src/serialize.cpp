#include "dsg/serialize.hpp"

#include <stdexcept>

namespace dsg {

using nlohmann::json;

std::string vertex_digits(const TreeShape& shape, long node, int level) {
  if (level == 0) return "*";
  std::string out;
  const VertexPath path = shape.path(node, level);
  for (int p = 0; p < level; ++p) {
    if (p) out += '.';
    out += std::to_string(path.indices[p] - 1);
  }
  return out;
}

json cascade_to_json(const TruncatedCascade& cascade) {
  const TreeShape& shape = cascade.shape();
  json params;
  params["r"] = cascade.params().r;
  params["zetas"] = std::vector<double>(
      cascade.params().zetas.data(),
      cascade.params().zetas.data() + cascade.params().zetas.size());
  if (cascade.params().overlaps.size() > 0)
    params["overlaps"] = std::vector<double>(
        cascade.params().overlaps.data(),
        cascade.params().overlaps.data() + cascade.params().overlaps.size());

  json log_weights = json::object();
  for (long leaf = 0; leaf < shape.leaves(); ++leaf)
    log_weights[vertex_digits(shape, leaf, shape.depth())] =
        cascade.leaf_log_weights()[leaf];

  json sort_map = json::object();
  for (int p = 1; p <= shape.depth(); ++p)
    for (long s = 0; s < shape.nodes_at(p); ++s)
      sort_map[vertex_digits(shape, s, p)] =
          vertex_digits(shape, cascade.sort_map_at(p, s), p);

  json out;
  out["params"] = params;
  out["M"] = shape.branching();
  out["log_weights"] = log_weights;
  out["sort_map"] = sort_map;
  out["truncation_budget"] = cascade.truncation_budget();
  return out;
}

json order_param_to_json(const OrderParamH& h) {
  json out;
  out["r"] = h.r();
  out["G"] = h.grid();
  out["values"] =
      std::vector<double>(h.values().data(), h.values().data() + h.values().size());
  out["omega_star_coordinate"] = h.has_star();
  return out;
}

OrderParamH order_param_from_json(const json& j) {
  const int r = j.at("r").get<int>();
  const int grid = j.at("G").get<int>();
  const auto values = j.at("values").get<std::vector<double>>();
  Eigen::ArrayXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  const bool star = j.value("omega_star_coordinate", false);
  return OrderParamH(r, grid, std::move(v), star);
}

json clause_model_to_json(const ClauseModel& m) {
  json out;
  switch (m.kind) {
    case ClauseKind::kspin:
      out["variant"] = "kspin";
      out["K"] = m.K;
      out["beta"] = m.beta;
      out["g_dist"] =
          m.gdist == DisorderDist::gaussian ? "gaussian" : "rademacher";
      break;
    case ClauseKind::ksat:
      out["variant"] = "ksat";
      out["K"] = m.K;
      out["beta"] = m.beta;
      break;
    case ClauseKind::pert:
      out["variant"] = "pert";
      out["d"] = m.K;
      out["eps_pert"] = m.eps_pert;
      break;
  }
  return out;
}

ClauseModel clause_model_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "kspin") {
    const std::string g = j.value("g_dist", "gaussian");
    return ClauseModel::kspin(j.at("K").get<int>(), j.at("beta").get<double>(),
                              g == "rademacher" ? DisorderDist::rademacher
                                                : DisorderDist::gaussian);
  }
  if (variant == "ksat")
    return ClauseModel::ksat(j.at("K").get<int>(), j.at("beta").get<double>());
  if (variant == "pert")
    return ClauseModel::pert(j.at("d").get<int>(),
                             j.at("eps_pert").get<double>());
  throw std::invalid_argument("unknown clause variant: " + variant);
}

namespace {

json attached_to_json(const AttachedClause& ac) {
  json out = clause_model_to_json(ac.clause.model);
  out["sites"] = ac.sites;
  if (ac.clause.model.kind == ClauseKind::ksat) {
    std::vector<int> j(ac.clause.j.begin(), ac.clause.j.end());
    out["J"] = j;
  } else {
    out["g"] = ac.clause.g;
  }
  return out;
}

AttachedClause attached_from_json(const json& j) {
  AttachedClause ac;
  ac.clause.model = clause_model_from_json(j);
  ac.sites = j.at("sites").get<std::vector<std::int32_t>>();
  if (ac.clause.model.kind == ClauseKind::ksat) {
    for (int v : j.at("J").get<std::vector<int>>())
      ac.clause.j.push_back(static_cast<std::int8_t>(v));
  } else {
    ac.clause.g = j.at("g").get<double>();
  }
  return ac;
}

}  // namespace

json instance_to_json(const HamiltonianInstance& inst) {
  json out;
  out["N"] = inst.N;
  out["eps_pert"] = inst.eps_pert;
  out["d_max"] = inst.d_max;
  out["model_clauses"] = json::array();
  for (const auto& c : inst.model_clauses)
    out["model_clauses"].push_back(attached_to_json(c));
  out["pert_clauses"] = json::array();
  for (const auto& c : inst.pert_clauses)
    out["pert_clauses"].push_back(attached_to_json(c));
  return out;
}

HamiltonianInstance instance_from_json(const json& j) {
  HamiltonianInstance inst;
  inst.N = j.at("N").get<int>();
  inst.eps_pert = j.value("eps_pert", 0.0);
  inst.d_max = j.value("d_max", 12);
  for (const auto& c : j.at("model_clauses"))
    inst.model_clauses.push_back(attached_from_json(c));
  for (const auto& c : j.at("pert_clauses"))
    inst.pert_clauses.push_back(attached_from_json(c));
  return inst;
}

std::string csv_quote(const std::string& field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace dsg
