#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "dsg/rng.hpp"
#include "dsg/vertex.hpp"

namespace dsg {

// Grid-discretized functional order parameter h: [0,1]^r -> [-1,1],
// piecewise constant on a uniform grid with `grid` cells per coordinate.
//
// With the star flag set, h takes two extra leading coordinates
// (omega_star, omega_star_i) ahead of the r path coordinates, matching the
// (r+2)-ary variant of the order parameter.
class OrderParamH {
 public:
  OrderParamH(int r, int grid, Eigen::ArrayXd values, bool star = false);
  static OrderParamH constant(int r, double value, bool star = false);

  int r() const { return r_; }
  int grid() const { return grid_; }
  bool has_star() const { return star_; }
  int arity() const { return star_ ? r_ + 2 : r_; }
  const Eigen::ArrayXd& values() const { return values_; }

  // Piecewise-constant lookup; omegas.size() must equal arity(), and every
  // coordinate must lie in [0,1].
  double operator()(std::span<const double> omegas) const;

  // Lookup by precomputed 0-based cell indices (no range checks).
  double at_cells(std::span<const int> cells) const;
  int cell_of(double omega) const;

 private:
  int r_;
  int grid_;
  bool star_;
  Eigen::ArrayXd values_;  // row-major over {0..grid-1}^arity
};

// One independent copy of the hierarchical field array: fresh uniforms at
// every non-root vertex of the truncated tree (plus a root copy coordinate
// when h has the star arity), with h evaluated at every leaf.
struct FieldCopy {
  std::vector<Eigen::ArrayXd> uniforms;  // uniforms[p-1]: depth-p vertices
  double omega_star_copy = 0.0;          // root coordinate, star variant only
  Eigen::ArrayXd leaf_values;            // h at each leaf, in [-1,1]
};

FieldCopy sample_field_copy(const OrderParamH& h, const TreeShape& shape,
                            RngStream& rng, double omega_star = 0.0);

// Leaf values only (skips storing the uniforms).
Eigen::ArrayXd sample_field_leaves(const OrderParamH& h, const TreeShape& shape,
                                   RngStream& rng, double omega_star = 0.0);

// +1 with probability (1 + sbar)/2; requires |sbar| <= 1.
int spin_from_field(double sbar, RngStream& rng);

// Centered Gaussian field on the leaves with covariance levels[wedge],
// built by telescoping level increments: requires 0 <= c_0 <= ... <= c_r.
Eigen::ArrayXd sample_ultrametric_gaussian(const Eigen::ArrayXd& levels,
                                           const TreeShape& shape,
                                           RngStream& rng);

}  // namespace dsg
