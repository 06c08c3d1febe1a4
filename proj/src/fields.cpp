#include "dsg/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace dsg {

namespace {

long ipow(long base, int exp) {
  long out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

OrderParamH::OrderParamH(int r, int grid, Eigen::ArrayXd values, bool star)
    : r_(r), grid_(grid), star_(star), values_(std::move(values)) {
  if (r_ < 0) throw std::invalid_argument("OrderParamH: negative depth");
  if (grid_ < 1) throw std::invalid_argument("OrderParamH: grid must be >= 1");
  if (values_.size() != ipow(grid_, arity()))
    throw std::invalid_argument("OrderParamH: values size must be grid^arity");
  for (long i = 0; i < values_.size(); ++i)
    if (!(values_[i] >= -1.0 && values_[i] <= 1.0))
      throw std::invalid_argument("OrderParamH: entries must lie in [-1,1]");
}

OrderParamH OrderParamH::constant(int r, double value, bool star) {
  return OrderParamH(r, 1, Eigen::ArrayXd::Constant(1, value), star);
}

int OrderParamH::cell_of(double omega) const {
  if (!(omega >= 0.0 && omega <= 1.0))
    throw std::invalid_argument("OrderParamH: coordinate outside [0,1]");
  // ceil(G*omega) in 1..G, shifted to 0-based.
  int c = static_cast<int>(std::ceil(grid_ * omega));
  if (c < 1) c = 1;
  if (c > grid_) c = grid_;
  return c - 1;
}

double OrderParamH::operator()(std::span<const double> omegas) const {
  if (static_cast<int>(omegas.size()) != arity())
    throw std::invalid_argument("OrderParamH: wrong number of coordinates");
  long idx = 0;
  for (double w : omegas) idx = idx * grid_ + cell_of(w);
  return values_[idx];
}

double OrderParamH::at_cells(std::span<const int> cells) const {
  long idx = 0;
  for (int c : cells) idx = idx * grid_ + c;
  return values_[idx];
}

FieldCopy sample_field_copy(const OrderParamH& h, const TreeShape& shape,
                            RngStream& rng, double omega_star) {
  if (h.r() != shape.depth())
    throw std::invalid_argument("sample_field_copy: depth mismatch");
  FieldCopy out;
  const int r = shape.depth();
  out.uniforms.resize(r);
  for (int p = 1; p <= r; ++p) {
    out.uniforms[p - 1].resize(shape.nodes_at(p));
    for (long i = 0; i < shape.nodes_at(p); ++i)
      out.uniforms[p - 1][i] = rng.uniform();
  }
  if (h.has_star()) out.omega_star_copy = rng.uniform();

  out.leaf_values.resize(shape.leaves());
  std::vector<int> cells(h.arity());
  int base = 0;
  if (h.has_star()) {
    cells[0] = h.cell_of(omega_star);
    cells[1] = h.cell_of(out.omega_star_copy);
    base = 2;
  }
  for (long leaf = 0; leaf < shape.leaves(); ++leaf) {
    long node = leaf;
    for (int p = r; p >= 1; --p) {
      cells[base + p - 1] = h.cell_of(out.uniforms[p - 1][node]);
      if (p > 1) node = shape.parent(node, p);
    }
    out.leaf_values[leaf] = h.at_cells(cells);
  }
  return out;
}

Eigen::ArrayXd sample_field_leaves(const OrderParamH& h, const TreeShape& shape,
                                   RngStream& rng, double omega_star) {
  return sample_field_copy(h, shape, rng, omega_star).leaf_values;
}

int spin_from_field(double sbar, RngStream& rng) {
  if (!(std::fabs(sbar) <= 1.0))
    throw std::invalid_argument("spin_from_field: |sbar| must be <= 1");
  return rng.uniform() <= 0.5 * (1.0 + sbar) ? 1 : -1;
}

Eigen::ArrayXd sample_ultrametric_gaussian(const Eigen::ArrayXd& levels,
                                           const TreeShape& shape,
                                           RngStream& rng) {
  const int r = shape.depth();
  if (levels.size() != r + 1)
    throw std::invalid_argument(
        "sample_ultrametric_gaussian: need depth+1 covariance levels");
  double prev = 0.0;
  for (int p = 0; p <= r; ++p) {
    if (!(levels[p] >= prev))
      throw std::invalid_argument(
          "sample_ultrametric_gaussian: levels must be nondecreasing and >= 0");
    prev = levels[p];
  }
  // Root increment c_0, then c_p - c_{p-1} at each deeper level.
  Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(1, std::sqrt(levels[0]) * rng.normal());
  for (int p = 1; p <= r; ++p) {
    const double sd = std::sqrt(levels[p] - levels[p - 1]);
    const long nodes = shape.nodes_at(p);
    const int m = shape.branching_at(p - 1);
    Eigen::ArrayXd next(nodes);
    for (long parent = 0; parent < shape.nodes_at(p - 1); ++parent)
      for (int j = 0; j < m; ++j)
        next[parent * m + j] = acc[parent] + sd * rng.normal();
    acc.swap(next);
  }
  return acc;
}

}  // namespace dsg
