#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dsg/rng.hpp"
#include "dsg/stats.hpp"
#include "dsg/vertex.hpp"

namespace dsg {

// Depth and tilting parameters of a cascade: 0 < zeta_0 < ... < zeta_{r-1} < 1,
// optionally annotated with the overlap values 0 <= q_0 < ... < q_r <= 1.
struct CascadeParams {
  int r = 1;
  Eigen::ArrayXd zetas;     // size r
  Eigen::ArrayXd overlaps;  // size 0 or r+1

  CascadeParams() = default;
  CascadeParams(int depth, Eigen::ArrayXd z) : r(depth), zetas(std::move(z)) {}

  void validate() const;
};

// x -> x^{-1/zeta}: the point of the heavy-tailed process at arrival time x
// of a unit Poisson process.
double poisson_point_from_arrival(double gamma, double zeta);

// The m largest points of a Poisson process with mean measure
// zeta * x^{-1-zeta} dx, in decreasing order.
Eigen::ArrayXd sample_poisson_points(double zeta, int m, RngStream& rng);

// Smallest per-level branching such that the estimated untracked leaf-mass
// fraction stays below `budget`, keeping the leaf count at most max_leaves.
std::vector<int> choose_branching(const CascadeParams& params, double budget,
                                  long max_leaves = 1L << 22);

// A finitely truncated Ruelle probability cascade.
//
// Weights are kept in the log domain during construction. Exposes both the
// raw weights v (indexed by the tree in sampling order) and the recursively
// sorted weights V together with the sorting bijection pi, which maps
// sorted-tree vertices to raw-tree vertices and preserves parent-child
// structure by construction.
class TruncatedCascade {
 public:
  TruncatedCascade(CascadeParams params, std::vector<int> branching,
                   RngStream& rng);

  const CascadeParams& params() const { return params_; }
  const TreeShape& shape() const { return shape_; }
  int depth() const { return shape_.depth(); }

  // log w_alpha for leaves, before normalization.
  const Eigen::ArrayXd& leaf_log_weights() const { return leaf_log_w_; }
  // v_alpha on leaves (normalized) and on internal vertices (child sums).
  const Eigen::ArrayXd& leaf_weights() const { return cluster_v_.back(); }
  const Eigen::ArrayXd& cluster_weights(int level) const {
    return cluster_v_[level];
  }
  // Sorted weights V_alpha.
  const Eigen::ArrayXd& sorted_leaf_weights() const { return cluster_V_.back(); }
  const Eigen::ArrayXd& sorted_cluster_weights(int level) const {
    return cluster_V_[level];
  }

  // pi: vertex of the sorted tree -> vertex of the raw tree.
  long sort_map_at(int level, long sorted_index) const {
    return sort_to_raw_[level][sorted_index];
  }
  VertexPath sort_map(const VertexPath& sorted_vertex) const;

  // Estimated fraction of leaf mass lost to the branching truncation.
  double truncation_budget() const { return truncation_budget_; }

  // Leaf index distributed according to V (sorted tree) or v (raw tree).
  long sample_leaf(RngStream& rng, bool sorted = true) const;

  // sum_{wedge(alpha,beta) <= p} V_alpha V_beta, exact on the truncated tree.
  double pair_overlap_mass(int p) const;

  // Internal-consistency assertions (normalization, child sums, sorting).
  void self_check() const;

 private:
  CascadeParams params_;
  TreeShape shape_;
  std::vector<Eigen::ArrayXd> log_points_;  // level p: nodes_at(p+1) values
  std::vector<Eigen::ArrayXd> last_arrival_;  // level p: Gamma_M per node
  Eigen::ArrayXd leaf_log_w_;
  std::vector<Eigen::ArrayXd> cluster_v_;  // [0..r], [r] = leaf weights
  std::vector<Eigen::ArrayXd> cluster_V_;
  std::vector<std::vector<long>> sort_to_raw_;
  Eigen::ArrayXd leaf_cdf_;  // cumulative sorted leaf weights
  double truncation_budget_ = 0.0;
};

// Recursive descending sort of per-level cluster weights. Returns, per level,
// the map sorted-index -> input-index; preserves parent-child structure.
std::vector<std::vector<long>> recursive_weight_sort(
    const TreeShape& shape, const std::vector<Eigen::ArrayXd>& cluster_weights);

// Monte Carlo estimate of E sum_{wedge <= p} V_a V_b over independently
// built cascades; the target value is zeta_p (and exactly 1 at p = r).
FunctionalEstimate overlap_cdf_check(const CascadeParams& params,
                                     const std::vector<int>& branching, int p,
                                     long n_cascades, std::uint64_t seed,
                                     int workers = 1);

}  // namespace dsg
