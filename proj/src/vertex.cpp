#include "dsg/vertex.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dsg {

std::string VertexPath::to_string() const {
  if (indices.empty()) return "*";
  std::string out = "(";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(indices[i]);
  }
  out += ')';
  return out;
}

int wedge(const VertexPath& a, const VertexPath& b) {
  const std::size_t n = std::min(a.indices.size(), b.indices.size());
  std::size_t p = 0;
  while (p < n && a.indices[p] == b.indices[p]) ++p;
  return static_cast<int>(p);
}

TreeShape::TreeShape(int depth, std::vector<int> branching)
    : depth_(depth), branching_(std::move(branching)) {
  if (depth < 0) throw std::invalid_argument("TreeShape: negative depth");
  if (static_cast<int>(branching_.size()) != depth)
    throw std::invalid_argument("TreeShape: branching size must equal depth");
  nodes_.resize(depth + 1);
  nodes_[0] = 1;
  for (int p = 0; p < depth; ++p) {
    if (branching_[p] < 1)
      throw std::invalid_argument("TreeShape: branching must be >= 1");
    if (nodes_[p] > std::numeric_limits<long>::max() / branching_[p])
      throw std::invalid_argument("TreeShape: leaf count overflow");
    nodes_[p + 1] = nodes_[p] * branching_[p];
  }
}

TreeShape TreeShape::uniform(int depth, int branching) {
  return TreeShape(depth, std::vector<int>(depth, branching));
}

long TreeShape::ancestor(long node, int from, int level) const {
  long a = node;
  for (int p = from; p > level; --p) a /= branching_[p - 1];
  return a;
}

VertexPath TreeShape::path(long node, int level) const {
  std::vector<std::int32_t> idx(level);
  long cur = node;
  for (int p = level; p > 0; --p) {
    idx[p - 1] = static_cast<std::int32_t>(cur % branching_[p - 1]) + 1;
    cur /= branching_[p - 1];
  }
  return VertexPath(std::move(idx));
}

long TreeShape::index(const VertexPath& v) const {
  if (v.depth() > depth_)
    throw std::invalid_argument("TreeShape::index: path too deep");
  long node = 0;
  for (int p = 0; p < v.depth(); ++p) {
    const int j = v.indices[p];
    if (j < 1 || j > branching_[p])
      throw std::invalid_argument("TreeShape::index: child index out of range");
    node = node * branching_[p] + (j - 1);
  }
  return node;
}

int TreeShape::wedge_leaves(long a, long b) const {
  int p = depth_;
  while (p > 0 && a != b) {
    a /= branching_[p - 1];
    b /= branching_[p - 1];
    --p;
  }
  return p;
}

}  // namespace dsg
