#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dsg {

// A vertex of the rooted tree, written as the sequence of 1-based child
// indices on the path from the root. The empty sequence is the root itself.
struct VertexPath {
  std::vector<std::int32_t> indices;

  VertexPath() = default;
  explicit VertexPath(std::vector<std::int32_t> idx) : indices(std::move(idx)) {}

  int depth() const { return static_cast<int>(indices.size()); }
  bool is_root() const { return indices.empty(); }
  bool operator==(const VertexPath&) const = default;

  std::string to_string() const;  // "*" for the root, "(1,2,3)" otherwise
};

// Number of common non-root vertices of the two root paths, i.e. the length
// of the longest common prefix. wedge(a, a) == a.depth().
int wedge(const VertexPath& a, const VertexPath& b);

// Index arithmetic on the truncated tree with per-level branching
// (branching[p] children under every depth-p vertex). Vertices at depth p
// are addressed by a linear index in [0, nodes_at(p)).
class TreeShape {
 public:
  TreeShape(int depth, std::vector<int> branching);
  static TreeShape uniform(int depth, int branching);

  int depth() const { return depth_; }
  const std::vector<int>& branching() const { return branching_; }
  int branching_at(int level) const { return branching_[level]; }

  long nodes_at(int level) const { return nodes_[level]; }
  long leaves() const { return nodes_[depth_]; }

  long child(long node, int level, int j) const {
    return node * branching_[level] + j;
  }
  long parent(long node, int level) const {
    return node / branching_[level - 1];
  }
  // Linear index at `level` of the ancestor of the depth-`from` vertex.
  long ancestor(long node, int from, int level) const;

  VertexPath path(long node, int level) const;
  long index(const VertexPath& v) const;

  // Depth of the lowest common ancestor of two leaves.
  int wedge_leaves(long a, long b) const;

 private:
  int depth_;
  std::vector<int> branching_;
  std::vector<long> nodes_;  // nodes_[p] = number of depth-p vertices
};

}  // namespace dsg
