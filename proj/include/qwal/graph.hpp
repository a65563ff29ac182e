#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace qwal {

/// Plain directed multigraph with edge ids; the substrate of every product-graph search.
struct Digraph {
  std::vector<int> from, to;
  std::vector<std::vector<int>> out;

  int num_vertices() const { return static_cast<int>(out.size()); }
  int num_edges() const { return static_cast<int>(from.size()); }
  int add_vertex() {
    out.emplace_back();
    return num_vertices() - 1;
  }
  int add_edge(int u, int v) {
    from.push_back(u);
    to.push_back(v);
    out[static_cast<std::size_t>(u)].push_back(num_edges() - 1);
    return num_edges() - 1;
  }
};

using VertexMask = std::vector<char>;

/// Strongly connected components (iterative Tarjan). Vertices outside `mask` get -1.
/// Components are numbered in reverse topological order.
std::vector<int> scc_ids(const Digraph& g, int& count, const VertexMask* mask = nullptr, const std::vector<char>* edge_mask = nullptr);

VertexMask reachable(const Digraph& g, const std::vector<int>& sources, const VertexMask* mask = nullptr);
/// Vertices from which some vertex in `targets` is reachable.
VertexMask coreachable(const Digraph& g, const VertexMask& targets, const VertexMask* mask = nullptr);

/// Shortest (edge count) path from any source to a vertex satisfying `is_target`, staying in `mask`.
/// Returns the edge ids; an empty path when a source already is a target.
std::optional<std::vector<int>> bfs_path(const Digraph& g, const std::vector<int>& sources,
                                         const std::function<bool(int)>& is_target, const VertexMask* mask = nullptr);

/// Edge ids of a lasso: path from a source, then a nonempty cycle.
struct EdgeLasso {
  std::vector<int> prefix;
  std::vector<int> loop;
};

/// A reachable cycle through an accepting vertex, or nullopt.
std::optional<EdgeLasso> find_accepting_lasso(const Digraph& g, const std::vector<int>& initial,
                                              const VertexMask& accepting, const VertexMask* mask = nullptr);

/// A reachable cycle inside `mask` that visits, for every required group, a vertex of that group.
/// `group[v]` is the group of vertex v (or -1).
std::optional<EdgeLasso> find_covering_lasso(const Digraph& g, const std::vector<int>& initial, const VertexMask& mask,
                                             const std::vector<int>& group, const std::vector<int>& required);

}  // namespace qwal
