#include "qwal/graph.hpp"

#include <algorithm>
#include <deque>

namespace qwal {

namespace {
bool in(const VertexMask* m, int v) { return !m || (*m)[static_cast<std::size_t>(v)]; }
}  // namespace

std::vector<int> scc_ids(const Digraph& g, int& count, const VertexMask* mask, const std::vector<char>* edge_mask) {
  const int n = g.num_vertices();
  std::vector<int> comp(static_cast<std::size_t>(n), -1), index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int next = 0;
  count = 0;
  for (int root = 0; root < n; ++root) {
    if (!in(mask, root) || index[static_cast<std::size_t>(root)] != -1) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& [v, k] = call.back();
      auto vs = static_cast<std::size_t>(v);
      if (k == 0 && index[vs] == -1) {
        index[vs] = low[vs] = next++;
        stack.push_back(v);
        on_stack[vs] = 1;
      }
      const auto& outs = g.out[vs];
      bool descended = false;
      while (k < outs.size()) {
        int e = outs[k++];
        if (edge_mask && !(*edge_mask)[static_cast<std::size_t>(e)]) continue;
        int w = g.to[static_cast<std::size_t>(e)];
        auto ws = static_cast<std::size_t>(w);
        if (!in(mask, w)) continue;
        if (index[ws] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[ws]) low[vs] = std::min(low[vs], index[ws]);
      }
      if (descended) continue;
      if (low[vs] == index[vs]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = count;
          if (w == v) break;
        }
        ++count;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) {
        auto ps = static_cast<std::size_t>(call.back().first);
        low[ps] = std::min(low[ps], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  return comp;
}

VertexMask reachable(const Digraph& g, const std::vector<int>& sources, const VertexMask* mask) {
  VertexMask seen(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<int> work;
  for (int s : sources)
    if (in(mask, s) && !seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = 1;
      work.push_back(s);
    }
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int e : g.out[static_cast<std::size_t>(v)]) {
      int w = g.to[static_cast<std::size_t>(e)];
      if (in(mask, w) && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        work.push_back(w);
      }
    }
  }
  return seen;
}

VertexMask coreachable(const Digraph& g, const VertexMask& targets, const VertexMask* mask) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<int>> in_edges(n);
  for (int e = 0; e < g.num_edges(); ++e) in_edges[static_cast<std::size_t>(g.to[static_cast<std::size_t>(e)])].push_back(e);
  VertexMask seen(n, 0);
  std::vector<int> work;
  for (std::size_t v = 0; v < n; ++v)
    if (targets[v] && in(mask, static_cast<int>(v))) {
      seen[v] = 1;
      work.push_back(static_cast<int>(v));
    }
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int e : in_edges[static_cast<std::size_t>(v)]) {
      int u = g.from[static_cast<std::size_t>(e)];
      if (in(mask, u) && !seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        work.push_back(u);
      }
    }
  }
  return seen;
}

std::optional<std::vector<int>> bfs_path(const Digraph& g, const std::vector<int>& sources,
                                         const std::function<bool(int)>& is_target, const VertexMask* mask) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<int> via(n, -2);
  std::deque<int> queue;
  for (int s : sources) {
    if (!in(mask, s) || via[static_cast<std::size_t>(s)] != -2) continue;
    if (is_target(s)) return std::vector<int>{};
    via[static_cast<std::size_t>(s)] = -1;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int e : g.out[static_cast<std::size_t>(v)]) {
      int w = g.to[static_cast<std::size_t>(e)];
      auto ws = static_cast<std::size_t>(w);
      if (!in(mask, w) || via[ws] != -2) continue;
      via[ws] = e;
      if (is_target(w)) {
        std::vector<int> path;
        for (int x = w; via[static_cast<std::size_t>(x)] >= 0; x = g.from[static_cast<std::size_t>(via[static_cast<std::size_t>(x)])])
          path.push_back(via[static_cast<std::size_t>(x)]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(w);
    }
  }
  return std::nullopt;
}

namespace {

// Cycle from v back to v inside the component `comp_id`.
std::vector<int> cycle_through(const Digraph& g, int v, const std::vector<int>& comp, int comp_id, const VertexMask* mask) {
  for (int e : g.out[static_cast<std::size_t>(v)]) {
    int w = g.to[static_cast<std::size_t>(e)];
    if (!in(mask, w) || comp[static_cast<std::size_t>(w)] != comp_id) continue;
    if (w == v) return {e};
    VertexMask cm(static_cast<std::size_t>(g.num_vertices()), 0);
    for (std::size_t x = 0; x < cm.size(); ++x) cm[x] = comp[x] == comp_id && in(mask, static_cast<int>(x));
    auto back = bfs_path(g, {w}, [v](int x) { return x == v; }, &cm);
    if (!back) continue;
    std::vector<int> cyc{e};
    cyc.insert(cyc.end(), back->begin(), back->end());
    return cyc;
  }
  return {};
}

}  // namespace

std::optional<EdgeLasso> find_accepting_lasso(const Digraph& g, const std::vector<int>& initial,
                                              const VertexMask& accepting, const VertexMask* mask) {
  VertexMask reach = reachable(g, initial, mask);
  int count = 0;
  auto comp = scc_ids(g, count, &reach);
  std::vector<char> nontrivial(static_cast<std::size_t>(count), 0);
  for (int e = 0; e < g.num_edges(); ++e) {
    int u = g.from[static_cast<std::size_t>(e)], w = g.to[static_cast<std::size_t>(e)];
    int cu = comp[static_cast<std::size_t>(u)];
    if (cu >= 0 && cu == comp[static_cast<std::size_t>(w)]) nontrivial[static_cast<std::size_t>(cu)] = 1;
  }
  auto good = [&](int v) {
    int c = comp[static_cast<std::size_t>(v)];
    return c >= 0 && accepting[static_cast<std::size_t>(v)] && nontrivial[static_cast<std::size_t>(c)];
  };
  auto path = bfs_path(g, initial, good, &reach);
  if (!path) return std::nullopt;
  int f = path->empty() ? -1 : g.to[static_cast<std::size_t>(path->back())];
  if (f < 0)
    for (int s : initial)
      if (in(&reach, s) && good(s)) {
        f = s;
        break;
      }
  EdgeLasso out;
  out.prefix = std::move(*path);
  out.loop = cycle_through(g, f, comp, comp[static_cast<std::size_t>(f)], &reach);
  return out;
}

std::optional<EdgeLasso> find_covering_lasso(const Digraph& g, const std::vector<int>& initial, const VertexMask& mask,
                                             const std::vector<int>& group, const std::vector<int>& required) {
  VertexMask reach_all = reachable(g, initial);
  VertexMask m(mask.size());
  for (std::size_t v = 0; v < mask.size(); ++v) m[v] = mask[v] && reach_all[v];
  int count = 0;
  auto comp = scc_ids(g, count, &m);
  std::vector<char> nontrivial(static_cast<std::size_t>(count), 0);
  for (int e = 0; e < g.num_edges(); ++e) {
    int cu = comp[static_cast<std::size_t>(g.from[static_cast<std::size_t>(e)])];
    if (cu >= 0 && cu == comp[static_cast<std::size_t>(g.to[static_cast<std::size_t>(e)])]) nontrivial[static_cast<std::size_t>(cu)] = 1;
  }
  for (int c = 0; c < count; ++c) {
    if (!nontrivial[static_cast<std::size_t>(c)]) continue;
    std::vector<int> reps;
    bool ok = true;
    for (int r : required) {
      int rep = -1;
      for (int v = 0; v < g.num_vertices() && rep < 0; ++v)
        if (comp[static_cast<std::size_t>(v)] == c && group[static_cast<std::size_t>(v)] == r) rep = v;
      if (rep < 0) {
        ok = false;
        break;
      }
      reps.push_back(rep);
    }
    if (!ok) continue;
    VertexMask cm(m.size());
    for (std::size_t v = 0; v < m.size(); ++v) cm[v] = comp[v] == c;
    int start = reps.empty() ? -1 : reps.front();
    if (start < 0)
      for (int v = 0; v < g.num_vertices(); ++v)
        if (cm[static_cast<std::size_t>(v)]) {
          start = v;
          break;
        }
    auto prefix = bfs_path(g, initial, [start](int x) { return x == start; });
    if (!prefix) continue;
    EdgeLasso out;
    out.prefix = std::move(*prefix);
    // Close a tour start -> reps[1] -> ... -> start with at least one edge.
    int cur = start;
    std::vector<int> stops(reps.begin() + (reps.empty() ? 0 : 1), reps.end());
    stops.push_back(start);
    for (int target : stops) {
      if (target == cur && !(target == start && out.loop.empty())) continue;
      if (target == cur) {
        auto cyc = cycle_through(g, cur, comp, c, &m);
        out.loop.insert(out.loop.end(), cyc.begin(), cyc.end());
        continue;
      }
      auto seg = bfs_path(g, {cur}, [target](int x) { return x == target; }, &cm);
      if (!seg) throw std::logic_error("component not strongly connected");
      out.loop.insert(out.loop.end(), seg->begin(), seg->end());
      cur = target;
    }
    return out;
  }
  return std::nullopt;
}

}  // namespace qwal
