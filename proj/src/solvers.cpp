#include "qwal/solvers.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "qwal/errors.hpp"

namespace qwal {

namespace {

std::size_t at(int i) { return static_cast<std::size_t>(i); }

struct LongestPaths {
  std::vector<std::optional<Rational>> dist;
  std::vector<int> pred;
  std::optional<std::vector<int>> positive_cycle;
};

// Bellman–Ford for longest paths over the masked vertices and enabled edges.
// Without `sources` every vertex starts at 0, so any positive cycle in the mask is found.
LongestPaths longest_paths(const Digraph& g, const VertexMask& mask, const std::vector<int>& edges,
                           const std::vector<Rational>& w, const std::vector<int>* sources) {
  const auto n = at(g.num_vertices());
  LongestPaths out;
  out.dist.assign(n, std::nullopt);
  out.pred.assign(n, -1);
  std::size_t live = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (mask[v]) {
      ++live;
      if (!sources) out.dist[v] = Rational(0);
    }
  if (sources)
    for (int s : *sources)
      if (mask[at(s)]) out.dist[at(s)] = Rational(0);
  int last = -1;
  Rational cand;
  for (std::size_t round = 0; round <= live; ++round) {
    last = -1;
    for (int e : edges) {
      int u = g.from[at(e)], v = g.to[at(e)];
      if (!out.dist[at(u)]) continue;
      cand = *out.dist[at(u)] + w[at(e)];
      if (!out.dist[at(v)] || cand > *out.dist[at(v)]) {
        out.dist[at(v)] = cand;
        out.pred[at(v)] = e;
        last = v;
      }
    }
    if (last < 0) return out;
  }
  // Still relaxing after |V| rounds: walk back |V| predecessors to land on the cycle.
  int x = last;
  for (std::size_t i = 0; i < live; ++i) x = g.from[at(out.pred[at(x)])];
  std::vector<int> cyc;
  int y = x;
  do {
    int e = out.pred[at(y)];
    cyc.push_back(e);
    y = g.from[at(e)];
  } while (y != x);
  std::reverse(cyc.begin(), cyc.end());
  out.positive_cycle = std::move(cyc);
  return out;
}

struct Sums {
  Rational r = 0, c = 0;
};

Sums ratio_sums(const std::vector<int>& path, const std::vector<Rational>& r, const std::vector<Rational>& c) {
  Sums s;
  for (int e : path) {
    s.r += r[at(e)];
    s.c += c[at(e)];
  }
  return s;
}

std::vector<int> masked_edges(const Digraph& g, const VertexMask& mask, const std::function<bool(int)>& keep) {
  std::vector<int> out;
  for (int e = 0; e < g.num_edges(); ++e)
    if (mask[at(g.from[at(e)])] && mask[at(g.to[at(e)])] && keep(e)) out.push_back(e);
  return out;
}

// Maximum R/C over cycles inside `mask`, all of whose zero-cost cycles have R ≤ 0.
// `seed` is some cycle with C > 0.
Rational max_cycle_ratio(const Digraph& g, const VertexMask& mask, const std::vector<int>& edges,
                         const std::vector<Rational>& r, const std::vector<Rational>& c, const std::vector<int>& seed) {
  Sums s = ratio_sums(seed, r, c);
  Rational lambda = s.r / s.c;
  std::vector<Rational> w(r.size());
  while (true) {
    for (int e : edges) w[at(e)] = r[at(e)] - lambda * c[at(e)];
    auto lp = longest_paths(g, mask, edges, w, nullptr);
    if (!lp.positive_cycle) return lambda;
    Sums cy = ratio_sums(*lp.positive_cycle, r, c);
    if (cy.c == 0) throw InternalError("ratio solver: zero-cost positive cycle after screening");
    Rational next = cy.r / cy.c;
    if (!(next > lambda)) throw InternalError("ratio solver: no progress");
    lambda = next;
  }
}

}  // namespace

ExtReal solve_ratio(const SolverGraph& sg) {
  const Digraph& g = sg.graph;
  const auto n = at(g.num_vertices());
  const auto m = at(g.num_edges());
  std::vector<Rational> r(m), c(m);
  for (std::size_t e = 0; e < m; ++e) {
    r[e] = sg.weight[e][0];
    c[e] = sg.weight[e][1];
  }
  VertexMask reach = reachable(g, sg.initial);
  ExtReal best = ExtReal::neg_inf();

  // Runs whose cost grows without bound settle in one SCC; their best limsup is the
  // SCC's maximum cycle ratio, or inf when a free positive cycle can be pumped.
  int count = 0;
  auto comp = scc_ids(g, count, &reach);
  std::vector<char> has_acc(at(count), 0);
  std::vector<int> costly(at(count), -1);
  for (std::size_t v = 0; v < n; ++v)
    if (comp[v] >= 0 && sg.accepting[v]) has_acc[at(comp[v])] = 1;
  for (std::size_t e = 0; e < m; ++e) {
    int cu = comp[at(g.from[e])];
    if (cu >= 0 && cu == comp[at(g.to[e])] && c[e] > 0 && costly[at(cu)] < 0) costly[at(cu)] = static_cast<int>(e);
  }
  for (int k = 0; k < count; ++k) {
    if (!has_acc[at(k)] || costly[at(k)] < 0) continue;
    VertexMask mask(n, 0);
    for (std::size_t v = 0; v < n; ++v) mask[v] = comp[v] == k;
    auto free_edges = masked_edges(g, mask, [&](int e) { return c[at(e)] == 0; });
    if (longest_paths(g, mask, free_edges, r, nullptr).positive_cycle) return ExtReal::pos_inf();
    int e0 = costly[at(k)];
    auto back = bfs_path(g, {g.to[at(e0)]}, [&](int x) { return x == g.from[at(e0)]; }, &mask);
    std::vector<int> seed{e0};
    seed.insert(seed.end(), back->begin(), back->end());
    auto edges = masked_edges(g, mask, [](int) { return true; });
    best = max(best, ExtReal(max_cycle_ratio(g, mask, edges, r, c, seed)));
  }

  // Runs whose cost stops growing end in zero-cost edges with total cost D > 0, so their
  // value is (limsup of reward)/D. Inside a zero-cost component without positive cycles,
  // reward stays bounded only along tight edges of a longest-path potential; the tail
  // bonus from vertex v is then max π over its tight component minus π(v).
  std::vector<char> zero_edge(m, 0);
  for (std::size_t e = 0; e < m; ++e) zero_edge[e] = c[e] == 0;
  int count0 = 0;
  auto comp0 = scc_ids(g, count0, &reach, &zero_edge);
  std::vector<char> nontrivial0(at(count0), 0), acc0(at(count0), 0);
  for (std::size_t e = 0; e < m; ++e) {
    int cu = comp0[at(g.from[e])];
    if (zero_edge[e] && cu >= 0 && cu == comp0[at(g.to[e])]) nontrivial0[at(cu)] = 1;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (comp0[v] >= 0 && sg.accepting[v]) acc0[at(comp0[v])] = 1;

  VertexMask unbounded_tail(n, 0);
  std::vector<std::optional<Rational>> bonus(n);
  for (int z = 0; z < count0; ++z) {
    if (!nontrivial0[at(z)] || !acc0[at(z)]) continue;
    VertexMask mask(n, 0);
    for (std::size_t v = 0; v < n; ++v) mask[v] = comp0[v] == z;
    auto edges = masked_edges(g, mask, [&](int e) { return zero_edge[at(e)] != 0; });
    auto lp = longest_paths(g, mask, edges, r, nullptr);
    if (lp.positive_cycle) {
      for (std::size_t v = 0; v < n; ++v)
        if (mask[v]) unbounded_tail[v] = 1;
      continue;
    }
    std::vector<char> tight(m, 0);
    for (int e : edges) tight[at(e)] = *lp.dist[at(g.to[at(e)])] == *lp.dist[at(g.from[at(e)])] + r[at(e)];
    int tc = 0;
    auto tcomp = scc_ids(g, tc, &mask, &tight);
    std::vector<char> t_nontrivial(at(tc), 0), t_acc(at(tc), 0);
    std::vector<std::optional<Rational>> t_max(at(tc));
    for (int e : edges)
      if (tight[at(e)] && tcomp[at(g.from[at(e)])] == tcomp[at(g.to[at(e)])]) t_nontrivial[at(tcomp[at(g.from[at(e)])])] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!mask[v]) continue;
      auto t = at(tcomp[v]);
      if (sg.accepting[v]) t_acc[t] = 1;
      if (!t_max[t] || *lp.dist[v] > *t_max[t]) t_max[t] = *lp.dist[v];
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!mask[v]) continue;
      auto t = at(tcomp[v]);
      if (t_nontrivial[t] && t_acc[t]) bonus[v] = *t_max[t] - *lp.dist[v];
    }
  }

  // Layered graph: layer 1 once some cost has been paid; sink `t` behind every tail entry.
  Digraph h;
  for (std::size_t i = 0; i < 2 * n + 1; ++i) h.add_vertex();
  const int t = static_cast<int>(2 * n);
  std::vector<Rational> hr, hc;
  for (std::size_t e = 0; e < m; ++e) {
    if (!reach[at(g.from[e])]) continue;
    for (int layer = 0; layer < 2; ++layer) {
      int to_layer = (layer == 1 || c[e] > 0) ? 1 : 0;
      h.add_edge(g.from[e] + layer * static_cast<int>(n), g.to[e] + to_layer * static_cast<int>(n));
      hr.push_back(r[e]);
      hc.push_back(c[e]);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (bonus[v]) {
      h.add_edge(static_cast<int>(v + n), t);
      hr.push_back(*bonus[v]);
      hc.push_back(0);
    }
  std::vector<int> sources;
  for (int s : sg.initial) sources.push_back(s);
  VertexMask hreach = reachable(h, sources);
  for (std::size_t v = 0; v < n; ++v)
    if (unbounded_tail[v] && hreach[v + n]) return ExtReal::pos_inf();
  if (!hreach[at(t)]) return best;

  VertexMask target(2 * n + 1, 0);
  target[at(t)] = 1;
  VertexMask corridor = coreachable(h, target, &hreach);
  auto edges = masked_edges(h, corridor, [](int) { return true; });
  auto first = bfs_path(h, sources, [t](int x) { return x == t; }, &corridor);
  Sums s0 = ratio_sums(*first, hr, hc);
  Rational lambda = s0.r / s0.c;
  std::vector<Rational> w(hr.size());
  while (true) {
    for (int e : edges) w[at(e)] = hr[at(e)] - lambda * hc[at(e)];
    auto lp = longest_paths(h, corridor, edges, w, &sources);
    Rational next;
    if (lp.positive_cycle) {
      Sums cy = ratio_sums(*lp.positive_cycle, hr, hc);
      // A free positive cycle on the way to a paid-for tail pumps the reward at fixed cost.
      if (cy.c == 0) return ExtReal::pos_inf();
      next = cy.r / cy.c;
    } else {
      if (!lp.dist[at(t)] || *lp.dist[at(t)] <= 0) break;
      std::vector<int> path;
      for (int x = t; lp.pred[at(x)] >= 0; x = h.from[at(lp.pred[at(x)])]) path.push_back(lp.pred[at(x)]);
      Sums ps = ratio_sums(path, hr, hc);
      next = ps.r / ps.c;
    }
    if (!(next > lambda)) throw InternalError("ratio solver: no progress on the tail graph");
    lambda = next;
  }
  return max(best, ExtReal(lambda));
}

ExtReal solve_disc(const SolverGraph& sg) {
  const Digraph& g = sg.graph;
  const auto n = at(g.num_vertices());
  const auto m = at(g.num_edges());
  std::vector<Rational> r(m), d(m);
  for (std::size_t e = 0; e < m; ++e) {
    r[e] = sg.weight[e][0];
    d[e] = sg.weight[e][1];
  }
  VertexMask reach = reachable(g, sg.initial);

  // Finite-valued runs either discount infinitely often inside an accepting SCC, or end in an
  // accepting cycle of free edges (reward 0, factor 1), modelled as a jump to a sink of value 0.
  int count = 0;
  auto comp = scc_ids(g, count, &reach);
  std::vector<int> discounting(at(count), -1);
  std::vector<char> has_acc(at(count), 0);
  for (std::size_t v = 0; v < n; ++v)
    if (comp[v] >= 0 && sg.accepting[v]) has_acc[at(comp[v])] = 1;
  for (std::size_t e = 0; e < m; ++e) {
    int cu = comp[at(g.from[e])];
    if (cu >= 0 && cu == comp[at(g.to[e])] && d[e] < 1 && discounting[at(cu)] < 0) discounting[at(cu)] = static_cast<int>(e);
  }
  std::vector<char> free_edge(m, 0);
  for (std::size_t e = 0; e < m; ++e) free_edge[e] = d[e] == 1 && r[e] == 0;
  int count0 = 0;
  auto comp0 = scc_ids(g, count0, &reach, &free_edge);
  std::vector<char> free_nontrivial(at(count0), 0), free_acc(at(count0), 0);
  for (std::size_t e = 0; e < m; ++e) {
    int cu = comp0[at(g.from[e])];
    if (free_edge[e] && cu >= 0 && cu == comp0[at(g.to[e])]) free_nontrivial[at(cu)] = 1;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (comp0[v] >= 0 && sg.accepting[v]) free_acc[at(comp0[v])] = 1;
  auto sink_exit = [&](std::size_t v) {
    int z = comp0[v];
    return z >= 0 && free_nontrivial[at(z)] && free_acc[at(z)];
  };

  VertexMask target(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!reach[v]) continue;
    int k = comp[v];
    target[v] = (has_acc[at(k)] && discounting[at(k)] >= 0) || sink_exit(v);
  }
  VertexMask fin = coreachable(g, target, &reach);

  // Initial proper policy: sink exits, then a discounting cycle per target SCC, then
  // shortest routes to those.
  constexpr int kSink = -2;
  std::vector<int> policy(n, -1);
  std::vector<std::vector<int>> in_edges(n);
  for (std::size_t e = 0; e < m; ++e) in_edges[at(g.to[e])].push_back(static_cast<int>(e));
  std::deque<int> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (fin[v] && sink_exit(v)) {
      policy[v] = kSink;
      queue.push_back(static_cast<int>(v));
    }
  for (int k = 0; k < count; ++k) {
    if (!has_acc[at(k)] || discounting[at(k)] < 0) continue;
    int e0 = discounting[at(k)];
    int a = g.from[at(e0)];
    if (policy[at(a)] == -1) policy[at(a)] = e0;
    std::deque<int> local{a};
    while (!local.empty()) {
      int v = local.front();
      local.pop_front();
      for (int e : in_edges[at(v)]) {
        int u = g.from[at(e)];
        if (comp[at(u)] != k || policy[at(u)] != -1) continue;
        policy[at(u)] = e;
        local.push_back(u);
      }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == k) queue.push_back(static_cast<int>(v));
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int e : in_edges[at(v)]) {
      int u = g.from[at(e)];
      if (!fin[at(u)] || policy[at(u)] != -1) continue;
      policy[at(u)] = e;
      queue.push_back(u);
    }
  }

  std::vector<Rational> value(n);
  auto evaluate = [&] {
    std::vector<char> state(n, 0);  // 0 new, 1 on the current walk, 2 done
    for (std::size_t v0 = 0; v0 < n; ++v0) {
      if (!fin[v0] || state[v0] == 2) continue;
      std::vector<int> walk;
      int x = static_cast<int>(v0);
      while (state[at(x)] == 0) {
        state[at(x)] = 1;
        walk.push_back(x);
        if (policy[at(x)] == kSink) break;
        x = g.to[at(policy[at(x)])];
      }
      std::size_t stop = walk.size();
      if (policy[at(walk.back())] == kSink && state[at(walk.back())] == 1) {
        value[at(walk.back())] = 0;
        state[at(walk.back())] = 2;
        --stop;
      } else if (state[at(x)] == 1) {
        auto begin = static_cast<std::size_t>(std::find(walk.begin(), walk.end(), x) - walk.begin());
        Rational sum = 0, prod = 1;
        for (std::size_t i = begin; i < walk.size(); ++i) {
          int e = policy[at(walk[i])];
          sum += r[at(e)] * prod;
          prod *= d[at(e)];
        }
        if (prod == 1) throw InternalError("disc solver: policy closed an undiscounted cycle");
        value[at(x)] = sum / (1 - prod);
        state[at(x)] = 2;
        for (std::size_t i = walk.size(); i-- > begin + 1;) {
          int e = policy[at(walk[i])];
          value[at(walk[i])] = r[at(e)] + d[at(e)] * value[at(g.to[at(e)])];
          state[at(walk[i])] = 2;
        }
        stop = begin;
      }
      for (std::size_t i = stop; i-- > 0;) {
        int e = policy[at(walk[i])];
        value[at(walk[i])] = r[at(e)] + d[at(e)] * value[at(g.to[at(e)])];
        state[at(walk[i])] = 2;
      }
    }
  };

  // Howard iteration; switching only on strict improvement keeps every policy proper.
  while (true) {
    evaluate();
    bool changed = false;
    Rational cand;
    for (std::size_t u = 0; u < n; ++u) {
      if (!fin[u]) continue;
      Rational best = value[u];
      int choice = policy[u];
      if (sink_exit(u) && best > 0) {
        best = 0;
        choice = kSink;
      }
      for (int e : g.out[u]) {
        int v = g.to[at(e)];
        if (!fin[at(v)]) continue;
        cand = r[at(e)] + d[at(e)] * value[at(v)];
        if (cand < best) {
          best = cand;
          choice = e;
        }
      }
      if (choice != policy[u]) {
        policy[u] = choice;
        changed = true;
      }
    }
    if (!changed) break;
  }

  ExtReal out = ExtReal::pos_inf();
  for (int s : sg.initial)
    if (fin[at(s)]) out = min(out, ExtReal(value[at(s)]));
  return out;
}

EnergyResult solve_energy(const SolverGraph& sg, std::size_t dim, int bound, std::size_t max_configs) {
  if (bound <= 0) throw InputError("energy bound must be positive");
  const Digraph& g = sg.graph;
  const auto n = at(g.num_vertices());
  std::vector<std::vector<long long>> w(at(g.num_edges()), std::vector<long long>(dim));
  long long big = 1;
  for (std::size_t e = 0; e < w.size(); ++e) {
    if (sg.weight[e].size() != dim) throw InputError("energy weight of the wrong dimension");
    for (std::size_t j = 0; j < dim; ++j) {
      w[e][j] = sg.weight[e][j].get_num().get_si();
      big = std::max(big, std::abs(w[e][j]));
    }
  }
  const long long cap = static_cast<long long>(bound) * big * static_cast<long long>(std::max<std::size_t>(n, 1));

  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto x : k) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_map<std::vector<long long>, int, KeyHash> ids;
  std::vector<std::vector<long long>> configs;
  Digraph cg;
  std::vector<int> product_edge;
  std::vector<int> work, initial;
  bool truncated = false;
  auto config = [&](std::vector<long long> key) {
    auto [it, fresh] = ids.try_emplace(key, cg.num_vertices());
    if (fresh) {
      cg.add_vertex();
      configs.push_back(std::move(key));
      work.push_back(it->second);
    }
    return it->second;
  };
  for (int s : sg.initial) {
    std::vector<long long> key(dim + 1, 0);
    key[0] = s;
    initial.push_back(config(std::move(key)));
  }
  while (!work.empty()) {
    if (configs.size() > max_configs) {
      truncated = true;
      break;
    }
    int x = work.back();
    work.pop_back();
    auto v = at(static_cast<int>(configs[at(x)][0]));
    for (int e : g.out[v]) {
      std::vector<long long> key(dim + 1);
      key[0] = g.to[at(e)];
      bool ok = true;
      for (std::size_t j = 0; j < dim && ok; ++j) {
        long long level = configs[at(x)][j + 1] + w[at(e)][j];
        if (level < 0) ok = false;
        if (level > cap) {
          level = cap;
          truncated = true;
        }
        key[j + 1] = level;
      }
      if (!ok) continue;
      int y = config(std::move(key));
      cg.add_edge(x, y);
      product_edge.push_back(e);
    }
  }
  VertexMask acc(configs.size(), 0);
  for (std::size_t i = 0; i < configs.size(); ++i) acc[i] = sg.accepting[at(static_cast<int>(configs[i][0]))];
  EnergyResult out;
  if (auto lasso = find_accepting_lasso(cg, initial, acc)) {
    EdgeLasso witness;
    for (int e : lasso->prefix) witness.prefix.push_back(product_edge[at(e)]);
    for (int e : lasso->loop) witness.loop.push_back(product_edge[at(e)]);
    out.verdict = EnergyVerdict::One;
    out.witness = std::move(witness);
    return out;
  }
  out.verdict = truncated ? EnergyVerdict::Unknown : EnergyVerdict::Zero;
  return out;
}

}  // namespace qwal
