#include "qwal/buchi.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "qwal/errors.hpp"

namespace qwal {

StateId TransitionSystem::add_state(const std::string& name) {
  states.push_back(name);
  return static_cast<StateId>(states.size() - 1);
}

int TransitionSystem::add_transition(StateId src, LetterId letter, StateId dst) {
  transitions.push_back({src, letter, dst});
  return static_cast<int>(transitions.size() - 1);
}

void TransitionSystem::validate() const {
  auto n = static_cast<StateId>(states.size());
  auto k = static_cast<LetterId>(alphabet.size());
  for (auto q : initial)
    if (q < 0 || q >= n) throw InputError("initial state out of range");
  for (auto& t : transitions) {
    if (t.src < 0 || t.src >= n || t.dst < 0 || t.dst >= n) throw InputError("transition state out of range");
    if (t.letter < 0 || t.letter >= k) throw InputError("transition letter out of range");
  }
}

bool TransitionSystem::is_deterministic() const {
  if (initial.size() > 1) return false;
  std::vector<std::pair<StateId, LetterId>> keys;
  for (auto& t : transitions) keys.push_back({t.src, t.letter});
  std::sort(keys.begin(), keys.end());
  return std::adjacent_find(keys.begin(), keys.end()) == keys.end();
}

StateId BuchiAutomaton::add_state(const std::string& name, bool is_accepting) {
  accepting.push_back(is_accepting ? 1 : 0);
  return TransitionSystem::add_state(name);
}

void BuchiAutomaton::validate() const {
  TransitionSystem::validate();
  if (accepting.size() != states.size()) throw InputError("accepting flags do not match the state count");
}

void MullerAutomaton::validate() const {
  TransitionSystem::validate();
  for (auto& s : acc_sets)
    for (auto q : s)
      if (q < 0 || q >= static_cast<StateId>(states.size())) throw InputError("acceptance set mentions an unknown state");
}

bool run_reads(const TransitionSystem& a, const LassoRun& run, const LassoWord<LetterId>& w) {
  if (run.loop.empty()) return false;
  std::vector<int> seq(run.prefix);
  seq.insert(seq.end(), run.loop.begin(), run.loop.end());
  for (int t : seq)
    if (t < 0 || t >= static_cast<int>(a.transitions.size())) return false;
  auto tr = [&](int t) -> const Transition& { return a.transitions[static_cast<std::size_t>(t)]; };
  if (std::find(a.initial.begin(), a.initial.end(), tr(seq.front()).src) == a.initial.end()) return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (tr(seq[i]).dst != tr(seq[i + 1]).src) return false;
  if (tr(run.loop.back()).dst != tr(run.loop.front()).src) return false;
  return omega_equal(run_word(a, run), w);
}

LassoWord<LetterId> run_word(const TransitionSystem& a, const LassoRun& run) {
  std::vector<LetterId> p, q;
  for (int t : run.prefix) p.push_back(a.transitions[static_cast<std::size_t>(t)].letter);
  for (int t : run.loop) q.push_back(a.transitions[static_cast<std::size_t>(t)].letter);
  return LassoWord<LetterId>(std::move(p), std::move(q));
}

std::vector<StateId> loop_states(const TransitionSystem& a, const LassoRun& run) {
  std::vector<StateId> s;
  for (int t : run.loop) s.push_back(a.transitions[static_cast<std::size_t>(t)].dst);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool is_accepting_run(const BuchiAutomaton& a, const LassoRun& run, const LassoWord<LetterId>& w) {
  if (!run_reads(a, run, w)) return false;
  for (auto q : loop_states(a, run))
    if (a.is_accepting(q)) return true;
  return false;
}

bool is_accepting_run(const MullerAutomaton& a, const LassoRun& run, const LassoWord<LetterId>& w) {
  if (!run_reads(a, run, w)) return false;
  auto s = loop_states(a, run);
  return std::find(a.acc_sets.begin(), a.acc_sets.end(), s) != a.acc_sets.end();
}

namespace {

// Transitions grouped by source, sorted by letter inside each group.
struct TransitionIndex {
  std::vector<int> order;
  std::vector<std::size_t> start;

  explicit TransitionIndex(const TransitionSystem& a) : start(a.num_states() + 1, 0) {
    order.resize(a.transitions.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      auto& tx = a.transitions[static_cast<std::size_t>(x)];
      auto& ty = a.transitions[static_cast<std::size_t>(y)];
      return std::tie(tx.src, tx.letter, x) < std::tie(ty.src, ty.letter, y);
    });
    for (auto& t : a.transitions) ++start[static_cast<std::size_t>(t.src) + 1];
    for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  }

  template <class F>
  void for_each(const TransitionSystem& a, StateId q, LetterId letter, F&& f) const {
    auto lo = order.begin() + static_cast<std::ptrdiff_t>(start[static_cast<std::size_t>(q)]);
    auto hi = order.begin() + static_cast<std::ptrdiff_t>(start[static_cast<std::size_t>(q) + 1]);
    auto it = std::lower_bound(lo, hi, letter, [&](int t, LetterId l) { return a.transitions[static_cast<std::size_t>(t)].letter < l; });
    for (; it != hi && a.transitions[static_cast<std::size_t>(*it)].letter == letter; ++it) f(*it);
  }
};

}  // namespace

ProductGraph build_product(const TransitionSystem& a, const LassoWord<LetterId>& w) {
  for (std::size_t i = 0; i < w.shape_size(); ++i) {
    LetterId l = w.at(i);
    if (l < 0 || l >= static_cast<LetterId>(a.alphabet.size())) throw InputError("word letter outside the alphabet");
  }
  ProductGraph pg;
  pg.prefix_len = w.prefix_size();
  pg.loop_len = w.loop_size();
  const std::size_t len = w.shape_size();
  TransitionIndex index(a);
  std::unordered_map<std::uint64_t, int> ids;
  auto key = [&](StateId q, std::size_t pos) { return static_cast<std::uint64_t>(q) * len + pos; };
  std::vector<int> work;
  auto vertex = [&](StateId q, std::size_t pos) {
    auto [it, fresh] = ids.try_emplace(key(q, pos), pg.graph.num_vertices());
    if (fresh) {
      pg.graph.add_vertex();
      pg.state.push_back(q);
      pg.position.push_back(static_cast<int>(pos));
      work.push_back(it->second);
    }
    return it->second;
  };
  for (auto q : a.initial) pg.initial.push_back(vertex(q, 0));
  std::sort(pg.initial.begin(), pg.initial.end());
  pg.initial.erase(std::unique(pg.initial.begin(), pg.initial.end()), pg.initial.end());
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    StateId q = pg.state[static_cast<std::size_t>(v)];
    auto pos = static_cast<std::size_t>(pg.position[static_cast<std::size_t>(v)]);
    std::size_t next = pos + 1 < len ? pos + 1 : pg.prefix_len;
    index.for_each(a, q, w.at(pos), [&](int t) {
      int u = vertex(a.transitions[static_cast<std::size_t>(t)].dst, next);
      pg.graph.add_edge(v, u);
      pg.edge_transition.push_back(t);
    });
  }
  return pg;
}

LassoRun to_run(const ProductGraph& pg, const EdgeLasso& lasso) {
  LassoRun run;
  for (int e : lasso.prefix) run.prefix.push_back(pg.edge_transition[static_cast<std::size_t>(e)]);
  for (int e : lasso.loop) run.loop.push_back(pg.edge_transition[static_cast<std::size_t>(e)]);
  return run;
}

std::optional<LassoRun> accepts(const BuchiAutomaton& a, const LassoWord<LetterId>& w) {
  ProductGraph pg = build_product(a, w);
  VertexMask acc(static_cast<std::size_t>(pg.graph.num_vertices()));
  for (std::size_t v = 0; v < acc.size(); ++v) acc[v] = a.is_accepting(pg.state[v]);
  auto lasso = find_accepting_lasso(pg.graph, pg.initial, acc);
  if (!lasso) return std::nullopt;
  return to_run(pg, *lasso);
}

std::optional<LassoRun> accepts(const MullerAutomaton& a, const LassoWord<LetterId>& w) {
  ProductGraph pg = build_product(a, w);
  const auto n = static_cast<std::size_t>(pg.graph.num_vertices());
  std::vector<int> group(pg.state.begin(), pg.state.end());
  for (auto& s : a.acc_sets) {
    if (s.empty()) continue;
    VertexMask mask(n);
    for (std::size_t v = 0; v < n; ++v) mask[v] = std::binary_search(s.begin(), s.end(), pg.state[v]);
    auto lasso = find_covering_lasso(pg.graph, pg.initial, mask, group, s);
    if (lasso) return to_run(pg, *lasso);
  }
  return std::nullopt;
}

Digraph state_graph(const TransitionSystem& a) {
  Digraph g;
  for (std::size_t i = 0; i < a.num_states(); ++i) g.add_vertex();
  for (auto& t : a.transitions) g.add_edge(t.src, t.dst);
  return g;
}

std::optional<LassoWord<LetterId>> is_empty(const BuchiAutomaton& a) {
  Digraph g = state_graph(a);
  VertexMask acc(a.accepting.begin(), a.accepting.end());
  auto lasso = find_accepting_lasso(g, a.initial, acc);
  if (!lasso) return std::nullopt;
  return run_word(a, LassoRun{lasso->prefix, lasso->loop});
}

BuchiAutomaton product_intersection(const BuchiAutomaton& a, const BuchiAutomaton& b) {
  if (!(a.alphabet == b.alphabet)) throw InputError("product_intersection: alphabets differ");
  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  TransitionIndex ib(b);
  std::map<std::tuple<StateId, StateId, int>, StateId> ids;
  std::vector<std::tuple<StateId, StateId, int>> work;
  auto state = [&](StateId p, StateId q, int phase) {
    auto k = std::make_tuple(p, q, phase);
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    StateId id = out.add_state(a.states[static_cast<std::size_t>(p)] + "|" + b.states[static_cast<std::size_t>(q)] + "|" + std::to_string(phase),
                               phase == 1 && a.is_accepting(p));
    ids.emplace(k, id);
    work.push_back(k);
    return id;
  };
  for (auto p : a.initial)
    for (auto q : b.initial) out.initial.push_back(state(p, q, 1));
  while (!work.empty()) {
    auto [p, q, phase] = work.back();
    work.pop_back();
    StateId src = ids.at({p, q, phase});
    int next = phase;
    if (phase == 1 && a.is_accepting(p)) next = 2;
    else if (phase == 2 && b.is_accepting(q)) next = 1;
    for (auto& ta : a.transitions) {
      if (ta.src != p) continue;
      ib.for_each(b, q, ta.letter, [&](int tb) {
        StateId dst = state(ta.dst, b.transitions[static_cast<std::size_t>(tb)].dst, next);
        out.add_transition(src, ta.letter, dst);
      });
    }
  }
  return out;
}

std::optional<AmbiguityWitness> check_ambiguity(const BuchiAutomaton& a) {
  // Vertices: (p, q, diverged, phase). Edges remember the transition pair.
  TransitionIndex index(a);
  Digraph g;
  std::vector<std::pair<int, int>> edge_pair;
  std::vector<std::tuple<StateId, StateId, int, int>> info;
  std::map<std::tuple<StateId, StateId, int, int>, int> ids;
  std::vector<int> work;
  auto vertex = [&](StateId p, StateId q, int div, int phase) {
    auto k = std::make_tuple(p, q, div, phase);
    auto [it, fresh] = ids.try_emplace(k, g.num_vertices());
    if (fresh) {
      g.add_vertex();
      info.push_back(k);
      work.push_back(it->second);
    }
    return it->second;
  };
  std::vector<int> init;
  for (auto p : a.initial)
    for (auto q : a.initial) init.push_back(vertex(p, q, 0, 1));
  std::vector<std::vector<int>> by_src(a.num_states());
  for (std::size_t t = 0; t < a.transitions.size(); ++t) by_src[static_cast<std::size_t>(a.transitions[t].src)].push_back(static_cast<int>(t));
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    auto [p, q, div, phase] = info[static_cast<std::size_t>(v)];
    int next = phase;
    if (phase == 1 && a.is_accepting(p)) next = 2;
    else if (phase == 2 && a.is_accepting(q)) next = 1;
    for (int t1 : by_src[static_cast<std::size_t>(p)]) {
      auto& tr1 = a.transitions[static_cast<std::size_t>(t1)];
      index.for_each(a, q, tr1.letter, [&](int t2) {
        int d = (div || t1 != t2) ? 1 : 0;
        int u = vertex(tr1.dst, a.transitions[static_cast<std::size_t>(t2)].dst, d, next);
        g.add_edge(v, u);
        edge_pair.push_back({t1, t2});
      });
    }
  }
  VertexMask acc(static_cast<std::size_t>(g.num_vertices()));
  for (std::size_t v = 0; v < acc.size(); ++v) {
    auto [p, q, div, phase] = info[v];
    acc[v] = div && phase == 1 && a.is_accepting(p);
  }
  auto lasso = find_accepting_lasso(g, init, acc);
  if (!lasso) return std::nullopt;
  AmbiguityWitness w;
  for (int e : lasso->prefix) {
    w.first.prefix.push_back(edge_pair[static_cast<std::size_t>(e)].first);
    w.second.prefix.push_back(edge_pair[static_cast<std::size_t>(e)].second);
  }
  for (int e : lasso->loop) {
    w.first.loop.push_back(edge_pair[static_cast<std::size_t>(e)].first);
    w.second.loop.push_back(edge_pair[static_cast<std::size_t>(e)].second);
  }
  w.word = run_word(a, w.first);
  return w;
}

MullerAutomaton buchi_to_muller(const BuchiAutomaton& a, std::size_t max_component) {
  MullerAutomaton m;
  static_cast<TransitionSystem&>(m) = static_cast<const TransitionSystem&>(a);
  Digraph g = state_graph(a);
  int count = 0;
  auto comp = scc_ids(g, count);
  std::vector<std::vector<StateId>> members(static_cast<std::size_t>(count));
  for (std::size_t q = 0; q < comp.size(); ++q) members[static_cast<std::size_t>(comp[q])].push_back(static_cast<StateId>(q));
  for (auto& c : members) {
    bool has_f = false;
    for (auto q : c) has_f |= a.is_accepting(q);
    if (!has_f) continue;
    if (c.size() > max_component) throw ResourceError("buchi_to_muller: strongly connected component with " + std::to_string(c.size()) + " states exceeds the cap");
    std::vector<int> local(a.num_states(), -1);
    for (std::size_t i = 0; i < c.size(); ++i) local[static_cast<std::size_t>(c[i])] = static_cast<int>(i);
    std::vector<std::uint32_t> succ(c.size(), 0), pred(c.size(), 0);
    for (auto& t : a.transitions) {
      int s = local[static_cast<std::size_t>(t.src)], d = local[static_cast<std::size_t>(t.dst)];
      if (s < 0 || d < 0) continue;
      succ[static_cast<std::size_t>(s)] |= 1u << d;
      pred[static_cast<std::size_t>(d)] |= 1u << s;
    }
    std::uint32_t fmask = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (a.is_accepting(c[i])) fmask |= 1u << i;
    auto closure = [&](std::uint32_t s, const std::vector<std::uint32_t>& adj) {
      int first = __builtin_ctz(s);
      std::uint32_t seen = 0, frontier = 1u << first;
      while (frontier) {
        int v = __builtin_ctz(frontier);
        frontier &= frontier - 1;
        std::uint32_t nxt = adj[static_cast<std::size_t>(v)] & s & ~seen;
        seen |= nxt;
        frontier |= nxt;
      }
      return seen;
    };
    std::uint32_t limit = c.size() >= 32 ? 0xffffffffu : (1u << c.size()) - 1;
    for (std::uint32_t s = 1; s != 0 && s <= limit; ++s) {
      if (!(s & fmask)) continue;
      // Strongly connected with a cycle: every member reachable from the first by ≥1 step, both ways.
      if (closure(s, succ) != s || closure(s, pred) != s) continue;
      std::vector<StateId> set;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (s & (1u << i)) set.push_back(c[i]);
      std::sort(set.begin(), set.end());
      m.acc_sets.push_back(std::move(set));
      if (s == limit) break;
    }
  }
  std::sort(m.acc_sets.begin(), m.acc_sets.end());
  return m;
}

BuchiAutomaton muller_to_buchi(const MullerAutomaton& a) {
  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  for (auto& s : a.states) out.add_state(s);
  out.initial = a.initial;
  for (auto& t : a.transitions) out.add_transition(t.src, t.letter, t.dst);
  // Copy of S: state (q, round index). Index |S| marks a just-completed round.
  for (std::size_t k = 0; k < a.acc_sets.size(); ++k) {
    const auto& s = a.acc_sets[k];
    if (s.empty()) continue;
    const std::size_t n = s.size();
    std::map<std::pair<StateId, std::size_t>, StateId> ids;
    auto id = [&](StateId q, std::size_t i) {
      auto it = ids.find({q, i});
      if (it != ids.end()) return it->second;
      StateId v = out.add_state(a.states[static_cast<std::size_t>(q)] + "|S" + std::to_string(k) + "|" + std::to_string(i), i == n);
      ids.emplace(std::make_pair(q, i), v);
      return v;
    };
    auto in_s = [&](StateId q) { return std::binary_search(s.begin(), s.end(), q); };
    auto advance = [&](std::size_t i, StateId q) {
      std::size_t j = i == n ? 0 : i;
      return s[j] == q ? j + 1 : j;
    };
    for (auto q : s)
      for (std::size_t i = 0; i <= n; ++i) id(q, i);
    for (auto& t : a.transitions) {
      if (!in_s(t.dst)) continue;
      out.add_transition(t.src, t.letter, id(t.dst, advance(0, t.dst)));
      if (!in_s(t.src)) continue;
      for (std::size_t i = 0; i <= n; ++i) out.add_transition(id(t.src, i), t.letter, id(t.dst, advance(i, t.dst)));
    }
  }
  return trim(out);
}

BuchiAutomaton trim(const BuchiAutomaton& a) {
  Digraph g = state_graph(a);
  VertexMask reach = reachable(g, a.initial);
  int count = 0;
  auto comp = scc_ids(g, count, &reach);
  std::vector<char> nontrivial(static_cast<std::size_t>(count), 0), has_f(static_cast<std::size_t>(count), 0);
  for (auto& t : a.transitions) {
    int c = comp[static_cast<std::size_t>(t.src)];
    if (c >= 0 && c == comp[static_cast<std::size_t>(t.dst)]) nontrivial[static_cast<std::size_t>(c)] = 1;
  }
  for (std::size_t q = 0; q < a.num_states(); ++q)
    if (comp[q] >= 0 && a.accepting[q]) has_f[static_cast<std::size_t>(comp[q])] = 1;
  VertexMask good(a.num_states(), 0);
  for (std::size_t q = 0; q < a.num_states(); ++q)
    good[q] = comp[q] >= 0 && nontrivial[static_cast<std::size_t>(comp[q])] && has_f[static_cast<std::size_t>(comp[q])];
  VertexMask keep = coreachable(g, good, &reach);
  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  std::vector<StateId> id(a.num_states(), -1);
  for (std::size_t q = 0; q < a.num_states(); ++q)
    if (keep[q]) id[q] = out.add_state(a.states[q], a.accepting[q]);
  for (auto q : a.initial)
    if (id[static_cast<std::size_t>(q)] >= 0) out.initial.push_back(id[static_cast<std::size_t>(q)]);
  for (auto& t : a.transitions) {
    StateId s = id[static_cast<std::size_t>(t.src)], d = id[static_cast<std::size_t>(t.dst)];
    if (s >= 0 && d >= 0) out.add_transition(s, t.letter, d);
  }
  return out;
}

}  // namespace qwal
