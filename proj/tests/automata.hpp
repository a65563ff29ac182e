#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "qwal/buchi.hpp"
#include "support.hpp"

namespace qwal::testing {

inline Alphabet letters(int k) {
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return Alphabet(names);
}

/// Random Büchi automaton: each (q, a, q') present with probability `density` percent.
inline BuchiAutomaton random_buchi(Rng& rng, int n, int k, int density = 35, int initial_count = 1) {
  BuchiAutomaton a;
  a.alphabet = letters(k);
  for (int q = 0; q < n; ++q) a.add_state("q" + std::to_string(q), uniform(rng, 0, 2) == 0);
  for (int i = 0; i < initial_count; ++i) a.initial.push_back(uniform(rng, 0, n - 1));
  std::sort(a.initial.begin(), a.initial.end());
  a.initial.erase(std::unique(a.initial.begin(), a.initial.end()), a.initial.end());
  for (int q = 0; q < n; ++q)
    for (int c = 0; c < k; ++c)
      for (int r = 0; r < n; ++r)
        if (uniform(rng, 0, 99) < density) a.add_transition(q, c, r);
  return a;
}

/// Complete deterministic Büchi automaton.
inline BuchiAutomaton random_deterministic(Rng& rng, int n, int k) {
  BuchiAutomaton a;
  a.alphabet = letters(k);
  for (int q = 0; q < n; ++q) a.add_state("q" + std::to_string(q), uniform(rng, 0, 1) == 0);
  a.initial.push_back(0);
  for (int q = 0; q < n; ++q)
    for (int c = 0; c < k; ++c) a.add_transition(q, c, uniform(rng, 0, n - 1));
  return a;
}

inline MullerAutomaton random_muller(Rng& rng, int n, int k, int density = 35) {
  auto b = random_buchi(rng, n, k, density);
  MullerAutomaton m;
  m.alphabet = b.alphabet;
  m.states = b.states;
  m.initial = b.initial;
  m.transitions = b.transitions;
  int sets = uniform(rng, 1, 3);
  for (int i = 0; i < sets; ++i) {
    std::vector<StateId> s;
    for (int q = 0; q < n; ++q)
      if (uniform(rng, 0, 1)) s.push_back(q);
    if (s.empty()) s.push_back(uniform(rng, 0, n - 1));
    m.acc_sets.push_back(s);
  }
  std::sort(m.acc_sets.begin(), m.acc_sets.end());
  m.acc_sets.erase(std::unique(m.acc_sets.begin(), m.acc_sets.end()), m.acc_sets.end());
  return m;
}

using BoolMatrix = std::vector<std::vector<char>>;

inline void or_row(std::vector<char>& dst, const std::vector<char>& src) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] |= src[j];
}

inline BoolMatrix compose(const BoolMatrix& x, const BoolMatrix& y) {
  std::size_t n = x.size();
  BoolMatrix z(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (x[i][j]) or_row(z[i], y[j]);
  return z;
}

/// Reflexive-transitive closure (Warshall, row at a time).
inline BoolMatrix star(BoolMatrix x) {
  std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) x[i][i] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (x[i][k]) or_row(x[i], x[k]);
  return x;
}

/// Büchi membership through transition matrices of the loop word: some state
/// reachable at a loop boundary returns to itself after reading v^j while visiting F.
inline bool oracle_accepts(const BuchiAutomaton& a, const LassoWord<LetterId>& w) {
  std::size_t n = a.num_states();
  std::vector<char> cur(n, 0);
  for (auto q : a.initial) cur[static_cast<std::size_t>(q)] = 1;
  auto step = [&](const std::vector<char>& s, LetterId c) {
    std::vector<char> out(n, 0);
    for (auto& t : a.transitions)
      if (t.letter == c && s[static_cast<std::size_t>(t.src)]) out[static_cast<std::size_t>(t.dst)] = 1;
    return out;
  };
  for (auto c : w.prefix()) cur = step(cur, c);
  // plain[i][j]: i -> j reading v; visit[i][j]: same, passing through F after the start.
  BoolMatrix plain(n, std::vector<char>(n, 0)), visit = plain;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<char> no(n, 0), yes(n, 0);
    no[s] = 1;
    for (auto c : w.loop()) {
      std::vector<char> n2(n, 0), y2(n, 0);
      for (auto& t : a.transitions) {
        if (t.letter != c) continue;
        auto src = static_cast<std::size_t>(t.src), dst = static_cast<std::size_t>(t.dst);
        bool f = a.is_accepting(t.dst);
        if (no[src]) (f ? y2 : n2)[dst] = 1;
        if (yes[src]) y2[dst] = 1;
      }
      no = n2;
      yes = y2;
    }
    for (std::size_t t = 0; t < n; ++t) {
      plain[s][t] = no[t] || yes[t];
      visit[s][t] = yes[t];
    }
  }
  auto ps = star(plain);
  auto cyc = compose(compose(ps, visit), ps);
  for (std::size_t i = 0; i < n; ++i)
    if (cur[i])
      for (std::size_t j = 0; j < n; ++j)
        if (ps[i][j] && cyc[j][j]) return true;
  return false;
}

/// Muller membership: some reachable strongly connected piece of the (state, loop position)
/// graph restricted to S ∈ 𝓕 projects onto all of S.
inline bool oracle_accepts(const MullerAutomaton& a, const LassoWord<LetterId>& w) {
  std::size_t n = a.num_states(), L = w.loop_size(), V = n * L;
  std::vector<char> cur(n, 0);
  for (auto q : a.initial) cur[static_cast<std::size_t>(q)] = 1;
  for (auto c : w.prefix()) {
    std::vector<char> out(n, 0);
    for (auto& t : a.transitions)
      if (t.letter == c && cur[static_cast<std::size_t>(t.src)]) out[static_cast<std::size_t>(t.dst)] = 1;
    cur = out;
  }
  // Vertex q*L+i: in state q before reading loop letter i.
  BoolMatrix edge(V, std::vector<char>(V, 0));
  for (auto& t : a.transitions)
    for (std::size_t i = 0; i < L; ++i)
      if (w.loop()[i] == t.letter) edge[static_cast<std::size_t>(t.src) * L + i][static_cast<std::size_t>(t.dst) * L + (i + 1) % L] = 1;
  auto reach = star(edge);
  for (auto& S : a.acc_sets) {
    std::vector<char> in(n, 0);
    for (auto q : S) in[static_cast<std::size_t>(q)] = 1;
    BoolMatrix sub(V, std::vector<char>(V, 0));
    for (std::size_t u = 0; u < V; ++u)
      for (std::size_t v = 0; v < V; ++v)
        if (edge[u][v] && in[u / L] && in[v / L]) sub[u][v] = 1;
    auto plus = compose(sub, star(sub));
    for (std::size_t u = 0; u < V; ++u) {
      if (!plus[u][u]) continue;
      bool start = false;
      for (std::size_t q = 0; q < n; ++q)
        if (cur[q] && reach[q * L][u]) start = true;
      if (!start) continue;
      std::vector<char> seen(n, 0);
      for (std::size_t v = 0; v < V; ++v)
        if (plus[u][v] && plus[v][u]) seen[v / L] = 1;
      bool all = true;
      for (auto q : S) all = all && seen[static_cast<std::size_t>(q)];
      if (all) return true;
    }
  }
  return false;
}

/// Every lasso with prefix ≤ max_p and loop length in [1, max_q] over k letters.
inline std::vector<LassoWord<LetterId>> all_lassos(int k, std::size_t max_p, std::size_t max_q) {
  std::vector<std::vector<std::vector<LetterId>>> by_len{{{}}};
  for (std::size_t len = 1; len <= std::max(max_p, max_q); ++len) {
    std::vector<std::vector<LetterId>> next;
    for (auto& w : by_len.back())
      for (int c = 0; c < k; ++c) {
        auto x = w;
        x.push_back(c);
        next.push_back(x);
      }
    by_len.push_back(next);
  }
  std::vector<LassoWord<LetterId>> out;
  for (std::size_t p = 0; p <= max_p; ++p)
    for (std::size_t q = 1; q <= max_q; ++q)
      for (auto& u : by_len[p])
        for (auto& v : by_len[q]) out.emplace_back(u, v);
  return out;
}

/// True when the two runs use different transitions somewhere on `w`.
inline bool runs_differ(const LassoRun& x, const LassoRun& y, const LassoWord<LetterId>& w) {
  auto n = w.prefix_size() + 2 * w.loop_size();
  auto at = [](const LassoRun& r, std::size_t i) { return i < r.prefix.size() ? r.prefix[i] : r.loop[(i - r.prefix.size()) % r.loop.size()]; };
  auto m = std::max(n, std::max(x.prefix.size(), y.prefix.size()) + std::lcm(x.loop.size(), y.loop.size()));
  for (std::size_t i = 0; i < m; ++i)
    if (at(x, i) != at(y, i)) return true;
  return false;
}

}  // namespace qwal::testing
