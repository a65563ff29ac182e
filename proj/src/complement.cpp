#include <functional>
#include <map>

#include "qwal/buchi.hpp"
#include "qwal/errors.hpp"

namespace qwal {

// Level rankings with the Miyano–Hayashi breakpoint set. A state key is the ranking
// (-1 for untracked states) followed by the breakpoint flags.
BuchiAutomaton complement(const BuchiAutomaton& a, std::size_t cap, std::size_t max_states) {
  const std::size_t n = a.num_states();
  if (n > cap)
    throw ResourceError("complement: automaton has " + std::to_string(n) + " states, cap is " + std::to_string(cap));
  const int max_rank = static_cast<int>(2 * n);
  std::vector<std::vector<std::vector<StateId>>> succ(n, std::vector<std::vector<StateId>>(a.alphabet.size()));
  for (auto& t : a.transitions) succ[static_cast<std::size_t>(t.src)][static_cast<std::size_t>(t.letter)].push_back(t.dst);

  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  using Key = std::vector<int>;
  std::map<Key, StateId> ids;
  std::vector<Key> work;
  auto id = [&](const Key& k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    if (ids.size() >= max_states) throw ResourceError("complement: rank construction exceeded " + std::to_string(max_states) + " states");
    bool empty_o = true;
    for (std::size_t q = 0; q < n; ++q) empty_o &= k[n + q] == 0;
    StateId s = out.add_state("r" + std::to_string(ids.size()), empty_o);
    ids.emplace(k, s);
    work.push_back(k);
    return s;
  };
  Key init(2 * n, 0);
  for (std::size_t q = 0; q < n; ++q) init[q] = -1;
  for (auto q : a.initial) init[static_cast<std::size_t>(q)] = max_rank;
  out.initial.push_back(id(init));

  while (!work.empty()) {
    Key k = work.back();
    work.pop_back();
    StateId src = ids.at(k);
    bool o_empty = true;
    for (std::size_t q = 0; q < n; ++q) o_empty &= k[n + q] == 0;
    for (std::size_t l = 0; l < a.alphabet.size(); ++l) {
      std::vector<int> bound(n, -1);
      std::vector<char> from_o(n, 0);
      for (std::size_t q = 0; q < n; ++q) {
        if (k[q] < 0) continue;
        for (auto d : succ[q][l]) {
          auto ds = static_cast<std::size_t>(d);
          bound[ds] = bound[ds] < 0 ? k[q] : std::min(bound[ds], k[q]);
          if (k[n + q]) from_o[ds] = 1;
        }
      }
      std::vector<std::size_t> tracked;
      for (std::size_t q = 0; q < n; ++q)
        if (bound[q] >= 0) tracked.push_back(q);
      // Enumerate every ranking below the bounds with even ranks on accepting states.
      Key next(2 * n, 0);
      for (std::size_t q = 0; q < n; ++q) next[q] = -1;
      std::vector<int> choice(tracked.size(), 0);
      auto valid_rank = [&](std::size_t q, int r) { return !(a.accepting[q] && (r % 2 == 1)); };
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == tracked.size()) {
          Key nk = next;
          for (std::size_t q = 0; q < n; ++q) {
            bool even = nk[q] >= 0 && nk[q] % 2 == 0;
            nk[n + q] = even && (o_empty || from_o[q]) ? 1 : 0;
          }
          out.add_transition(src, static_cast<LetterId>(l), id(nk));
          return;
        }
        std::size_t q = tracked[i];
        for (int r = 0; r <= bound[q]; ++r) {
          if (!valid_rank(q, r)) continue;
          next[q] = r;
          rec(i + 1);
        }
        next[q] = -1;
      };
      rec(0);
    }
  }
  return trim(out);
}

}  // namespace qwal
