#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qwal/buchi.hpp"

namespace qwal {

/// Complete DFA for the lasso encoding of an ω-regular language L:
/// it accepts u · â · v′ (first loop letter marked) iff u (a v′)^ω ∈ L.
///
/// Letters 0..n-1 are the base letters, n+a is the marked copy of a. Every
/// construction keeps the accepted set saturated (closed under changing the lasso
/// presentation of the same ω-word), so Boolean operations on the DFA are Boolean
/// operations on ω-languages.
class LassoDfa {
 public:
  int base_letters = 0;
  int initial = 0;
  std::vector<int> delta;  // num_states() * 2 * base_letters
  std::vector<char> accepting;

  int num_states() const { return static_cast<int>(accepting.size()); }
  int letters() const { return 2 * base_letters; }
  int next(int s, int letter) const { return delta[static_cast<std::size_t>(s) * static_cast<std::size_t>(letters()) + static_cast<std::size_t>(letter)]; }
  int marked(int a) const { return base_letters + a; }

  /// The empty language and Σ^ω over n base letters.
  static LassoDfa empty(int n);
  static LassoDfa universal(int n);

  /// Membership of u·v^ω.
  bool accepts(const LassoWord<LetterId>& w) const;
  /// Some member of the language, or nullopt.
  std::optional<LassoWord<LetterId>> witness() const;
  bool is_empty() const { return !witness().has_value(); }

  /// Canonical minimal DFA (unreachable states removed, Hopcroft refinement, BFS numbering).
  LassoDfa minimized() const;
};

/// Exact conversion of a Büchi automaton (transition profiles over its states).
LassoDfa lasso_dfa_from_buchi(const BuchiAutomaton& a, std::size_t max_states = 200000);

LassoDfa dfa_intersection(const LassoDfa& a, const LassoDfa& b, std::size_t max_states = SIZE_MAX);
LassoDfa dfa_union(const LassoDfa& a, const LassoDfa& b, std::size_t max_states = SIZE_MAX);
LassoDfa dfa_complement(const LassoDfa& a);

/// Inverse homomorphism: new letter c behaves like old letter f[c].
LassoDfa dfa_preimage(const LassoDfa& a, const std::vector<LetterId>& f);

/// Image under the letter map g (old letter -> new letter, new alphabet size `n_new`).
/// ResourceError above `max_states` result states.
LassoDfa dfa_image(const LassoDfa& a, const std::vector<LetterId>& g, int n_new, std::size_t max_states = SIZE_MAX);

/// A word in exactly one of the two languages, or nullopt when they are equal.
std::optional<LassoWord<LetterId>> dfa_difference_witness(const LassoDfa& a, const LassoDfa& b);

/// Büchi automaton for the language; states are named by `prefix` plus a counter.
BuchiAutomaton dfa_to_buchi(const LassoDfa& a, const Alphabet& alphabet);

}  // namespace qwal
