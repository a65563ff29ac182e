#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qwal/buchi.hpp"
#include "qwal/solvers.hpp"
#include "qwal/valuation.hpp"

namespace qwal {

/// Büchi automaton with one weight per transition, read in a valuation structure.
struct WeightedBuchiAutomaton {
  BuchiAutomaton automaton;
  std::vector<Weight> weights;
  StructurePtr structure;
  /// Every accepting run on a word carries the same weight sequence. Set by recompose
  /// when the language was verified h-unambiguous; behavior then needs only one run.
  bool word_determined = false;

  const Alphabet& alphabet() const { return automaton.alphabet; }
  /// InputError unless weights match the transitions and belong to the structure.
  void validate() const;
};

struct WeightedMullerAutomaton {
  MullerAutomaton automaton;
  std::vector<Weight> weights;
  StructurePtr structure;

  const Alphabet& alphabet() const { return automaton.alphabet; }
  void validate() const;
};

/// val of the run's weight sequence. InputError when the run is not a run of `a`.
ExtReal run_weight(const WeightedBuchiAutomaton& a, const LassoRun& run);
ExtReal run_weight(const WeightedMullerAutomaton& a, const LassoRun& run);

struct BehaviorOptions {
  /// Energy search bound B.
  int energy_bound = 4;
  /// Above this many states the ambiguity check is skipped and the solvers run directly.
  std::size_t ambiguity_state_limit = 2000;
};

struct BehaviorResult {
  ExtReal value;
  /// Energy search exhausted its bound without a verdict.
  bool unknown = false;
  int bound = 0;
  /// A run realizing the value when one was produced (unique run, energy witness).
  std::optional<LassoRun> witness;

  friend bool operator==(const BehaviorResult& a, const BehaviorResult& b) {
    return a.unknown == b.unknown && (a.unknown ? a.bound == b.bound : a.value == b.value);
  }
};

/// `p/q`, `inf`, `-inf`, `0`, `1` or `unknown(bound=B)`.
std::string format_behavior(const ValuationStructure& s, const BehaviorResult& r);

/// Evaluates [[A]] on lasso words; the ambiguity check runs once per automaton.
class BehaviorEvaluator {
 public:
  explicit BehaviorEvaluator(const WeightedBuchiAutomaton& a, BehaviorOptions opts = {});
  BehaviorResult operator()(const LassoWord<LetterId>& w) const;
  /// True when behavior takes the single-run path.
  bool single_run() const { return single_run_; }

 private:
  const WeightedBuchiAutomaton& a_;
  BehaviorOptions opts_;
  bool single_run_ = false;
};

BehaviorResult behavior(const WeightedBuchiAutomaton& a, const LassoWord<LetterId>& w, const BehaviorOptions& opts = {});

/// Product of `a` and `w` with transition weights on the edges.
SolverGraph solver_graph(const WeightedBuchiAutomaton& a, const ProductGraph& pg);

/// Γ, h: Γ→Σ, g: Γ→M and a Büchi automaton over Γ.
struct NivatTriple {
  Alphabet sigma;
  Alphabet gamma;
  std::vector<LetterId> h;
  std::vector<Weight> g;
  BuchiAutomaton language;

  void validate() const;
};

/// Γ = T (letters t0, t1, ...), h = label, g = wt, language transitions (p, t, q).
NivatTriple decompose(const WeightedBuchiAutomaton& a);

/// States (p, γ) with initial states I × {γ0}, γ0 the least letter of Γ by name; transition
/// ((p,γ), h(γ′), (p′,γ′)) of weight g(γ′) for every language transition (p, γ′, p′).
/// Only states reachable from the initial ones are built. An ambiguous language is
/// rejected with AmbiguityError when the monoid is not idempotent.
/// `h_unambiguous`, when known, is trusted; otherwise h_unambiguity_check runs on languages
/// of at most kHCheckStateLimit states. A positive answer marks the result word_determined.
WeightedBuchiAutomaton recompose(const NivatTriple& t, StructurePtr structure,
                                 const std::optional<Weight>& one = std::nullopt,
                                 std::optional<bool> h_unambiguous = std::nullopt);

inline constexpr std::size_t kHCheckStateLimit = 400;

struct HAmbiguityWitness {
  LassoWord<LetterId> word;    // over Σ
  LassoWord<LetterId> first;   // over Γ
  LassoWord<LetterId> second;  // over Γ, differs from `first`
};

/// nullopt iff at most one u ∈ ℒ maps to each Σ-word under h.
std::optional<HAmbiguityWitness> h_unambiguity_check(const NivatTriple& t);

/// Same transitions and weights; 𝓕 from buchi_to_muller.
WeightedMullerAutomaton weighted_buchi_to_muller(const WeightedBuchiAutomaton& a, std::size_t max_component = 16);
/// Decompose to a transition-labelled Muller language, convert it with muller_to_buchi, recompose.
WeightedBuchiAutomaton weighted_muller_to_buchi(const WeightedMullerAutomaton& m);

}  // namespace qwal
