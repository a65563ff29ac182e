#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qwal/alphabet.hpp"
#include "qwal/graph.hpp"
#include "qwal/omega.hpp"

namespace qwal {

struct Transition {
  StateId src;
  LetterId letter;
  StateId dst;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// States, initial states and labelled transitions; shared by Büchi and Muller acceptors.
struct TransitionSystem {
  Alphabet alphabet;
  std::vector<std::string> states;
  std::vector<StateId> initial;
  std::vector<Transition> transitions;

  std::size_t num_states() const { return states.size(); }
  StateId add_state(const std::string& name);
  int add_transition(StateId src, LetterId letter, StateId dst);
  /// Throws InputError when an id is out of range.
  void validate() const;
  /// True when ≤ 1 initial state and at most one transition per (state, letter).
  bool is_deterministic() const;
};

class BuchiAutomaton : public TransitionSystem {
 public:
  std::vector<char> accepting;

  StateId add_state(const std::string& name, bool is_accepting = false);
  bool is_accepting(StateId q) const { return accepting.at(static_cast<std::size_t>(q)) != 0; }
  void validate() const;
};

class MullerAutomaton : public TransitionSystem {
 public:
  /// Each member sorted and duplicate-free.
  std::vector<std::vector<StateId>> acc_sets;

  StateId add_state(const std::string& name) { return TransitionSystem::add_state(name); }
  void validate() const;
};

/// Transition indices of a lasso run; shape-aligned to the word it reads.
struct LassoRun {
  std::vector<int> prefix;
  std::vector<int> loop;
};

/// Positionwise check: consecutive matching transitions from an initial state, labels reading `w`.
bool run_reads(const TransitionSystem& a, const LassoRun& run, const LassoWord<LetterId>& w);
/// run_reads and the loop visits an accepting state.
bool is_accepting_run(const BuchiAutomaton& a, const LassoRun& run, const LassoWord<LetterId>& w);
/// run_reads and the canonical loop's state set belongs to 𝓕.
bool is_accepting_run(const MullerAutomaton& a, const LassoRun& run, const LassoWord<LetterId>& w);
/// States visited by the loop (targets of loop transitions), sorted.
std::vector<StateId> loop_states(const TransitionSystem& a, const LassoRun& run);
/// Letters read by a run.
LassoWord<LetterId> run_word(const TransitionSystem& a, const LassoRun& run);

/// Reachable part of (states × word positions). Vertex = (state, position); position p+q-1 wraps to p.
struct ProductGraph {
  Digraph graph;
  std::vector<StateId> state;
  std::vector<int> position;
  std::vector<int> edge_transition;
  std::vector<int> initial;
  std::size_t prefix_len = 0;
  std::size_t loop_len = 1;
};

/// InputError when `w` uses letters outside the alphabet.
ProductGraph build_product(const TransitionSystem& a, const LassoWord<LetterId>& w);
LassoRun to_run(const ProductGraph& pg, const EdgeLasso& lasso);

std::optional<LassoRun> accepts(const BuchiAutomaton& a, const LassoWord<LetterId>& w);
std::optional<LassoRun> accepts(const MullerAutomaton& a, const LassoWord<LetterId>& w);

/// nullopt when ℒ(a) is empty, otherwise a witness lasso in ℒ(a).
std::optional<LassoWord<LetterId>> is_empty(const BuchiAutomaton& a);

/// Two-phase product; ℒ = ℒ(a) ∩ ℒ(b). Alphabets must be equal.
BuchiAutomaton product_intersection(const BuchiAutomaton& a, const BuchiAutomaton& b);

/// Default state cap of rank-based complementation.
inline constexpr std::size_t kDefaultComplementCap = 12;

/// Rank-based complementation (max rank 2|Q|). ResourceError when |Q| exceeds `cap`
/// or the construction exceeds `max_states`.
BuchiAutomaton complement(const BuchiAutomaton& a, std::size_t cap = kDefaultComplementCap,
                          std::size_t max_states = 200000);

struct AmbiguityWitness {
  LassoWord<LetterId> word;
  LassoRun first;
  LassoRun second;
};

/// nullopt when every word has at most one accepting run.
std::optional<AmbiguityWitness> check_ambiguity(const BuchiAutomaton& a);

/// 𝓕 = strongly connected state sets meeting F. ResourceError for components above `max_component`.
MullerAutomaton buchi_to_muller(const BuchiAutomaton& a, std::size_t max_component = 16);
/// Guess the final set S, then cycle through S in a fixed order; accepting at each completed round.
BuchiAutomaton muller_to_buchi(const MullerAutomaton& a);

/// Keeps states reachable from I that can reach an accepting cycle.
BuchiAutomaton trim(const BuchiAutomaton& a);

/// Directed graph of states and transitions (edge i = transition i).
Digraph state_graph(const TransitionSystem& a);

}  // namespace qwal
