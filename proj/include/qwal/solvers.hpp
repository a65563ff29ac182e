#pragma once

#include <optional>
#include <vector>

#include "qwal/graph.hpp"
#include "qwal/numeric.hpp"
#include "qwal/valuation.hpp"

namespace qwal {

/// Product graph of an automaton and a lasso word with the transition weight on every edge.
/// A run is an infinite path from `initial` that visits `accepting` infinitely often.
struct SolverGraph {
  Digraph graph;
  std::vector<int> initial;
  VertexMask accepting;
  std::vector<Weight> weight;
};

/// sup over runs of the limsup reward/cost ratio; -inf when there is no run.
ExtReal solve_ratio(const SolverGraph& g);

/// inf over runs of the discounted sum; inf when there is no run. Exact.
ExtReal solve_disc(const SolverGraph& g);

enum class EnergyVerdict { Zero, One, Unknown };

struct EnergyResult {
  EnergyVerdict verdict = EnergyVerdict::Zero;
  /// Edge lasso of a run whose energy never drops below 0 (set for One).
  std::optional<EdgeLasso> witness;
};

/// Searches runs whose componentwise energy stays ≥ 0, with energies capped at
/// bound·W·|V| (W the largest absolute weight component). Capping only loses energy, so
/// a run found is a real witness. Zero is reported only when the cap was never reached.
EnergyResult solve_energy(const SolverGraph& g, std::size_t dim, int bound, std::size_t max_configs = 2000000);

}  // namespace qwal
