#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qwal/omega.hpp"

namespace qwal::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random lasso over letters 0..k-1 with prefix ≤ max_p and loop in [1, max_q].
inline LassoWord<int> random_lasso(Rng& rng, int k, int max_p = 3, int max_q = 4) {
  std::vector<int> p(static_cast<std::size_t>(uniform(rng, 0, max_p))), q(static_cast<std::size_t>(uniform(rng, 1, max_q)));
  for (auto& x : p) x = uniform(rng, 0, k - 1);
  for (auto& x : q) x = uniform(rng, 0, k - 1);
  return LassoWord<int>(std::move(p), std::move(q));
}

/// Random partial word over {0..k-1}; each position undefined with probability 1/2.
inline PartialLassoValue<int> random_partial(Rng& rng, int k, int max_p = 3, int max_q = 4) {
  auto w = random_lasso(rng, k, max_p, max_q);
  auto conv = [&](const std::vector<int>& v) {
    std::vector<std::optional<int>> out;
    for (int x : v) out.push_back(uniform(rng, 0, 1) ? std::optional<int>(x) : std::nullopt);
    return out;
  };
  return PartialLassoValue<int>::defined(LassoWord<std::optional<int>>(conv(w.prefix()), conv(w.loop())));
}

}  // namespace qwal::testing
