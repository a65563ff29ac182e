#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qwal/wba.hpp"

namespace qwal {

/// Automaton text plus `structure: ratio|disc|energy<n>`, an optional `one: (w)` header and a
/// weight after every transition:
///
///   structure: ratio
///   alphabet: a
///   states: q0
///   initial: q0
///   accepting: q0
///   trans: q0 a q0 (1,2)
struct WeightedText {
  StructurePtr structure;
  std::optional<Weight> one;
};

/// `override_structure` replaces the header's structure (the header may then be absent).
WeightedBuchiAutomaton parse_wba(std::string_view text, StructurePtr override_structure = nullptr,
                                 WeightedText* headers = nullptr);
WeightedMullerAutomaton parse_wma(std::string_view text, StructurePtr override_structure = nullptr,
                                  WeightedText* headers = nullptr);

std::string format_wba(const WeightedBuchiAutomaton& a, const std::optional<Weight>& one = std::nullopt);
std::string format_wma(const WeightedMullerAutomaton& a, const std::optional<Weight>& one = std::nullopt);

/// Triple file: `sigma:` letters, one `gamma: <letter> <h-image> <g-weight>` line per Γ-letter,
/// an optional `structure:` header, then the language automaton over Γ.
NivatTriple parse_triple(std::string_view text, WeightedText* headers = nullptr);
std::string format_triple(const NivatTriple& t, const StructurePtr& structure = nullptr);

/// True when the text has an `accsets:` line.
bool is_muller_text(std::string_view text);

}  // namespace qwal
