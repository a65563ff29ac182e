#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwal/buchi.hpp"

namespace qwal {

/// Line-oriented automaton text, before interpretation.
///
///   alphabet: a b
///   states: q0 q1
///   initial: q0
///   accepting: q1            (Büchi)   or   accsets: {q0 q1} {q1}   (Muller)
///   trans: q0 a q1 [weight]
///
/// Any other `key: value` line is kept as a header. `;` starts a comment.
struct AutomatonText {
  struct Line {
    std::string src, letter, dst;
    std::optional<std::string> weight;
    std::size_t line_no = 0;
  };
  std::map<std::string, std::string> headers;
  std::vector<std::string> alphabet, states, initial;
  std::optional<std::vector<std::string>> accepting;
  std::optional<std::vector<std::vector<std::string>>> accsets;
  std::vector<Line> trans;
};

AutomatonText parse_automaton_text(std::string_view text);

/// Builds the transition system part; `weights` receives the raw weight token per transition.
void build_transition_system(const AutomatonText& t, TransitionSystem& out, std::vector<std::optional<std::string>>* weights = nullptr);

BuchiAutomaton parse_buchi(std::string_view text);
MullerAutomaton parse_muller(std::string_view text);

std::string format_buchi(const BuchiAutomaton& a);
std::string format_muller(const MullerAutomaton& a);

/// Shared writer: `extra` lines go after `alphabet:`; `weight(i)` suffixes transition i when non-empty.
std::string format_transition_system(const TransitionSystem& a, const std::vector<std::string>& headers,
                                     const std::string& acceptance_line,
                                     const std::vector<std::string>* weights = nullptr);

/// Splits on whitespace.
std::vector<std::string> split_ws(std::string_view s);
std::string trim_ws(std::string_view s);

}  // namespace qwal
