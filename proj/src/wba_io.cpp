#include "qwal/wba_io.hpp"

#include <algorithm>

#include "qwal/buchi_io.hpp"
#include "qwal/errors.hpp"

namespace qwal {

namespace {

WeightedText read_headers(const AutomatonText& t, StructurePtr override_structure) {
  WeightedText w;
  for (auto& [key, value] : t.headers)
    if (key != "structure" && key != "one") throw ParseError("unknown header '" + key + "'");
  if (override_structure) w.structure = std::move(override_structure);
  else if (auto it = t.headers.find("structure"); it != t.headers.end()) {
    try {
      w.structure = make_structure(it->second);
    } catch (const InputError& e) {
      throw ParseError(e.what());
    }
  } else throw ParseError("missing 'structure:' header");
  if (auto it = t.headers.find("one"); it != t.headers.end()) {
    w.one = Weight::parse(it->second);
    w.structure->validate_one(*w.one);
  }
  return w;
}

std::vector<Weight> read_weights(const std::vector<std::optional<std::string>>& raw, const AutomatonText& t,
                                 const ValuationStructure& s) {
  std::vector<Weight> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!raw[i]) throw ParseError("line " + std::to_string(t.trans[i].line_no) + ": transition without a weight");
    out.push_back(Weight::parse(*raw[i]));
    s.validate(out.back());
  }
  return out;
}

std::vector<std::string> weight_strings(const std::vector<Weight>& w) {
  std::vector<std::string> out;
  for (auto& x : w) out.push_back(x.str());
  return out;
}

std::vector<std::string> header_lines(const StructurePtr& s, const std::optional<Weight>& one) {
  std::vector<std::string> h;
  if (s) h.push_back("structure: " + s->name());
  if (one) h.push_back("one: " + one->str());
  return h;
}

std::string buchi_acceptance(const BuchiAutomaton& a) {
  std::string acc = "accepting:";
  for (std::size_t q = 0; q < a.num_states(); ++q)
    if (a.accepting[q]) acc += " " + a.states[q];
  return acc;
}

std::string muller_acceptance(const MullerAutomaton& a) {
  std::string acc = "accsets:";
  for (auto& s : a.acc_sets) {
    acc += " {";
    for (std::size_t i = 0; i < s.size(); ++i) acc += (i ? " " : "") + a.states[static_cast<std::size_t>(s[i])];
    acc += "}";
  }
  return acc;
}

}  // namespace

bool is_muller_text(std::string_view text) { return parse_automaton_text(text).accsets.has_value(); }

WeightedBuchiAutomaton parse_wba(std::string_view text, StructurePtr override_structure, WeightedText* headers) {
  AutomatonText t = parse_automaton_text(text);
  if (t.accsets) throw ParseError("expected a Büchi automaton ('accepting:'), found 'accsets:'");
  WeightedText h = read_headers(t, std::move(override_structure));
  WeightedBuchiAutomaton a;
  std::vector<std::optional<std::string>> raw;
  build_transition_system(t, a.automaton, &raw);
  a.automaton.accepting.assign(a.automaton.num_states(), 0);
  if (t.accepting)
    for (auto& s : *t.accepting) {
      auto it = std::find(a.automaton.states.begin(), a.automaton.states.end(), s);
      if (it == a.automaton.states.end()) throw ParseError("unknown accepting state '" + s + "'");
      a.automaton.accepting[static_cast<std::size_t>(it - a.automaton.states.begin())] = 1;
    }
  a.structure = h.structure;
  a.weights = read_weights(raw, t, *a.structure);
  a.validate();
  if (headers) *headers = h;
  return a;
}

WeightedMullerAutomaton parse_wma(std::string_view text, StructurePtr override_structure, WeightedText* headers) {
  AutomatonText t = parse_automaton_text(text);
  if (t.accepting) throw ParseError("expected a Muller automaton ('accsets:'), found 'accepting:'");
  WeightedText h = read_headers(t, std::move(override_structure));
  WeightedMullerAutomaton m;
  std::vector<std::optional<std::string>> raw;
  build_transition_system(t, m.automaton, &raw);
  if (t.accsets)
    for (auto& set : *t.accsets) {
      std::vector<StateId> s;
      for (auto& name : set) {
        auto it = std::find(m.automaton.states.begin(), m.automaton.states.end(), name);
        if (it == m.automaton.states.end()) throw ParseError("unknown state '" + name + "' in accsets");
        s.push_back(static_cast<StateId>(it - m.automaton.states.begin()));
      }
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      m.automaton.acc_sets.push_back(std::move(s));
    }
  m.structure = h.structure;
  m.weights = read_weights(raw, t, *m.structure);
  m.validate();
  if (headers) *headers = h;
  return m;
}

std::string format_wba(const WeightedBuchiAutomaton& a, const std::optional<Weight>& one) {
  auto w = weight_strings(a.weights);
  return format_transition_system(a.automaton, header_lines(a.structure, one), buchi_acceptance(a.automaton), &w);
}

std::string format_wma(const WeightedMullerAutomaton& a, const std::optional<Weight>& one) {
  auto w = weight_strings(a.weights);
  return format_transition_system(a.automaton, header_lines(a.structure, one), muller_acceptance(a.automaton), &w);
}

NivatTriple parse_triple(std::string_view text, WeightedText* headers) {
  // `gamma:` and `sigma:` lines are pulled out before the automaton parser sees the text.
  std::string rest;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> gamma_lines;
  std::optional<std::vector<std::string>> sigma;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    std::string_view code = line.substr(0, line.find(';'));
    std::string l = trim_ws(code);
    if (l.rfind("gamma:", 0) == 0) {
      auto parts = l.substr(6);
      auto paren = parts.find('(');
      if (paren == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": 'gamma:' needs a weight");
      auto names = split_ws(parts.substr(0, paren));
      if (names.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": expected 'gamma: letter image (weight)'");
      names.push_back(trim_ws(parts.substr(paren)));
      gamma_lines.push_back({names, line_no});
      rest += "\n";
    } else if (l.rfind("sigma:", 0) == 0) {
      sigma = split_ws(l.substr(6));
      rest += "\n";
    } else {
      rest += std::string(line) + "\n";
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  if (!sigma) throw ParseError("missing 'sigma:' line");
  AutomatonText t = parse_automaton_text(rest);
  if (t.accsets) throw ParseError("triple language must be a Büchi automaton");
  for (auto& [key, value] : t.headers)
    if (key != "structure" && key != "one") throw ParseError("unknown header '" + key + "'");
  NivatTriple out;
  out.sigma = Alphabet(*sigma);
  build_transition_system(t, out.language, nullptr);
  out.gamma = out.language.alphabet;
  out.h.assign(out.gamma.size(), -1);
  out.g.assign(out.gamma.size(), Weight{});
  std::vector<char> seen(out.gamma.size(), 0);
  for (auto& [parts, ln] : gamma_lines) {
    auto letter = out.gamma.find(parts[0]);
    if (!letter) throw ParseError("line " + std::to_string(ln) + ": '" + parts[0] + "' is not in the automaton alphabet");
    auto image = out.sigma.find(parts[1]);
    if (!image) throw ParseError("line " + std::to_string(ln) + ": '" + parts[1] + "' is not in sigma");
    auto i = static_cast<std::size_t>(*letter);
    if (seen[i]) throw ParseError("line " + std::to_string(ln) + ": duplicate gamma letter '" + parts[0] + "'");
    seen[i] = 1;
    out.h[i] = *image;
    out.g[i] = Weight::parse(parts[2]);
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ParseError("no 'gamma:' line for '" + out.gamma.name(static_cast<LetterId>(i)) + "'");
  out.language.accepting.assign(out.language.num_states(), 0);
  if (t.accepting)
    for (auto& s : *t.accepting) {
      auto it = std::find(out.language.states.begin(), out.language.states.end(), s);
      if (it == out.language.states.end()) throw ParseError("unknown accepting state '" + s + "'");
      out.language.accepting[static_cast<std::size_t>(it - out.language.states.begin())] = 1;
    }
  for (auto& l : t.trans)
    if (l.weight) throw ParseError("line " + std::to_string(l.line_no) + ": weights belong on 'gamma:' lines");
  if (headers) {
    *headers = WeightedText{};
    if (t.headers.count("structure")) *headers = read_headers(t, nullptr);
  }
  out.validate();
  if (headers && headers->structure)
    for (auto& w : out.g) headers->structure->validate(w);
  return out;
}

std::string format_triple(const NivatTriple& t, const StructurePtr& structure) {
  std::vector<std::string> head;
  if (structure) head.push_back("structure: " + structure->name());
  std::string sig = "sigma:";
  for (auto& s : t.sigma.names()) sig += " " + s;
  head.push_back(sig);
  for (std::size_t i = 0; i < t.gamma.size(); ++i)
    head.push_back("gamma: " + t.gamma.name(static_cast<LetterId>(i)) + " " + t.sigma.name(t.h[i]) + " " + t.g[i].str());
  return format_transition_system(t.language, head, buchi_acceptance(t.language));
}

}  // namespace qwal
