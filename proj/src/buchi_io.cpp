#include "qwal/buchi_io.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "qwal/errors.hpp"

namespace qwal {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string trim_ws(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

namespace {

std::vector<std::vector<std::string>> parse_accsets(const std::string& value, std::size_t line_no) {
  std::vector<std::vector<std::string>> sets;
  std::size_t i = 0;
  while (i < value.size()) {
    if (std::isspace(static_cast<unsigned char>(value[i]))) {
      ++i;
      continue;
    }
    if (value[i] != '{') throw ParseError("line " + std::to_string(line_no) + ": expected '{' in accsets");
    auto close = value.find('}', i);
    if (close == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": unterminated '{'");
    sets.push_back(split_ws(std::string_view(value).substr(i + 1, close - i - 1)));
    i = close + 1;
  }
  return sets;
}

}  // namespace

AutomatonText parse_automaton_text(std::string_view text) {
  AutomatonText t;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto c = line.find(';'); c != std::string_view::npos) line = line.substr(0, c);
    std::string l = trim_ws(line);
    if (l.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto colon = l.find(':');
    if (colon == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected 'key: value'");
    std::string key = trim_ws(std::string_view(l).substr(0, colon));
    std::string value = trim_ws(std::string_view(l).substr(colon + 1));
    auto append = [&](std::vector<std::string>& v) {
      for (auto& s : split_ws(value)) v.push_back(s);
    };
    if (key == "alphabet") append(t.alphabet);
    else if (key == "states") append(t.states);
    else if (key == "initial") append(t.initial);
    else if (key == "accepting") {
      if (!t.accepting) t.accepting.emplace();
      append(*t.accepting);
    } else if (key == "accsets") {
      if (!t.accsets) t.accsets.emplace();
      for (auto& s : parse_accsets(value, line_no)) t.accsets->push_back(s);
    } else if (key == "trans") {
      auto paren = value.find('(');
      std::string head = paren == std::string::npos ? value : value.substr(0, paren);
      auto parts = split_ws(head);
      if (parts.size() != 3) throw ParseError("line " + std::to_string(line_no) + ": expected 'trans: src letter dst [weight]'");
      AutomatonText::Line tl{parts[0], parts[1], parts[2], std::nullopt, line_no};
      if (paren != std::string::npos) tl.weight = trim_ws(std::string_view(value).substr(paren));
      t.trans.push_back(std::move(tl));
    } else {
      if (t.headers.count(key)) throw ParseError("line " + std::to_string(line_no) + ": duplicate header '" + key + "'");
      t.headers[key] = value;
    }
    if (end == text.size()) break;
  }
  if (t.accepting && t.accsets) throw ParseError("automaton has both 'accepting:' and 'accsets:'");
  return t;
}

void build_transition_system(const AutomatonText& t, TransitionSystem& out, std::vector<std::optional<std::string>>* weights) {
  out.alphabet = Alphabet(t.alphabet);
  std::unordered_map<std::string, StateId> ids;
  for (auto& s : t.states) {
    if (ids.count(s)) throw ParseError("duplicate state '" + s + "'");
    ids[s] = out.add_state(s);
  }
  auto state = [&](const std::string& s, std::size_t line_no) {
    auto it = ids.find(s);
    if (it == ids.end()) throw ParseError("line " + std::to_string(line_no) + ": unknown state '" + s + "'");
    return it->second;
  };
  for (auto& s : t.initial) out.initial.push_back(state(s, 0));
  for (auto& l : t.trans) {
    auto letter = out.alphabet.find(l.letter);
    if (!letter) throw ParseError("line " + std::to_string(l.line_no) + ": unknown letter '" + l.letter + "'");
    out.add_transition(state(l.src, l.line_no), *letter, state(l.dst, l.line_no));
    if (weights) weights->push_back(l.weight);
  }
}

BuchiAutomaton parse_buchi(std::string_view text) {
  AutomatonText t = parse_automaton_text(text);
  if (t.accsets) throw ParseError("expected a Büchi automaton ('accepting:'), found 'accsets:'");
  BuchiAutomaton a;
  build_transition_system(t, a, nullptr);
  a.accepting.assign(a.num_states(), 0);
  if (t.accepting)
    for (auto& s : *t.accepting) {
      auto it = std::find(a.states.begin(), a.states.end(), s);
      if (it == a.states.end()) throw ParseError("unknown accepting state '" + s + "'");
      a.accepting[static_cast<std::size_t>(it - a.states.begin())] = 1;
    }
  for (auto& l : t.trans)
    if (l.weight) throw ParseError("line " + std::to_string(l.line_no) + ": weight on an unweighted automaton");
  return a;
}

MullerAutomaton parse_muller(std::string_view text) {
  AutomatonText t = parse_automaton_text(text);
  if (t.accepting) throw ParseError("expected a Muller automaton ('accsets:'), found 'accepting:'");
  MullerAutomaton a;
  build_transition_system(t, a, nullptr);
  if (t.accsets)
    for (auto& set : *t.accsets) {
      std::vector<StateId> s;
      for (auto& name : set) {
        auto it = std::find(a.states.begin(), a.states.end(), name);
        if (it == a.states.end()) throw ParseError("unknown state '" + name + "' in accsets");
        s.push_back(static_cast<StateId>(it - a.states.begin()));
      }
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      a.acc_sets.push_back(std::move(s));
    }
  for (auto& l : t.trans)
    if (l.weight) throw ParseError("line " + std::to_string(l.line_no) + ": weight on an unweighted automaton");
  return a;
}

std::string format_transition_system(const TransitionSystem& a, const std::vector<std::string>& headers,
                                     const std::string& acceptance_line, const std::vector<std::string>* weights) {
  std::string out;
  for (auto& h : headers) out += h + "\n";
  out += "alphabet:";
  for (auto& l : a.alphabet.names()) out += " " + l;
  out += "\nstates:";
  for (auto& s : a.states) out += " " + s;
  out += "\ninitial:";
  for (auto q : a.initial) out += " " + a.states[static_cast<std::size_t>(q)];
  out += "\n" + acceptance_line + "\n";
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    auto& t = a.transitions[i];
    out += "trans: " + a.states[static_cast<std::size_t>(t.src)] + " " + a.alphabet.name(t.letter) + " " +
           a.states[static_cast<std::size_t>(t.dst)];
    if (weights) out += " " + (*weights)[i];
    out += "\n";
  }
  return out;
}

std::string format_buchi(const BuchiAutomaton& a) {
  std::string acc = "accepting:";
  for (std::size_t q = 0; q < a.num_states(); ++q)
    if (a.accepting[q]) acc += " " + a.states[q];
  return format_transition_system(a, {}, acc);
}

std::string format_muller(const MullerAutomaton& a) {
  std::string acc = "accsets:";
  for (auto& s : a.acc_sets) {
    acc += " {";
    for (std::size_t i = 0; i < s.size(); ++i) acc += (i ? " " : "") + a.states[static_cast<std::size_t>(s[i])];
    acc += "}";
  }
  return format_transition_system(a, {}, acc);
}

}  // namespace qwal
