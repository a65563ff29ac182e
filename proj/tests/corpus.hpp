#pragma once

#include <string>
#include <vector>

#include "qwal/wba_io.hpp"

namespace qwal::testing {

struct CorpusEntry {
  std::string name;
  std::string text;
  bool unambiguous;
};

// Small weighted automata over every shipped structure. "last_b" members guess the last b
// (initial q1 covers words without b), which is nondeterministic but unambiguous.
inline const std::vector<CorpusEntry>& wba_corpus() {
  static const std::vector<CorpusEntry> corpus = {
      {"ratio_single",
       "structure: ratio\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,2)\n", true},
      {"ratio_two_loops",
       "structure: ratio\nalphabet: a\nstates: q\ninitial: q\naccepting: q\n"
       "trans: q a q (1,1)\ntrans: q a q (3,1)\n",
       false},
      {"ratio_abc",
       "structure: ratio\nalphabet: a b c\nstates: q\ninitial: q\naccepting: q\n"
       "trans: q a q (1,1)\ntrans: q b q (3,1)\ntrans: q c q (0,1)\n",
       true},
      {"ratio_last_b",
       "structure: ratio\nalphabet: a b\nstates: q0 q1\ninitial: q0 q1\naccepting: q1\n"
       "trans: q0 a q0 (1,1)\ntrans: q0 b q0 (2,1)\ntrans: q0 b q1 (0,1)\ntrans: q1 a q1 (4,3)\n",
       true},
      {"ratio_free",
       "structure: ratio\nalphabet: a b\nstates: q0 q1\ninitial: q0\naccepting: q1\n"
       "trans: q0 a q0 (1,1)\ntrans: q0 b q0 (0,1)\ntrans: q0 a q1 (2,0)\n"
       "trans: q1 a q1 (0,0)\ntrans: q1 b q1 (-1,0)\ntrans: q1 b q0 (1,1)\n",
       false},
      {"disc_single",
       "structure: disc\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,1/2)\n", true},
      {"disc_det",
       "structure: disc\nalphabet: a b\nstates: q0 q1\ninitial: q0\naccepting: q0\n"
       "trans: q0 a q1 (1,1/2)\ntrans: q0 b q0 (2,1/3)\ntrans: q1 a q0 (0,3/4)\ntrans: q1 b q1 (1,1)\n",
       true},
      {"disc_choice",
       "structure: disc\nalphabet: a b\nstates: q0 q1\ninitial: q0\naccepting: q0 q1\n"
       "trans: q0 a q0 (1,1/2)\ntrans: q0 a q1 (0,1)\ntrans: q0 b q0 (2,1/2)\n"
       "trans: q1 a q1 (3,1/2)\ntrans: q1 b q0 (1,1/3)\n",
       false},
      {"disc_last_b",
       "structure: disc\nalphabet: a b\nstates: q0 q1\ninitial: q0 q1\naccepting: q1\n"
       "trans: q0 a q0 (1,1/2)\ntrans: q0 b q0 (0,1/2)\ntrans: q0 b q1 (2,1/4)\ntrans: q1 a q1 (1,2/3)\n",
       true},
      {"energy_det",
       "structure: energy\nalphabet: a b\nstates: q0 q1\ninitial: q0\naccepting: q0\n"
       "trans: q0 a q0 (1)\ntrans: q0 b q1 (-1)\ntrans: q1 a q0 (2)\ntrans: q1 b q1 (-1)\n",
       true},
      {"energy_two",
       "structure: energy2\nalphabet: a b\nstates: q\ninitial: q\naccepting: q\n"
       "trans: q a q (2,-1)\ntrans: q a q (-1,2)\ntrans: q b q (1,1)\n",
       false},
      {"energy_last_b",
       "structure: energy\nalphabet: a b\nstates: q0 q1\ninitial: q0 q1\naccepting: q1\n"
       "trans: q0 a q0 (1)\ntrans: q0 b q0 (-1)\ntrans: q0 b q1 (0)\ntrans: q1 a q1 (0)\n",
       true},
  };
  return corpus;
}

inline WeightedBuchiAutomaton load(const CorpusEntry& e) { return parse_wba(e.text); }

inline const CorpusEntry& corpus_entry(const std::string& name) {
  for (auto& e : wba_corpus())
    if (e.name == name) return e;
  throw InputError("no corpus entry " + name);
}

}  // namespace qwal::testing
