#include "qwal/wba.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include "qwal/errors.hpp"

namespace qwal {

namespace {

std::size_t at(int i) { return static_cast<std::size_t>(i); }

void validate_weights(const TransitionSystem& a, const std::vector<Weight>& w, const StructurePtr& s) {
  if (!s) throw InputError("weighted automaton without a valuation structure");
  if (w.size() != a.transitions.size())
    throw InputError("expected " + std::to_string(a.transitions.size()) + " transition weights, got " + std::to_string(w.size()));
  for (auto& x : w) s->validate(x);
}

ExtReal weigh(const TransitionSystem& a, const std::vector<Weight>& weights, const ValuationStructure& s, const LassoRun& run) {
  if (!run_reads(a, run, run_word(a, run))) throw InputError("not a run of the automaton");
  std::vector<Weight> p, q;
  for (int t : run.prefix) p.push_back(weights[at(t)]);
  for (int t : run.loop) q.push_back(weights[at(t)]);
  return s.val_lasso(p, q);
}

}  // namespace

void WeightedBuchiAutomaton::validate() const {
  automaton.validate();
  validate_weights(automaton, weights, structure);
}

void WeightedMullerAutomaton::validate() const {
  automaton.validate();
  validate_weights(automaton, weights, structure);
}

ExtReal run_weight(const WeightedBuchiAutomaton& a, const LassoRun& run) {
  return weigh(a.automaton, a.weights, *a.structure, run);
}

ExtReal run_weight(const WeightedMullerAutomaton& a, const LassoRun& run) {
  return weigh(a.automaton, a.weights, *a.structure, run);
}

std::string format_behavior(const ValuationStructure& s, const BehaviorResult& r) {
  if (r.unknown) return "unknown(bound=" + std::to_string(r.bound) + ")";
  return s.format_value(r.value);
}

BehaviorEvaluator::BehaviorEvaluator(const WeightedBuchiAutomaton& a, BehaviorOptions opts) : a_(a), opts_(opts) {
  a_.validate();
  if (a_.word_determined) {
    single_run_ = true;
    return;
  }
  bool custom = a_.structure->kind() == StructureKind::Custom;
  if (!custom && a_.automaton.num_states() > opts_.ambiguity_state_limit) return;
  single_run_ = !check_ambiguity(a_.automaton).has_value();
  if (!single_run_ && custom)
    throw UnsupportedError("structure '" + a_.structure->name() + "' has no solver for ambiguous automata");
}

SolverGraph solver_graph(const WeightedBuchiAutomaton& a, const ProductGraph& pg) {
  SolverGraph sg;
  sg.graph = pg.graph;
  sg.initial = pg.initial;
  sg.accepting.resize(pg.state.size());
  for (std::size_t v = 0; v < pg.state.size(); ++v) sg.accepting[v] = a.automaton.is_accepting(pg.state[v]);
  for (int t : pg.edge_transition) sg.weight.push_back(a.weights[at(t)]);
  return sg;
}

BehaviorResult BehaviorEvaluator::operator()(const LassoWord<LetterId>& w) const {
  const auto& s = *a_.structure;
  BehaviorResult out;
  if (single_run_) {
    auto run = accepts(a_.automaton, w);
    if (!run) {
      out.value = s.monoid().zero();
      return out;
    }
    out.value = run_weight(a_, *run);
    out.witness = std::move(run);
    return out;
  }
  ProductGraph pg = build_product(a_.automaton, w);
  SolverGraph sg = solver_graph(a_, pg);
  switch (s.kind()) {
    case StructureKind::Ratio: out.value = solve_ratio(sg); break;
    case StructureKind::Disc: out.value = solve_disc(sg); break;
    case StructureKind::Energy: {
      auto dim = dynamic_cast<const EnergyStructure&>(s).dimension();
      auto res = solve_energy(sg, dim, opts_.energy_bound);
      if (res.verdict == EnergyVerdict::Unknown) {
        out.unknown = true;
        out.bound = opts_.energy_bound;
      } else {
        out.value = ExtReal(res.verdict == EnergyVerdict::One ? 1L : 0L);
        if (res.witness) out.witness = to_run(pg, *res.witness);
      }
      break;
    }
    case StructureKind::Custom:
      throw UnsupportedError("structure '" + s.name() + "' has no solver for ambiguous automata");
  }
  return out;
}

BehaviorResult behavior(const WeightedBuchiAutomaton& a, const LassoWord<LetterId>& w, const BehaviorOptions& opts) {
  return BehaviorEvaluator(a, opts)(w);
}

void NivatTriple::validate() const {
  if (h.size() != gamma.size() || g.size() != gamma.size()) throw InputError("h and g must be total on Γ");
  for (auto x : h)
    if (x < 0 || at(x) >= sigma.size()) throw InputError("h maps outside Σ");
  if (!(language.alphabet == gamma)) throw InputError("language automaton must read Γ");
  language.validate();
}

namespace {

struct Decomposed {
  Alphabet gamma;
  std::vector<LetterId> h;
  std::vector<Weight> g;
  std::vector<Transition> transitions;
};

Decomposed decompose_transitions(const TransitionSystem& a, const std::vector<Weight>& wt) {
  if (a.transitions.empty()) throw InputError("decompose needs at least one transition");
  Decomposed d;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < a.transitions.size(); ++i) names.push_back("t" + std::to_string(i));
  d.gamma = Alphabet(names);
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    auto& t = a.transitions[i];
    d.h.push_back(t.letter);
    d.g.push_back(wt[i]);
    d.transitions.push_back({t.src, static_cast<LetterId>(i), t.dst});
  }
  return d;
}

}  // namespace

NivatTriple decompose(const WeightedBuchiAutomaton& a) {
  a.validate();
  auto d = decompose_transitions(a.automaton, a.weights);
  NivatTriple t;
  t.sigma = a.alphabet();
  t.gamma = d.gamma;
  t.h = std::move(d.h);
  t.g = std::move(d.g);
  t.language.alphabet = t.gamma;
  for (std::size_t q = 0; q < a.automaton.num_states(); ++q)
    t.language.add_state(a.automaton.states[q], a.automaton.accepting[q] != 0);
  t.language.initial = a.automaton.initial;
  t.language.transitions = std::move(d.transitions);
  return t;
}

WeightedBuchiAutomaton recompose(const NivatTriple& t, StructurePtr structure, const std::optional<Weight>& one,
                                 std::optional<bool> h_unambiguous) {
  if (!structure) throw InputError("recompose needs a valuation structure");
  t.validate();
  if (one) structure->validate_one(*one);
  for (auto& w : t.g) structure->validate(w);
  if (t.gamma.size() == 0) throw InputError("recompose needs a nonempty Γ");
  if (!structure->monoid().idempotent())
    if (auto amb = check_ambiguity(t.language))
      throw AmbiguityError("language automaton is ambiguous on " + format_lasso(t.gamma.decode(amb->word)));

  const auto& names = t.gamma.names();
  auto gamma0 = static_cast<LetterId>(std::min_element(names.begin(), names.end()) - names.begin());
  const auto& L = t.language;
  std::vector<std::vector<int>> out(L.num_states());
  for (std::size_t i = 0; i < L.transitions.size(); ++i) out[at(L.transitions[i].src)].push_back(static_cast<int>(i));

  WeightedBuchiAutomaton r;
  r.structure = std::move(structure);
  r.automaton.alphabet = t.sigma;
  std::map<std::pair<StateId, LetterId>, StateId> ids;
  std::vector<std::pair<StateId, LetterId>> work;
  auto state = [&](StateId p, LetterId g) {
    auto [it, fresh] = ids.try_emplace({p, g}, static_cast<StateId>(r.automaton.num_states()));
    if (fresh) {
      r.automaton.add_state(L.states[at(p)] + "|" + t.gamma.name(g), L.is_accepting(p));
      work.push_back({p, g});
    }
    return it->second;
  };
  for (auto p : L.initial) r.automaton.initial.push_back(state(p, gamma0));
  while (!work.empty()) {
    auto [p, g] = work.back();
    work.pop_back();
    StateId from = ids.at({p, g});
    for (int i : out[at(p)]) {
      auto& tr = L.transitions[at(i)];
      StateId to = state(tr.dst, tr.letter);
      r.automaton.add_transition(from, t.h[at(tr.letter)], to);
      r.weights.push_back(t.g[at(tr.letter)]);
    }
  }
  if (!h_unambiguous && L.num_states() <= kHCheckStateLimit) h_unambiguous = !h_unambiguity_check(t).has_value();
  r.word_determined = h_unambiguous.value_or(false);
  return r;
}

std::optional<HAmbiguityWitness> h_unambiguity_check(const NivatTriple& t) {
  t.validate();
  const auto& L = t.language;
  std::vector<std::vector<int>> out(L.num_states());
  for (std::size_t i = 0; i < L.transitions.size(); ++i) out[at(L.transitions[i].src)].push_back(static_cast<int>(i));

  // Vertex (p, q, diverged, phase); phase alternates on accepting p, then accepting q.
  using Key = std::tuple<StateId, StateId, int, int>;
  std::map<Key, int> ids;
  std::vector<Key> keys;
  Digraph g;
  std::vector<std::pair<int, int>> pair_of_edge;
  std::vector<int> work, initial;
  auto vertex = [&](const Key& k) {
    auto [it, fresh] = ids.try_emplace(k, g.num_vertices());
    if (fresh) {
      g.add_vertex();
      keys.push_back(k);
      work.push_back(it->second);
    }
    return it->second;
  };
  for (auto p : L.initial)
    for (auto q : L.initial) initial.push_back(vertex({p, q, 0, 0}));
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    auto [p, q, div, phase] = keys[at(v)];
    int next_phase = phase;
    if (phase == 0 && L.is_accepting(p)) next_phase = 1;
    else if (phase == 1 && L.is_accepting(q)) next_phase = 0;
    for (int i : out[at(p)])
      for (int j : out[at(q)]) {
        auto& ti = L.transitions[at(i)];
        auto& tj = L.transitions[at(j)];
        if (t.h[at(ti.letter)] != t.h[at(tj.letter)]) continue;
        int nd = div || ti.letter != tj.letter ? 1 : 0;
        int w = vertex({ti.dst, tj.dst, nd, next_phase});
        g.add_edge(v, w);
        pair_of_edge.push_back({i, j});
      }
  }
  VertexMask acc(keys.size(), 0);
  for (std::size_t v = 0; v < keys.size(); ++v) {
    auto [p, q, div, phase] = keys[v];
    acc[v] = div && phase == 0 && L.is_accepting(p);
  }
  auto lasso = find_accepting_lasso(g, initial, acc);
  if (!lasso) return std::nullopt;
  auto word = [&](const std::vector<int>& edges, int side) {
    std::vector<LetterId> out_letters;
    for (int e : edges) {
      int tr = side == 0 ? pair_of_edge[at(e)].first : pair_of_edge[at(e)].second;
      out_letters.push_back(L.transitions[at(tr)].letter);
    }
    return out_letters;
  };
  HAmbiguityWitness w;
  w.first = LassoWord<LetterId>(word(lasso->prefix, 0), word(lasso->loop, 0));
  w.second = LassoWord<LetterId>(word(lasso->prefix, 1), word(lasso->loop, 1));
  std::vector<LetterId> p, q;
  for (auto x : w.first.prefix()) p.push_back(t.h[at(x)]);
  for (auto x : w.first.loop()) q.push_back(t.h[at(x)]);
  w.word = LassoWord<LetterId>(std::move(p), std::move(q));
  return w;
}

WeightedMullerAutomaton weighted_buchi_to_muller(const WeightedBuchiAutomaton& a, std::size_t max_component) {
  a.validate();
  WeightedMullerAutomaton m;
  m.automaton = buchi_to_muller(a.automaton, max_component);
  m.weights = a.weights;
  m.structure = a.structure;
  return m;
}

WeightedBuchiAutomaton weighted_muller_to_buchi(const WeightedMullerAutomaton& m) {
  m.validate();
  auto d = decompose_transitions(m.automaton, m.weights);
  MullerAutomaton lang;
  lang.alphabet = d.gamma;
  lang.states = m.automaton.states;
  lang.initial = m.automaton.initial;
  lang.transitions = std::move(d.transitions);
  lang.acc_sets = m.automaton.acc_sets;
  NivatTriple t;
  t.sigma = m.alphabet();
  t.gamma = d.gamma;
  t.h = std::move(d.h);
  t.g = std::move(d.g);
  t.language = muller_to_buchi(lang);
  return recompose(t, m.structure);
}

}  // namespace qwal
