#include <catch_amalgamated.hpp>

#include "automata.hpp"
#include "catch_strings.hpp"
#include "corpus.hpp"
#include "qwal/errors.hpp"
#include "qwal/wba_io.hpp"
#include "wba_oracles.hpp"

using namespace qwal;
using namespace qwal::testing;

namespace {

LassoWord<LetterId> enc(const Alphabet& a, const std::string& text) { return a.encode(parse_lasso(text)); }

// Hand-built product graph: edges (from, to, weight).
SolverGraph graph(int n, std::vector<int> initial, std::vector<int> accepting,
                  const std::vector<std::tuple<int, int, Weight>>& edges) {
  SolverGraph g;
  for (int i = 0; i < n; ++i) g.graph.add_vertex();
  g.initial = std::move(initial);
  g.accepting.assign(static_cast<std::size_t>(n), 0);
  for (int v : accepting) g.accepting[static_cast<std::size_t>(v)] = 1;
  for (auto& [u, v, w] : edges) {
    g.graph.add_edge(u, v);
    g.weight.push_back(w);
  }
  return g;
}

WeightedBuchiAutomaton random_weighted(Rng& rng, const BuchiAutomaton& b, StructurePtr s) {
  WeightedBuchiAutomaton a;
  a.automaton = b;
  a.structure = s;
  for (std::size_t i = 0; i < b.transitions.size(); ++i) {
    switch (s->kind()) {
      case StructureKind::Ratio: a.weights.push_back(Weight{Rational(uniform(rng, -3, 3)), Rational(uniform(rng, 0, 2))}); break;
      case StructureKind::Disc:
        a.weights.push_back(Weight{Rational(uniform(rng, 0, 3)), Rational(uniform(rng, 1, 4), 4)});
        break;
      default: a.weights.push_back(Weight{Rational(uniform(rng, -2, 2))}); break;
    }
  }
  return a;
}

std::vector<LassoWord<LetterId>> sample_lassos(Rng& rng, const Alphabet& sigma, int n) {
  std::vector<LassoWord<LetterId>> out;
  for (int i = 0; i < n; ++i) out.push_back(random_lasso(rng, static_cast<int>(sigma.size()), 3, 4));
  return out;
}

}  // namespace

TEST_CASE("run weights delegate to the valuation", "[wba]") {
  auto single = load(corpus_entry("ratio_single"));
  LassoRun r{{}, {0}};
  CHECK(run_weight(single, r) == ExtReal(Rational(1, 2)));
  auto disc = load(corpus_entry("disc_single"));
  CHECK(run_weight(disc, r) == ExtReal(2L));
  auto energy = parse_wba("structure: energy\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (-1)\ntrans: q a q (1)\n");
  CHECK(run_weight(energy, LassoRun{{0}, {1}}) == ExtReal(0L));
  CHECK_THROWS_AS(run_weight(single, LassoRun{{}, {3}}), InputError);
}

TEST_CASE("behavior examples", "[wba][behavior]") {
  auto single = load(corpus_entry("ratio_single"));
  CHECK(behavior(single, enc(single.alphabet(), "(a)")).value == ExtReal(Rational(1, 2)));
  CHECK(BehaviorEvaluator(single).single_run());

  auto two = load(corpus_entry("ratio_two_loops"));
  BehaviorEvaluator ev(two);
  CHECK_FALSE(ev.single_run());
  CHECK(ev(enc(two.alphabet(), "(a)")).value == ExtReal(3L));

  auto last_b = load(corpus_entry("ratio_last_b"));
  CHECK(behavior(last_b, enc(last_b.alphabet(), "(b)")).value == ExtReal::neg_inf());
  CHECK(behavior(last_b, enc(last_b.alphabet(), "a b (a)")).value == ExtReal(Rational(4, 3)));
  auto disc = load(corpus_entry("disc_last_b"));
  CHECK(behavior(disc, enc(disc.alphabet(), "(b)")).value == ExtReal::pos_inf());

  CHECK(format_behavior(*two.structure, ev(enc(two.alphabet(), "(a)"))) == "3");
  BehaviorResult unknown;
  unknown.unknown = true;
  unknown.bound = 4;
  CHECK(format_behavior(*two.structure, unknown) == "unknown(bound=4)");
}

TEST_CASE("unambiguous behavior equals the sum over enumerated runs", "[wba][behavior][property]") {
  Rng rng(301);
  int checked = 0;
  for (auto& e : wba_corpus()) {
    if (!e.unambiguous) continue;
    auto a = load(e);
    BehaviorEvaluator ev(a);
    REQUIRE(ev.single_run());
    INFO(e.name);
    for (auto& w : sample_lassos(rng, a.alphabet(), 20)) {
      REQUIRE(ev(w).value == brute_behavior(a, w, a.automaton.num_states()));
      ++checked;
    }
  }
  CHECK(checked == 160);
}

TEST_CASE("ambiguous corpus members stay within enumerated bounds", "[wba][behavior][property]") {
  Rng rng(303);
  for (auto& e : wba_corpus()) {
    if (e.unambiguous) continue;
    auto a = load(e);
    BehaviorEvaluator ev(a);
    CHECK_FALSE(ev.single_run());
    INFO(e.name);
    for (auto& w : sample_lassos(rng, a.alphabet(), 20)) {
      auto got = ev(w);
      auto runs = brute_behavior(a, w, 2);
      switch (a.structure->kind()) {
        case StructureKind::Ratio: CHECK(got.value >= runs); break;
        case StructureKind::Disc: CHECK(got.value <= runs); break;
        default:
          REQUIRE_FALSE(got.unknown);
          if (runs == ExtReal(1L)) CHECK(got.value == ExtReal(1L));
          break;
      }
    }
  }
}

TEST_CASE("ratio solver matches simple-cycle brute force on positive costs", "[wba][ratio][property]") {
  Rng rng(307);
  auto ratio = make_structure("ratio");
  int compared = 0;
  while (compared < 40) {
    auto b = random_buchi(rng, uniform(rng, 2, 4), 2, 40, uniform(rng, 1, 2));
    auto a = random_weighted(rng, b, ratio);
    for (auto& w : a.weights) w = Weight{w[0], Rational(uniform(rng, 1, 3))};
    auto word = random_lasso(rng, 2, 3, 6);
    auto pg = build_product(a.automaton, word);
    auto sg = solver_graph(a, pg);
    auto oracle = ratio_by_cycles(sg, 50000);
    if (!oracle) continue;
    REQUIRE(solve_ratio(sg) == *oracle);
    ++compared;
  }
}

TEST_CASE("ratio solver on free (zero-cost) tails", "[wba][ratio]") {
  auto w = [](long r, long c) { return Weight{Rational(r), Rational(c)}; };
  // Paid prefix, then a free accepting loop: the ratio freezes at 5.
  CHECK(solve_ratio(graph(2, {0}, {1}, {{0, 0, w(5, 1)}, {0, 1, w(0, 0)}, {1, 1, w(0, 0)}})) == ExtReal(5L));
  // Pumping the prefix loop approaches 3 without reaching it.
  CHECK(solve_ratio(graph(2, {0}, {1}, {{0, 0, w(3, 1)}, {0, 1, w(0, 1)}, {1, 1, w(0, 0)}})) == ExtReal(3L));
  // A free positive cycle before a paid tail is unbounded.
  CHECK(solve_ratio(graph(2, {0}, {1}, {{0, 0, w(1, 0)}, {0, 1, w(0, 1)}, {1, 1, w(0, 0)}})) == ExtReal::pos_inf());
  // Nothing ever paid: r/0 = -inf.
  CHECK(solve_ratio(graph(1, {0}, {0}, {{0, 0, w(5, 0)}})) == ExtReal::neg_inf());
  // Tail oscillating between 1 and 3 over total cost 1.
  CHECK(solve_ratio(graph(3, {0}, {2}, {{0, 1, w(1, 1)}, {1, 2, w(2, 0)}, {2, 1, w(-2, 0)}})) == ExtReal(3L));
  // Leaking tail: every free cycle loses reward.
  CHECK(solve_ratio(graph(2, {0}, {1}, {{0, 1, w(1, 1)}, {1, 1, w(-1, 0)}})) == ExtReal::neg_inf());
  // Positive-cost cycle beside a free positive one in the same accepting SCC.
  CHECK(solve_ratio(graph(2, {0}, {0}, {{0, 1, w(0, 1)}, {1, 0, w(0, 1)}, {1, 1, w(1, 0)}})) == ExtReal::pos_inf());
  CHECK(solve_ratio(graph(1, {0}, {}, {{0, 0, w(1, 1)}})) == ExtReal::neg_inf());
}

TEST_CASE("ratio solver bounds every lasso run from above", "[wba][ratio][property]") {
  Rng rng(311);
  auto ratio = make_structure("ratio");
  for (int i = 0; i < 60; ++i) {
    auto a = random_weighted(rng, random_buchi(rng, uniform(rng, 2, 3), 2, 45), ratio);
    auto word = random_lasso(rng, 2, 2, 3);
    auto sg = solver_graph(a, build_product(a.automaton, word));
    auto v = solve_ratio(sg);
    for (int j = 0; j < 10; ++j) {
      auto l = random_accepting_lasso(rng, sg);
      if (!l) {
        CHECK(v == ExtReal::neg_inf());
        break;
      }
      CHECK(lasso_value(*ratio, sg, *l) <= v);
    }
  }
}

TEST_CASE("disc solver", "[wba][disc]") {
  auto w = [](long r, Rational d) { return Weight{Rational(r), d}; };
  Rational half(1, 2);
  CHECK(solve_disc(graph(1, {0}, {0}, {{0, 0, w(1, half)}})) == ExtReal(2L));
  // Non-accepting discounting loop: its value is the infimum, approached but not attained.
  CHECK(solve_disc(graph(2, {0}, {1}, {{0, 0, w(1, half)}, {0, 1, w(5, half)}, {1, 1, w(0, half)}})) == ExtReal(2L));
  // A free non-accepting cycle is no escape.
  CHECK(solve_disc(graph(2, {0}, {1}, {{0, 0, w(0, 1)}, {0, 1, w(3, 1)}, {1, 1, w(0, half)}})) == ExtReal(3L));
  CHECK(solve_disc(graph(1, {0}, {0}, {{0, 0, w(0, 1)}})) == ExtReal(0L));
  CHECK(solve_disc(graph(1, {0}, {0}, {{0, 0, w(1, 1)}})) == ExtReal::pos_inf());
  CHECK(solve_disc(graph(1, {0}, {}, {{0, 0, w(1, half)}})) == ExtReal::pos_inf());
  auto choice = load(corpus_entry("disc_choice"));
  CHECK(behavior(choice, enc(choice.alphabet(), "(a)")).value == ExtReal(2L));
}

TEST_CASE("disc solver bounds every sampled run from below", "[wba][disc][property]") {
  Rng rng(313);
  auto disc = make_structure("disc");
  int sampled = 0;
  for (int i = 0; i < 60; ++i) {
    auto a = random_weighted(rng, random_buchi(rng, uniform(rng, 2, 4), 2, 45), disc);
    auto word = random_lasso(rng, 2, 3, 4);
    auto sg = solver_graph(a, build_product(a.automaton, word));
    auto v = solve_disc(sg);
    auto runs = brute_behavior(a, word, 2);
    CHECK(v <= runs);
    for (int j = 0; j < 10; ++j) {
      auto l = random_accepting_lasso(rng, sg, 12);
      if (!l) {
        CHECK(v == ExtReal::pos_inf());
        break;
      }
      CHECK(v <= lasso_value(*disc, sg, *l));
      ++sampled;
    }
  }
  CHECK(sampled > 100);
}

TEST_CASE("energy solver witnesses replay", "[wba][energy][property]") {
  auto two = load(corpus_entry("energy_two"));
  auto r = behavior(two, enc(two.alphabet(), "b (a)"));
  REQUIRE(r.value == ExtReal(1L));
  REQUIRE(r.witness);
  CHECK(run_weight(two, *r.witness) == ExtReal(1L));
  CHECK(behavior(two, enc(two.alphabet(), "(a)")).value == ExtReal(0L));

  Rng rng(317);
  auto energy = make_structure("energy");
  int ones = 0, zeros = 0;
  for (int i = 0; i < 80; ++i) {
    auto a = random_weighted(rng, random_buchi(rng, uniform(rng, 2, 4), 2, 45), energy);
    auto word = random_lasso(rng, 2, 3, 4);
    auto pg = build_product(a.automaton, word);
    auto sg = solver_graph(a, pg);
    auto res = solve_energy(sg, 1, 4);
    auto runs = brute_behavior(a, word, 2);
    if (res.verdict == EnergyVerdict::One) {
      ++ones;
      REQUIRE(res.witness);
      auto run = to_run(pg, *res.witness);
      CHECK(run_weight(a, run) == ExtReal(1L));
      // 100 unrolled passes keep every prefix sum non-negative.
      long sum = 0;
      bool ok = true;
      for (int t : run.prefix) ok = ok && (sum += a.weights[static_cast<std::size_t>(t)][0].get_num().get_si()) >= 0;
      for (int pass = 0; pass < 100; ++pass)
        for (int t : run.loop) ok = ok && (sum += a.weights[static_cast<std::size_t>(t)][0].get_num().get_si()) >= 0;
      CHECK(ok);
    } else {
      CHECK(runs == ExtReal(0L));
      if (res.verdict == EnergyVerdict::Zero) ++zeros;
    }
  }
  CHECK(ones > 5);
  CHECK(zeros > 5);
}

TEST_CASE("energy search reports unknown when the cap bites", "[wba][energy]") {
  // Only an unbounded climb followed by an ever deeper descent would work; no run does.
  auto g = graph(2, {0}, {1}, {{0, 0, Weight{Rational(1)}}, {0, 1, Weight{Rational(0)}}, {1, 1, Weight{Rational(-1)}}});
  CHECK(solve_energy(g, 1, 2).verdict == EnergyVerdict::Unknown);
  auto dead = graph(1, {0}, {0}, {{0, 0, Weight{Rational(-1)}}});
  CHECK(solve_energy(dead, 1, 2).verdict == EnergyVerdict::Zero);
}

TEST_CASE("decompose and recompose", "[wba][nivat]") {
  auto single = load(corpus_entry("ratio_single"));
  auto t = decompose(single);
  CHECK(t.gamma.size() == 1);
  CHECK(t.language.transitions.size() == 1);
  CHECK_FALSE(h_unambiguity_check(t).has_value());

  WeightedBuchiAutomaton empty = single;
  empty.automaton.transitions.clear();
  empty.weights.clear();
  CHECK_THROWS_AS(decompose(empty), InputError);

  Rng rng(331);
  for (auto& e : wba_corpus()) {
    INFO(e.name);
    auto a = load(e);
    auto d = decompose(a);
    if (e.unambiguous) CHECK_FALSE(h_unambiguity_check(d).has_value());
    auto back = recompose(d, a.structure);
    CHECK(back.alphabet() == a.alphabet());
    BehaviorEvaluator ea(a), eb(back);
    if (e.unambiguous) CHECK(eb.single_run());
    for (auto& w : sample_lassos(rng, a.alphabet(), 20)) REQUIRE(eb(w) == ea(w));
  }
}

TEST_CASE("identity triple recomposes to the constant valuation", "[wba][nivat]") {
  auto ratio = make_structure("ratio");
  Weight one{Rational(1), Rational(1)};
  NivatTriple t;
  t.sigma = Alphabet({"a", "b"});
  t.gamma = t.sigma;
  t.h = {0, 1};
  t.g = {one, one};
  t.language.alphabet = t.gamma;
  t.language.add_state("q", true);
  t.language.initial = {0};
  t.language.add_transition(0, 0, 0);
  t.language.add_transition(0, 1, 0);
  auto a = recompose(t, ratio, one);
  CHECK(a.word_determined);
  Rng rng(337);
  for (auto& w : sample_lassos(rng, t.sigma, 20)) CHECK(behavior(a, w).value == ExtReal(1L));
  CHECK_FALSE(check_ambiguity(a.automaton).has_value());
}

TEST_CASE("h-unambiguity", "[wba][nivat]") {
  auto ratio = make_structure("ratio");
  NivatTriple t;
  t.sigma = Alphabet({"a"});
  t.gamma = Alphabet({"g1", "g2"});
  t.h = {0, 0};
  t.g = {Weight{1, 1}, Weight{2, 1}};
  t.language.alphabet = t.gamma;
  t.language.add_state("q", true);
  t.language.initial = {0};
  t.language.add_transition(0, 0, 0);
  t.language.add_transition(0, 1, 0);
  auto wit = h_unambiguity_check(t);
  REQUIRE(wit);
  CHECK_FALSE(omega_equal(wit->first, wit->second));
  CHECK(accepts(t.language, wit->first));
  CHECK(accepts(t.language, wit->second));
  CHECK(omega_equal(wit->word, LassoWord<LetterId>({}, {0})));
  // Two preimages, recomposed with sup: the better loop wins.
  auto a = recompose(t, ratio);
  CHECK_FALSE(a.word_determined);
  CHECK(behavior(a, LassoWord<LetterId>({}, {0})).value == ExtReal(2L));

  NivatTriple single = t;
  single.gamma = Alphabet({"g1"});
  single.h = {0};
  single.g = {Weight{1, 1}};
  single.language.alphabet = single.gamma;
  single.language.transitions.pop_back();
  CHECK_FALSE(h_unambiguity_check(single).has_value());

  Rng rng(347);
  for (int i = 0; i < 20; ++i) {
    auto b = random_deterministic(rng, uniform(rng, 2, 4), 2);
    WeightedBuchiAutomaton w = random_weighted(rng, b, ratio);
    CHECK_FALSE(h_unambiguity_check(decompose(w)).has_value());
  }
}

TEST_CASE("recompose rejects ambiguity only for non-idempotent monoids", "[wba][nivat]") {
  class Counting final : public ValuationStructure {
   public:
    std::string name() const override { return "count"; }
    void validate(const Weight& w) const override {
      if (w.size() != 1) throw InputError("count weights have one component");
    }
    const CompleteMonoidSpec& monoid() const override {
      static const CompleteMonoidSpec k("plus", ExtReal(0L), [](const ExtReal& x, const ExtReal& y) { return x + y; }, false);
      return k;
    }
    ExtReal val_lasso(std::span<const Weight>, std::span<const Weight>) const override { return ExtReal(1L); }
  };
  auto two = load(corpus_entry("ratio_two_loops"));
  auto t = decompose(two);
  for (auto& g : t.g) g = Weight{1};
  CHECK_NOTHROW(recompose(t, std::make_shared<Counting>()));
  t.language.add_state("extra", true);
  t.language.initial.push_back(1);
  t.language.add_transition(1, 0, 1);
  CHECK_THROWS_AS(recompose(t, std::make_shared<Counting>()), AmbiguityError);
  for (auto& g : t.g) g = Weight{1, 1};
  CHECK_NOTHROW(recompose(t, make_structure("ratio")));
}

TEST_CASE("custom structures need unambiguous automata", "[wba]") {
  class Constant final : public ValuationStructure {
   public:
    std::string name() const override { return "constant"; }
    void validate(const Weight&) const override {}
    const CompleteMonoidSpec& monoid() const override { return RatioStructure().monoid(); }
    ExtReal val_lasso(std::span<const Weight>, std::span<const Weight>) const override { return ExtReal(7L); }
  };
  auto two = load(corpus_entry("ratio_two_loops"));
  two.structure = std::make_shared<Constant>();
  CHECK_THROWS_AS(BehaviorEvaluator(two), UnsupportedError);
  auto single = load(corpus_entry("ratio_single"));
  single.structure = two.structure;
  CHECK(behavior(single, LassoWord<LetterId>({}, {0})).value == ExtReal(7L));
}

TEST_CASE("weighted Büchi and Muller conversions", "[wba][muller]") {
  Rng rng(353);
  for (auto& e : wba_corpus()) {
    INFO(e.name);
    auto a = load(e);
    auto m = weighted_buchi_to_muller(a);
    CHECK(m.weights == a.weights);
    auto back = weighted_muller_to_buchi(m);
    BehaviorEvaluator ea(a), eb(back);
    for (auto& w : sample_lassos(rng, a.alphabet(), 20)) {
      auto expect = ea(w);
      REQUIRE(eb(w) == expect);
      if (e.unambiguous) CHECK(muller_direct(m, w, a.automaton.num_states()) == expect.value);
    }
  }
}

TEST_CASE("converted Muller behavior agrees with the direct Muller reading", "[wba][muller][property]") {
  Rng rng(359);
  auto ratio = make_structure("ratio");
  for (int i = 0; i < 15; ++i) {
    auto b = random_deterministic(rng, uniform(rng, 2, 3), 2);
    WeightedMullerAutomaton m;
    m.automaton.alphabet = b.alphabet;
    m.automaton.states = b.states;
    m.automaton.initial = b.initial;
    m.automaton.transitions = b.transitions;
    std::vector<StateId> all;
    for (std::size_t q = 0; q < b.num_states(); ++q)
      if (uniform(rng, 0, 1)) all.push_back(static_cast<StateId>(q));
    if (all.empty()) all.push_back(0);
    m.automaton.acc_sets = {all, {0}};
    m.structure = ratio;
    m.weights = random_weighted(rng, b, ratio).weights;
    auto a = weighted_muller_to_buchi(m);
    for (auto& w : sample_lassos(rng, b.alphabet, 10))
      REQUIRE(behavior(a, w).value == muller_direct(m, w, b.num_states()));
  }
}

TEST_CASE("weighted file formats", "[wba][io]") {
  for (auto& e : wba_corpus()) {
    auto a = load(e);
    auto again = parse_wba(format_wba(a));
    CHECK(format_wba(again) == format_wba(a));
    CHECK(again.weights == a.weights);
    auto m = weighted_buchi_to_muller(a);
    CHECK(format_wma(parse_wma(format_wma(m))) == format_wma(m));
    auto t = decompose(a);
    WeightedText h;
    auto t2 = parse_triple(format_triple(t, a.structure), &h);
    CHECK(format_triple(t2, h.structure) == format_triple(t, a.structure));
    CHECK(h.structure->name() == a.structure->name());
  }
  WeightedText h;
  auto a = parse_wba("structure: disc\none: (0,1/2)\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,1/2)\n",
                     nullptr, &h);
  REQUIRE(h.one);
  CHECK(*h.one == Weight{0, Rational(1, 2)});
  CHECK(format_wba(a, h.one).find("one: (0,1/2)") != std::string::npos);
  CHECK_THROWS_AS(parse_wba("alphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,2)\n"), ParseError);
  CHECK_THROWS_AS(parse_wba("structure: ratio\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q\n"), ParseError);
  CHECK_THROWS_AS(parse_wba("structure: ratio\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,-2)\n"), InputError);
  CHECK_THROWS_AS(parse_wba("structure: bogus\nalphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,2)\n"), ParseError);
  auto over = parse_wba("alphabet: a\nstates: q\ninitial: q\naccepting: q\ntrans: q a q (1,1/2)\n", make_structure("disc"));
  CHECK(over.structure->name() == "disc");
  CHECK(is_muller_text(format_wma(weighted_buchi_to_muller(a))));
}
