#include <catch_amalgamated.hpp>

#include "automata.hpp"
#include "catch_strings.hpp"
#include "corpus.hpp"
#include "mso_oracle.hpp"
#include "qwal/errors.hpp"
#include "qwal/satdfa.hpp"
#include "qwal/wal.hpp"
#include "wal_corpus.hpp"

using namespace qwal;
using namespace qwal::testing;

namespace {

LassoWord<LetterId> enc(const Alphabet& a, const std::string& text) { return a.encode(parse_lasso(text)); }

ExtReal value(const CompiledWal& c, const LassoWord<LetterId>& w) {
  auto r = behavior(c.automaton, w);
  REQUIRE_FALSE(r.unknown);
  return r.value;
}

Weight pair(Rational a, Rational b) { return Weight{std::move(a), std::move(b)}; }

const StructurePtr& ratio() {
  static StructurePtr s = make_structure("ratio");
  return s;
}

const StructurePtr& disc() {
  static StructurePtr s = make_structure("disc");
  return s;
}

bool same_language(const LassoDfa& a, const LassoDfa& b) {
  return !dfa_difference_witness(a, b) && !dfa_difference_witness(b, a);
}

// Closes the free variables of f: first-order ones by random quantifiers, X existentially.
Mso close(Rng& rng, Mso f) {
  for (auto& v : free_vars(f)) {
    if (is_second_order(v)) f = mso_exists(v, f);
    else f = uniform(rng, 0, 1) ? mso_exists(v, f) : mso_forall(v, f);
  }
  return f;
}

}  // namespace

TEST_CASE("wal parser", "[wal][parse]") {
  auto f = parse_wal("meet x. P_a(x) => x |-> (1,2)", *ratio());
  CHECK(f.prefix.empty());
  CHECK(wal_equal_trees(f.body, wal_meet("x", wal_implies(wal_letter("a", "x"), wal_maps_to("x", pair(1, 2))))));

  auto g = parse_wal("join X. meet x. X(x) => x |-> (5,0.5)", *disc());
  CHECK(g.prefix == std::vector<std::string>{"X"});
  CHECK(wal_equal_trees(g.body, wal_meet("x", wal_implies(wal_member("X", "x"), wal_maps_to("x", pair(5, Rational(1, 2)))))));

  CHECK_THROWS_AS(parse_wal("meet x. P_a(x) /\\ join Y. Y(x)", *ratio()), ParseError);
  CHECK_THROWS_AS(parse_wal("meet x. x |-> (1)", *ratio()), ParseError);
  CHECK_THROWS_AS(parse_wal("meet x. x |-> (1,-1)", *ratio()), ParseError);
  CHECK_THROWS_AS(parse_wal("meet x. x |-> (1,2)", *disc()), ParseError);
  CHECK_THROWS_AS(parse_wal("meet x. (P_a(x)", *ratio()), ParseError);
  CHECK_THROWS_AS(parse_wal("meet x. x |-> 3", *ratio()), ParseError);
  CHECK_THROWS_AS(parse_wal("join X. join X. X(x)", *ratio()), InputError);
  Alphabet ab({"a", "b"});
  CHECK_THROWS_AS(parse_wal("meet x. P_c(x)", *ratio(), &ab), ParseError);

  // !φ is φ ⇒ false, false is ⊓x.(x < x).
  auto n = parse_wal("!P_a(x)", *ratio()).body;
  CHECK(wal_equal_trees(n, wal_implies(wal_letter("a", "x"), wal_meet("x", wal_less("x", "x")))));
  CHECK(wal_equal_trees(parse_wal("false", *ratio()).body, wal_false()));
  CHECK(wal_equal_trees(parse_wal("P_a(x) /\\ P_b(x) => x |-> (0,1)", *ratio()).body,
                        wal_implies(wal_merge(wal_letter("a", "x"), wal_letter("b", "x")), wal_maps_to("x", pair(0, 1)))));
}

TEST_CASE("wal printing re-parses to the same tree", "[wal][parse]") {
  for (auto& s : wal_sentences()) {
    auto st = make_structure(s.structure);
    auto f = parse_wal(s.text, *st);
    INFO(s.text);
    CHECK(wal_equal_trees(parse_wal(to_string(f), *st).body, f.body));
  }
  auto e = parse_wal("join X. join y. meet x. (X(x) => x |-> (5,1/2)) /\\ (!X(x) => x |-> (2,3/4))", *disc());
  auto again = parse_wal(to_string(e), *disc());
  CHECK(again.prefix == e.prefix);
  CHECK(wal_equal_trees(again.body, e.body));
}

TEST_CASE("formula files carry structure, one and alphabet", "[wal][parse]") {
  auto t = parse_wal_file("; costs\nstructure: ratio\none: (1,1)\nalphabet: a b\nmeet x. P_a(x) => x |-> (2,1)\n");
  CHECK(t.structure->name() == "ratio");
  CHECK(*t.one == pair(1, 1));
  CHECK(t.alphabet->size() == 2);
  auto back = parse_wal_file(format_wal_file(t.formula, *t.structure, t.one, t.alphabet));
  CHECK(wal_equal_trees(back.formula.body, t.formula.body));
  CHECK(*back.one == *t.one);
  CHECK(back.alphabet->names() == t.alphabet->names());

  auto over = parse_wal_file("structure: ratio\nmeet x. x |-> (2,1/2)\n", disc());
  CHECK(over.structure->name() == "disc");
  CHECK_THROWS_AS(parse_wal_file("meet x. P_a(x)\n"), ParseError);
  CHECK_THROWS_AS(parse_wal_file("structure: nope\nmeet x. P_a(x)\n"), ParseError);
}

TEST_CASE("W translation rules", "[wal]") {
  CHECK(wal_equal_trees(w_translate(parse_mso("forall x. P_a(x)")), wal_meet("x", wal_letter("a", "x"))));
  CHECK(wal_equal_trees(w_translate(parse_mso("!(x < y)")), wal_implies(wal_less("x", "y"), wal_false())));
  CHECK(wal_equal_trees(w_translate(parse_mso("P_a(x) & X(x)")), wal_merge(wal_letter("a", "x"), wal_member("X", "x"))));
  CHECK(assignment_free(w_translate(parse_mso("forall X. exists x. X(x)"))));
  CHECK(has_set_meet(w_translate(parse_mso("forall X. exists x. X(x)"))));
}

TEST_CASE("W translation is top exactly on models", "[wal][property]") {
  Rng rng(401);
  Alphabet ab({"a", "b"});
  MsoCompiler comp(ab);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    auto f = random_fo(rng, ab, 4);
    auto wf = w_translate(f);
    INFO(to_string(f));
    for (int j = 0; j < 6; ++j) {
      auto w = random_lasso(rng, 2);
      VarAssignment s;
      s.first = {{"x", uniform(rng, 0, 5)}, {"y", uniform(rng, 0, 5)}, {"z", uniform(rng, 0, 5)}};
      s.second["X"] = random_set(rng);
      auto aux = reference_aux_semantics(wf, ab, w, s);
      REQUIRE((aux.is_top() || aux.is_bottom()));
      CHECK(aux.is_top() == comp.satisfies(f, w, s));
      ++checked;
    }
  }
  CHECK(checked == 180);
}

TEST_CASE("compiled MSO embedding gives val(1^w) or zero", "[wal][property]") {
  Rng rng(409);
  Alphabet ab({"a", "b"});
  const Weight one = pair(1, 2);
  const ExtReal unit(Rational(1, 2));
  for (int i = 0; i < 30; ++i) {
    auto f = close(rng, random_fo(rng, ab, 3));
    INFO(to_string(f));
    auto c = compile_wal(w_translate(f), ab, ratio(), one);
    CHECK(c.h_unambiguous);
    for (int j = 0; j < 5; ++j) {
      auto w = random_lasso(rng, 2);
      CHECK(value(c, w) == (satisfies_mso(f, ab, w, {}) ? unit : ExtReal::neg_inf()));
    }
  }
}

TEST_CASE("phi construction cases", "[wal][phi]") {
  Alphabet a1({"a"});
  const Weight m = pair(1, 1);
  GammaCodec codec(a1, {m});
  CHECK(codec.gamma().names() == std::vector<std::string>{"a_#", "a_1"});

  SECTION("letter atoms allow any weight label") {
    auto p = phi_y_construction(wal_letter("a", "x"), "Y", codec, {true});
    REQUIRE(p->kind == MsoKind::And);
    REQUIRE(p->left->kind == MsoKind::Letter);
    CHECK(p->left->letters == std::vector<std::string>{"a_#", "a_1"});
    CHECK(p->left->var == "x");
  }

  SECTION("an assignment labels exactly its position") {
    auto p = phi_construction(wal_maps_to("x", m), codec, {true});
    CHECK(free_vars(p) == std::set<std::string>{"x"});
    MsoCompiler comp(codec.gamma());
    int checked = 0;
    for (std::size_t x = 0; x < 5; ++x)
      for (unsigned bits = 0; bits < 32; ++bits) {
        std::vector<LetterId> pre, loop;
        for (std::size_t i = 0; i < 5; ++i) (i < 4 ? pre : loop).push_back(static_cast<LetterId>((bits >> i) & 1u));
        LassoWord<LetterId> u(pre, loop);
        VarAssignment s;
        s.first["x"] = x;
        bool expected = bits == (1u << x) && x < 4;
        CHECK(comp.satisfies(p, u, s) == expected);
        ++checked;
      }
    CHECK(checked == 160);
  }

  SECTION("merging an assignment with itself changes nothing") {
    MsoCompiler comp(codec.gamma());
    auto once = comp.compile(phi_construction(wal_maps_to("x", m), codec, {true}), {"x"});
    auto twice = comp.compile(phi_construction(wal_merge(wal_maps_to("x", m), wal_maps_to("x", m)), codec, {true}), {"x"});
    CHECK(same_language(once, twice));
  }

  SECTION("fresh names stay in the reserved namespace") {
    auto p = phi_construction(wal_meet("x", wal_maps_to("x", m)), codec);
    CHECK(free_vars(p).empty());
    CHECK(to_string(p).find("$g1") != std::string::npos);
  }
}

TEST_CASE("literal and shortcut phi agree", "[wal][phi][property]") {
  // The shortcut reads assignment-free subformulas as MSO directly; both routes must define the
  // same encodings.
  for (auto& s : wal_sentences()) {
    auto st = make_structure(s.structure);
    auto f = parse_wal(s.text, *st).body;
    Alphabet sigma(s.alphabet);
    GammaCodec codec(sigma, constants(f));
    INFO(s.text);
    MsoCompiler comp(codec.gamma());
    auto lit = comp.compile(phi_construction(f, codec, {true}), {});
    auto cut = comp.compile(phi_construction(f, codec, {false}), {});
    CHECK(same_language(lit, cut));
  }
}

TEST_CASE("cost example evaluates to 2 on (a b)", "[wal][example]") {
  Alphabet abc({"a", "b", "c"});
  auto f = parse_wal("meet x. (P_a(x) => x |-> (1,1)) /\\ (P_b(x) => x |-> (3,1))", *ratio(), &abc).body;
  auto c = compile_wal(f, abc, ratio(), pair(0, 1));
  CHECK(c.h_unambiguous);
  CHECK(value(c, enc(abc, "(a b)")) == ExtReal(2));
  CHECK(value(c, enc(abc, "(a)")) == ExtReal(1));
  CHECK(value(c, enc(abc, "(c)")) == ExtReal(0));
  CHECK(value(c, enc(abc, "b b (a c)")) == ExtReal(Rational(1, 2)));

  // Hand evaluation: positions alternate (1,1), (3,1).
  auto aux = reference_aux_semantics(f, abc, enc(abc, "(a b)"));
  using W = PartialLassoValue<Weight>::Word;
  CHECK(aux == PartialLassoValue<Weight>::defined(W({}, {pair(1, 1), pair(3, 1)})));
  CHECK(reference_value(f, abc, enc(abc, "(a b)"), *ratio(), pair(0, 1)) == ExtReal(2));
}

TEST_CASE("discount choice example evaluates to 8 on (a)", "[wal][example]") {
  Alphabet a1({"a"});
  const Weight hi = pair(5, Rational(1, 2)), lo = pair(2, Rational(3, 4));
  auto psi = parse_wal("join X. meet x. (X(x) => x |-> (5,0.5)) /\\ (!X(x) => x |-> (2,0.75))", *disc(), &a1);
  auto c = compile_ewal(psi, a1, disc(), pair(0, 1));
  CHECK(value(c, enc(a1, "(a)")) == ExtReal(8));
  CHECK(value(c, enc(a1, "a a (a a)")) == ExtReal(8));

  // Bellman: V = min(5 + V/2, 2 + 3V/4) has its fixed point at 8.
  const Rational v = 8;
  CHECK(std::min(Rational(5 + v / 2), Rational(2 + v * 3 / 4)) == v);

  // Every X with prefix ≤ 2 and period ≤ 3.
  ExtReal best = ExtReal::pos_inf();
  int tried = 0;
  for (std::size_t p = 0; p <= 2; ++p)
    for (std::size_t q = 1; q <= 3; ++q)
      for (unsigned bits = 0; bits < (1u << (p + q)); ++bits) {
        std::vector<Weight> pre, loop;
        for (std::size_t i = 0; i < p + q; ++i) (i < p ? pre : loop).push_back(((bits >> i) & 1u) ? hi : lo);
        best = min(best, disc()->val_lasso(pre, loop));
        ++tried;
      }
  CHECK(tried == 98);
  CHECK(best == ExtReal(8));
}

TEST_CASE("contradictory assignments give zero", "[wal][example]") {
  Alphabet ab({"a", "b"});
  auto f = parse_wal("meet x. (x |-> (1,1)) /\\ (x |-> (2,1))", *ratio()).body;
  auto c = compile_wal(f, ab, ratio(), pair(0, 1));
  for (auto text : {"(a)", "(b)", "a (b)", "b b (a b)", "(a a b)"}) {
    CHECK(value(c, enc(ab, text)) == ExtReal::neg_inf());
    CHECK(reference_aux_semantics(f, ab, enc(ab, text)).is_bottom());
  }
}

TEST_CASE("assignment-free sentences give val(1^w) or zero", "[wal][example]") {
  Alphabet ab({"a", "b"});
  auto f = w_translate(parse_mso("forall x. P_a(x)"));
  auto r = compile_wal(f, ab, ratio(), pair(1, 2));
  CHECK(value(r, enc(ab, "(a)")) == ExtReal(Rational(1, 2)));
  CHECK(value(r, enc(ab, "(b)")) == ExtReal::neg_inf());
  auto d = compile_wal(f, ab, disc(), pair(1, Rational(1, 2)));
  CHECK(value(d, enc(ab, "(a)")) == ExtReal(2));
  CHECK(value(d, enc(ab, "a (b)")) == ExtReal::pos_inf());
  auto e = compile_wal(f, ab, make_structure("energy"), Weight{Rational(-1)});
  CHECK(value(e, enc(ab, "(a)")) == ExtReal(0));
}

TEST_CASE("reference evaluator rows", "[wal][reference]") {
  Alphabet ab({"a", "b"});
  const Weight m = pair(1, 1);
  VarAssignment s;
  s.first["x"] = 2;
  auto w = enc(ab, "(a)");
  CHECK(reference_aux_semantics(wal_maps_to("x", m), ab, w, s) == update(PartialLassoValue<Weight>::top(), 2, m));
  CHECK(reference_aux_semantics(wal_implies(wal_letter("b", "x"), wal_maps_to("x", m)), ab, w, s).is_top());
  CHECK(reference_aux_semantics(wal_false(), ab, w).is_bottom());
  CHECK_THROWS_AS(reference_aux_semantics(wal_meet("X", wal_member("X", "x")), ab, w, s), UnsupportedError);
  CHECK_THROWS_AS(reference_aux_semantics(wal_letter("a", "y"), ab, w, s), InputError);
}

TEST_CASE("compiled sentences match the reference evaluator", "[wal][reference][property]") {
  Rng rng(419);
  for (auto& s : wal_sentences()) {
    auto st = make_structure(s.structure);
    Alphabet sigma(s.alphabet);
    auto f = parse_wal(s.text, *st, &sigma).body;
    auto one = s.one ? Weight::parse(*s.one) : default_one(*st);
    INFO(s.text);
    auto c = compile_wal(f, sigma, st, one);
    CHECK(c.h_unambiguous);
    for (int j = 0; j < 20; ++j) {
      auto w = random_lasso(rng, static_cast<int>(sigma.size()));
      INFO(format_lasso(sigma.decode(w)));
      auto aux = reference_aux_semantics(f, sigma, w);
      if (assignment_free(f)) CHECK((aux.is_top() || aux.is_bottom()));
      CHECK(value(c, w) == reference_value(f, sigma, w, *st, one));
    }
  }
}

TEST_CASE("automata translate to WAL and back", "[wal][roundtrip]") {
  Rng rng(421);
  int done = 0;
  for (auto& e : wba_corpus()) {
    if (!e.unambiguous) {
      CHECK_THROWS_AS(wba_to_wal(load(e)), AmbiguityError);
      continue;
    }
    auto a = load(e);
    INFO(e.name);
    auto c = compile_wal(wba_to_wal(a), a.alphabet(), a.structure, default_one(*a.structure));
    CHECK(c.h_unambiguous);
    for (int j = 0; j < 20; ++j) {
      auto w = random_lasso(rng, static_cast<int>(a.alphabet().size()));
      CHECK(value(c, w) == behavior(a, w).value);
    }
    ++done;
  }
  CHECK(done >= 6);

  auto single = load(corpus_entry("ratio_single"));
  auto c = compile_wal(wba_to_wal(single), single.alphabet(), single.structure, pair(0, 1));
  CHECK(value(c, enc(single.alphabet(), "(a)")) == ExtReal(Rational(1, 2)));
  auto last_b = load(corpus_entry("ratio_last_b"));
  auto d = compile_wal(wba_to_wal(last_b), last_b.alphabet(), last_b.structure, pair(0, 1));
  CHECK(value(d, enc(last_b.alphabet(), "(b)")) == ExtReal::neg_inf());
}

TEST_CASE("automata translate to eWAL and back", "[wal][roundtrip]") {
  Rng rng(431);
  WalOptions opts;
  opts.max_prefix_vars = 8;
  for (auto& e : wba_corpus()) {
    auto a = load(e);
    INFO(e.name);
    auto c = compile_ewal(wba_to_ewal(a), a.alphabet(), a.structure, default_one(*a.structure), opts);
    for (int j = 0; j < 20; ++j) {
      auto w = random_lasso(rng, static_cast<int>(a.alphabet().size()));
      CHECK(value(c, w) == behavior(a, w).value);
    }
  }
  auto two = load(corpus_entry("ratio_two_loops"));
  auto c = compile_ewal(wba_to_ewal(two), two.alphabet(), two.structure, pair(0, 1));
  CHECK(value(c, enc(two.alphabet(), "(a)")) == ExtReal(3));

  // Deterministic automata: both routes agree.
  auto det = load(corpus_entry("disc_det"));
  auto via_wal = compile_wal(wba_to_wal(det), det.alphabet(), det.structure, pair(0, 1));
  auto via_ewal = compile_ewal(wba_to_ewal(det), det.alphabet(), det.structure, pair(0, 1));
  for (int j = 0; j < 10; ++j) {
    auto w = random_lasso(rng, 2);
    CHECK(value(via_wal, w) == value(via_ewal, w));
  }
}

TEST_CASE("empty-language automata translate to zero", "[wal][roundtrip]") {
  auto a = parse_wba("structure: ratio\nalphabet: a b\nstates: q r\ninitial: q\naccepting: r\n"
                     "trans: q a q (1,1)\ntrans: q b q (2,1)\n");
  auto c = compile_ewal(wba_to_ewal(a), a.alphabet(), a.structure, pair(0, 1));
  auto d = compile_wal(wba_to_wal(a), a.alphabet(), a.structure, pair(0, 1));
  for (auto text : {"(a)", "(b)", "a (a b)", "b b (b)", "(a a b)"}) {
    CHECK(value(c, enc(a.alphabet(), text)) == ExtReal::neg_inf());
    CHECK(value(d, enc(a.alphabet(), text)) == ExtReal::neg_inf());
  }
}

TEST_CASE("eWAL prefixes", "[wal][ewal]") {
  Rng rng(433);
  Alphabet ab({"a", "b"});
  SECTION("an empty prefix is plain WAL") {
    auto f = parse_wal("meet x. (P_a(x) => x |-> (1,1)) /\\ (P_b(x) => x |-> (3,1))", *ratio());
    auto e = compile_ewal(f, ab, ratio(), pair(0, 1));
    auto w = compile_wal(f.body, ab, ratio(), pair(0, 1));
    for (int j = 0; j < 10; ++j) {
      auto u = random_lasso(rng, 2);
      CHECK(value(e, u) == value(w, u));
    }
  }
  SECTION("joining over a position") {
    auto psi = parse_wal("join x. P_a(x)", *ratio());
    auto c = compile_ewal(psi, ab, ratio(), pair(1, 1));
    CHECK(value(c, enc(ab, "(a)")) == ExtReal(1));
    CHECK(value(c, enc(ab, "b (a)")) == ExtReal(1));
    CHECK(value(c, enc(ab, "(b)")) == ExtReal::neg_inf());
  }
  SECTION("literal prefix quantification agrees with reading the tracks") {
    auto psi = parse_wal("join X. meet x. (X(x) => x |-> (5,0.5)) /\\ (!X(x) => x |-> (2,0.75))", *disc());
    WalOptions lit;
    lit.literal_prefix = true;
    lit.phi.literal = true;
    auto a = compile_ewal(psi, Alphabet({"a"}), disc(), pair(0, 1), lit);
    CHECK(value(a, enc(Alphabet({"a"}), "(a)")) == ExtReal(8));
    auto two = load(corpus_entry("ratio_two_loops"));
    auto b = compile_ewal(wba_to_ewal(two), two.alphabet(), two.structure, pair(0, 1), lit);
    CHECK(value(b, enc(two.alphabet(), "(a)")) == ExtReal(3));
  }
  SECTION("caps and sentences") {
    auto five = parse_wal("join X1. join X2. join X3. join X4. join X5. meet x. X1(x)", *ratio());
    CHECK_THROWS_AS(compile_ewal(five, ab, ratio(), pair(0, 1)), ResourceError);
    CHECK_THROWS_AS(compile_wal(parse_wal("P_a(x)", *ratio()).body, ab, ratio(), pair(0, 1)), InputError);
    CHECK_THROWS_AS(compile_ewal(parse_wal("join X. Y(x)", *ratio()), ab, ratio(), pair(0, 1)), InputError);
    CHECK_THROWS_AS(compile_wal(parse_wal("meet x. P_c(x)", *ratio()).body, ab, ratio(), pair(0, 1)), InputError);
  }
}
