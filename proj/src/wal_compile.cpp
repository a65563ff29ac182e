#include <algorithm>

#include "qwal/errors.hpp"
#include "qwal/lexer.hpp"
#include "qwal/satdfa.hpp"
#include "qwal/wal.hpp"

namespace qwal {

namespace {

class PhiBuilder {
 public:
  PhiBuilder(const GammaCodec& codec, const PhiOptions& opts, std::set<std::string> substituted = {})
      : codec_(codec), opts_(opts), substituted_(std::move(substituted)) {}

  Mso phi(const Wal& zeta) {
    std::string y = fresh_set(), v = fresh_pos();
    return mso_exists(y, mso_and(phi_y(zeta, y), mso_forall(v, mso_or(mso_member(y, v), undefined_at(v)))));
  }

  Mso phi_y(const Wal& z, const std::string& y) {
    if (!opts_.literal && assignment_free(z)) return mso_and(plain(z), empty(y));
    switch (z->kind) {
      case WalKind::Letter: return mso_and(letter(z->letters, z->var), empty(y));
      case WalKind::Equal:
      case WalKind::Less:
      case WalKind::Member: return mso_and(plain(z), empty(y));
      case WalKind::MapsTo: {
        std::size_t d = codec_.delta_index(z->weight);
        std::string v = fresh_pos();
        return mso_and(mso_letter(codec_.select([&](LetterId, std::size_t b, std::size_t) { return b == d; }), z->var),
                       mso_forall(v, mso_iff(mso_member(y, v), mso_equal(z->var, v))));
      }
      case WalKind::Implies: {
        Mso k = kappa(z->left);
        return mso_or(mso_and(k, phi_y(z->right, y)), mso_and(mso_not(k), empty(y)));
      }
      case WalKind::Merge: {
        std::string y1 = fresh_set(), y2 = fresh_set(), v = fresh_pos();
        Mso split = mso_forall(v, mso_iff(mso_member(y, v), mso_or(mso_member(y1, v), mso_member(y2, v))));
        return mso_exists(y1, mso_exists(y2, mso_and_all({phi_y(z->left, y1), phi_y(z->right, y2), split})));
      }
      case WalKind::Meet: {
        // Y is the least set with ∀𝒳.∃Y′.(Φ_Y′(ζ′) ∧ Y′ ⊆ Y).
        bool shadow = substituted_.erase(z->var) > 0;
        std::string yp = fresh_set(), zs = fresh_set();
        Mso inner = phi_y(z->left, yp);
        if (shadow) substituted_.insert(z->var);
        auto xi = [&](const std::string& target) {
          return mso_forall(z->var, mso_exists(yp, mso_and(inner, subset(yp, target))));
        };
        return mso_and(xi(y), mso_forall(zs, mso_implies(xi(zs), subset(y, zs))));
      }
    }
    throw InternalError("bad WAL node");
  }

 private:
  // κ = ∃Z.[Φ_Z(ζ1) ∧ Z(∅)]: ⟨⟨ζ1⟩⟩ = ⊤.
  Mso kappa(const Wal& z1) {
    if (!opts_.literal && assignment_free(z1)) return plain(z1);
    std::string zs = fresh_set();
    return mso_exists(zs, mso_and(phi_y(z1, zs), empty(zs)));
  }

  // Assignment-free formula read over Γ.
  Mso plain(const Wal& z) {
    if (is_wal_false(z)) return mso_false();
    switch (z->kind) {
      case WalKind::Letter: return letter(z->letters, z->var);
      case WalKind::Member:
        if (substituted_.count(z->var)) return track(z->var, z->var2);
        return mso_member(z->var, z->var2);
      case WalKind::Implies:
        if (is_wal_false(z->right)) return mso_not(plain(z->left));
        return mso_implies(plain(z->left), plain(z->right));
      case WalKind::Merge: return mso_and(plain(z->left), plain(z->right));
      case WalKind::Meet: {
        bool shadow = substituted_.erase(z->var) > 0;
        Mso body = plain(z->left);
        if (shadow) substituted_.insert(z->var);
        return mso_forall(z->var, body);
      }
      default: return wal_to_mso(z);
    }
  }

  Mso letter(const std::vector<std::string>& names, const std::string& x) const {
    std::vector<LetterId> ids;
    for (auto& n : names) {
      auto id = codec_.sigma().find(n);
      if (id) ids.push_back(*id);
    }
    return mso_letter(codec_.select([&](LetterId a, std::size_t, std::size_t) {
                        return std::find(ids.begin(), ids.end(), a) != ids.end();
                      }),
                      x);
  }

  // X(y) read off the 2^𝒱 component.
  Mso track(const std::string& var, const std::string& x) const {
    std::size_t j = static_cast<std::size_t>(std::find(codec_.vars().begin(), codec_.vars().end(), var) - codec_.vars().begin());
    return mso_letter(codec_.select([&](LetterId, std::size_t, std::size_t bits) { return ((bits >> j) & 1u) != 0; }), x);
  }

  Mso undefined_at(const std::string& v) const {
    return mso_letter(codec_.select([](LetterId, std::size_t b, std::size_t) { return b == 0; }), v);
  }

  Mso empty(const std::string& y) {
    std::string v = fresh_pos();
    return mso_forall(v, mso_not(mso_member(y, v)));
  }

  Mso subset(const std::string& a, const std::string& b) {
    std::string v = fresh_pos();
    return mso_forall(v, mso_implies(mso_member(a, v), mso_member(b, v)));
  }

  std::string fresh_set() { return "$g" + std::to_string(++counter_); }
  std::string fresh_pos() { return "$v" + std::to_string(++counter_); }

  const GammaCodec& codec_;
  PhiOptions opts_;
  std::set<std::string> substituted_;
  int counter_ = 0;
};

Alphabet choose_sigma(const Alphabet& sigma, const Wal& f) {
  if (sigma.size() > 0) {
    for (auto& a : formula_letters(f))
      if (!sigma.find(a)) throw InputError("letter '" + a + "' is not in the alphabet");
    return sigma;
  }
  auto letters = formula_letters(f);
  if (letters.empty()) throw InputError("the formula mentions no letter; give the alphabet");
  return Alphabet(letters);
}

// Some word with two distinct preimages under h in L, as (Σ-word, first, second).
std::optional<HAmbiguityWitness> dfa_h_ambiguity(const LassoDfa& l, const std::vector<LetterId>& h) {
  const int n = l.base_letters;
  std::vector<LetterId> f1, f2;
  std::vector<char> diag;
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d)
      if (h[static_cast<std::size_t>(c)] == h[static_cast<std::size_t>(d)]) {
        f1.push_back(c);
        f2.push_back(d);
        diag.push_back(c == d);
      }
  const int m = static_cast<int>(f1.size());
  // Words using only diagonal pairs.
  LassoDfa d;
  d.base_letters = m;
  d.initial = 0;
  d.accepting = {1, 0};
  d.delta.assign(static_cast<std::size_t>(2 * 2 * m), 1);
  for (int c = 0; c < m; ++c)
    if (diag[static_cast<std::size_t>(c)]) {
      d.delta[static_cast<std::size_t>(c)] = 0;
      d.delta[static_cast<std::size_t>(m + c)] = 0;
    }
  LassoDfa both = dfa_intersection(dfa_preimage(l, f1), dfa_preimage(l, f2)).minimized();
  auto w = dfa_intersection(both, dfa_complement(d)).minimized().witness();
  if (!w) return std::nullopt;
  auto map = [&](const std::vector<LetterId>& f, const std::vector<LetterId>& v) {
    std::vector<LetterId> out;
    for (auto c : v) out.push_back(f[static_cast<std::size_t>(c)]);
    return out;
  };
  HAmbiguityWitness out;
  out.first = LassoWord<LetterId>(map(f1, w->prefix()), map(f1, w->loop()));
  out.second = LassoWord<LetterId>(map(f2, w->prefix()), map(f2, w->loop()));
  out.word = LassoWord<LetterId>(map(h, out.first.prefix()), map(h, out.first.loop()));
  return out;
}

constexpr std::size_t kPairLetterLimit = 4096;

CompiledWal finish(GammaCodec codec, Mso beta, StructurePtr structure, const Weight& one, const WalOptions& opts,
                   bool require_h_unambiguous) {
  if (!structure) throw InputError("no valuation structure");
  structure->validate_one(one);
  MsoCompiler compiler(codec.gamma(), opts.state_cap);
  LassoDfa dfa = compiler.compile(beta, {});
  CompiledWal out{std::move(codec), beta, static_cast<std::size_t>(dfa.num_states()), {}, false, {}};
  // The pair alphabet grows quadratically in |Γ|; without the requirement, large ones are
  // left to recompose.
  std::optional<HAmbiguityWitness> amb;
  std::optional<bool> known;
  std::size_t per_letter = out.codec.gamma().size() / out.codec.sigma().size();
  if (require_h_unambiguous || per_letter * per_letter * out.codec.sigma().size() <= kPairLetterLimit) {
    amb = dfa_h_ambiguity(dfa, out.codec.h());
    known = !amb.has_value();
  }
  if (require_h_unambiguous && amb) {
    auto g = out.codec.gamma();
    throw InternalError("encoding language is not h-unambiguous: " + format_lasso(out.codec.sigma().decode(amb->word)) +
                        " has preimages " + format_lasso(g.decode(amb->first)) + " and " + format_lasso(g.decode(amb->second)));
  }
  out.triple.sigma = out.codec.sigma();
  out.triple.gamma = out.codec.gamma();
  out.triple.h = out.codec.h();
  out.triple.g = out.codec.g(one);
  out.triple.language = dfa_to_buchi(dfa, out.codec.gamma());
  out.automaton = recompose(out.triple, structure, one, known);
  out.h_unambiguous = out.automaton.word_determined;
  return out;
}

}  // namespace

Mso phi_construction(const Wal& zeta, const GammaCodec& codec, const PhiOptions& opts) {
  return PhiBuilder(codec, opts).phi(zeta);
}

Mso phi_y_construction(const Wal& zeta, const std::string& y, const GammaCodec& codec, const PhiOptions& opts) {
  return PhiBuilder(codec, opts).phi_y(zeta, y);
}

CompiledWal compile_wal(const Wal& phi, const Alphabet& sigma, StructurePtr structure, const Weight& one,
                        const WalOptions& opts) {
  if (auto fv = free_vars(phi); !fv.empty()) throw InputError("not a sentence: '" + *fv.begin() + "' is free");
  GammaCodec codec(choose_sigma(sigma, phi), constants(phi));
  Mso beta = phi_construction(phi, codec, opts.phi);
  return finish(std::move(codec), beta, std::move(structure), one, opts, true);
}

CompiledWal compile_ewal(const EwalFormula& psi, const Alphabet& sigma, StructurePtr structure, const Weight& one,
                         const WalOptions& opts) {
  psi.validate();
  if (auto fv = psi.free(); !fv.empty()) throw InputError("not a sentence: '" + *fv.begin() + "' is free");
  if (psi.prefix.size() > opts.max_prefix_vars)
    throw ResourceError("eWAL prefix has " + std::to_string(psi.prefix.size()) + " variables; the cap is " +
                        std::to_string(opts.max_prefix_vars));
  if (psi.prefix.empty()) return compile_wal(psi.body, sigma, std::move(structure), one, opts);

  GammaCodec codec(choose_sigma(sigma, psi.body), constants(psi.body), psi.prefix);
  std::set<std::string> substituted;
  if (!opts.literal_prefix)
    for (auto& v : psi.prefix)
      if (is_second_order(v)) substituted.insert(v);
  PhiBuilder builder(codec, opts.phi, substituted);
  Mso body = builder.phi(psi.body);

  // ∀y. ⋀ (R_𝒳,1(y) ∧ y ∈ 𝒳) ∨ (R_𝒳,0(y) ∧ y ∉ 𝒳) for the quantified prefix variables.
  const std::string y = "$v0";
  std::vector<Mso> enc;
  for (std::size_t j = 0; j < psi.prefix.size(); ++j) {
    const auto& v = psi.prefix[j];
    if (substituted.count(v)) continue;
    auto r = [&](bool on) {
      return mso_letter(codec.select([&](LetterId, std::size_t, std::size_t bits) { return (((bits >> j) & 1u) != 0) == on; }), y);
    };
    Mso in = is_second_order(v) ? mso_member(v, y) : mso_equal(y, v);
    enc.push_back(mso_or(mso_and(r(true), in), mso_and(r(false), mso_not(in))));
  }
  Mso beta = body;
  if (!enc.empty()) {
    beta = mso_and(mso_forall(y, mso_and_all(enc)), body);
    for (std::size_t j = psi.prefix.size(); j-- > 0;)
      if (!substituted.count(psi.prefix[j])) beta = mso_exists(psi.prefix[j], beta);
  }
  return finish(std::move(codec), beta, std::move(structure), one, opts, false);
}

Mso run_formula(const BuchiAutomaton& a, const std::vector<std::string>& sets) {
  const auto& ts = a.transitions;
  if (sets.size() != ts.size()) throw InternalError("one set per transition expected");
  const std::size_t m = ts.size();
  auto X = [&](std::size_t i, const std::string& v) { return mso_member(sets[i], v); };
  std::vector<Mso> parts;

  // Partition.
  std::vector<Mso> exactly;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Mso> c{X(i, "x")};
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) c.push_back(mso_not(X(j, "x")));
    exactly.push_back(mso_and_all(c));
  }
  parts.push_back(mso_forall("x", mso_or_all(exactly)));

  // Labels.
  std::vector<Mso> labels;
  for (std::size_t i = 0; i < m; ++i)
    labels.push_back(mso_implies(X(i, "x"), mso_letter(a.alphabet.name(ts[i].letter), "x")));
  parts.push_back(mso_forall("x", mso_and_all(labels)));

  // Consecutive transitions match.
  Mso succ = mso_and(mso_less("x", "y"), mso_not(mso_exists("z", mso_and(mso_less("x", "z"), mso_less("z", "y")))));
  std::vector<Mso> match;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Mso> next;
    for (std::size_t j = 0; j < m; ++j)
      if (ts[j].src == ts[i].dst) next.push_back(X(j, "y"));
    match.push_back(mso_implies(X(i, "x"), mso_or_all(next)));
  }
  parts.push_back(mso_forall("x", mso_forall("y", mso_implies(succ, mso_and_all(match)))));

  // Start in I.
  std::vector<Mso> start;
  for (std::size_t i = 0; i < m; ++i)
    if (std::find(a.initial.begin(), a.initial.end(), ts[i].src) != a.initial.end()) start.push_back(X(i, "x"));
  parts.push_back(mso_forall("x", mso_implies(mso_not(mso_exists("y", mso_less("y", "x"))), mso_or_all(start))));

  // Some accepting state entered infinitely often.
  std::vector<Mso> inf;
  for (std::size_t q = 0; q < a.num_states(); ++q) {
    if (!a.accepting[q]) continue;
    std::vector<Mso> into;
    for (std::size_t i = 0; i < m; ++i)
      if (static_cast<std::size_t>(ts[i].dst) == q) into.push_back(X(i, "y"));
    if (into.empty()) continue;
    inf.push_back(mso_forall("x", mso_exists("y", mso_and(mso_less("x", "y"), mso_or_all(into)))));
  }
  parts.push_back(mso_or_all(inf));
  return mso_and_all(parts);
}

namespace {

std::vector<std::string> transition_sets(const WeightedBuchiAutomaton& a) {
  if (a.automaton.transitions.empty()) throw InputError("automaton without transitions");
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= a.automaton.transitions.size(); ++i) out.push_back("X" + std::to_string(i));
  return out;
}

// ⊓x. ⊓_i (X_i(x) ⇒ x ↦ wt(t_i))
Wal weight_labels(const WeightedBuchiAutomaton& a, const std::vector<std::string>& sets) {
  std::vector<Wal> parts;
  for (std::size_t i = 0; i < sets.size(); ++i) parts.push_back(wal_implies(wal_member(sets[i], "x"), wal_maps_to("x", a.weights[i])));
  return wal_meet("x", wal_merge_all(parts));
}

}  // namespace

Wal wba_to_wal(const WeightedBuchiAutomaton& a) {
  a.validate();
  if (auto amb = check_ambiguity(a.automaton))
    throw AmbiguityError("automaton is ambiguous on " + format_lasso(a.alphabet().decode(amb->word)));
  auto sets = transition_sets(a);
  Mso beta = run_formula(a.automaton, sets);
  Mso runs = beta;
  for (std::size_t i = sets.size(); i-- > 0;) runs = mso_exists(sets[i], runs);
  Wal labelled = wal_implies(w_translate(beta), weight_labels(a, sets));
  for (std::size_t i = sets.size(); i-- > 0;) labelled = wal_meet(sets[i], labelled);
  return wal_merge(w_translate(runs), labelled);
}

EwalFormula wba_to_ewal(const WeightedBuchiAutomaton& a) {
  a.validate();
  auto sets = transition_sets(a);
  EwalFormula out;
  out.prefix = sets;
  out.body = wal_merge(w_translate(run_formula(a.automaton, sets)), weight_labels(a, sets));
  return out;
}

}  // namespace qwal
