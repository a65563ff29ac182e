#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qwal/mso.hpp"
#include "qwal/wba.hpp"

namespace qwal {

enum class WalKind { Letter, Equal, Less, Member, MapsTo, Implies, Merge, Meet };

struct WalNode;
using Wal = std::shared_ptr<const WalNode>;

/// Weight assignment formula. Letter atoms carry a set of letters like MSO atoms;
/// `Meet` is ⊓x or ⊓X depending on the variable.
struct WalNode {
  WalKind kind;
  std::vector<std::string> letters;  // Letter: sorted, unique
  std::string var;                   // Letter/Equal/Less/MapsTo: x; Member: X; Meet: bound variable
  std::string var2;                  // Equal/Less: y; Member: x
  Weight weight;                     // MapsTo
  Wal left, right;
};

Wal wal_letter(std::vector<std::string> letters, const std::string& x);
inline Wal wal_letter(const std::string& a, const std::string& x) { return wal_letter(std::vector<std::string>{a}, x); }
Wal wal_equal(const std::string& x, const std::string& y);
Wal wal_less(const std::string& x, const std::string& y);
Wal wal_member(const std::string& set, const std::string& x);
Wal wal_maps_to(const std::string& x, Weight m);
Wal wal_implies(Wal a, Wal b);
Wal wal_merge(Wal a, Wal b);
Wal wal_meet(const std::string& var, Wal body);
/// ⊓x.(x < x)
Wal wal_false();
/// φ ⇒ false
Wal wal_not(Wal a);
bool is_wal_false(const Wal& f);
/// Right-nested merge of a nonempty list.
Wal wal_merge_all(const std::vector<Wal>& fs);

std::set<std::string> free_vars(const Wal& f);
/// Const(φ), sorted.
std::vector<Weight> constants(const Wal& f);
/// No `x |-> m` anywhere.
bool assignment_free(const Wal& f);
/// Some ⊓X with X second-order.
bool has_set_meet(const Wal& f);
bool wal_equal_trees(const Wal& a, const Wal& b);
std::string to_string(const Wal& f);

/// ⊔𝒳1 … ⊔𝒳k. body; a plain WAL formula has an empty prefix.
struct EwalFormula {
  std::vector<std::string> prefix;
  Wal body;

  /// InputError unless the prefix variables are pairwise distinct.
  void validate() const;
  std::set<std::string> free() const;
};

std::string to_string(const EwalFormula& f);

/// Concrete syntax: the MSO grammar with `&` read as `/\`, `forall` as `meet`, `!φ` as φ ⇒ false,
/// plus `x |-> (w)`, `=>`, `/\`, `meet`, `join` (prefix only) and `false`. `|`, `->`, `<->` and
/// `exists` are expanded through their MSO definitions. Weight literals are checked by `s`;
/// letters by `sigma` when given.
EwalFormula parse_wal(std::string_view text, const ValuationStructure& s, const Alphabet* sigma = nullptr);

/// W(φ): ∧ ↦ ⊓, ∀ ↦ ⊓, ¬ψ ↦ ψ ⇒ false.
Wal w_translate(const Mso& f);
/// MSO formula equivalent to an assignment-free WAL formula (⟨⟨φ⟩⟩ = ⊤ iff it holds).
/// InputError on an assignment.
Mso wal_to_mso(const Wal& f);

/// Letters of Γ = Σ × Δ_φ × 2^𝒱. Δ index 0 is #, index k ≥ 1 is constants[k-1].
/// Names are `a_#` or `a_<k>`, followed by `_<bits>` over 𝒱 when 𝒱 is nonempty.
class GammaCodec {
 public:
  GammaCodec(Alphabet sigma, std::vector<Weight> constants, std::vector<std::string> vars = {});

  const Alphabet& sigma() const { return sigma_; }
  const Alphabet& gamma() const { return gamma_; }
  const std::vector<Weight>& constants() const { return constants_; }
  const std::vector<std::string>& vars() const { return vars_; }

  LetterId letter(LetterId a, std::size_t delta, std::size_t bits) const;
  LetterId sigma_of(LetterId c) const;
  std::size_t delta_of(LetterId c) const;
  std::size_t bits_of(LetterId c) const;
  /// Index of m in Δ; InputError when m is not a constant.
  std::size_t delta_index(const Weight& m) const;

  /// Names of the Γ letters satisfying `pred(a, delta, bits)`.
  template <class Pred>
  std::vector<std::string> select(Pred pred) const {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < gamma_.size(); ++c) {
      auto l = static_cast<LetterId>(c);
      if (pred(sigma_of(l), delta_of(l), bits_of(l))) out.push_back(gamma_.name(l));
    }
    return out;
  }

  std::vector<LetterId> h() const;
  /// g with # ↦ one.
  std::vector<Weight> g(const Weight& one) const;

 private:
  Alphabet sigma_;
  std::vector<Weight> constants_;
  std::vector<std::string> vars_;
  Alphabet gamma_;
};

struct PhiOptions {
  /// Follow every case of the inductive construction, even on assignment-free subformulas.
  /// Otherwise Φ_Y(ζ) for assignment-free ζ is built as (MSO form of ζ) ∧ Y(∅).
  bool literal = false;
};

/// Φ(ζ) over Γ: its models are the encodings code(w, η) with ⟨⟨ζ⟩⟩(w_σ) = η. Bound helper sets
/// are named `$g<n>`, helper positions `$v<n>`, with one counter per call.
Mso phi_construction(const Wal& zeta, const GammaCodec& codec, const PhiOptions& opts = {});
/// Φ_Y(ζ) for a given set variable Y.
Mso phi_y_construction(const Wal& zeta, const std::string& y, const GammaCodec& codec, const PhiOptions& opts = {});

struct WalOptions {
  std::size_t state_cap = kDefaultMsoStateCap;
  /// Upper bound on |𝒱| for eWAL.
  std::size_t max_prefix_vars = 4;
  PhiOptions phi;
  /// eWAL: quantify the set variables of the prefix with the encoding formula as written.
  /// Otherwise X(y) inside the body reads the X bit of the letter at y, which is equivalent.
  bool literal_prefix = false;
};

struct CompiledWal {
  GammaCodec codec;
  Mso beta;
  std::size_t dfa_states = 0;
  NivatTriple triple;
  bool h_unambiguous = false;
  WeightedBuchiAutomaton automaton;
};

/// Σ defaults to the letters of φ when `sigma` is empty. InputError for a formula with free
/// variables; InternalError when ℒ(β) is not h-unambiguous.
CompiledWal compile_wal(const Wal& phi, const Alphabet& sigma, StructurePtr structure, const Weight& one,
                        const WalOptions& opts = {});
CompiledWal compile_ewal(const EwalFormula& psi, const Alphabet& sigma, StructurePtr structure, const Weight& one,
                         const WalOptions& opts = {});

/// Letters mentioned by the formula, sorted.
std::vector<std::string> formula_letters(const Wal& f);

/// β(X1..Xm): the sets X_i = positions taking t_i describe an accepting run of `a`.
Mso run_formula(const BuchiAutomaton& a, const std::vector<std::string>& sets);
/// W(∃X1…∃Xm.β) ⊓ ⊓X1…⊓Xm.[W(β) ⇒ ⊓x. ⊓_i (X_i(x) ⇒ x ↦ wt(t_i))]. AmbiguityError for an
/// ambiguous automaton.
Wal wba_to_wal(const WeightedBuchiAutomaton& a);
/// ⊔X1…⊔Xm.(W(β) ⊓ ⊓x. ⊓_i (X_i(x) ⇒ x ↦ wt(t_i))).
EwalFormula wba_to_ewal(const WeightedBuchiAutomaton& a);

/// ⟨⟨φ⟩⟩(w_σ) for ⊓X-free φ, computed directly. ⊓x merges the values for x over the prefix
/// and `unroll_bound` loop periods, reads a periodic result off a middle period, and insists
/// that one more period gives the same value (NonConvergenceError otherwise).
/// UnsupportedError on ⊓X.
PartialLassoValue<Weight> reference_aux_semantics(const Wal& phi, const Alphabet& sigma, const LassoWord<LetterId>& w,
                                                  const VarAssignment& s = {}, std::size_t unroll_bound = 4);
/// [[φ]](w_σ): undefined positions get `one`, ⊥ gives 𝟘.
ExtReal reference_value(const Wal& phi, const Alphabet& sigma, const LassoWord<LetterId>& w, const ValuationStructure& st,
                        const Weight& one, const VarAssignment& s = {}, std::size_t unroll_bound = 4);

/// Formula file: optional `structure:`, `one:` and `alphabet:` header lines, then the formula.
struct WalText {
  StructurePtr structure;
  std::optional<Weight> one;
  std::optional<Alphabet> alphabet;
  EwalFormula formula;
};

/// `override_structure` replaces the header's structure.
WalText parse_wal_file(std::string_view text, StructurePtr override_structure = nullptr);
std::string format_wal_file(const EwalFormula& f, const ValuationStructure& s, const std::optional<Weight>& one,
                            const std::optional<Alphabet>& alphabet = std::nullopt);

/// 𝟙 used when none is given: (0,1) for ratio and disc, the zero vector for energy.
Weight default_one(const ValuationStructure& s);

}  // namespace qwal
