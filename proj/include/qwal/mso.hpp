#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qwal/alphabet.hpp"
#include "qwal/buchi.hpp"
#include "qwal/omega.hpp"
#include "qwal/satdfa.hpp"

namespace qwal {

enum class MsoKind { Letter, Equal, Less, Member, And, Not, Forall };

struct MsoNode;
using Mso = std::shared_ptr<const MsoNode>;

/// Core MSO syntax. Sugar (∨, ∃, →, ↔) is expanded by the builders below.
///
/// Letter atoms carry a set of letters: P_S(x) holds when the letter at x is in S,
/// so P_a(x) is the singleton case.
struct MsoNode {
  MsoKind kind;
  std::vector<std::string> letters;  // Letter: sorted, unique
  std::string var;                   // Letter/Equal/Less: x; Member: the set X; Forall: bound variable
  std::string var2;                  // Equal/Less: y; Member: the position x
  Mso left, right;
};

Mso mso_letter(std::vector<std::string> letters, const std::string& x);
inline Mso mso_letter(const std::string& a, const std::string& x) { return mso_letter(std::vector<std::string>{a}, x); }
Mso mso_equal(const std::string& x, const std::string& y);
Mso mso_less(const std::string& x, const std::string& y);
/// X(x)
Mso mso_member(const std::string& set, const std::string& x);
Mso mso_and(Mso a, Mso b);
Mso mso_not(Mso a);
Mso mso_forall(const std::string& var, Mso body);

Mso mso_or(Mso a, Mso b);
Mso mso_implies(Mso a, Mso b);
Mso mso_iff(Mso a, Mso b);
Mso mso_exists(const std::string& var, Mso body);
/// ∀x.(x<x) — closed and unsatisfiable.
Mso mso_false();
Mso mso_true();
/// Conjunction/disjunction of a list; empty lists give true/false.
Mso mso_and_all(const std::vector<Mso>& fs);
Mso mso_or_all(const std::vector<Mso>& fs);

/// Free variables in name order.
std::set<std::string> free_vars(const Mso& f);
std::string to_string(const Mso& f);
/// Structural equality.
bool mso_equal_trees(const Mso& a, const Mso& b);

/// Parses the concrete grammar (`P_a(x)`, `x = y`, `x < y`, `X(x)`, `&`, `|`, `!`, `->`, `<->`,
/// `forall`, `exists`). Letters are checked against `alphabet` when given.
Mso parse_mso(std::string_view text, const Alphabet* alphabet = nullptr);

class Lexer;
/// Parses one MSO formula from a lexer; used by the WAL parser for sub-expressions.
Mso parse_mso_from(Lexer& lex, const Alphabet* alphabet);

/// Σ × {0,1}^k with letter index a + |Σ|·bits; bit j belongs to frees[j]. Names are `a_<bits>`
/// with bit 0 first, or plain `a` when k = 0.
Alphabet extended_alphabet(const Alphabet& sigma, std::size_t k);

/// First-order positions and second-order position sets of a w-assignment.
struct VarAssignment {
  std::map<std::string, std::size_t> first;
  std::map<std::string, PositionSetLasso> second;
};

/// Letter lasso over Σ × {0,1}^|frees| encoding (w, σ). InputError for an unassigned variable.
LassoWord<LetterId> encode_assignment(const LassoWord<LetterId>& w, std::size_t sigma_size, const VarAssignment& s,
                                      const std::vector<std::string>& frees);

inline constexpr std::size_t kDefaultMsoStateCap = 200000;

/// Bottom-up compiler to saturated lasso DFAs with a per-instance cache keyed on
/// alpha-canonical subformulas. Not thread-safe.
class MsoCompiler {
 public:
  explicit MsoCompiler(Alphabet sigma, std::size_t state_cap = kDefaultMsoStateCap);

  const Alphabet& alphabet() const { return sigma_; }
  std::size_t state_cap() const { return cap_; }
  std::size_t cache_size() const { return cache_.size(); }

  /// DFA over extended_alphabet(Σ, |frees|); only valid encodings (one position per
  /// first-order track) are accepted. InputError when frees misses a free variable.
  LassoDfa compile(const Mso& f, const std::vector<std::string>& frees);
  /// The same language as a Büchi automaton.
  BuchiAutomaton compile_buchi(const Mso& f, const std::vector<std::string>& frees);

  bool satisfies(const Mso& f, const LassoWord<LetterId>& w, const VarAssignment& s);

 private:
  struct Compiled {
    LassoDfa dfa;
    std::vector<std::string> vars;  // sorted free variables; track j = vars[j]
  };

  Compiled rec(const Mso& f);
  Compiled compile_node(const Mso& f);
  LassoDfa cylindrify(const Compiled& c, const std::vector<std::string>& to) const;
  /// Intersects with "one position per first-order track" for the tracks in `mask`.
  LassoDfa restrict_valid(LassoDfa d, const std::vector<std::string>& vars, std::size_t mask);
  LassoDfa singleton(std::size_t k, std::size_t mask);
  Compiled negate(Compiled c);
  Compiled project(Compiled c, const std::string& var);
  LassoDfa checked(LassoDfa d, const Mso& where) const;
  std::vector<LetterId> letter_ids(const std::vector<std::string>& names) const;

  Alphabet sigma_;
  std::size_t cap_;
  std::unordered_map<std::string, LassoDfa> cache_;
  std::map<std::pair<std::size_t, std::size_t>, LassoDfa> singletons_;
};

/// Büchi automaton over Σ × {0,1}^|frees| for (w, σ) ⊨ f.
BuchiAutomaton compile_mso(const Mso& f, const Alphabet& sigma, const std::vector<std::string>& frees,
                           std::size_t state_cap = kDefaultMsoStateCap);

/// w_σ ⊨ f, decided on the compiled automaton.
bool satisfies_mso(const Mso& f, const Alphabet& sigma, const LassoWord<LetterId>& w, const VarAssignment& s);

}  // namespace qwal
