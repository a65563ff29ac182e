#include "qwal/wal.hpp"

#include <algorithm>

#include "qwal/errors.hpp"
#include "qwal/lexer.hpp"

namespace qwal {

namespace {

Wal make(WalNode n) { return std::make_shared<const WalNode>(std::move(n)); }

void require_first(const std::string& v) {
  if (is_second_order(v)) throw InputError("'" + v + "' is second-order where a position is expected");
}

}  // namespace

Wal wal_letter(std::vector<std::string> letters, const std::string& x) {
  require_first(x);
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  return make({WalKind::Letter, std::move(letters), x, {}, {}, nullptr, nullptr});
}

Wal wal_equal(const std::string& x, const std::string& y) {
  require_first(x);
  require_first(y);
  return make({WalKind::Equal, {}, x, y, {}, nullptr, nullptr});
}

Wal wal_less(const std::string& x, const std::string& y) {
  require_first(x);
  require_first(y);
  return make({WalKind::Less, {}, x, y, {}, nullptr, nullptr});
}

Wal wal_member(const std::string& set, const std::string& x) {
  if (!is_second_order(set)) throw InputError("'" + set + "' is first-order where a set is expected");
  require_first(x);
  return make({WalKind::Member, {}, set, x, {}, nullptr, nullptr});
}

Wal wal_maps_to(const std::string& x, Weight m) {
  require_first(x);
  return make({WalKind::MapsTo, {}, x, {}, std::move(m), nullptr, nullptr});
}

Wal wal_implies(Wal a, Wal b) { return make({WalKind::Implies, {}, {}, {}, {}, std::move(a), std::move(b)}); }
Wal wal_merge(Wal a, Wal b) { return make({WalKind::Merge, {}, {}, {}, {}, std::move(a), std::move(b)}); }
Wal wal_meet(const std::string& var, Wal body) { return make({WalKind::Meet, {}, var, {}, {}, std::move(body), nullptr}); }
Wal wal_false() { return wal_meet("x", wal_less("x", "x")); }
Wal wal_not(Wal a) { return wal_implies(std::move(a), wal_false()); }

bool is_wal_false(const Wal& f) {
  return f->kind == WalKind::Meet && !is_second_order(f->var) && f->left->kind == WalKind::Less &&
         f->left->var == f->var && f->left->var2 == f->var;
}

Wal wal_merge_all(const std::vector<Wal>& fs) {
  if (fs.empty()) throw InternalError("empty merge");
  Wal r = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) r = wal_merge(fs[i], r);
  return r;
}

std::set<std::string> free_vars(const Wal& f) {
  switch (f->kind) {
    case WalKind::Letter:
    case WalKind::MapsTo: return {f->var};
    case WalKind::Equal:
    case WalKind::Less:
    case WalKind::Member: return {f->var, f->var2};
    case WalKind::Implies:
    case WalKind::Merge: {
      auto s = free_vars(f->left);
      s.merge(free_vars(f->right));
      return s;
    }
    case WalKind::Meet: {
      auto s = free_vars(f->left);
      s.erase(f->var);
      return s;
    }
  }
  throw InternalError("bad WAL node");
}

namespace {

template <class Fn>
void visit(const Wal& f, Fn&& fn) {
  fn(f);
  if (f->left) visit(f->left, fn);
  if (f->right) visit(f->right, fn);
}

}  // namespace

std::vector<Weight> constants(const Wal& f) {
  std::vector<Weight> out;
  visit(f, [&](const Wal& n) {
    if (n->kind == WalKind::MapsTo) out.push_back(n->weight);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool assignment_free(const Wal& f) {
  bool free = true;
  visit(f, [&](const Wal& n) { free = free && n->kind != WalKind::MapsTo; });
  return free;
}

bool has_set_meet(const Wal& f) {
  bool found = false;
  visit(f, [&](const Wal& n) { found = found || (n->kind == WalKind::Meet && is_second_order(n->var)); });
  return found;
}

std::vector<std::string> formula_letters(const Wal& f) {
  std::vector<std::string> out;
  visit(f, [&](const Wal& n) {
    if (n->kind == WalKind::Letter) out.insert(out.end(), n->letters.begin(), n->letters.end());
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool wal_equal_trees(const Wal& a, const Wal& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind || a->letters != b->letters || a->var != b->var || a->var2 != b->var2 ||
      !(a->weight == b->weight))
    return false;
  return wal_equal_trees(a->left, b->left) && wal_equal_trees(a->right, b->right);
}

namespace {

std::string print(const Wal& f);

std::string operand(const Wal& f) {
  auto s = print(f);
  return f->kind == WalKind::Meet && !is_wal_false(f) ? "(" + s + ")" : s;
}

std::string print(const Wal& f) {
  if (is_wal_false(f)) return "false";
  switch (f->kind) {
    case WalKind::Letter: {
      if (f->letters.size() == 1) return "P_" + f->letters[0] + "(" + f->var + ")";
      if (f->letters.empty()) return "!(" + f->var + " = " + f->var + ")";
      std::string s = "(";
      for (std::size_t i = 0; i < f->letters.size(); ++i) s += (i ? " | P_" : "P_") + f->letters[i] + "(" + f->var + ")";
      return s + ")";
    }
    case WalKind::Equal: return f->var + " = " + f->var2;
    case WalKind::Less: return f->var + " < " + f->var2;
    case WalKind::Member: return f->var + "(" + f->var2 + ")";
    case WalKind::MapsTo: return f->var + " |-> " + f->weight.str();
    case WalKind::Implies:
      if (is_wal_false(f->right)) {
        auto k = f->left->kind;
        if (k == WalKind::Equal || k == WalKind::Less || k == WalKind::MapsTo) return "!(" + print(f->left) + ")";
        return "!" + operand(f->left);
      }
      return "(" + operand(f->left) + " => " + operand(f->right) + ")";
    case WalKind::Merge: return "(" + operand(f->left) + " /\\ " + operand(f->right) + ")";
    case WalKind::Meet: return "meet " + f->var + ". " + print(f->left);
  }
  throw InternalError("bad WAL node");
}

// MSO sugar, expanded on the WAL side through W.
Wal w_or(Wal a, Wal b) { return wal_not(wal_merge(wal_not(std::move(a)), wal_not(std::move(b)))); }
Wal w_arrow(Wal a, Wal b) { return wal_not(wal_merge(std::move(a), wal_not(std::move(b)))); }
Wal w_iff(Wal a, Wal b) { return wal_merge(w_arrow(a, b), w_arrow(b, a)); }
Wal w_exists(const std::string& v, Wal body) { return wal_not(wal_meet(v, wal_not(std::move(body)))); }

class WalParser {
 public:
  WalParser(Lexer& lex, const ValuationStructure& s, const Alphabet* sigma) : lex_(lex), s_(s), sigma_(sigma) {}

  EwalFormula sentence() {
    EwalFormula out;
    while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "join") {
      lex_.next();
      out.prefix.push_back(variable());
      lex_.expect(Tok::Dot, "'.'");
    }
    out.body = formula();
    if (lex_.peek().kind != Tok::End)
      throw ParseError("trailing input at offset " + std::to_string(lex_.peek().pos), lex_.peek().pos);
    out.validate();
    return out;
  }

 private:
  Wal formula() {
    Wal a = implication();
    if (lex_.accept(Tok::Iff)) a = w_iff(a, implication());
    return a;
  }

  Wal implication() {
    Wal a = disjunction();
    if (lex_.accept(Tok::Arrow)) return w_arrow(a, implication());
    if (lex_.accept(Tok::Implies)) return wal_implies(a, implication());
    return a;
  }

  Wal disjunction() {
    Wal a = conjunction();
    while (lex_.accept(Tok::Bar)) a = w_or(a, conjunction());
    return a;
  }

  Wal conjunction() {
    Wal a = unary();
    while (lex_.accept(Tok::Amp) || lex_.accept(Tok::Meet)) a = wal_merge(a, unary());
    return a;
  }

  Wal unary() {
    if (lex_.accept(Tok::Bang)) return wal_not(unary());
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && t.text == "join")
      throw ParseError("'join' is only allowed in the prefix (offset " + std::to_string(t.pos) + ")", t.pos);
    if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "meet" || t.text == "exists")) {
      bool exists = lex_.next().text == "exists";
      std::string v = variable();
      lex_.expect(Tok::Dot, "'.'");
      Wal body = formula();
      return exists ? w_exists(v, body) : wal_meet(v, body);
    }
    return atom();
  }

  static bool keyword(const std::string& s) {
    return s == "forall" || s == "exists" || s == "true" || s == "false" || s == "meet" || s == "join";
  }

  std::string variable() {
    Token t = lex_.expect(Tok::Ident, "a variable");
    if (keyword(t.text)) throw ParseError("keyword '" + t.text + "' used as a variable at offset " + std::to_string(t.pos), t.pos);
    return t.text;
  }

  std::string first_order() {
    auto pos = lex_.peek().pos;
    std::string v = variable();
    if (is_second_order(v)) throw ParseError("expected a first-order variable at offset " + std::to_string(pos), pos);
    return v;
  }

  Wal atom() {
    Token t = lex_.peek();
    if (t.kind == Tok::LParen) {
      lex_.next();
      Wal f = formula();
      lex_.expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Pred) {
      lex_.next();
      if (sigma_ && !sigma_->find(t.text)) throw ParseError("unknown letter '" + t.text + "' at offset " + std::to_string(t.pos), t.pos);
      lex_.expect(Tok::LParen, "'('");
      std::string x = first_order();
      lex_.expect(Tok::RParen, "')'");
      return wal_letter(t.text, x);
    }
    if (t.kind == Tok::Ident && t.text == "true") {
      lex_.next();
      return wal_not(wal_false());
    }
    if (t.kind == Tok::Ident && t.text == "false") {
      lex_.next();
      return wal_false();
    }
    std::string v = variable();
    if (is_second_order(v)) {
      lex_.expect(Tok::LParen, "'('");
      std::string x = first_order();
      lex_.expect(Tok::RParen, "')'");
      return wal_member(v, x);
    }
    if (lex_.accept(Tok::Equal)) return wal_equal(v, first_order());
    if (lex_.accept(Tok::Less)) return wal_less(v, first_order());
    if (lex_.accept(Tok::MapsTo)) {
      if (lex_.peek().kind != Tok::LParen)
        throw ParseError("expected a weight literal at offset " + std::to_string(lex_.peek().pos), lex_.peek().pos);
      auto at = lex_.peek().pos;
      try {
        return wal_maps_to(v, s_.parse_weight(lex_.raw_group()));
      } catch (const InputError& e) {
        throw ParseError(std::string(e.what()) + " at offset " + std::to_string(at), at);
      }
    }
    throw ParseError("expected '=', '<' or '|->' after '" + v + "' at offset " + std::to_string(lex_.peek().pos),
                     lex_.peek().pos);
  }

  Lexer& lex_;
  const ValuationStructure& s_;
  const Alphabet* sigma_;
};

}  // namespace

std::string to_string(const Wal& f) { return print(f); }

void EwalFormula::validate() const {
  for (std::size_t i = 0; i < prefix.size(); ++i)
    for (std::size_t j = i + 1; j < prefix.size(); ++j)
      if (prefix[i] == prefix[j]) throw InputError("prefix variable '" + prefix[i] + "' is bound twice");
  if (!body) throw InputError("empty formula");
}

std::set<std::string> EwalFormula::free() const {
  auto s = free_vars(body);
  for (auto& v : prefix) s.erase(v);
  return s;
}

std::string to_string(const EwalFormula& f) {
  std::string s;
  for (auto& v : f.prefix) s += "join " + v + ". ";
  return s + print(f.body);
}

EwalFormula parse_wal(std::string_view text, const ValuationStructure& s, const Alphabet* sigma) {
  Lexer lex(text);
  return WalParser(lex, s, sigma).sentence();
}

Wal w_translate(const Mso& f) {
  switch (f->kind) {
    case MsoKind::Letter: return wal_letter(f->letters, f->var);
    case MsoKind::Equal: return wal_equal(f->var, f->var2);
    case MsoKind::Less: return wal_less(f->var, f->var2);
    case MsoKind::Member: return wal_member(f->var, f->var2);
    case MsoKind::And: return wal_merge(w_translate(f->left), w_translate(f->right));
    case MsoKind::Not: return wal_not(w_translate(f->left));
    case MsoKind::Forall: return wal_meet(f->var, w_translate(f->left));
  }
  throw InternalError("bad MSO node");
}

Mso wal_to_mso(const Wal& f) {
  if (is_wal_false(f)) return mso_false();
  switch (f->kind) {
    case WalKind::Letter: return mso_letter(f->letters, f->var);
    case WalKind::Equal: return mso_equal(f->var, f->var2);
    case WalKind::Less: return mso_less(f->var, f->var2);
    case WalKind::Member: return mso_member(f->var, f->var2);
    case WalKind::MapsTo: throw InputError("assignment '" + print(f) + "' has no MSO counterpart");
    case WalKind::Implies:
      if (is_wal_false(f->right)) return mso_not(wal_to_mso(f->left));
      return mso_implies(wal_to_mso(f->left), wal_to_mso(f->right));
    case WalKind::Merge: return mso_and(wal_to_mso(f->left), wal_to_mso(f->right));
    case WalKind::Meet: return mso_forall(f->var, wal_to_mso(f->left));
  }
  throw InternalError("bad WAL node");
}

GammaCodec::GammaCodec(Alphabet sigma, std::vector<Weight> constants, std::vector<std::string> vars)
    : sigma_(std::move(sigma)), constants_(std::move(constants)), vars_(std::move(vars)) {
  if (sigma_.size() == 0) throw InputError("empty alphabet");
  std::vector<std::string> names;
  const std::size_t nd = constants_.size() + 1;
  for (std::size_t bits = 0; bits < (std::size_t{1} << vars_.size()); ++bits)
    for (std::size_t d = 0; d < nd; ++d)
      for (std::size_t a = 0; a < sigma_.size(); ++a) {
        std::string s = sigma_.name(static_cast<LetterId>(a)) + "_" + (d == 0 ? std::string("#") : std::to_string(d));
        if (!vars_.empty()) {
          s += "_";
          for (std::size_t j = 0; j < vars_.size(); ++j) s += ((bits >> j) & 1u) ? '1' : '0';
        }
        names.push_back(std::move(s));
      }
  gamma_ = Alphabet(std::move(names));
}

LetterId GammaCodec::letter(LetterId a, std::size_t delta, std::size_t bits) const {
  return static_cast<LetterId>(static_cast<std::size_t>(a) + sigma_.size() * (delta + (constants_.size() + 1) * bits));
}

LetterId GammaCodec::sigma_of(LetterId c) const { return static_cast<LetterId>(static_cast<std::size_t>(c) % sigma_.size()); }

std::size_t GammaCodec::delta_of(LetterId c) const {
  return (static_cast<std::size_t>(c) / sigma_.size()) % (constants_.size() + 1);
}

std::size_t GammaCodec::bits_of(LetterId c) const {
  return static_cast<std::size_t>(c) / sigma_.size() / (constants_.size() + 1);
}

std::size_t GammaCodec::delta_index(const Weight& m) const {
  auto it = std::find(constants_.begin(), constants_.end(), m);
  if (it == constants_.end()) throw InputError("weight " + m.str() + " is not a constant of the formula");
  return static_cast<std::size_t>(it - constants_.begin()) + 1;
}

std::vector<LetterId> GammaCodec::h() const {
  std::vector<LetterId> out;
  for (std::size_t c = 0; c < gamma_.size(); ++c) out.push_back(sigma_of(static_cast<LetterId>(c)));
  return out;
}

std::vector<Weight> GammaCodec::g(const Weight& one) const {
  std::vector<Weight> out;
  for (std::size_t c = 0; c < gamma_.size(); ++c) {
    std::size_t d = delta_of(static_cast<LetterId>(c));
    out.push_back(d == 0 ? one : constants_[d - 1]);
  }
  return out;
}

Weight default_one(const ValuationStructure& s) {
  switch (s.kind()) {
    case StructureKind::Ratio:
    case StructureKind::Disc: return Weight{Rational(0), Rational(1)};
    case StructureKind::Energy:
      return Weight(std::vector<Rational>(static_cast<const EnergyStructure&>(s).dimension(), Rational(0)));
    case StructureKind::Custom: break;
  }
  throw InputError("structure '" + s.name() + "' has no default weight; give one explicitly");
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

WalText parse_wal_file(std::string_view text, StructurePtr override_structure) {
  WalText out;
  std::string structure_name, body;
  std::optional<std::string> one_text;
  std::size_t pos = 0;
  bool in_body = false;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (auto c = line.find(';'); c != std::string_view::npos) line = line.substr(0, c);
    auto t = trim(line);
    if (!in_body && t.empty()) continue;
    auto colon = t.find(':');
    if (!in_body && colon != std::string::npos) {
      auto key = trim(t.substr(0, colon));
      auto value = trim(t.substr(colon + 1));
      if (key == "structure") structure_name = value;
      else if (key == "one") one_text = value;
      else if (key == "alphabet") {
        std::vector<std::string> names;
        std::size_t i = 0;
        while (i < value.size()) {
          auto j = value.find(' ', i);
          if (j == std::string::npos) j = value.size();
          if (j > i) names.push_back(value.substr(i, j - i));
          i = j + 1;
        }
        out.alphabet = Alphabet(names);
      } else throw ParseError("unknown header '" + key + "'");
      continue;
    }
    in_body = true;
    body += std::string(line) + "\n";
  }
  if (override_structure) out.structure = std::move(override_structure);
  else if (!structure_name.empty()) {
    try {
      out.structure = make_structure(structure_name);
    } catch (const InputError& e) {
      throw ParseError(e.what());
    }
  } else throw ParseError("missing 'structure:' header");
  if (one_text) {
    out.one = Weight::parse(*one_text);
    out.structure->validate_one(*out.one);
  }
  out.formula = parse_wal(body, *out.structure, out.alphabet ? &*out.alphabet : nullptr);
  return out;
}

std::string format_wal_file(const EwalFormula& f, const ValuationStructure& s, const std::optional<Weight>& one,
                            const std::optional<Alphabet>& alphabet) {
  std::string out = "structure: " + s.name() + "\n";
  if (one) out += "one: " + one->str() + "\n";
  if (alphabet) {
    out += "alphabet:";
    for (auto& a : alphabet->names()) out += " " + a;
    out += "\n";
  }
  return out + to_string(f) + "\n";
}

}  // namespace qwal
