#include "qwal/mso.hpp"

#include <algorithm>
#include <numeric>

#include "qwal/errors.hpp"
#include "qwal/lexer.hpp"

namespace qwal {

namespace {

Mso make(MsoNode n) { return std::make_shared<const MsoNode>(std::move(n)); }

void require_first(const std::string& v) {
  if (is_second_order(v)) throw InputError("'" + v + "' is second-order where a position is expected");
}

void require_second(const std::string& v) {
  if (!is_second_order(v)) throw InputError("'" + v + "' is first-order where a set is expected");
}

}  // namespace

Mso mso_letter(std::vector<std::string> letters, const std::string& x) {
  require_first(x);
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  return make({MsoKind::Letter, std::move(letters), x, {}, nullptr, nullptr});
}

Mso mso_equal(const std::string& x, const std::string& y) {
  require_first(x);
  require_first(y);
  return make({MsoKind::Equal, {}, x, y, nullptr, nullptr});
}

Mso mso_less(const std::string& x, const std::string& y) {
  require_first(x);
  require_first(y);
  return make({MsoKind::Less, {}, x, y, nullptr, nullptr});
}

Mso mso_member(const std::string& set, const std::string& x) {
  require_second(set);
  require_first(x);
  return make({MsoKind::Member, {}, set, x, nullptr, nullptr});
}

Mso mso_and(Mso a, Mso b) { return make({MsoKind::And, {}, {}, {}, std::move(a), std::move(b)}); }
Mso mso_not(Mso a) { return make({MsoKind::Not, {}, {}, {}, std::move(a), nullptr}); }
Mso mso_forall(const std::string& var, Mso body) { return make({MsoKind::Forall, {}, var, {}, std::move(body), nullptr}); }

Mso mso_or(Mso a, Mso b) { return mso_not(mso_and(mso_not(std::move(a)), mso_not(std::move(b)))); }
Mso mso_implies(Mso a, Mso b) { return mso_not(mso_and(std::move(a), mso_not(std::move(b)))); }
Mso mso_iff(Mso a, Mso b) { return mso_and(mso_implies(a, b), mso_implies(b, a)); }
Mso mso_exists(const std::string& var, Mso body) { return mso_not(mso_forall(var, mso_not(std::move(body)))); }
Mso mso_false() { return mso_forall("x", mso_less("x", "x")); }
Mso mso_true() { return mso_not(mso_false()); }

Mso mso_and_all(const std::vector<Mso>& fs) {
  if (fs.empty()) return mso_true();
  Mso r = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) r = mso_and(fs[i], r);
  return r;
}

Mso mso_or_all(const std::vector<Mso>& fs) {
  if (fs.empty()) return mso_false();
  Mso r = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) r = mso_or(fs[i], r);
  return r;
}

std::set<std::string> free_vars(const Mso& f) {
  switch (f->kind) {
    case MsoKind::Letter: return {f->var};
    case MsoKind::Equal:
    case MsoKind::Less:
    case MsoKind::Member: return {f->var, f->var2};
    case MsoKind::And: {
      auto s = free_vars(f->left);
      s.merge(free_vars(f->right));
      return s;
    }
    case MsoKind::Not: return free_vars(f->left);
    case MsoKind::Forall: {
      auto s = free_vars(f->left);
      s.erase(f->var);
      return s;
    }
  }
  throw InternalError("bad MSO node");
}

bool mso_equal_trees(const Mso& a, const Mso& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind || a->letters != b->letters || a->var != b->var || a->var2 != b->var2) return false;
  return mso_equal_trees(a->left, b->left) && mso_equal_trees(a->right, b->right);
}

namespace {

bool is_quant(const Mso& f) {
  if (f->kind == MsoKind::Forall) return true;
  return f->kind == MsoKind::Not && f->left->kind == MsoKind::Forall && f->left->left->kind == MsoKind::Not;
}

std::string print(const Mso& f);

std::string operand(const Mso& f) {
  auto s = print(f);
  return is_quant(f) ? "(" + s + ")" : s;
}

std::string print(const Mso& f) {
  switch (f->kind) {
    case MsoKind::Letter: {
      if (f->letters.empty()) return "!(" + f->var + " = " + f->var + ")";
      if (f->letters.size() == 1) return "P_" + f->letters[0] + "(" + f->var + ")";
      std::string s = "(";
      for (std::size_t i = 0; i < f->letters.size(); ++i) s += (i ? " | P_" : "P_") + f->letters[i] + "(" + f->var + ")";
      return s + ")";
    }
    case MsoKind::Equal: return f->var + " = " + f->var2;
    case MsoKind::Less: return f->var + " < " + f->var2;
    case MsoKind::Member: return f->var + "(" + f->var2 + ")";
    case MsoKind::And: return "(" + operand(f->left) + " & " + operand(f->right) + ")";
    case MsoKind::Forall: return "forall " + f->var + ". " + print(f->left);
    case MsoKind::Not: {
      const Mso& c = f->left;
      if (c->kind == MsoKind::Forall && c->left->kind == MsoKind::Not) return "exists " + c->var + ". " + print(c->left->left);
      if (c->kind == MsoKind::And && c->left->kind == MsoKind::Not && c->right->kind == MsoKind::Not)
        return "(" + operand(c->left->left) + " | " + operand(c->right->left) + ")";
      if (c->kind == MsoKind::And && c->right->kind == MsoKind::Not)
        return "(" + operand(c->left) + " -> " + operand(c->right->left) + ")";
      if (c->kind == MsoKind::Equal || c->kind == MsoKind::Less) return "!(" + print(c) + ")";
      return "!" + operand(c);
    }
  }
  throw InternalError("bad MSO node");
}

class MsoParser {
 public:
  MsoParser(Lexer& lex, const Alphabet* alphabet) : lex_(lex), alphabet_(alphabet) {}

  Mso formula() {
    Mso a = implication();
    if (lex_.accept(Tok::Iff)) a = mso_iff(a, implication());
    return a;
  }

 private:
  Mso implication() {
    Mso a = disjunction();
    if (lex_.accept(Tok::Arrow)) return mso_implies(a, implication());
    return a;
  }

  Mso disjunction() {
    Mso a = conjunction();
    while (lex_.accept(Tok::Bar)) a = mso_or(a, conjunction());
    return a;
  }

  Mso conjunction() {
    Mso a = unary();
    while (lex_.accept(Tok::Amp)) a = mso_and(a, unary());
    return a;
  }

  Mso unary() {
    if (lex_.accept(Tok::Bang)) return mso_not(unary());
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "exists")) {
      bool all = lex_.next().text == "forall";
      std::string v = variable();
      lex_.expect(Tok::Dot, "'.'");
      Mso body = formula();
      return all ? mso_forall(v, body) : mso_exists(v, body);
    }
    return atom();
  }

  std::string variable() {
    Token t = lex_.expect(Tok::Ident, "a variable");
    if (keyword(t.text)) throw ParseError("keyword '" + t.text + "' used as a variable at offset " + std::to_string(t.pos), t.pos);
    return t.text;
  }

  static bool keyword(const std::string& s) {
    return s == "forall" || s == "exists" || s == "true" || s == "false" || s == "meet" || s == "join";
  }

  std::string first_order() {
    auto pos = lex_.peek().pos;
    std::string v = variable();
    if (is_second_order(v)) throw ParseError("expected a first-order variable at offset " + std::to_string(pos), pos);
    return v;
  }

  Mso atom() {
    Token t = lex_.peek();
    if (t.kind == Tok::LParen) {
      lex_.next();
      Mso f = formula();
      lex_.expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Pred) {
      lex_.next();
      if (alphabet_ && !alphabet_->find(t.text)) throw ParseError("unknown letter '" + t.text + "' at offset " + std::to_string(t.pos), t.pos);
      lex_.expect(Tok::LParen, "'('");
      std::string x = first_order();
      lex_.expect(Tok::RParen, "')'");
      return mso_letter(t.text, x);
    }
    if (t.kind == Tok::Ident && t.text == "true") {
      lex_.next();
      return mso_true();
    }
    if (t.kind == Tok::Ident && t.text == "false") {
      lex_.next();
      return mso_false();
    }
    std::string v = variable();
    if (is_second_order(v)) {
      lex_.expect(Tok::LParen, "'('");
      std::string x = first_order();
      lex_.expect(Tok::RParen, "')'");
      return mso_member(v, x);
    }
    if (lex_.accept(Tok::Equal)) return mso_equal(v, first_order());
    if (lex_.accept(Tok::Less)) return mso_less(v, first_order());
    throw ParseError("expected '=' or '<' after '" + v + "' at offset " + std::to_string(lex_.peek().pos), lex_.peek().pos);
  }

  Lexer& lex_;
  const Alphabet* alphabet_;
};

}  // namespace

std::string to_string(const Mso& f) { return print(f); }

Mso parse_mso_from(Lexer& lex, const Alphabet* alphabet) { return MsoParser(lex, alphabet).formula(); }

Mso parse_mso(std::string_view text, const Alphabet* alphabet) {
  Lexer lex(text);
  Mso f = parse_mso_from(lex, alphabet);
  if (lex.peek().kind != Tok::End)
    throw ParseError("trailing input at offset " + std::to_string(lex.peek().pos), lex.peek().pos);
  return f;
}

Alphabet extended_alphabet(const Alphabet& sigma, std::size_t k) {
  if (k == 0) return sigma;
  std::vector<std::string> names;
  std::size_t n = sigma.size();
  for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits)
    for (std::size_t a = 0; a < n; ++a) {
      std::string s = sigma.name(static_cast<LetterId>(a)) + "_";
      for (std::size_t j = 0; j < k; ++j) s += ((bits >> j) & 1u) ? '1' : '0';
      names.push_back(s);
    }
  return Alphabet(names);
}

LassoWord<LetterId> encode_assignment(const LassoWord<LetterId>& w, std::size_t sigma_size, const VarAssignment& s,
                                      const std::vector<std::string>& frees) {
  std::size_t p = w.prefix_size(), l = w.loop_size();
  std::vector<const PositionSetLasso*> sets(frees.size(), nullptr);
  std::vector<std::size_t> pos(frees.size(), 0);
  for (std::size_t j = 0; j < frees.size(); ++j) {
    const auto& v = frees[j];
    if (is_second_order(v)) {
      auto it = s.second.find(v);
      if (it == s.second.end()) throw InputError("unassigned variable '" + v + "'");
      sets[j] = &it->second;
      p = std::max(p, it->second.bits().prefix_size());
      l = std::lcm(l, it->second.bits().loop_size());
    } else {
      auto it = s.first.find(v);
      if (it == s.first.end()) throw InputError("unassigned variable '" + v + "'");
      pos[j] = it->second;
      p = std::max(p, it->second + 1);
    }
  }
  auto letter = [&](std::size_t i) {
    std::size_t bits = 0;
    for (std::size_t j = 0; j < frees.size(); ++j) {
      bool on = sets[j] ? sets[j]->contains(i) : pos[j] == i;
      if (on) bits |= std::size_t{1} << j;
    }
    return static_cast<LetterId>(static_cast<std::size_t>(w.at(i)) + sigma_size * bits);
  };
  std::vector<LetterId> prefix, loop;
  for (std::size_t i = 0; i < p; ++i) prefix.push_back(letter(i));
  for (std::size_t i = p; i < p + l; ++i) loop.push_back(letter(i));
  return LassoWord<LetterId>(std::move(prefix), std::move(loop));
}

}  // namespace qwal
