#include "qwal/lexer.hpp"

#include <cctype>

#include "qwal/errors.hpp"

namespace qwal {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

}  // namespace

bool is_second_order(const std::string& var) {
  if (var.starts_with("$v")) return false;
  return !var.empty() && (var[0] == '$' || std::isupper(static_cast<unsigned char>(var[0])));
}

Lexer::Lexer(std::string_view text, bool allow_generated) : src_(text), allow_generated_(allow_generated) { scan(); }

Token Lexer::next() {
  Token t = cur_;
  scan();
  return t;
}

bool Lexer::accept(Tok k) {
  if (cur_.kind != k) return false;
  scan();
  return true;
}

Token Lexer::expect(Tok k, const char* what) {
  if (cur_.kind != k)
    throw ParseError(std::string("expected ") + what + " at offset " + std::to_string(cur_.pos) +
                         (cur_.kind == Tok::End ? " (end of input)" : " near '" + cur_.text + "'"),
                     cur_.pos);
  return next();
}

std::string Lexer::raw_group() {
  if (cur_.kind != Tok::LParen) throw ParseError("expected '(' at offset " + std::to_string(cur_.pos), cur_.pos);
  std::size_t start = cur_.pos, i = start, depth = 0;
  for (; i < src_.size(); ++i) {
    if (src_[i] == '(') ++depth;
    else if (src_[i] == ')' && --depth == 0) break;
  }
  if (i >= src_.size()) throw ParseError("unbalanced '(' at offset " + std::to_string(start), start);
  pos_ = i + 1;
  scan();
  return std::string(src_.substr(start, i + 1 - start));
}

void Lexer::scan() {
  while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  cur_ = Token{};
  cur_.pos = pos_;
  if (pos_ >= src_.size()) return;
  auto rest = src_.substr(pos_);
  auto sym = [&](Tok k, std::size_t len) {
    cur_.kind = k;
    cur_.text = std::string(rest.substr(0, len));
    pos_ += len;
  };
  if (rest.starts_with("|->")) return sym(Tok::MapsTo, 3);
  if (rest.starts_with("<->")) return sym(Tok::Iff, 3);
  if (rest.starts_with("->")) return sym(Tok::Arrow, 2);
  if (rest.starts_with("=>")) return sym(Tok::Implies, 2);
  if (rest.starts_with("/\\")) return sym(Tok::Meet, 2);
  switch (rest[0]) {
    case '(': return sym(Tok::LParen, 1);
    case ')': return sym(Tok::RParen, 1);
    case '.': return sym(Tok::Dot, 1);
    case '=': return sym(Tok::Equal, 1);
    case '<': return sym(Tok::Less, 1);
    case '&': return sym(Tok::Amp, 1);
    case '|': return sym(Tok::Bar, 1);
    case '!': return sym(Tok::Bang, 1);
    default: break;
  }
  if (rest.starts_with("P_")) {
    std::size_t i = 2;
    while (i < rest.size() && rest[i] != '(' && rest[i] != ')' && !std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
    if (i == 2 || i >= rest.size() || rest[i] != '(')
      throw ParseError("malformed letter predicate at offset " + std::to_string(pos_), pos_);
    cur_.kind = Tok::Pred;
    cur_.text = std::string(rest.substr(2, i - 2));
    pos_ += i;
    return;
  }
  if (rest[0] == '$') {
    if (!allow_generated_) throw ParseError("'$' names are reserved (offset " + std::to_string(pos_) + ")", pos_);
    std::size_t i = 1;
    while (i < rest.size() && ident_char(rest[i])) ++i;
    return sym(Tok::Ident, i);
  }
  if (std::isalpha(static_cast<unsigned char>(rest[0]))) {
    std::size_t i = 1;
    while (i < rest.size() && ident_char(rest[i])) ++i;
    return sym(Tok::Ident, i);
  }
  throw ParseError(std::string("unexpected character '") + rest[0] + "' at offset " + std::to_string(pos_), pos_);
}

}  // namespace qwal
