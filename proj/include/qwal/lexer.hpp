#pragma once

#include <string>
#include <string_view>

namespace qwal {

enum class Tok {
  End,
  Ident,     // variable or keyword
  Pred,      // P_<letter>, text holds the letter
  LParen,
  RParen,
  Dot,
  Equal,     // =
  Less,      // <
  Amp,       // &
  Bar,       // |
  Bang,      // !
  Arrow,     // ->
  Iff,       // <->
  Implies,   // =>
  Meet,      // /\ (merge)
  MapsTo,    // |->
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

/// Pull lexer shared by the MSO and WAL parsers.
class Lexer {
 public:
  /// `allow_generated` admits identifiers of the reserved `$g` namespace.
  explicit Lexer(std::string_view text, bool allow_generated = false);

  const Token& peek() const { return cur_; }
  Token next();
  bool accept(Tok k);
  Token expect(Tok k, const char* what);
  /// Consumes a balanced parenthesized group starting at the current `(` token and
  /// returns its raw text including the parentheses.
  std::string raw_group();
  std::string_view source() const { return src_; }

 private:
  void scan();

  std::string_view src_;
  std::size_t pos_ = 0;
  bool allow_generated_;
  Token cur_;
};

/// First-order variables start lowercase or with the generated `$v` prefix; uppercase and
/// generated `$g` names are second-order.
bool is_second_order(const std::string& var);

}  // namespace qwal
