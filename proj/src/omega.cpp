#include <cctype>

#include "qwal/omega.hpp"

namespace qwal {

namespace {

bool is_letter_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

class LassoLexer {
 public:
  LassoLexer(std::string_view text, bool tuples) : s_(text), tuples_(tuples) {}

  LassoTokens run() {
    LassoTokens out;
    bool loop_seen = false;
    skip_ws();
    while (i_ < s_.size()) {
      if (loop_seen) throw ParseError("text after loop group", i_);
      if (s_[i_] == '(' && !(tuples_ && !group_is_loop())) {
        ++i_;
        loop_seen = true;
        skip_ws();
        while (i_ < s_.size() && s_[i_] != ')') {
          out.loop.push_back(token());
          skip_ws();
        }
        if (i_ >= s_.size()) throw ParseError("unterminated loop group", i_);
        ++i_;
        if (out.loop.empty()) throw ParseError("empty loop", i_);
      } else {
        out.prefix.push_back(token());
      }
      skip_ws();
    }
    if (!loop_seen) throw ParseError("missing loop group '( ... )'", i_);
    return out;
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  // In tuple mode, `(` opens a loop group iff the next non-space character is `(`.
  bool group_is_loop() const {
    std::size_t j = i_ + 1;
    while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
    return j < s_.size() && s_[j] == '(';
  }

  std::string token() {
    std::size_t start = i_;
    if (tuples_ && s_[i_] == '(') {
      std::size_t close = s_.find(')', i_);
      if (close == std::string_view::npos) throw ParseError("unterminated tuple", i_);
      std::string_view inner = s_.substr(i_ + 1, close - i_ - 1);
      if (inner.find('(') != std::string_view::npos) throw ParseError("nested parenthesis in tuple", i_);
      std::string tok;
      for (char c : s_.substr(i_, close - i_ + 1))
        if (!std::isspace(static_cast<unsigned char>(c))) tok += c;
      i_ = close + 1;
      return tok;
    }
    while (i_ < s_.size() && is_letter_char(s_[i_])) ++i_;
    if (i_ == start) throw ParseError(std::string("unexpected character '") + s_[i_] + "'", i_);
    return std::string(s_.substr(start, i_ - start));
  }

  std::string_view s_;
  bool tuples_;
  std::size_t i_ = 0;
};

}  // namespace

LassoTokens tokenize_lasso(std::string_view text, bool tuples) { return LassoLexer(text, tuples).run(); }

LassoWord<std::string> parse_lasso(std::string_view text) {
  auto t = tokenize_lasso(text, false);
  return LassoWord<std::string>(std::move(t.prefix), std::move(t.loop));
}

}  // namespace qwal
