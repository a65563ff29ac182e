#include "qwal/numeric.hpp"

#include <cctype>
#include <cmath>

#include "qwal/errors.hpp"

namespace qwal {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw ParseError("malformed rational '" + std::string(text) + "'");
    mpz_class d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    result = Rational(mpz_class(std::string(num)), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || !all_digits(fp) || (ip.empty() && fp.empty()))
      throw ParseError("malformed decimal '" + std::string(text) + "'");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    mpz_class whole{ip.empty() ? std::string("0") : std::string(ip)};
    result = Rational(whole * scale + mpz_class(std::string(fp)), scale);
  } else {
    if (!all_digits(s)) throw ParseError("malformed number '" + std::string(text) + "'");
    result = Rational(mpz_class(std::string(s)));
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& r) { return r.get_str(); }

std::size_t hash_rational(const Rational& r) {
  return std::hash<std::string>{}(r.get_str(16));
}

const Rational& ExtReal::value() const {
  if (kind_ != Kind::Finite) throw InternalError("value() on infinite ExtReal");
  return value_;
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
  if (a.is_finite() && b.is_finite()) return ExtReal(Rational(a.value_ + b.value_));
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
    throw InternalError("inf + -inf is undefined");
  return a.is_finite() ? b : a;
}

bool operator==(const ExtReal& a, const ExtReal& b) {
  if (a.kind_ != b.kind_) return false;
  return !a.is_finite() || a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  if (!a.is_finite()) return std::strong_ordering::equal;
  int c = cmp(a.value_, b.value_);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::string ExtReal::str() const {
  switch (kind_) {
    case Kind::PosInf: return "inf";
    case Kind::NegInf: return "-inf";
    default: return to_string(value_);
  }
}

ExtReal ExtReal::parse(std::string_view text) {
  if (text == "inf" || text == "+inf") return pos_inf();
  if (text == "-inf") return neg_inf();
  return ExtReal(parse_rational(text));
}

double ExtReal::approx() const {
  switch (kind_) {
    case Kind::PosInf: return HUGE_VAL;
    case Kind::NegInf: return -HUGE_VAL;
    default: return value_.get_d();
  }
}

}  // namespace qwal
