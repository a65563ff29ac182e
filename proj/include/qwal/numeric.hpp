#pragma once

#include <gmpxx.h>

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace qwal {

using Rational = mpq_class;

/// Parses `p/q`, an integer, or a finite decimal such as `-0.75`. Throws ParseError.
Rational parse_rational(std::string_view text);

/// `p/q`, or `p` for integers.
std::string to_string(const Rational& r);

std::size_t hash_rational(const Rational& r);

/// Extended reals over exact rationals: a rational, +inf or -inf.
class ExtReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtReal() = default;  // 0
  ExtReal(const Rational& v) : kind_(Kind::Finite), value_(v) { value_.canonicalize(); }  // NOLINT: implicit by design
  ExtReal(long v) : kind_(Kind::Finite), value_(v) {}              // NOLINT

  static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  /// Only valid for finite values.
  const Rational& value() const;

  /// `inf + x = inf`; `inf + -inf` is rejected.
  friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
  friend bool operator==(const ExtReal& a, const ExtReal& b);
  friend std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b);

  /// `inf`, `-inf`, or the rational.
  std::string str() const;
  /// Accepts the tokens produced by str().
  static ExtReal parse(std::string_view text);

  /// Nearest double; infinities map to +-HUGE_VAL.
  double approx() const;

 private:
  explicit ExtReal(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  Rational value_ = 0;
};

inline ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }
inline ExtReal min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }

}  // namespace qwal
