#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwal/numeric.hpp"
#include "qwal/omega.hpp"

namespace qwal {

/// Element of a weight domain M: a tuple of rationals whose shape the structure checks.
class Weight {
 public:
  Weight() = default;
  Weight(std::initializer_list<Rational> c) : c_(c) { normalize(); }
  explicit Weight(std::vector<Rational> c) : c_(std::move(c)) { normalize(); }

  std::size_t size() const { return c_.size(); }
  const Rational& operator[](std::size_t i) const { return c_.at(i); }
  const std::vector<Rational>& components() const { return c_; }

  /// `(c1,c2,...)`
  std::string str() const;
  /// Accepts `(c1, ..., cn)` with rational components.
  static Weight parse(std::string_view text);

  friend bool operator==(const Weight& a, const Weight& b) { return a.c_ == b.c_; }
  friend bool operator<(const Weight& a, const Weight& b);

 private:
  void normalize() {
    for (auto& x : c_) x.canonicalize();
  }

  std::vector<Rational> c_;
};

struct WeightHash {
  std::size_t operator()(const Weight& w) const;
};

/// Complete monoid (K, +, 𝟘) over extended reals; infinitary sums are realized by the solvers.
class CompleteMonoidSpec {
 public:
  using Op = std::function<ExtReal(const ExtReal&, const ExtReal&)>;
  CompleteMonoidSpec(std::string name, ExtReal zero, Op sum, bool idempotent)
      : name_(std::move(name)), zero_(std::move(zero)), sum_(std::move(sum)), idempotent_(idempotent) {}

  static CompleteMonoidSpec sup();       // (ℝ̄, sup, -inf)
  static CompleteMonoidSpec inf();       // (ℝ≥0 ∪ {inf}, inf, inf)
  static CompleteMonoidSpec boolean_or(); // ({0,1}, ∨, 0)

  const std::string& name() const { return name_; }
  const ExtReal& zero() const { return zero_; }
  bool idempotent() const { return idempotent_; }
  ExtReal sum(const ExtReal& a, const ExtReal& b) const { return sum_(a, b); }

 private:
  std::string name_;
  ExtReal zero_;
  Op sum_;
  bool idempotent_;
};

/// Fold with 𝟘.
ExtReal monoid_sum(const CompleteMonoidSpec& k, const std::vector<ExtReal>& values);

enum class StructureKind { Ratio, Disc, Energy, Custom };

/// Valuation structure (M, 𝕂, val). Subclass with kind Custom to plug in a new structure;
/// custom structures are evaluated on unambiguous automata only.
class ValuationStructure {
 public:
  virtual ~ValuationStructure() = default;

  /// Header token: `ratio`, `disc`, `energy<n>`.
  virtual std::string name() const = 0;
  virtual StructureKind kind() const { return StructureKind::Custom; }
  /// Throws InputError unless `w` ∈ M.
  virtual void validate(const Weight& w) const = 0;
  virtual const CompleteMonoidSpec& monoid() const = 0;
  /// Exact val on the ω-sequence prefix · loop^ω. Inputs must be valid weights.
  virtual ExtReal val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) const = 0;
  /// Checks a candidate default weight 𝟙; only membership in M is enforced.
  virtual void validate_one(const Weight& one) const { validate(one); }
  /// Printed form of a value in K.
  virtual std::string format_value(const ExtReal& v) const { return v.str(); }

  ExtReal val(const LassoWord<Weight>& w) const { return val_lasso(w.prefix(), w.loop()); }
  Weight parse_weight(std::string_view text) const;
};

using StructurePtr = std::shared_ptr<const ValuationStructure>;

/// M = ℚ × ℚ≥0, val = limsup of reward/cost ratios with r/0 = -inf, 𝕂 = (ℝ̄, sup, -inf).
class RatioStructure final : public ValuationStructure {
 public:
  std::string name() const override { return "ratio"; }
  StructureKind kind() const override { return StructureKind::Ratio; }
  void validate(const Weight& w) const override;
  const CompleteMonoidSpec& monoid() const override;
  ExtReal val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) const override;
};

/// M = ℚ≥0 × (0,1], discounted sum, 𝕂 = (ℝ≥0 ∪ {inf}, inf, inf).
class DiscStructure final : public ValuationStructure {
 public:
  std::string name() const override { return "disc"; }
  StructureKind kind() const override { return StructureKind::Disc; }
  void validate(const Weight& w) const override;
  const CompleteMonoidSpec& monoid() const override;
  ExtReal val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) const override;
};

/// M = ℤ^n, val = 1 iff every componentwise partial sum stays ≥ 0, 𝕂 = ({0,1}, ∨, 0).
class EnergyStructure final : public ValuationStructure {
 public:
  explicit EnergyStructure(std::size_t dim);
  std::size_t dimension() const { return dim_; }
  std::string name() const override { return "energy" + std::to_string(dim_); }
  StructureKind kind() const override { return StructureKind::Energy; }
  void validate(const Weight& w) const override;
  const CompleteMonoidSpec& monoid() const override;
  ExtReal val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) const override;

 private:
  std::size_t dim_;
};

/// `ratio`, `disc`, `energy` (dimension 1) or `energy<n>`.
StructurePtr make_structure(std::string_view name);

ExtReal ratio_val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop);
ExtReal disc_val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop);
/// Returns 0 or 1.
int energy_val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop);

/// Parses a lasso of weight tuples, e.g. `(0,1) ((1,2) (3,1))`.
LassoWord<Weight> parse_weight_lasso(std::string_view text);

}  // namespace qwal
