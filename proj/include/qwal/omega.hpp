#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwal/errors.hpp"

namespace qwal {

/// Ultimately periodic ω-word `prefix · loop^ω` with a nonempty loop.
///
/// The stored shape is kept as given; canonical() yields the primitive-period form
/// with the longest prefix suffix rolled into the loop, where structural equality
/// coincides with ω-equality.
template <class X>
class LassoWord {
 public:
  LassoWord() : loop_(1) {}
  LassoWord(std::vector<X> prefix, std::vector<X> loop) : prefix_(std::move(prefix)), loop_(std::move(loop)) {
    if (loop_.empty()) throw InputError("lasso loop must be nonempty");
  }

  const std::vector<X>& prefix() const { return prefix_; }
  const std::vector<X>& loop() const { return loop_; }
  std::size_t prefix_size() const { return prefix_.size(); }
  std::size_t loop_size() const { return loop_.size(); }
  /// Number of distinct positions in the stored shape.
  std::size_t shape_size() const { return prefix_.size() + loop_.size(); }

  const X& at(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : loop_[(i - prefix_.size()) % loop_.size()];
  }

  /// Same ω-word with prefix length `p` ≥ |prefix| and loop length `q`, a multiple of |loop|.
  LassoWord reshaped(std::size_t p, std::size_t q) const {
    if (p < prefix_.size() || q == 0 || q % loop_.size() != 0) throw InternalError("invalid lasso reshape");
    std::vector<X> np, nq;
    np.reserve(p);
    nq.reserve(q);
    for (std::size_t i = 0; i < p; ++i) np.push_back(at(i));
    for (std::size_t i = 0; i < q; ++i) nq.push_back(at(p + i));
    return LassoWord(std::move(np), std::move(nq));
  }

  LassoWord canonical() const {
    std::size_t n = loop_.size(), period = n;
    for (std::size_t d = 1; d < n; ++d) {
      if (n % d != 0) continue;
      bool ok = true;
      for (std::size_t i = d; i < n && ok; ++i) ok = loop_[i] == loop_[i - d];
      if (ok) {
        period = d;
        break;
      }
    }
    std::vector<X> p = prefix_;
    std::vector<X> q(loop_.begin(), loop_.begin() + static_cast<std::ptrdiff_t>(period));
    while (!p.empty() && p.back() == q.back()) {
      std::rotate(q.rbegin(), q.rbegin() + 1, q.rend());
      p.pop_back();
    }
    return LassoWord(std::move(p), std::move(q));
  }

  /// Structural equality of the stored shapes; use omega_equal for ω-equality.
  friend bool operator==(const LassoWord& a, const LassoWord& b) {
    return a.prefix_ == b.prefix_ && a.loop_ == b.loop_;
  }

 private:
  std::vector<X> prefix_;
  std::vector<X> loop_;
};

template <class X>
const X& position_at(const LassoWord<X>& w, std::size_t i) {
  return w.at(i);
}

template <class X>
bool omega_equal(const LassoWord<X>& a, const LassoWord<X>& b) {
  std::size_t n = a.prefix_size() + b.prefix_size() + std::lcm(a.loop_size(), b.loop_size());
  for (std::size_t i = 0; i < n; ++i)
    if (!(a.at(i) == b.at(i))) return false;
  return true;
}

/// Reshapes both words to prefix max(|pu|,|pv|) and loop lcm(|qu|,|qv|).
template <class X, class Y>
std::pair<LassoWord<X>, LassoWord<Y>> align(const LassoWord<X>& u, const LassoWord<Y>& v) {
  std::size_t p = std::max(u.prefix_size(), v.prefix_size());
  std::size_t q = std::lcm(u.loop_size(), v.loop_size());
  return {u.reshaped(p, q), v.reshaped(p, q)};
}

/// Partial ω-word over X (undefined positions hold nullopt, spelled `#`), or the
/// incompatibility value Bottom. Defined values are kept canonical.
template <class X>
class PartialLassoValue {
 public:
  using Word = LassoWord<std::optional<X>>;

  /// The nowhere-defined word ⊤.
  static PartialLassoValue top() { return PartialLassoValue(Word({}, {std::nullopt})); }
  static PartialLassoValue bottom() { return PartialLassoValue(); }
  static PartialLassoValue defined(const Word& w) { return PartialLassoValue(w.canonical()); }
  static PartialLassoValue total(const LassoWord<X>& w) {
    std::vector<std::optional<X>> p(w.prefix().begin(), w.prefix().end());
    std::vector<std::optional<X>> q(w.loop().begin(), w.loop().end());
    return defined(Word(std::move(p), std::move(q)));
  }

  bool is_bottom() const { return !word_.has_value(); }
  bool is_top() const {
    if (is_bottom()) return false;
    for (auto& x : word_->prefix())
      if (x) return false;
    for (auto& x : word_->loop())
      if (x) return false;
    return true;
  }
  /// True when defined at every position.
  bool is_total() const {
    if (is_bottom()) return false;
    for (auto& x : word_->prefix())
      if (!x) return false;
    for (auto& x : word_->loop())
      if (!x) return false;
    return true;
  }

  const Word& word() const {
    if (is_bottom()) throw InternalError("word() on Bottom");
    return *word_;
  }
  const std::optional<X>& at(std::size_t i) const { return word().at(i); }
  bool defined_at(std::size_t i) const { return at(i).has_value(); }

  /// Fills undefined positions with `one`.
  LassoWord<X> totalize(const X& one) const {
    const Word& w = word();
    auto fill = [&](const std::vector<std::optional<X>>& v) {
      std::vector<X> out;
      out.reserve(v.size());
      for (auto& x : v) out.push_back(x ? *x : one);
      return out;
    };
    return LassoWord<X>(fill(w.prefix()), fill(w.loop()));
  }

  friend bool operator==(const PartialLassoValue& a, const PartialLassoValue& b) { return a.word_ == b.word_; }

 private:
  PartialLassoValue() = default;
  explicit PartialLassoValue(Word w) : word_(std::move(w)) {}
  std::optional<Word> word_;
};

/// u[i/x]: defined at i with value x, all other positions unchanged. Bottom stays Bottom.
template <class X>
PartialLassoValue<X> update(const PartialLassoValue<X>& u, std::size_t i, const X& x) {
  if (u.is_bottom()) return u;
  const auto& w = u.word();
  auto r = w.reshaped(std::max(w.prefix_size(), i + 1), w.loop_size());
  std::vector<std::optional<X>> p = r.prefix();
  p[i] = x;
  return PartialLassoValue<X>::defined(typename PartialLassoValue<X>::Word(std::move(p), r.loop()));
}

template <class X>
bool compatible(const PartialLassoValue<X>& u, const PartialLassoValue<X>& v) {
  if (u.is_bottom() || v.is_bottom()) return false;
  auto [a, b] = align(u.word(), v.word());
  for (std::size_t i = 0; i < a.shape_size(); ++i) {
    const auto &x = a.at(i), &y = b.at(i);
    if (x && y && !(*x == *y)) return false;
  }
  return true;
}

/// Merge of a finite family: union of domains if pairwise compatible, else Bottom. Empty family gives ⊤.
template <class X>
PartialLassoValue<X> merge(const std::vector<PartialLassoValue<X>>& family) {
  using Word = typename PartialLassoValue<X>::Word;
  PartialLassoValue<X> acc = PartialLassoValue<X>::top();
  for (const auto& u : family) {
    if (u.is_bottom()) return u;
    auto [a, b] = align(acc.word(), u.word());
    std::vector<std::optional<X>> p(a.prefix()), q(a.loop());
    for (std::size_t i = 0; i < a.shape_size(); ++i) {
      const auto& y = b.at(i);
      if (!y) continue;
      auto& slot = i < p.size() ? p[i] : q[i - p.size()];
      if (slot && !(*slot == *y)) return PartialLassoValue<X>::bottom();
      slot = y;
    }
    acc = PartialLassoValue<X>::defined(Word(std::move(p), std::move(q)));
  }
  return acc;
}

template <class X>
PartialLassoValue<X> merge(const PartialLassoValue<X>& u, const PartialLassoValue<X>& v) {
  return merge(std::vector<PartialLassoValue<X>>{u, v});
}

/// Ultimately periodic subset of ℕ.
class PositionSetLasso {
 public:
  PositionSetLasso() : bits_({}, {0}) {}
  explicit PositionSetLasso(LassoWord<std::uint8_t> bits) : bits_(std::move(bits)) {}
  PositionSetLasso(std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> loop)
      : bits_(std::move(prefix), std::move(loop)) {}

  static PositionSetLasso empty() { return {}; }
  static PositionSetLasso singleton(std::size_t i) {
    std::vector<std::uint8_t> p(i + 1, 0);
    p[i] = 1;
    return PositionSetLasso(std::move(p), {0});
  }
  bool contains(std::size_t i) const { return bits_.at(i) != 0; }
  const LassoWord<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const PositionSetLasso& a, const PositionSetLasso& b) {
    return omega_equal(a.bits_, b.bits_);
  }

 private:
  LassoWord<std::uint8_t> bits_;
};

/// Raw tokens of a lasso text: prefix tokens and loop tokens.
struct LassoTokens {
  std::vector<std::string> prefix;
  std::vector<std::string> loop;
};

/// Splits `a b (b a)`. With `tuples` set, a parenthesized group whose content does not
/// start with `(` is a single tuple token such as `(1,2)`, and the loop is written `((1,2) (3,1))`.
LassoTokens tokenize_lasso(std::string_view text, bool tuples = false);

LassoWord<std::string> parse_lasso(std::string_view text);

/// Inverse of parse_lasso for any printable letter type.
template <class X, class F>
std::string format_lasso(const LassoWord<X>& w, F&& print) {
  std::string out;
  for (const auto& x : w.prefix()) {
    out += print(x);
    out += ' ';
  }
  out += '(';
  for (std::size_t i = 0; i < w.loop_size(); ++i) {
    if (i) out += ' ';
    out += print(w.loop()[i]);
  }
  out += ')';
  return out;
}

inline std::string format_lasso(const LassoWord<std::string>& w) {
  return format_lasso(w, [](const std::string& s) { return s; });
}

}  // namespace qwal
