#include "qwal/valuation.hpp"

#include <cctype>

#include "qwal/errors.hpp"

namespace qwal {

std::string Weight::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) out += ',';
    out += to_string(c_[i]);
  }
  return out + ")";
}

Weight Weight::parse(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.size() < 3 || s.front() != '(' || s.back() != ')') throw ParseError("malformed weight '" + std::string(text) + "'");
  std::vector<Rational> comps;
  std::string_view body(s);
  body = body.substr(1, body.size() - 2);
  while (true) {
    auto comma = body.find(',');
    comps.push_back(parse_rational(body.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return Weight(std::move(comps));
}

bool operator<(const Weight& a, const Weight& b) {
  if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] < b.c_[i]) return true;
    if (b.c_[i] < a.c_[i]) return false;
  }
  return false;
}

std::size_t WeightHash::operator()(const Weight& w) const {
  std::size_t h = w.size();
  for (auto& c : w.components()) h = h * 1000003u ^ hash_rational(c);
  return h;
}

CompleteMonoidSpec CompleteMonoidSpec::sup() {
  return {"sup", ExtReal::neg_inf(), [](const ExtReal& a, const ExtReal& b) { return max(a, b); }, true};
}

CompleteMonoidSpec CompleteMonoidSpec::inf() {
  return {"inf", ExtReal::pos_inf(), [](const ExtReal& a, const ExtReal& b) { return min(a, b); }, true};
}

CompleteMonoidSpec CompleteMonoidSpec::boolean_or() {
  return {"or", ExtReal(0L), [](const ExtReal& a, const ExtReal& b) { return max(a, b); }, true};
}

ExtReal monoid_sum(const CompleteMonoidSpec& k, const std::vector<ExtReal>& values) {
  ExtReal acc = k.zero();
  for (auto& v : values) acc = k.sum(acc, v);
  return acc;
}

Weight ValuationStructure::parse_weight(std::string_view text) const {
  Weight w = Weight::parse(text);
  validate(w);
  return w;
}

namespace {

void check_ratio(const Weight& w) {
  if (w.size() != 2) throw InputError("ratio weight must be a pair (r,c), got " + w.str());
  if (w[1] < 0) throw InputError("ratio cost must be nonnegative, got " + w.str());
}

void check_disc(const Weight& w) {
  if (w.size() != 2) throw InputError("disc weight must be a pair (c,d), got " + w.str());
  if (w[0] < 0) throw InputError("disc cost must be nonnegative, got " + w.str());
  if (w[1] <= 0 || w[1] > 1) throw InputError("disc factor must lie in (0,1], got " + w.str());
}

void check_energy(const Weight& w, std::size_t dim) {
  if (w.size() != dim) throw InputError("energy weight must have " + std::to_string(dim) + " components, got " + w.str());
  for (auto& c : w.components())
    if (c.get_den() != 1) throw InputError("energy weights must be integers, got " + w.str());
}

}  // namespace

ExtReal ratio_val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) {
  if (loop.empty()) throw InputError("empty loop");
  for (auto& w : prefix) check_ratio(w);
  for (auto& w : loop) check_ratio(w);
  Rational rq = 0, cq = 0;
  for (auto& w : loop) {
    rq += w[0];
    cq += w[1];
  }
  if (cq > 0) return ExtReal(Rational(rq / cq));
  Rational rp = 0, d = 0;
  for (auto& w : prefix) {
    rp += w[0];
    d += w[1];
  }
  if (d == 0) return ExtReal::neg_inf();
  if (rq > 0) return ExtReal::pos_inf();
  if (rq < 0) return ExtReal::neg_inf();
  // Eventually periodic ratio sequence: its limsup is the per-period maximum.
  Rational partial = 0, best;
  bool first = true;
  for (auto& w : loop) {
    partial += w[0];
    Rational r = (rp + partial) / d;
    if (first || r > best) best = r;
    first = false;
  }
  return ExtReal(best);
}

ExtReal disc_val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) {
  if (loop.empty()) throw InputError("empty loop");
  for (auto& w : prefix) check_disc(w);
  for (auto& w : loop) check_disc(w);
  Rational acc = 0, entry = 1;
  for (auto& w : prefix) {
    acc += w[0] * entry;
    entry *= w[1];
  }
  Rational s = 0, p = 1;
  for (auto& w : loop) {
    s += w[0] * p;
    p *= w[1];
  }
  if (p < 1) return ExtReal(Rational(acc + entry * s / (1 - p)));
  if (s > 0) return ExtReal::pos_inf();
  return ExtReal(acc);
}

// With loop effect e ≥ 0, pass k+1 starts from a pointwise larger base than pass k,
// so checking the prefix and the first pass suffices.
int energy_val_lasso(std::span<const Weight> prefix, std::span<const Weight> loop) {
  if (loop.empty()) throw InputError("empty loop");
  std::size_t dim = loop.front().size();
  if (dim == 0) throw InputError("energy weights need at least one component");
  for (auto& w : prefix) check_energy(w, dim);
  for (auto& w : loop) check_energy(w, dim);
  std::vector<Rational> sum(dim, 0);
  auto step = [&](const Weight& w) {
    bool ok = true;
    for (std::size_t j = 0; j < dim; ++j) {
      sum[j] += w[j];
      if (sum[j] < 0) ok = false;
    }
    return ok;
  };
  for (auto& w : prefix)
    if (!step(w)) return 0;
  std::vector<Rational> effect(dim, 0);
  for (auto& w : loop) {
    if (!step(w)) return 0;
    for (std::size_t j = 0; j < dim; ++j) effect[j] += w[j];
  }
  for (auto& e : effect)
    if (e < 0) return 0;
  return 1;
}

void RatioStructure::validate(const Weight& w) const { check_ratio(w); }
const CompleteMonoidSpec& RatioStructure::monoid() const {
  static const CompleteMonoidSpec k = CompleteMonoidSpec::sup();
  return k;
}
ExtReal RatioStructure::val_lasso(std::span<const Weight> p, std::span<const Weight> q) const {
  return ratio_val_lasso(p, q);
}

void DiscStructure::validate(const Weight& w) const { check_disc(w); }
const CompleteMonoidSpec& DiscStructure::monoid() const {
  static const CompleteMonoidSpec k = CompleteMonoidSpec::inf();
  return k;
}
ExtReal DiscStructure::val_lasso(std::span<const Weight> p, std::span<const Weight> q) const {
  return disc_val_lasso(p, q);
}

EnergyStructure::EnergyStructure(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InputError("energy dimension must be positive");
}
void EnergyStructure::validate(const Weight& w) const { check_energy(w, dim_); }
const CompleteMonoidSpec& EnergyStructure::monoid() const {
  static const CompleteMonoidSpec k = CompleteMonoidSpec::boolean_or();
  return k;
}
ExtReal EnergyStructure::val_lasso(std::span<const Weight> p, std::span<const Weight> q) const {
  for (auto& w : q) validate(w);
  return ExtReal(static_cast<long>(energy_val_lasso(p, q)));
}

StructurePtr make_structure(std::string_view name) {
  if (name == "ratio") return std::make_shared<RatioStructure>();
  if (name == "disc") return std::make_shared<DiscStructure>();
  if (name.substr(0, 6) == "energy") {
    std::string_view rest = name.substr(6);
    if (rest.empty()) return std::make_shared<EnergyStructure>(1);
    std::size_t dim = 0;
    for (char c : rest) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("unknown structure '" + std::string(name) + "'");
      dim = dim * 10 + static_cast<std::size_t>(c - '0');
      if (dim > 64) throw InputError("energy dimension too large");
    }
    return std::make_shared<EnergyStructure>(dim);
  }
  throw ParseError("unknown structure '" + std::string(name) + "'");
}

LassoWord<Weight> parse_weight_lasso(std::string_view text) {
  auto t = tokenize_lasso(text, true);
  std::vector<Weight> p, q;
  for (auto& s : t.prefix) p.push_back(Weight::parse(s));
  for (auto& s : t.loop) q.push_back(Weight::parse(s));
  return LassoWord<Weight>(std::move(p), std::move(q));
}

}  // namespace qwal
