#include <numeric>

#include "qwal/errors.hpp"
#include "qwal/lexer.hpp"
#include "qwal/wal.hpp"

namespace qwal {

namespace {

using Value = PartialLassoValue<Weight>;

class Reference {
 public:
  Reference(const Alphabet& sigma, const LassoWord<LetterId>& w, std::size_t bound) : sigma_(sigma), w_(w), bound_(bound) {}

  Value eval(const Wal& f, VarAssignment& s) {
    switch (f->kind) {
      case WalKind::Letter: {
        const auto& name = sigma_.name(w_.at(pos(s, f->var)));
        return std::binary_search(f->letters.begin(), f->letters.end(), name) ? Value::top() : Value::bottom();
      }
      case WalKind::Equal: return pos(s, f->var) == pos(s, f->var2) ? Value::top() : Value::bottom();
      case WalKind::Less: return pos(s, f->var) < pos(s, f->var2) ? Value::top() : Value::bottom();
      case WalKind::Member: {
        auto it = s.second.find(f->var);
        if (it == s.second.end()) throw InputError("unassigned variable '" + f->var + "'");
        return it->second.contains(pos(s, f->var2)) ? Value::top() : Value::bottom();
      }
      case WalKind::MapsTo: return update(Value::top(), pos(s, f->var), f->weight);
      case WalKind::Implies: return eval(f->left, s).is_top() ? eval(f->right, s) : Value::top();
      case WalKind::Merge: {
        Value a = eval(f->left, s);
        if (a.is_bottom()) return a;
        return merge(a, eval(f->right, s));
      }
      case WalKind::Meet: return meet(f, s);
    }
    throw InternalError("bad WAL node");
  }

 private:
  static std::size_t pos(const VarAssignment& s, const std::string& x) {
    auto it = s.first.find(x);
    if (it == s.first.end()) throw InputError("unassigned variable '" + x + "'");
    return it->second;
  }

  Value meet(const Wal& f, VarAssignment& s) {
    if (is_second_order(f->var))
      throw UnsupportedError("the reference evaluator covers the fragment without set merges (meet " + f->var + ")");
    std::optional<std::size_t> saved;
    if (auto it = s.first.find(f->var); it != s.first.end()) {
      saved = it->second;
      s.first.erase(it);
    }
    // Shape of everything but the bound variable.
    std::size_t p = w_.prefix_size(), q = w_.loop_size();
    for (auto& [v, i] : s.first) p = std::max(p, i + 1);
    for (auto& [v, set] : s.second) {
      p = std::max(p, set.bits().prefix_size());
      q = std::lcm(q, set.bits().loop_size());
    }
    auto attempt = [&](std::size_t bound) -> Value {
      std::vector<Value> family;
      for (std::size_t i = 0; i < p + bound * q; ++i) {
        s.first[f->var] = i;
        Value u = eval(f->left, s);
        if (u.is_bottom()) return u;
        family.push_back(std::move(u));
      }
      Value all = merge(family);
      if (all.is_bottom()) return all;
      // Read the periodic part off a middle period.
      std::size_t start = p + (bound / 2) * q;
      std::vector<std::optional<Weight>> pre, loop;
      for (std::size_t i = 0; i < start; ++i) pre.push_back(all.at(i));
      for (std::size_t i = start; i < start + q; ++i) loop.push_back(all.at(i));
      Value guess = Value::defined(Value::Word(std::move(pre), std::move(loop)));
      if (!compatible(guess, all))
        throw NonConvergenceError("meet " + f->var + ": merged values are not periodic within " + std::to_string(bound) +
                                  " loop periods");
      return guess;
    };
    Value a = attempt(bound_);
    Value b = attempt(bound_ + 1);
    s.first.erase(f->var);
    if (saved) s.first[f->var] = *saved;
    if (!(a == b))
      throw NonConvergenceError("meet " + f->var + ": the value changed between " + std::to_string(bound_) + " and " +
                                std::to_string(bound_ + 1) + " loop periods");
    return a;
  }

  const Alphabet& sigma_;
  const LassoWord<LetterId>& w_;
  std::size_t bound_;
};

}  // namespace

PartialLassoValue<Weight> reference_aux_semantics(const Wal& phi, const Alphabet& sigma, const LassoWord<LetterId>& w,
                                                  const VarAssignment& s, std::size_t unroll_bound) {
  if (unroll_bound == 0) throw InputError("unroll bound must be positive");
  for (auto c : w.prefix())
    if (c < 0 || static_cast<std::size_t>(c) >= sigma.size()) throw InputError("word letter outside the alphabet");
  for (auto c : w.loop())
    if (c < 0 || static_cast<std::size_t>(c) >= sigma.size()) throw InputError("word letter outside the alphabet");
  VarAssignment env = s;
  return Reference(sigma, w, unroll_bound).eval(phi, env);
}

ExtReal reference_value(const Wal& phi, const Alphabet& sigma, const LassoWord<LetterId>& w, const ValuationStructure& st,
                        const Weight& one, const VarAssignment& s, std::size_t unroll_bound) {
  auto aux = reference_aux_semantics(phi, sigma, w, s, unroll_bound);
  if (aux.is_bottom()) return st.monoid().zero();
  return st.val(aux.totalize(one));
}

}  // namespace qwal
