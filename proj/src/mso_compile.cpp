#include <algorithm>
#include <functional>
#include <optional>

#include "qwal/errors.hpp"
#include "qwal/lexer.hpp"
#include "qwal/mso.hpp"

namespace qwal {

namespace {

// Alpha-canonical text: free variables by track index, bound variables by depth.
void canon(const Mso& f, std::map<std::string, std::string>& ren, int depth, std::string& out) {
  auto name = [&](const std::string& v) -> const std::string& {
    auto it = ren.find(v);
    if (it == ren.end()) throw InternalError("unbound variable '" + v + "' in canonical form");
    return it->second;
  };
  switch (f->kind) {
    case MsoKind::Letter:
      out += "P{";
      for (auto& a : f->letters) out += a + ",";
      out += "}" + name(f->var);
      return;
    case MsoKind::Equal: out += "=" + name(f->var) + name(f->var2); return;
    case MsoKind::Less: out += "<" + name(f->var) + name(f->var2); return;
    case MsoKind::Member: out += "M" + name(f->var) + name(f->var2); return;
    case MsoKind::And:
      out += "&(";
      canon(f->left, ren, depth, out);
      out += ",";
      canon(f->right, ren, depth, out);
      out += ")";
      return;
    case MsoKind::Not:
      out += "!";
      canon(f->left, ren, depth, out);
      return;
    case MsoKind::Forall: {
      std::string fresh = (is_second_order(f->var) ? "@S" : "@f") + std::to_string(depth) + ".";
      auto saved = ren.find(f->var);
      std::optional<std::string> old;
      if (saved != ren.end()) old = saved->second;
      ren[f->var] = fresh;
      out += "A" + fresh;
      canon(f->left, ren, depth + 1, out);
      if (old) ren[f->var] = *old;
      else ren.erase(f->var);
      return;
    }
  }
}

std::string canonical_key(const Mso& f, const std::vector<std::string>& vars) {
  std::map<std::string, std::string> ren;
  for (std::size_t j = 0; j < vars.size(); ++j) ren[vars[j]] = "#" + std::to_string(j) + ".";
  std::string out;
  canon(f, ren, 0, out);
  return out;
}

std::string short_text(const Mso& f) {
  auto s = to_string(f);
  return s.size() > 160 ? s.substr(0, 157) + "..." : s;
}

std::size_t index_of(const std::vector<std::string>& v, const std::string& x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

MsoCompiler::MsoCompiler(Alphabet sigma, std::size_t state_cap) : sigma_(std::move(sigma)), cap_(state_cap) {
  if (sigma_.size() == 0) throw InputError("MSO compilation needs a nonempty alphabet");
}

LassoDfa MsoCompiler::checked(LassoDfa d, const Mso& where) const {
  d = d.minimized();
  if (static_cast<std::size_t>(d.num_states()) > cap_)
    throw ResourceError("MSO state cap " + std::to_string(cap_) + " exceeded (" + std::to_string(d.num_states()) +
                        " states) at subformula " + short_text(where));
  return d;
}

namespace {

// Tiny Büchi automaton over n·2^k letters from a step function (state, letter, bits) -> next or -1.
LassoDfa atom_dfa(std::size_t n, std::size_t k, int states, const std::vector<int>& accepting,
                  const std::function<int(int, std::size_t, std::size_t)>& step) {
  BuchiAutomaton b;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n * (std::size_t{1} << k); ++i) names.push_back(std::to_string(i));
  b.alphabet = Alphabet(names);
  for (int s = 0; s < states; ++s) b.add_state("s" + std::to_string(s), std::find(accepting.begin(), accepting.end(), s) != accepting.end());
  b.initial.push_back(0);
  for (int s = 0; s < states; ++s)
    for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits)
      for (std::size_t a = 0; a < n; ++a) {
        int t = step(s, a, bits);
        if (t >= 0) b.add_transition(s, static_cast<LetterId>(a + n * bits), t);
      }
  return lasso_dfa_from_buchi(b).minimized();
}

}  // namespace

std::vector<LetterId> MsoCompiler::letter_ids(const std::vector<std::string>& names) const {
  std::vector<LetterId> out;
  for (auto& a : names) {
    auto id = sigma_.find(a);
    if (!id) throw InputError("letter '" + a + "' is not in the alphabet");
    out.push_back(*id);
  }
  return out;
}

LassoDfa MsoCompiler::singleton(std::size_t k, std::size_t mask) {
  auto key = std::make_pair(k, mask);
  if (auto it = singletons_.find(key); it != singletons_.end()) return it->second;
  // State = set of constrained tracks already seen; accepting once all were seen.
  std::size_t n = sigma_.size();
  std::vector<std::size_t> tracks;
  for (std::size_t j = 0; j < k; ++j)
    if ((mask >> j) & 1u) tracks.push_back(j);
  int states = 1 << tracks.size();
  auto d = atom_dfa(n, k, states, {states - 1}, [&](int s, std::size_t, std::size_t bits) {
    int next = s;
    for (std::size_t i = 0; i < tracks.size(); ++i)
      if ((bits >> tracks[i]) & 1u) {
        if ((s >> i) & 1) return -1;
        next |= 1 << i;
      }
    return next;
  });
  singletons_.emplace(key, d);
  return d;
}

LassoDfa MsoCompiler::restrict_valid(LassoDfa d, const std::vector<std::string>& vars, std::size_t mask_limit) {
  std::size_t mask = 0;
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (!is_second_order(vars[j]) && ((mask_limit >> j) & 1u)) mask |= std::size_t{1} << j;
  if (mask == 0) return d;
  return dfa_intersection(d, singleton(vars.size(), mask), cap_).minimized();
}

LassoDfa MsoCompiler::cylindrify(const Compiled& c, const std::vector<std::string>& to) const {
  if (c.vars == to) return c.dfa;
  std::size_t n = sigma_.size();
  std::vector<std::size_t> where;
  for (auto& v : c.vars) {
    auto j = index_of(to, v);
    if (j == to.size()) throw InternalError("cylindrify target misses '" + v + "'");
    where.push_back(j);
  }
  std::vector<LetterId> f(n << to.size());
  for (std::size_t bits = 0; bits < (std::size_t{1} << to.size()); ++bits)
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t old = 0;
      for (std::size_t j = 0; j < where.size(); ++j)
        if ((bits >> where[j]) & 1u) old |= std::size_t{1} << j;
      f[a + n * bits] = static_cast<LetterId>(a + n * old);
    }
  return dfa_preimage(c.dfa, f);
}

MsoCompiler::Compiled MsoCompiler::negate(Compiled c) {
  c.dfa = restrict_valid(dfa_complement(c.dfa), c.vars, ~std::size_t{0});
  return c;
}

MsoCompiler::Compiled MsoCompiler::project(Compiled c, const std::string& var) {
  auto j = index_of(c.vars, var);
  if (j == c.vars.size()) return c;
  std::size_t n = sigma_.size(), k = c.vars.size();
  std::vector<LetterId> g(n << k);
  for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
    std::size_t low = bits & ((std::size_t{1} << j) - 1), high = (bits >> (j + 1)) << j;
    for (std::size_t a = 0; a < n; ++a) g[a + n * bits] = static_cast<LetterId>(a + n * (low | high));
  }
  c.dfa = dfa_image(c.dfa, g, static_cast<int>(n << (k - 1)), cap_);
  c.vars.erase(c.vars.begin() + static_cast<std::ptrdiff_t>(j));
  return c;
}

MsoCompiler::Compiled MsoCompiler::rec(const Mso& f) {
  auto fv = free_vars(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  auto key = canonical_key(f, vars);
  if (auto it = cache_.find(key); it != cache_.end()) return {it->second, vars};
  Compiled c;
  try {
    c = compile_node(f);
  } catch (const ResourceError& e) {
    std::string msg = e.what();
    if (msg.find("subformula") != std::string::npos) throw;
    throw ResourceError(msg + " at subformula " + short_text(f));
  }
  c.dfa = checked(std::move(c.dfa), f);
  if (c.vars != vars) throw InternalError("compiled track order disagrees with free variables");
  cache_.emplace(std::move(key), c.dfa);
  return c;
}

MsoCompiler::Compiled MsoCompiler::compile_node(const Mso& f) {
  const std::size_t n = sigma_.size();
  switch (f->kind) {
    case MsoKind::Letter: {
      auto ids = letter_ids(f->letters);
      std::vector<char> in(n, 0);
      for (auto a : ids) in[static_cast<std::size_t>(a)] = 1;
      auto d = atom_dfa(n, 1, 2, {1}, [&](int s, std::size_t a, std::size_t bits) {
        if (bits == 0) return s;
        return s == 0 && in[a] ? 1 : -1;
      });
      return {d, {f->var}};
    }
    case MsoKind::Equal:
    case MsoKind::Less: {
      bool less = f->kind == MsoKind::Less;
      if (f->var == f->var2) return {less ? LassoDfa::empty(static_cast<int>(n * 2)) : singleton(1, 1), {f->var}};
      std::vector<std::string> vars{f->var, f->var2};
      std::sort(vars.begin(), vars.end());
      std::size_t bx = std::size_t{1} << index_of(vars, f->var), by = std::size_t{1} << index_of(vars, f->var2);
      if (!less)
        return {atom_dfa(n, 2, 2, {1}, [&](int s, std::size_t, std::size_t bits) {
                  if (bits == 0) return s;
                  return s == 0 && bits == (bx | by) ? 1 : -1;
                }),
                vars};
      return {atom_dfa(n, 2, 3, {2}, [&](int s, std::size_t, std::size_t bits) {
                if (bits == 0) return s;
                if (s == 0 && bits == bx) return 1;
                if (s == 1 && bits == by) return 2;
                return -1;
              }),
              vars};
    }
    case MsoKind::Member: {
      std::vector<std::string> vars{f->var, f->var2};
      std::sort(vars.begin(), vars.end());
      std::size_t bset = std::size_t{1} << index_of(vars, f->var), bpos = std::size_t{1} << index_of(vars, f->var2);
      return {atom_dfa(n, 2, 2, {1}, [&](int s, std::size_t, std::size_t bits) {
                if (!(bits & bpos)) return s;
                return s == 0 && (bits & bset) ? 1 : -1;
              }),
              vars};
    }
    case MsoKind::And: {
      auto a = rec(f->left), b = rec(f->right);
      std::vector<std::string> vars;
      std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(vars));
      return {dfa_intersection(cylindrify(a, vars), cylindrify(b, vars), cap_), vars};
    }
    case MsoKind::Not: {
      const Mso& c = f->left;
      if (c->kind == MsoKind::Not) return rec(c->left);
      if (c->kind == MsoKind::Forall && c->left->kind == MsoKind::Not) return project(rec(c->left->left), c->var);
      if (c->kind == MsoKind::And && c->left->kind == MsoKind::Not && c->right->kind == MsoKind::Not) {
        auto a = rec(c->left->left), b = rec(c->right->left);
        std::vector<std::string> vars;
        std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(vars));
        // Cylindrified tracks of the other operand are unconstrained; re-impose singletons.
        auto u = dfa_union(cylindrify(a, vars), cylindrify(b, vars), cap_);
        return {restrict_valid(u.minimized(), vars, ~std::size_t{0}), vars};
      }
      return negate(rec(c));
    }
    case MsoKind::Forall: {
      const Mso& body = f->left;
      if (body->kind == MsoKind::Not) return negate(project(rec(body->left), f->var));
      return negate(project(negate(rec(body)), f->var));
    }
  }
  throw InternalError("bad MSO node");
}

LassoDfa MsoCompiler::compile(const Mso& f, const std::vector<std::string>& frees) {
  for (std::size_t i = 0; i < frees.size(); ++i)
    for (std::size_t j = i + 1; j < frees.size(); ++j)
      if (frees[i] == frees[j]) throw InputError("duplicate track variable '" + frees[i] + "'");
  auto r = rec(f);
  std::size_t extra = 0;
  for (auto& v : r.vars)
    if (index_of(frees, v) == frees.size()) throw InputError("free variable '" + v + "' has no track");
  for (std::size_t j = 0; j < frees.size(); ++j)
    if (!std::binary_search(r.vars.begin(), r.vars.end(), frees[j])) extra |= std::size_t{1} << j;
  auto d = cylindrify(r, frees);
  return restrict_valid(d, frees, extra);
}

BuchiAutomaton MsoCompiler::compile_buchi(const Mso& f, const std::vector<std::string>& frees) {
  return dfa_to_buchi(compile(f, frees), extended_alphabet(sigma_, frees.size()));
}

bool MsoCompiler::satisfies(const Mso& f, const LassoWord<LetterId>& w, const VarAssignment& s) {
  auto fv = free_vars(f);
  std::vector<std::string> frees(fv.begin(), fv.end());
  for (auto c : w.prefix())
    if (c < 0 || static_cast<std::size_t>(c) >= sigma_.size()) throw InputError("word letter outside the alphabet");
  for (auto c : w.loop())
    if (c < 0 || static_cast<std::size_t>(c) >= sigma_.size()) throw InputError("word letter outside the alphabet");
  auto enc = encode_assignment(w, sigma_.size(), s, frees);
  return compile(f, frees).accepts(enc);
}

BuchiAutomaton compile_mso(const Mso& f, const Alphabet& sigma, const std::vector<std::string>& frees, std::size_t state_cap) {
  MsoCompiler c(sigma, state_cap);
  return c.compile_buchi(f, frees);
}

bool satisfies_mso(const Mso& f, const Alphabet& sigma, const LassoWord<LetterId>& w, const VarAssignment& s) {
  MsoCompiler c(sigma);
  return c.satisfies(f, w, s);
}

}  // namespace qwal
