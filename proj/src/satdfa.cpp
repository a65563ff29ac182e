#include "qwal/satdfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "qwal/errors.hpp"

namespace qwal {

namespace {

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::uint64_t h = 1469598103934665603ull ^ b.size();
    for (auto w : b) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }
bool test_bit(const std::uint64_t* row, std::size_t i) { return (row[i / 64] >> (i % 64)) & 1u; }
void set_bit(std::uint64_t* row, std::size_t i) { row[i / 64] |= std::uint64_t{1} << (i % 64); }

template <class F>
void for_each_bit(const std::uint64_t* row, std::size_t words, F&& f) {
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t x = row[w];
    while (x) {
      f(w * 64 + static_cast<std::size_t>(__builtin_ctzll(x)));
      x &= x - 1;
    }
  }
}

// Dense boolean matrix, rows × cols, row-major bitsets.
struct BitMatrix {
  std::size_t rows = 0, cols = 0, words = 0;
  Bits bits;
  BitMatrix() = default;
  BitMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), words(words_for(c)), bits(r * words_for(c), 0) {}
  std::uint64_t* row(std::size_t i) { return bits.data() + i * words; }
  const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
};

// (X ∘ Y)[i] = ⋃_{k ∈ X[i]} Y[k]; only rows flagged in `rows_needed` are computed.
BitMatrix compose(const BitMatrix& x, const BitMatrix& y, const Bits* rows_needed) {
  BitMatrix out(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (rows_needed && !test_bit(rows_needed->data(), i)) continue;
    std::uint64_t* dst = out.row(i);
    for_each_bit(x.row(i), x.words, [&](std::size_t k) {
      const std::uint64_t* src = y.row(k);
      for (std::size_t w = 0; w < out.words; ++w) dst[w] |= src[w];
    });
  }
  return out;
}

// Closure of `set` under the relation (including `set`).
Bits closure(const Bits& set, const BitMatrix& rel) {
  Bits seen = set;
  std::vector<std::size_t> work;
  for_each_bit(set.data(), set.size(), [&](std::size_t i) { work.push_back(i); });
  while (!work.empty()) {
    std::size_t i = work.back();
    work.pop_back();
    const std::uint64_t* r = rel.row(i);
    for (std::size_t w = 0; w < rel.words; ++w) {
      std::uint64_t fresh = r[w] & ~seen[w];
      if (!fresh) continue;
      seen[w] |= fresh;
      while (fresh) {
        work.push_back(w * 64 + static_cast<std::size_t>(__builtin_ctzll(fresh)));
        fresh &= fresh - 1;
      }
    }
  }
  return seen;
}

Bits image(const Bits& set, const BitMatrix& rel) {
  Bits out(rel.words, 0);
  for_each_bit(set.data(), set.size(), [&](std::size_t i) {
    const std::uint64_t* r = rel.row(i);
    for (std::size_t w = 0; w < rel.words; ++w) out[w] |= r[w];
  });
  return out;
}

// Growing DFA under construction.
struct DfaBuilder {
  int letters;
  std::vector<int> delta;
  std::vector<char> accepting;
  explicit DfaBuilder(int base) : letters(2 * base) {}
  int add(bool acc) {
    accepting.push_back(acc ? 1 : 0);
    delta.resize(delta.size() + static_cast<std::size_t>(letters), -1);
    return static_cast<int>(accepting.size()) - 1;
  }
  void set(int s, int c, int t) { delta[static_cast<std::size_t>(s) * static_cast<std::size_t>(letters) + static_cast<std::size_t>(c)] = t; }
  LassoDfa finish(int base, int initial) {
    LassoDfa d;
    d.base_letters = base;
    d.initial = initial;
    d.delta = std::move(delta);
    d.accepting = std::move(accepting);
    return d;
  }
};

// States that can reach an accepting state.
std::vector<char> live_states(const LassoDfa& d) {
  const int n = d.num_states(), k = d.letters();
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < k; ++c) rev[static_cast<std::size_t>(d.next(s, c))].push_back(s);
  std::vector<char> live(static_cast<std::size_t>(n), 0);
  std::vector<int> work;
  for (int s = 0; s < n; ++s)
    if (d.accepting[static_cast<std::size_t>(s)]) {
      live[static_cast<std::size_t>(s)] = 1;
      work.push_back(s);
    }
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    for (int p : rev[static_cast<std::size_t>(s)])
      if (!live[static_cast<std::size_t>(p)]) {
        live[static_cast<std::size_t>(p)] = 1;
        work.push_back(p);
      }
  }
  return live;
}

// Number of marked letters read to reach each state (0, 1, or 2 for two or more / conflicting).
std::vector<int> zones(const LassoDfa& d) {
  const int n = d.num_states(), base = d.base_letters;
  std::vector<int> zone(static_cast<std::size_t>(n), -1);
  std::vector<int> work{d.initial};
  zone[static_cast<std::size_t>(d.initial)] = 0;
  auto visit = [&](int t, int z) {
    int& cur = zone[static_cast<std::size_t>(t)];
    if (cur == -1) {
      cur = z;
      work.push_back(t);
    } else if (cur != z && cur != 2) {
      cur = 2;
      work.push_back(t);
    }
  };
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    int z = zone[static_cast<std::size_t>(s)];
    for (int a = 0; a < base; ++a) {
      visit(d.next(s, a), z);
      visit(d.next(s, base + a), std::min(z + 1, 2));
    }
  }
  return zone;
}

}  // namespace

LassoDfa LassoDfa::empty(int n) {
  DfaBuilder b(n);
  int s = b.add(false);
  for (int c = 0; c < 2 * n; ++c) b.set(s, c, s);
  return b.finish(n, s);
}

LassoDfa LassoDfa::universal(int n) {
  DfaBuilder b(n);
  int pre = b.add(false), post = b.add(true), sink = b.add(false);
  for (int a = 0; a < n; ++a) {
    b.set(pre, a, pre);
    b.set(pre, n + a, post);
    b.set(post, a, post);
    b.set(post, n + a, sink);
    b.set(sink, a, sink);
    b.set(sink, n + a, sink);
  }
  return b.finish(n, pre);
}

bool LassoDfa::accepts(const LassoWord<LetterId>& w) const {
  int s = initial;
  for (auto a : w.prefix()) {
    if (a < 0 || a >= base_letters) throw InputError("letter outside the alphabet");
    s = next(s, a);
  }
  for (std::size_t i = 0; i < w.loop_size(); ++i) {
    LetterId a = w.loop()[i];
    if (a < 0 || a >= base_letters) throw InputError("letter outside the alphabet");
    s = next(s, i == 0 ? marked(a) : a);
  }
  return accepting[static_cast<std::size_t>(s)] != 0;
}

std::optional<LassoWord<LetterId>> LassoDfa::witness() const {
  const int n = num_states();
  std::vector<int> parent(static_cast<std::size_t>(n), -2), via(static_cast<std::size_t>(n), -1);
  std::deque<int> queue{initial};
  parent[static_cast<std::size_t>(initial)] = -1;
  int found = -1;
  while (!queue.empty() && found < 0) {
    int s = queue.front();
    queue.pop_front();
    if (accepting[static_cast<std::size_t>(s)]) {
      found = s;
      break;
    }
    for (int c = 0; c < letters(); ++c) {
      int t = next(s, c);
      if (parent[static_cast<std::size_t>(t)] != -2) continue;
      parent[static_cast<std::size_t>(t)] = s;
      via[static_cast<std::size_t>(t)] = c;
      queue.push_back(t);
    }
  }
  if (found < 0) return std::nullopt;
  std::vector<int> word;
  for (int s = found; parent[static_cast<std::size_t>(s)] >= 0; s = parent[static_cast<std::size_t>(s)]) word.push_back(via[static_cast<std::size_t>(s)]);
  std::reverse(word.begin(), word.end());
  std::vector<LetterId> p, q;
  bool in_loop = false;
  for (int c : word) {
    if (c >= base_letters) {
      if (in_loop) throw InternalError("lasso DFA accepts a word with two marks");
      in_loop = true;
      q.push_back(c - base_letters);
    } else {
      (in_loop ? q : p).push_back(c);
    }
  }
  if (!in_loop) throw InternalError("lasso DFA accepts a word without a mark");
  return LassoWord<LetterId>(std::move(p), std::move(q));
}

LassoDfa LassoDfa::minimized() const {
  const int k = letters();
  // Reachable states in BFS order.
  std::vector<int> order, id(static_cast<std::size_t>(num_states()), -1);
  order.push_back(initial);
  id[static_cast<std::size_t>(initial)] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c = 0; c < k; ++c) {
      int t = next(order[i], c);
      if (id[static_cast<std::size_t>(t)] < 0) {
        id[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  const std::size_t n = order.size();
  std::vector<int> succ(n * static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) succ[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] = id[static_cast<std::size_t>(next(order[i], c))];
  // Moore refinement with hashed signatures.
  std::vector<int> cls(n);
  bool has_acc = false, has_rej = false;
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = accepting[static_cast<std::size_t>(order[i])] ? 1 : 0;
    (cls[i] ? has_acc : has_rej) = true;
  }
  if (!has_rej)
    for (auto& c : cls) c = 0;
  else if (!has_acc)
    for (auto& c : cls) c = 0;
  int count = (has_acc && has_rej) ? 2 : 1;
  std::vector<int> next_cls(n);
  while (true) {
    std::unordered_map<std::uint64_t, std::vector<int>> buckets;
    std::vector<int> reps;
    int fresh = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t h = static_cast<std::uint64_t>(cls[i]) * 0x9e3779b97f4a7c15ull;
      const int* row = succ.data() + i * static_cast<std::size_t>(k);
      for (int c = 0; c < k; ++c) h = (h ^ static_cast<std::uint64_t>(cls[static_cast<std::size_t>(row[c])])) * 1099511628211ull + static_cast<std::uint64_t>(c);
      auto& bucket = buckets[h];
      int found = -1;
      for (int r : bucket) {
        auto rs = static_cast<std::size_t>(r);
        if (cls[rs] != cls[i]) continue;
        const int* rrow = succ.data() + rs * static_cast<std::size_t>(k);
        bool same = true;
        for (int c = 0; c < k && same; ++c) same = cls[static_cast<std::size_t>(rrow[c])] == cls[static_cast<std::size_t>(row[c])];
        if (same) {
          found = next_cls[rs];
          break;
        }
      }
      if (found < 0) {
        found = fresh++;
        bucket.push_back(static_cast<int>(i));
      }
      next_cls[i] = found;
    }
    bool stable = fresh == count;
    cls.swap(next_cls);
    count = fresh;
    if (stable) break;
  }
  // Canonical numbering: BFS over classes from the initial class.
  std::vector<int> rep(static_cast<std::size_t>(count), -1);
  for (std::size_t i = 0; i < n; ++i)
    if (rep[static_cast<std::size_t>(cls[i])] < 0) rep[static_cast<std::size_t>(cls[i])] = static_cast<int>(i);
  std::vector<int> cid(static_cast<std::size_t>(count), -1), corder;
  cid[static_cast<std::size_t>(cls[0])] = 0;
  corder.push_back(cls[0]);
  for (std::size_t i = 0; i < corder.size(); ++i) {
    auto r = static_cast<std::size_t>(rep[static_cast<std::size_t>(corder[i])]);
    for (int c = 0; c < k; ++c) {
      int t = cls[static_cast<std::size_t>(succ[r * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)])];
      if (cid[static_cast<std::size_t>(t)] < 0) {
        cid[static_cast<std::size_t>(t)] = static_cast<int>(corder.size());
        corder.push_back(t);
      }
    }
  }
  DfaBuilder b(base_letters);
  for (int c : corder) b.add(accepting[static_cast<std::size_t>(order[static_cast<std::size_t>(rep[static_cast<std::size_t>(c)])])] != 0);
  for (std::size_t i = 0; i < corder.size(); ++i) {
    auto r = static_cast<std::size_t>(rep[static_cast<std::size_t>(corder[i])]);
    for (int c = 0; c < k; ++c)
      b.set(static_cast<int>(i), c, cid[static_cast<std::size_t>(cls[static_cast<std::size_t>(succ[r * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)])])]);
  }
  return b.finish(base_letters, 0);
}

namespace {

template <class Accept>
LassoDfa product(const LassoDfa& a, const LassoDfa& b, Accept&& acc, std::size_t max_states) {
  if (a.base_letters != b.base_letters) throw InternalError("DFA product over different alphabets");
  const int k = a.letters();
  DfaBuilder out(a.base_letters);
  std::unordered_map<std::uint64_t, int> ids;
  std::vector<std::pair<int, int>> pairs;
  auto id = [&](int x, int y) {
    std::uint64_t key = static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(b.num_states()) + static_cast<std::uint64_t>(y);
    auto [it, fresh] = ids.try_emplace(key, static_cast<int>(pairs.size()));
    if (fresh) {
      if (pairs.size() >= max_states) throw ResourceError("automaton product exceeded " + std::to_string(max_states) + " states");
      pairs.push_back({x, y});
      out.add(acc(a.accepting[static_cast<std::size_t>(x)] != 0, b.accepting[static_cast<std::size_t>(y)] != 0));
    }
    return it->second;
  };
  id(a.initial, b.initial);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [x, y] = pairs[i];
    for (int c = 0; c < k; ++c) out.set(static_cast<int>(i), c, id(a.next(x, c), b.next(y, c)));
  }
  return out.finish(a.base_letters, 0).minimized();
}

}  // namespace

LassoDfa dfa_intersection(const LassoDfa& a, const LassoDfa& b, std::size_t max_states) {
  return product(a, b, [](bool x, bool y) { return x && y; }, max_states);
}

LassoDfa dfa_union(const LassoDfa& a, const LassoDfa& b, std::size_t max_states) {
  return product(a, b, [](bool x, bool y) { return x || y; }, max_states);
}

LassoDfa dfa_complement(const LassoDfa& a) {
  // Track the number of marks (0, 1, ≥2) so only well-formed encodings are accepted.
  const int n = a.base_letters;
  DfaBuilder out(n);
  std::unordered_map<std::uint64_t, int> ids;
  std::vector<std::pair<int, int>> st;
  auto id = [&](int s, int z) {
    std::uint64_t key = static_cast<std::uint64_t>(s) * 3u + static_cast<std::uint64_t>(z);
    auto [it, fresh] = ids.try_emplace(key, static_cast<int>(st.size()));
    if (fresh) {
      st.push_back({s, z});
      out.add(z == 1 && !a.accepting[static_cast<std::size_t>(s)]);
    }
    return it->second;
  };
  id(a.initial, 0);
  for (std::size_t i = 0; i < st.size(); ++i) {
    auto [s, z] = st[i];
    for (int c = 0; c < 2 * n; ++c) {
      int nz = c >= n ? std::min(z + 1, 2) : z;
      out.set(static_cast<int>(i), c, id(a.next(s, c), nz));
    }
  }
  return out.finish(n, 0).minimized();
}

LassoDfa dfa_preimage(const LassoDfa& a, const std::vector<LetterId>& f) {
  const int n = static_cast<int>(f.size()), old = a.base_letters;
  DfaBuilder out(n);
  for (int s = 0; s < a.num_states(); ++s) out.add(a.accepting[static_cast<std::size_t>(s)] != 0);
  for (int s = 0; s < a.num_states(); ++s)
    for (int c = 0; c < n; ++c) {
      int o = f[static_cast<std::size_t>(c)];
      if (o < 0 || o >= old) throw InternalError("preimage letter map out of range");
      out.set(s, c, a.next(s, o));
      out.set(s, n + c, a.next(s, old + o));
    }
  return out.finish(n, a.initial).minimized();
}

LassoDfa dfa_image(const LassoDfa& a, const std::vector<LetterId>& g, int n_new, std::size_t max_states) {
  const int old = a.base_letters;
  if (static_cast<int>(g.size()) != old) throw InternalError("image letter map has the wrong size");
  auto live = live_states(a);
  auto zone = zones(a);
  // Compact indices of live pre-zone and post-zone states.
  std::vector<int> pre_id(static_cast<std::size_t>(a.num_states()), -1), post_id(static_cast<std::size_t>(a.num_states()), -1);
  std::size_t np = 0, nq = 0;
  for (int s = 0; s < a.num_states(); ++s) {
    if (!live[static_cast<std::size_t>(s)]) continue;
    if (zone[static_cast<std::size_t>(s)] == 0) pre_id[static_cast<std::size_t>(s)] = static_cast<int>(np++);
    else if (zone[static_cast<std::size_t>(s)] == 1) post_id[static_cast<std::size_t>(s)] = static_cast<int>(nq++);
  }
  std::vector<BitMatrix> rel_pre(static_cast<std::size_t>(n_new), BitMatrix(np, np)),
      rel_post(static_cast<std::size_t>(n_new), BitMatrix(nq, nq)), mark(static_cast<std::size_t>(n_new), BitMatrix(np, nq));
  BitMatrix any_pre(np, np), any_post(nq, nq), any_mark(np, nq);
  Bits final_post(words_for(nq), 0);
  for (int s = 0; s < a.num_states(); ++s) {
    int ps = pre_id[static_cast<std::size_t>(s)], qs = post_id[static_cast<std::size_t>(s)];
    if (qs >= 0 && a.accepting[static_cast<std::size_t>(s)]) set_bit(final_post.data(), static_cast<std::size_t>(qs));
    for (int x = 0; x < old; ++x) {
      auto b = static_cast<std::size_t>(g[static_cast<std::size_t>(x)]);
      if (ps >= 0) {
        int t = pre_id[static_cast<std::size_t>(a.next(s, x))];
        if (t >= 0) {
          set_bit(rel_pre[b].row(static_cast<std::size_t>(ps)), static_cast<std::size_t>(t));
          set_bit(any_pre.row(static_cast<std::size_t>(ps)), static_cast<std::size_t>(t));
        }
        int u = post_id[static_cast<std::size_t>(a.next(s, old + x))];
        if (u >= 0) {
          set_bit(mark[b].row(static_cast<std::size_t>(ps)), static_cast<std::size_t>(u));
          set_bit(any_mark.row(static_cast<std::size_t>(ps)), static_cast<std::size_t>(u));
        }
      }
      if (qs >= 0) {
        int t = post_id[static_cast<std::size_t>(a.next(s, x))];
        if (t >= 0) {
          set_bit(rel_post[b].row(static_cast<std::size_t>(qs)), static_cast<std::size_t>(t));
          set_bit(any_post.row(static_cast<std::size_t>(qs)), static_cast<std::size_t>(t));
        }
      }
    }
  }

  DfaBuilder out(n_new);
  int sink = out.add(false);
  for (int c = 0; c < 2 * n_new; ++c) out.set(sink, c, sink);

  struct Post {
    int pre_state;
    BitMatrix A, B, C;
  };
  std::unordered_map<Bits, int, BitsHash> pre_ids, post_ids;
  std::vector<Bits> pre_sets;
  std::vector<Bits> pre_reach, post_reach;  // rows worth keeping per pre-zone result state
  std::vector<int> pre_states;
  std::vector<Post> posts;
  std::vector<int> post_states;
  auto check_cap = [&] {
    if (out.accepting.size() > max_states) throw ResourceError("projection exceeded " + std::to_string(max_states) + " states");
  };
  auto pre_state = [&](const Bits& r) {
    auto [it, fresh] = pre_ids.try_emplace(r, static_cast<int>(pre_sets.size()));
    if (fresh) {
      pre_sets.push_back(r);
      Bits reach = closure(r, any_pre);
      pre_reach.push_back(reach);
      post_reach.push_back(closure(image(reach, any_mark), any_post));
      pre_states.push_back(out.add(false));
      check_cap();
    }
    return it->second;
  };
  auto post_state = [&](int pre, BitMatrix A, BitMatrix B, BitMatrix C) {
    auto zero_rows = [](BitMatrix& m, const Bits& keep) {
      for (std::size_t i = 0; i < m.rows; ++i)
        if (!test_bit(keep.data(), i)) std::fill(m.row(i), m.row(i) + m.words, 0);
    };
    zero_rows(A, pre_reach[static_cast<std::size_t>(pre)]);
    zero_rows(C, pre_reach[static_cast<std::size_t>(pre)]);
    zero_rows(B, post_reach[static_cast<std::size_t>(pre)]);
    Bits key;
    key.reserve(1 + A.bits.size() + B.bits.size() + C.bits.size());
    key.push_back(static_cast<std::uint64_t>(pre));
    key.insert(key.end(), A.bits.begin(), A.bits.end());
    key.insert(key.end(), B.bits.begin(), B.bits.end());
    key.insert(key.end(), C.bits.begin(), C.bits.end());
    auto [it, fresh] = post_ids.try_emplace(std::move(key), static_cast<int>(posts.size()));
    if (fresh) {
      Bits rstar = closure(pre_sets[static_cast<std::size_t>(pre)], A);
      Bits z = closure(image(rstar, C), B);
      bool acc = false;
      for (std::size_t w = 0; w < z.size() && !acc; ++w) acc = (z[w] & final_post[w]) != 0;
      posts.push_back({pre, std::move(A), std::move(B), std::move(C)});
      post_states.push_back(out.add(acc));
      check_cap();
    }
    return it->second;
  };

  Bits r0(words_for(np), 0);
  int pi = pre_id[static_cast<std::size_t>(a.initial)];
  if (pi >= 0) set_bit(r0.data(), static_cast<std::size_t>(pi));
  pre_state(r0);
  std::size_t done_pre = 0, done_post = 0;
  while (done_pre < pre_sets.size() || done_post < posts.size()) {
    if (done_pre < pre_sets.size()) {
      std::size_t i = done_pre++;
      Bits r = pre_sets[i];
      for (int b = 0; b < n_new; ++b) {
        int t = pre_state(image(r, rel_pre[static_cast<std::size_t>(b)]));
        out.set(pre_states[i], b, pre_states[static_cast<std::size_t>(t)]);
        int u = post_state(static_cast<int>(i), rel_pre[static_cast<std::size_t>(b)], rel_post[static_cast<std::size_t>(b)], mark[static_cast<std::size_t>(b)]);
        out.set(pre_states[i], n_new + b, post_states[static_cast<std::size_t>(u)]);
      }
      continue;
    }
    std::size_t j = done_post++;
    for (int b = 0; b < n_new; ++b) {
      const Post& p = posts[j];
      int pre = p.pre_state;
      const Bits& pr = pre_reach[static_cast<std::size_t>(pre)];
      const Bits& qr = post_reach[static_cast<std::size_t>(pre)];
      BitMatrix A = compose(p.A, rel_pre[static_cast<std::size_t>(b)], &pr);
      BitMatrix B = compose(p.B, rel_post[static_cast<std::size_t>(b)], &qr);
      BitMatrix C = compose(p.C, rel_post[static_cast<std::size_t>(b)], &pr);
      int u = post_state(pre, std::move(A), std::move(B), std::move(C));
      out.set(post_states[j], b, post_states[static_cast<std::size_t>(u)]);
      out.set(post_states[j], n_new + b, sink);
    }
  }
  return out.finish(n_new, pre_states[0]).minimized();
}

std::optional<LassoWord<LetterId>> dfa_difference_witness(const LassoDfa& a, const LassoDfa& b) {
  LassoDfa x = product(a, b, [](bool p, bool q) { return p != q; }, SIZE_MAX);
  return x.witness();
}

LassoDfa lasso_dfa_from_buchi(const BuchiAutomaton& a, std::size_t max_states) {
  const int base = static_cast<int>(a.alphabet.size());
  const std::size_t n = a.num_states();
  // Profile of a word v: entry [p][q] = 0 (no path), 1 (path), 2 (path visiting F after p).
  using Profile = std::vector<std::uint8_t>;
  std::vector<Profile> letter_profile(static_cast<std::size_t>(base), Profile(n * n, 0));
  for (auto& t : a.transitions) {
    auto& e = letter_profile[static_cast<std::size_t>(t.letter)][static_cast<std::size_t>(t.src) * n + static_cast<std::size_t>(t.dst)];
    e = std::max<std::uint8_t>(e, a.is_accepting(t.dst) ? 2 : 1);
  }
  auto compose_profile = [&](const Profile& x, const Profile& y) {
    Profile z(n * n, 0);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t r = 0; r < n; ++r) {
        std::uint8_t xv = x[p * n + r];
        if (!xv) continue;
        for (std::size_t q = 0; q < n; ++q) {
          std::uint8_t yv = y[r * n + q];
          if (yv) z[p * n + q] = std::max<std::uint8_t>(z[p * n + q], std::max(xv, yv));
        }
      }
    return z;
  };
  auto step_set = [&](const std::vector<char>& r, int letter) {
    std::vector<char> out(n, 0);
    for (std::size_t p = 0; p < n; ++p)
      if (r[p])
        for (std::size_t q = 0; q < n; ++q)
          if (letter_profile[static_cast<std::size_t>(letter)][p * n + q]) out[q] = 1;
    return out;
  };
  // u·v^ω accepted iff from R some state reachable under v-steps lies on a v-cycle through F.
  auto accepting_pair = [&](const std::vector<char>& r, const Profile& p) {
    Digraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_vertex();
    std::vector<char> heavy;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (p[x * n + y]) {
          g.add_edge(static_cast<int>(x), static_cast<int>(y));
          heavy.push_back(p[x * n + y] == 2);
        }
    std::vector<int> sources;
    for (std::size_t i = 0; i < n; ++i)
      if (r[i]) sources.push_back(static_cast<int>(i));
    VertexMask reach = reachable(g, sources);
    int count = 0;
    auto comp = scc_ids(g, count, &reach);
    for (int e = 0; e < g.num_edges(); ++e) {
      int c = comp[static_cast<std::size_t>(g.from[static_cast<std::size_t>(e)])];
      if (heavy[static_cast<std::size_t>(e)] && c >= 0 && c == comp[static_cast<std::size_t>(g.to[static_cast<std::size_t>(e)])]) return true;
    }
    return false;
  };

  DfaBuilder out(base);
  int sink = out.add(false);
  for (int c = 0; c < 2 * base; ++c) out.set(sink, c, sink);
  std::map<std::vector<char>, int> pre_ids;
  std::vector<std::vector<char>> pre_sets;
  std::vector<int> pre_state;
  std::map<std::pair<int, Profile>, int> post_ids;
  std::vector<std::pair<int, Profile>> posts;
  std::vector<int> post_state;
  auto check = [&] {
    if (out.accepting.size() > max_states) throw ResourceError("Büchi to lasso DFA conversion exceeded " + std::to_string(max_states) + " states");
  };
  auto pre = [&](const std::vector<char>& r) {
    auto [it, fresh] = pre_ids.try_emplace(r, static_cast<int>(pre_sets.size()));
    if (fresh) {
      pre_sets.push_back(r);
      pre_state.push_back(out.add(false));
      check();
    }
    return it->second;
  };
  auto post = [&](int r, const Profile& p) {
    auto key = std::make_pair(r, p);
    auto [it, fresh] = post_ids.try_emplace(key, static_cast<int>(posts.size()));
    if (fresh) {
      posts.push_back(key);
      post_state.push_back(out.add(accepting_pair(pre_sets[static_cast<std::size_t>(r)], p)));
      check();
    }
    return it->second;
  };
  std::vector<char> r0(n, 0);
  for (auto q : a.initial) r0[static_cast<std::size_t>(q)] = 1;
  pre(r0);
  std::size_t dp = 0, dq = 0;
  while (dp < pre_sets.size() || dq < posts.size()) {
    if (dp < pre_sets.size()) {
      std::size_t i = dp++;
      for (int l = 0; l < base; ++l) {
        int t = pre(step_set(pre_sets[i], l));
        out.set(pre_state[i], l, pre_state[static_cast<std::size_t>(t)]);
        int u = post(static_cast<int>(i), letter_profile[static_cast<std::size_t>(l)]);
        out.set(pre_state[i], base + l, post_state[static_cast<std::size_t>(u)]);
      }
      continue;
    }
    std::size_t j = dq++;
    for (int l = 0; l < base; ++l) {
      auto [r, p] = posts[j];
      int u = post(r, compose_profile(p, letter_profile[static_cast<std::size_t>(l)]));
      out.set(post_state[j], l, post_state[static_cast<std::size_t>(u)]);
      out.set(post_state[j], base + l, sink);
    }
  }
  return out.finish(base, pre_state[0]).minimized();
}

BuchiAutomaton dfa_to_buchi(const LassoDfa& d, const Alphabet& alphabet) {
  if (static_cast<int>(alphabet.size()) != d.base_letters) throw InternalError("alphabet size does not match the lasso DFA");
  const int base = d.base_letters;
  auto live = live_states(d);
  auto zone = zones(d);
  BuchiAutomaton out;
  out.alphabet = alphabet;
  std::vector<StateId> pre_state(static_cast<std::size_t>(d.num_states()), -1);
  for (int s = 0; s < d.num_states(); ++s)
    if (live[static_cast<std::size_t>(s)] && zone[static_cast<std::size_t>(s)] == 0)
      pre_state[static_cast<std::size_t>(s)] = out.add_state("p" + std::to_string(s));
  if (pre_state[static_cast<std::size_t>(d.initial)] < 0) return out;
  out.initial.push_back(pre_state[static_cast<std::size_t>(d.initial)]);
  for (int s = 0; s < d.num_states(); ++s) {
    if (pre_state[static_cast<std::size_t>(s)] < 0) continue;
    for (int a = 0; a < base; ++a) {
      int t = d.next(s, a);
      if (pre_state[static_cast<std::size_t>(t)] >= 0) out.add_transition(pre_state[static_cast<std::size_t>(s)], a, pre_state[static_cast<std::size_t>(t)]);
    }
  }
  // L = ⋃ N_s · M_{s,t}^ω over pre-zone s and accepting post-zone t, with
  // M_{s,t} = { v : s·v = s, (s·â)·v′ = t, t·v = t } read as triples (x, y, z).
  for (int s = 0; s < d.num_states(); ++s) {
    if (pre_state[static_cast<std::size_t>(s)] < 0) continue;
    for (int t = 0; t < d.num_states(); ++t) {
      if (!live[static_cast<std::size_t>(t)] || zone[static_cast<std::size_t>(t)] != 1 || !d.accepting[static_cast<std::size_t>(t)]) continue;
      using Triple = std::tuple<int, int, int>;
      const Triple target{s, t, t};
      std::map<Triple, int> local;
      std::vector<Triple> triples;
      std::vector<std::tuple<int, int, int>> edges;  // (from index or -1 for hub, letter, to index or -1 for hub)
      auto viable = [&](const Triple& x) {
        auto [p, q, r] = x;
        return pre_state[static_cast<std::size_t>(p)] >= 0 && live[static_cast<std::size_t>(q)] && live[static_cast<std::size_t>(r)];
      };
      auto index = [&](const Triple& x) {
        auto [it, fresh] = local.try_emplace(x, static_cast<int>(triples.size()));
        if (fresh) triples.push_back(x);
        return it->second;
      };
      bool closes = false;
      for (int a = 0; a < base; ++a) {
        Triple first{d.next(s, a), d.next(s, base + a), d.next(t, a)};
        if (first == target) {
          edges.push_back({-1, a, -1});
          closes = true;
        }
        if (viable(first)) edges.push_back({-1, a, index(first)});
      }
      for (std::size_t i = 0; i < triples.size(); ++i) {
        auto [x, y, z] = triples[i];
        for (int a = 0; a < base; ++a) {
          Triple nx{d.next(x, a), d.next(y, a), d.next(z, a)};
          if (nx == target) {
            edges.push_back({static_cast<int>(i), a, -1});
            closes = true;
          }
          if (viable(nx)) edges.push_back({static_cast<int>(i), a, index(nx)});
        }
      }
      if (!closes) continue;
      StateId hub = out.add_state("h" + std::to_string(s) + "_" + std::to_string(t), true);
      std::vector<StateId> ids(triples.size());
      for (std::size_t i = 0; i < triples.size(); ++i)
        ids[i] = out.add_state("g" + std::to_string(s) + "_" + std::to_string(t) + "_" + std::to_string(i));
      StateId entry = pre_state[static_cast<std::size_t>(s)];
      for (auto [f, a, to] : edges) {
        StateId dst = to < 0 ? hub : ids[static_cast<std::size_t>(to)];
        if (f < 0) {
          out.add_transition(hub, a, dst);
          out.add_transition(entry, a, dst);
        } else {
          out.add_transition(ids[static_cast<std::size_t>(f)], a, dst);
        }
      }
    }
  }
  return trim(out);
}

}  // namespace qwal
