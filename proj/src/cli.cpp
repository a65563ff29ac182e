#include "qwal/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "qwal/buchi_io.hpp"
#include "qwal/errors.hpp"
#include "qwal/wal.hpp"
#include "qwal/wba_io.hpp"

namespace qwal {

namespace {

struct Flags {
  std::optional<std::string> structure;
  std::optional<std::string> one;
  double eps = 1e-9;
  int energy_bound = 4;
  std::size_t complement_cap = kDefaultMsoStateCap;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 20;
  std::size_t max_prefix_vars = 4;
  std::size_t unroll_bound = 4;
  std::string output;
  std::string triple_output;
  std::string to;
  bool ewal = false;
  bool reference = false;
};

enum class FileKind { Formula, Buchi, Muller, Triple };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// First `key:` line, comments stripped.
std::optional<std::string> header_value(std::string_view text, const std::string& key) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto c = line.find(';'); c != std::string::npos) line.resize(c);
    auto t = trim_ws(line);
    if (t.rfind(key + ":", 0) == 0) return trim_ws(std::string_view(t).substr(key.size() + 1));
  }
  return std::nullopt;
}

FileKind detect(std::string_view text) {
  if (header_value(text, "gamma")) return FileKind::Triple;
  if (header_value(text, "accsets")) return FileKind::Muller;
  if (header_value(text, "trans") || header_value(text, "states")) return FileKind::Buchi;
  return FileKind::Formula;
}

StructurePtr structure_named(const std::string& name) {
  try {
    return make_structure(name);
  } catch (const InputError& e) {
    throw ParseError(e.what());
  }
}

std::string lasso_text(const Alphabet& sigma, const LassoWord<LetterId>& w) { return format_lasso(sigma.decode(w)); }

/// A loaded artifact that can be evaluated on words.
struct Evaluable {
  StructurePtr structure;
  std::optional<Weight> one;
  WeightedBuchiAutomaton automaton;
};

class Session {
 public:
  Session(Flags flags, std::ostream& out, std::ostream& err) : f_(std::move(flags)), out_(out), err_(err) {
    if (f_.eps <= 0) throw ParseError("--eps must be positive");
    if (f_.energy_bound <= 0) throw ParseError("--energy-bound must be positive");
    if (f_.complement_cap == 0 || f_.unroll_bound == 0 || f_.samples == 0) throw ParseError("bounds must be positive");
  }

  void eval(const std::string& path, const std::string& word_text) {
    auto word = parse_lasso(word_text);
    std::string text = read_file(path);
    if (f_.reference) {
      eval_reference(text, word);
      return;
    }
    std::vector<std::string> extra = word.prefix();
    extra.insert(extra.end(), word.loop().begin(), word.loop().end());
    Evaluable e = load(text, extra);
    auto r = BehaviorEvaluator(e.automaton, behavior_options())(e.automaton.alphabet().encode(word));
    out_ << format_behavior(*e.structure, r) << "\n";
  }

  void compile(const std::string& path) {
    std::string text = read_file(path);
    if (detect(text) != FileKind::Formula) throw InputError("'" + path + "' is not a formula file");
    auto t = formula_file(text);
    auto c = compile_ewal(t.formula, alphabet_for(t, {}), t.structure, *t.one, wal_options());
    err_ << "gamma letters: " << c.codec.gamma().size() << ", language states: " << c.dfa_states
         << ", h-unambiguous: " << (c.h_unambiguous ? "yes" : "no") << "\n";
    if (!f_.triple_output.empty()) write_file(f_.triple_output, format_triple(c.triple, t.structure));
    emit(format_wba(c.automaton, t.one));
  }

  void decompose_file(const std::string& path) {
    auto [a, one] = weighted(read_file(path));
    emit(format_triple(decompose(a), a.structure));
  }

  void recompose_file(const std::string& path) {
    std::string text = read_file(path);
    WeightedText h;
    auto t = parse_triple(text, &h);
    auto st = pick_structure(h.structure ? header_value(text, "structure") : std::nullopt);
    auto one = pick_one(h.one, *st, false);
    emit(format_wba(recompose(t, st, one), one));
  }

  void check_ambiguity_file(const std::string& path) {
    std::string text = read_file(path);
    auto kind = detect(text);
    if (kind == FileKind::Muller) throw UnsupportedError("the ambiguity check takes a Büchi automaton");
    if (kind != FileKind::Buchi) throw InputError("'" + path + "' is not an automaton file");
    BuchiAutomaton a = parse_buchi_any(text);
    auto w = check_ambiguity(a);
    if (!w) {
      out_ << "UNAMBIGUOUS\n";
      return;
    }
    out_ << "AMBIGUOUS on " << lasso_text(a.alphabet, w->word) << "\n";
    out_ << "run 1: " << run_text(a, w->first) << "\n";
    out_ << "run 2: " << run_text(a, w->second) << "\n";
  }

  void convert(const std::string& path) {
    std::string text = read_file(path);
    auto kind = detect(text);
    if (kind != FileKind::Buchi && kind != FileKind::Muller) throw InputError("'" + path + "' is not an automaton file");
    std::string target = f_.to.empty() ? (kind == FileKind::Buchi ? "muller" : "buchi") : f_.to;
    bool is_weighted = header_value(text, "structure").has_value() || f_.structure.has_value();
    if ((target == "muller") == (kind == FileKind::Muller)) throw InputError("the input already is a " + target + " automaton");
    if (is_weighted) {
      auto st = pick_structure(header_value(text, "structure"));
      WeightedText h;
      if (kind == FileKind::Buchi) {
        auto a = parse_wba(text, st, &h);
        emit(format_wma(weighted_buchi_to_muller(a), pick_one(h.one, *st, false)));
      } else {
        auto m = parse_wma(text, st, &h);
        emit(format_wba(weighted_muller_to_buchi(m), pick_one(h.one, *st, false)));
      }
      return;
    }
    if (kind == FileKind::Buchi) emit(format_muller(buchi_to_muller(parse_buchi(text))));
    else emit(format_buchi(muller_to_buchi(parse_muller(text))));
  }

  void translate(const std::string& path) {
    auto [a, one] = weighted(read_file(path));
    EwalFormula f = f_.ewal ? wba_to_ewal(a) : EwalFormula{{}, wba_to_wal(a)};
    emit(format_wal_file(f, *a.structure, one, a.alphabet()));
  }

  void equiv_sample(const std::string& left, const std::string& right) {
    Evaluable a = load(read_file(left), {}), b = load(read_file(right), {});
    if (a.structure->name() != b.structure->name())
      throw InputError("structures differ: " + a.structure->name() + " vs " + b.structure->name());
    std::vector<std::string> common;
    for (auto& n : a.automaton.alphabet().names())
      if (b.automaton.alphabet().find(n)) common.push_back(n);
    if (common.empty()) throw InputError("the two artifacts share no letter");
    std::uint64_t seed = f_.seed.value_or(kDefaultSeed);
    if (!f_.seed) err_ << "seed: " << seed << " (default)\n";
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    BehaviorEvaluator ea(a.automaton, behavior_options()), eb(b.automaton, behavior_options());
    for (std::size_t i = 0; i < f_.samples; ++i) {
      std::vector<std::string> p(static_cast<std::size_t>(pick(0, 3))), q(static_cast<std::size_t>(pick(1, 4)));
      for (auto& x : p) x = common[static_cast<std::size_t>(pick(0, static_cast<int>(common.size()) - 1))];
      for (auto& x : q) x = common[static_cast<std::size_t>(pick(0, static_cast<int>(common.size()) - 1))];
      LassoWord<std::string> w(p, q);
      auto va = ea(a.automaton.alphabet().encode(w));
      auto vb = eb(b.automaton.alphabet().encode(w));
      if (!(va == vb)) {
        out_ << "COUNTEREXAMPLE " << format_lasso(w) << ": " << format_behavior(*a.structure, va) << " vs "
             << format_behavior(*b.structure, vb) << "\n";
        return;
      }
    }
    out_ << "EQUIVALENT (n=" << f_.samples << ")\n";
  }

 private:
  BehaviorOptions behavior_options() const {
    BehaviorOptions o;
    o.energy_bound = f_.energy_bound;
    return o;
  }

  WalOptions wal_options() const {
    WalOptions o;
    o.state_cap = f_.complement_cap;
    o.max_prefix_vars = f_.max_prefix_vars;
    return o;
  }

  // Flag over header, with a warning when both are given and differ.
  StructurePtr pick_structure(const std::optional<std::string>& header) {
    if (f_.structure) {
      if (header && *header != *f_.structure)
        err_ << "warning: --structure " << *f_.structure << " overrides the header's " << *header << "\n";
      return structure_named(*f_.structure);
    }
    if (!header) throw ParseError("no structure given; add a 'structure:' header or pass --structure");
    return structure_named(*header);
  }

  std::optional<Weight> pick_one(const std::optional<Weight>& header, const ValuationStructure& st, bool required) {
    std::optional<Weight> one = header;
    if (f_.one) {
      Weight flag = Weight::parse(*f_.one);
      if (header && !(*header == flag))
        err_ << "warning: --one " << flag.str() << " overrides the header's " << header->str() << "\n";
      one = flag;
    }
    if (!one && required) one = default_one(st);
    if (one) st.validate_one(*one);
    return one;
  }

  WalText formula_file(const std::string& text) {
    auto st = pick_structure(header_value(text, "structure"));
    WalText t = parse_wal_file(text, st);
    t.one = pick_one(t.one, *st, true);
    return t;
  }

  Alphabet alphabet_for(const WalText& t, const std::vector<std::string>& extra) const {
    if (t.alphabet) return *t.alphabet;
    auto names = formula_letters(t.formula.body);
    names.insert(names.end(), extra.begin(), extra.end());
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return Alphabet(names);
  }

  std::pair<WeightedBuchiAutomaton, std::optional<Weight>> weighted(const std::string& text) {
    if (detect(text) != FileKind::Buchi) throw InputError("expected a weighted Büchi automaton file");
    auto st = pick_structure(header_value(text, "structure"));
    WeightedText h;
    auto a = parse_wba(text, st, &h);
    return {std::move(a), pick_one(h.one, *st, false)};
  }

  BuchiAutomaton parse_buchi_any(const std::string& text) {
    if (header_value(text, "structure") || f_.structure) return weighted(text).first.automaton;
    return parse_buchi(text);
  }

  Evaluable load(const std::string& text, const std::vector<std::string>& extra) {
    Evaluable e;
    switch (detect(text)) {
      case FileKind::Formula: {
        auto t = formula_file(text);
        e.structure = t.structure;
        e.one = t.one;
        e.automaton = compile_ewal(t.formula, alphabet_for(t, extra), t.structure, *t.one, wal_options()).automaton;
        return e;
      }
      case FileKind::Buchi: {
        auto [a, one] = weighted(text);
        e.structure = a.structure;
        e.one = one;
        e.automaton = std::move(a);
        return e;
      }
      case FileKind::Muller: {
        e.structure = pick_structure(header_value(text, "structure"));
        WeightedText h;
        auto m = parse_wma(text, e.structure, &h);
        e.one = pick_one(h.one, *e.structure, false);
        e.automaton = weighted_muller_to_buchi(m);
        return e;
      }
      case FileKind::Triple: {
        WeightedText h;
        auto t = parse_triple(text, &h);
        e.structure = pick_structure(h.structure ? header_value(text, "structure") : std::nullopt);
        e.one = pick_one(h.one, *e.structure, false);
        e.automaton = recompose(t, e.structure, e.one);
        return e;
      }
    }
    throw InternalError("unknown file kind");
  }

  void eval_reference(const std::string& text, const LassoWord<std::string>& word) {
    if (detect(text) != FileKind::Formula) throw InputError("--reference evaluates formula files only");
    auto t = formula_file(text);
    if (!t.formula.prefix.empty()) throw UnsupportedError("the reference evaluator takes WAL formulas without a join prefix");
    std::vector<std::string> extra = word.prefix();
    extra.insert(extra.end(), word.loop().begin(), word.loop().end());
    Alphabet sigma = alphabet_for(t, extra);
    auto v = reference_value(t.formula.body, sigma, sigma.encode(word), *t.structure, *t.one, {}, f_.unroll_bound);
    out_ << t.structure->format_value(v) << "\n";
  }

  static std::string run_text(const BuchiAutomaton& a, const LassoRun& r) {
    auto step = [&](int t) {
      const auto& tr = a.transitions[static_cast<std::size_t>(t)];
      return "#" + std::to_string(t) + " " + a.states[static_cast<std::size_t>(tr.src)] + " -" + a.alphabet.name(tr.letter) +
             "-> " + a.states[static_cast<std::size_t>(tr.dst)];
    };
    std::string s;
    for (int t : r.prefix) s += step(t) + ", ";
    s += "(";
    for (std::size_t i = 0; i < r.loop.size(); ++i) s += (i ? ", " : "") + step(r.loop[i]);
    return s + ")";
  }

  void write_file(const std::string& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o || !(o << text)) throw InputError("cannot write '" + path + "'");
  }

  void emit(const std::string& text) {
    if (f_.output.empty()) out_ << text;
    else write_file(f_.output, text);
  }

  Flags f_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted omega-automata and weight assignment logic workbench", "qwal"};
  app.require_subcommand(1);
  Flags f;
  std::string file, word, second;

  auto common = [&](CLI::App* c) {
    c->add_option("--structure", f.structure, "valuation structure: ratio, disc, energy or energy<n>");
    c->add_option("--one", f.one, "default weight, e.g. (0,1)");
    c->add_option("--eps", f.eps, "discount tolerance (the solver is exact; kept for compatibility)");
    c->add_option("--energy-bound", f.energy_bound, "energy search bound B");
    c->add_option("--complement-cap", f.complement_cap, "state cap for MSO compilation");
    c->add_option("--max-prefix-vars", f.max_prefix_vars, "largest join prefix compiled");
    c->add_option("--seed", f.seed, "random seed");
    c->add_option("--samples", f.samples, "number of sampled lassos");
    c->add_option("-o,--output", f.output, "output file instead of stdout");
  };

  auto* eval = app.add_subcommand("eval", "value of a formula or automaton on a lasso word");
  eval->add_option("file", file)->required();
  eval->add_option("word", word, "lasso word such as 'a b (b a)'")->required();
  eval->add_flag("--reference", f.reference, "use the direct evaluator (formulas without set merges)");
  eval->add_option("--unroll-bound", f.unroll_bound, "loop periods unrolled by --reference");
  auto* compile = app.add_subcommand("compile", "compile a WAL or eWAL formula to a weighted Büchi automaton");
  compile->add_option("file", file)->required();
  compile->add_option("--triple", f.triple_output, "also write the Nivat triple");
  auto* dec = app.add_subcommand("decompose", "weighted Büchi automaton to Nivat triple");
  dec->add_option("file", file)->required();
  auto* rec = app.add_subcommand("recompose", "Nivat triple to weighted Büchi automaton");
  rec->add_option("file", file)->required();
  auto* amb = app.add_subcommand("check-ambiguity", "find a word with two accepting runs");
  amb->add_option("file", file)->required();
  auto* conv = app.add_subcommand("convert", "Büchi to Muller or back, weighted or not");
  conv->add_option("file", file)->required();
  conv->add_option("--to", f.to, "target acceptance")->check(CLI::IsMember({"buchi", "muller"}));
  auto* tr = app.add_subcommand("translate", "weighted Büchi automaton to a WAL sentence");
  tr->add_option("file", file)->required();
  tr->add_flag("--ewal", f.ewal, "produce the eWAL form (accepts ambiguous automata)");
  auto* eq = app.add_subcommand("equiv-sample", "compare two artifacts on random lassos");
  eq->add_option("first", file)->required();
  eq->add_option("second", second)->required();
  for (auto* c : {eval, compile, dec, rec, amb, conv, tr, eq}) common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    Session s(f, out, err);
    if (eval->parsed()) s.eval(file, word);
    else if (compile->parsed()) s.compile(file);
    else if (dec->parsed()) s.decompose_file(file);
    else if (rec->parsed()) s.recompose_file(file);
    else if (amb->parsed()) s.check_ambiguity_file(file);
    else if (conv->parsed()) s.convert(file);
    else if (tr->parsed()) s.translate(file);
    else if (eq->parsed()) s.equiv_sample(file, second);
    return 0;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace qwal
