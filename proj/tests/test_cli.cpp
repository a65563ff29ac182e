#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "automata.hpp"
#include "qwal/buchi_io.hpp"
#include "qwal/cli.hpp"
#include "qwal/wal.hpp"
#include "qwal/wba_io.hpp"

using namespace qwal;
using namespace qwal::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "qwal");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(QWAL_SAMPLES_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Scratch directory removed at scope exit.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("qwal_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("eval prints exact values", "[cli]") {
  auto r = run({"eval", sample("discount_choice.wal"), "(a)"});
  CHECK(r.code == 0);
  CHECK(r.out == "8\n");
  CHECK(run({"eval", sample("costs.wal"), "(a b)"}).out == "2\n");
  CHECK(run({"eval", "--reference", sample("costs.wal"), "c (a b)"}).out == "2\n");
  CHECK(run({"eval", sample("two_loops.wba"), "(a)"}).out == "3\n");
  auto outside = run({"eval", sample("last_b.wba"), "(b)"});
  CHECK(outside.code == 0);
  CHECK(outside.out == "-inf\n");
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run({"eval", sample("costs.wal"), "a((b)"}).code == 1);
  CHECK(run({"eval", sample("no_such_file.wal"), "(a)"}).code == 1);
  CHECK(run({"eval", "--structure", "nope", sample("costs.wal"), "(a)"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"eval", sample("costs.wal"), "(d)"}).code == 2);
  CHECK(run({"translate", sample("two_loops.wba")}).code == 2);
  CHECK(run({"eval", "--max-prefix-vars", "0", sample("discount_choice.wal"), "(a)"}).code == 2);
  CHECK(run({"eval", "--reference", sample("discount_choice.wal"), "(a)"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("flags override headers with a warning", "[cli]") {
  auto r = run({"eval", "--structure", "disc", sample("costs.wal"), "(a)"});
  CHECK(r.code == 0);
  CHECK(r.out == "inf\n");
  CHECK(r.err.find("warning") != std::string::npos);
  auto o = run({"eval", "--one", "(1,1)", sample("costs.wal"), "(c)"});
  CHECK(o.out == "1\n");
  CHECK(o.err.find("warning") != std::string::npos);
  CHECK(run({"eval", "--one", "(1,1)", sample("costs.wal"), "(a b)"}).err.find("warning") != std::string::npos);
  CHECK(run({"eval", sample("costs.wal"), "(a b)"}).err.empty());
}

TEST_CASE("decompose, recompose and sample", "[cli]") {
  Scratch tmp;
  REQUIRE(run({"decompose", sample("last_b.wba"), "-o", tmp("t.triple")}).code == 0);
  REQUIRE(run({"recompose", tmp("t.triple"), "-o", tmp("r.wba")}).code == 0);
  auto eq = run({"equiv-sample", sample("last_b.wba"), tmp("r.wba")});
  CHECK(eq.code == 0);
  CHECK(eq.out == "EQUIVALENT (n=20)\n");
  CHECK(eq.err.find("seed: 1") != std::string::npos);

  auto diff = run({"equiv-sample", "--seed", "3", sample("last_b.wba"), sample("last_b_perturbed.wba")});
  CHECK(diff.out.rfind("COUNTEREXAMPLE ", 0) == 0);
  CHECK(run({"equiv-sample", "--seed", "3", sample("last_b.wba"), sample("last_b_perturbed.wba")}).out == diff.out);
  CHECK(run({"equiv-sample", "--samples", "7", sample("costs.wal"), sample("costs.wal")}).out == "EQUIVALENT (n=7)\n");

  // Output files re-parse to the same objects.
  auto a = parse_wba(slurp(tmp("r.wba")));
  CHECK(parse_wba(format_wba(a)).automaton.transitions == a.automaton.transitions);
}

TEST_CASE("convert round trips", "[cli]") {
  Scratch tmp;
  REQUIRE(run({"convert", sample("inf_a.buchi"), "-o", tmp("m.muller")}).code == 0);
  REQUIRE(run({"convert", tmp("m.muller"), "-o", tmp("b.buchi")}).code == 0);
  auto original = parse_buchi(slurp(sample("inf_a.buchi")));
  auto back = parse_buchi(slurp(tmp("b.buchi")));
  auto muller = parse_muller(slurp(tmp("m.muller")));
  Rng rng(503);
  for (int i = 0; i < 20; ++i) {
    auto w = random_lasso(rng, 2);
    CHECK(accepts(original, w).has_value() == accepts(back, w).has_value());
    CHECK(accepts(original, w).has_value() == accepts(muller, w).has_value());
  }
  CHECK(run({"convert", "--to", "buchi", sample("inf_a.buchi")}).code == 2);

  REQUIRE(run({"convert", sample("last_b.wba"), "-o", tmp("w.wma")}).code == 0);
  CHECK(run({"equiv-sample", sample("last_b.wba"), tmp("w.wma")}).out == "EQUIVALENT (n=20)\n");
}

TEST_CASE("compile and translate", "[cli]") {
  Scratch tmp;
  auto c = run({"compile", sample("costs.wal"), "-o", tmp("c.wba"), "--triple", tmp("c.triple")});
  REQUIRE(c.code == 0);
  CHECK(c.err.find("h-unambiguous: yes") != std::string::npos);
  CHECK(run({"equiv-sample", tmp("c.wba"), sample("costs.wal")}).out == "EQUIVALENT (n=20)\n");
  CHECK(run({"equiv-sample", tmp("c.triple"), sample("costs.wal")}).out == "EQUIVALENT (n=20)\n");

  REQUIRE(run({"translate", sample("last_b.wba"), "-o", tmp("l.wal")}).code == 0);
  auto t = parse_wal_file(slurp(tmp("l.wal")));
  CHECK(wal_equal_trees(t.formula.body, wba_to_wal(parse_wba(slurp(sample("last_b.wba"))))));
  CHECK(run({"equiv-sample", tmp("l.wal"), sample("last_b.wba")}).out == "EQUIVALENT (n=20)\n");

  REQUIRE(run({"translate", "--ewal", sample("two_loops.wba"), "-o", tmp("two.wal")}).code == 0);
  CHECK(run({"eval", tmp("two.wal"), "(a)"}).out == "3\n");
  CHECK(run({"equiv-sample", tmp("two.wal"), sample("two_loops.wba")}).out == "EQUIVALENT (n=20)\n");
}

TEST_CASE("ambiguity reports", "[cli]") {
  auto r = run({"check-ambiguity", sample("two_loops.wba")});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("AMBIGUOUS on ", 0) == 0);
  CHECK(r.out.find("run 2: ") != std::string::npos);
  CHECK(run({"check-ambiguity", sample("last_b.wba")}).out == "UNAMBIGUOUS\n");
  CHECK(run({"check-ambiguity", sample("inf_a.buchi")}).out == "UNAMBIGUOUS\n");
}
