#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mspacings/cli.hpp"
#include "mspacings/random.hpp"

using mspacings::cli::dispatch;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mspacings_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_sample(const fs::path& p, std::uint64_t seed, std::size_t n) {
  mspacings::Rng rng(seed);
  std::ofstream out(p);
  out.precision(17);
  for (std::size_t i = 0; i < n; ++i) out << rng.uniform() << '\n';
}

}  // namespace

TEST_CASE("dist prints the beta cdf") {
  const auto r = run({"dist", "--m", "2", "--cdf", "0.25"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.15625\n");
  CHECK(run({"dist", "--m", "1", "--family", "gamma", "--quantile", "0.5"}).code == 0);
  CHECK(run({"dist", "--m", "2", "--grid", "5", "--format", "json"}).code == 0);
}

TEST_CASE("usage and domain errors exit with 2") {
  CHECK(run({"dist", "--m", "2", "--bogus", "1"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"dist", "--m", "0", "--cdf", "0.5"}).code == 2);
  CHECK(run({"dist", "--m", "2", "--cdf", "1.5"}).code == 2);
  CHECK(run({"verify", "--m", "1", "--n1", "99", "--n2", "99", "--reps", "0"}).code == 2);
  CHECK(run({"verify", "--m", "1", "--n1", "99", "--regime", "c=0"}).code == 2);
  CHECK(run({"simulate", "--m", "1", "--n1", "99", "--n2", "99", "--format", "xml"}).code == 2);
  CHECK(run({"dist", "--help"}).code == 0);
}

TEST_CASE("verify emits a JSON report") {
  const auto r = run({"verify", "--m", "1", "--n1", "999", "--n2", "999", "--regime", "c=0,d=0",
                      "--reps", "2000", "--seed", "42"});
  CHECK((r.code == 0 || r.code == 1));
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("ks"));
  CHECK(j.contains("pass"));
  CHECK(j["config"]["seed"] == 42);
  CHECK(r.code == (j["pass"].get<bool>() ? 0 : 1));
}

TEST_CASE("failed verification exits with 1") {
  // A zero KS tolerance cannot be met.
  const auto r = run({"verify", "--m", "1", "--n1", "199", "--n2", "199", "--reps", "200",
                      "--ks-tol", "0", "--event-reps", "2"});
  CHECK(r.code == 1);
}

TEST_CASE("simulate is byte-identical across runs") {
  const auto a = scratch("g1.csv"), b = scratch("g2.csv");
  CHECK(run({"simulate", "--m", "1", "--n1", "99", "--n2", "99", "--seed", "7", "--out",
             a.string()})
            .code == 0);
  CHECK(run({"simulate", "--m", "1", "--n1", "99", "--n2", "99", "--seed", "7", "--out",
             b.string()})
            .code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("rep,t,gamma\n", 0) == 0);
}

TEST_CASE("seed falls back to MSPACINGS_SEED") {
  const std::vector<std::string> base{"simulate", "--m", "1", "--n1", "49", "--n2", "49",
                                      "--kind", "ratios"};
  auto explicit_args = base;
  explicit_args.insert(explicit_args.end(), {"--seed", "99"});
  const auto want = run(explicit_args).out;
  setenv("MSPACINGS_SEED", "99", 1);
  const auto got = run(base).out;
  setenv("MSPACINGS_SEED", "nope", 1);
  const auto bad = run(base);
  unsetenv("MSPACINGS_SEED");
  CHECK(got == want);
  CHECK(bad.code == 2);
}

TEST_CASE("limit kernel table") {
  const auto r = run({"limit", "--m", "1", "--kind", "kernel", "--C", "1", "--grid", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("0.5,0.5,0.0625") != std::string::npos);
  CHECK(run({"limit", "--m", "1", "--C", "1", "--regime", "c=0,d=0"}).code == 2);
}

TEST_CASE("test subcommand") {
  const auto x = scratch("x.txt"), y = scratch("y.txt"), out = scratch("t.json");
  write_sample(x, 1, 1500);
  write_sample(y, 2, 1500);
  const auto r = run({"test", "--m", "1", "--x", x.string(), "--y", y.string(), "--reps", "1000",
                      "--grid", "513", "--seed", "3", "--out", out.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["decision"].is_string());
  CHECK(j["design"]["N"] == 1500);
  CHECK(run({"test", "--x", x.string(), "--y", y.string(), "--x-interval", "0,0.5"}).code == 2);
}

TEST_CASE("simulate accepts an (N, P, Q) design") {
  const auto counts = run({"simulate", "--m", "2", "--N", "40", "--P", "0", "--Q", "5", "--kind",
                           "ratios", "--seed", "1"});
  CHECK(counts.code == 0);
  // m (N+P+1) - 1 = 81 and m (N+Q+1) - 1 = 91 give the same design.
  const auto sizes = run({"simulate", "--m", "2", "--n1", "81", "--n2", "91", "--N", "40",
                          "--kind", "ratios", "--seed", "1"});
  CHECK(counts.out == sizes.out);
  CHECK(run({"simulate", "--m", "2", "--N", "40"}).code == 2);
}
