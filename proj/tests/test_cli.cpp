#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(KT_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "ktensors_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string at(const char* name) { return (workdir() / name).string(); }

int count_data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int rows = -1;  // column header
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("simulate writes the sample and echoes the resolved config") {
  const Run r = run("simulate --generator wishart --df 20 --p 5 --k 2 --n 40 --seed 7 --out " + at("w.json"));
  REQUIRE(r.code == 0);
  const auto cfg = nlohmann::json::parse(r.out);
  CHECK(cfg["df"] == 20);
  CHECK(cfg["separation"] == 0.3);
  const auto sample = nlohmann::json::parse(slurp(at("w.json")));
  CHECK(sample["matrices"].size() == 80);
  CHECK(sample["labels"].size() == 80);
}

TEST_CASE("simulate is byte-for-byte repeatable") {
  REQUIRE(run("simulate --generator cook --noise 0.2 --seed 3 --out " + at("a.json")).code == 0);
  REQUIRE(run("simulate --generator cook --noise 0.2 --seed 3 --out " + at("b.json")).code == 0);
  CHECK(slurp(at("a.json")) == slurp(at("b.json")));
}

TEST_CASE("flag errors exit with 2 and print usage") {
  const Run missing = run("simulate --out " + at("x.json"));
  CHECK(missing.code == 2);
  CHECK(missing.out.find("--generator") != std::string::npos);
  CHECK(run("simulate --generator cook --bogus 1 --out " + at("x.json")).code == 2);
  REQUIRE(run("simulate --generator cook --seed 1 --out " + at("k.json")).code == 0);
  CHECK(run("fit --input " + at("k.json") + " --k 0 --out " + at("km.json")).code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("simulate, fit, eval round trip on noise-free data") {
  REQUIRE(run("simulate --generator cook --noise 0 --separation 0.5 --seed 11 --out " + at("z.json")).code == 0);
  for (const char* algo : {"lloyd", "fast", "hartigan"}) {
    const Run fit = run("fit --input " + at("z.json") + " --k 2 --algorithm " + algo +
                        " --restarts 10 --seed 1 --out " + at("zm.json"));
    REQUIRE(fit.code == 0);
    const auto model = nlohmann::json::parse(slurp(at("zm.json")));
    CHECK(model["assignments"].size() == 80);
    const Run eval = run("eval --model " + at("zm.json") + " --sample " + at("z.json"));
    REQUIRE(eval.code == 0);
    CHECK(eval.out.rfind("1.000000,1.000000", 0) == 0);
    const Run js = run("eval --format json --model " + at("zm.json") + " --sample " + at("z.json"));
    REQUIRE(js.code == 0);
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["accuracy"] == 1.0);
    CHECK(j["ari"] == 1.0);
  }
}

TEST_CASE("lloyd fits report per-cluster stationarity") {
  REQUIRE(run("simulate --generator cook --noise 0.3 --seed 2 --out " + at("n.json")).code == 0);
  REQUIRE(run("fit --input " + at("n.json") + " --algorithm lloyd --cpc fg --seed 1 --out " + at("nm.json")).code == 0);
  const auto model = nlohmann::json::parse(slurp(at("nm.json")));
  const auto& r = model["diagnostics"]["stationarity_residual"];
  REQUIRE(r.size() == 2);
  for (const auto& v : r) CHECK(v.get<double>() < 1e-7);
}

TEST_CASE("non-converged fits exit with 3") {
  REQUIRE(run("simulate --generator cook --noise 0.5 --seed 5 --out " + at("h.json")).code == 0);
  const Run r = run("fit --input " + at("h.json") + " --k 3 --algorithm lloyd --max-iter 1 --restarts 1 --out " +
                    at("hm.json"));
  CHECK(r.code == 3);
}

TEST_CASE("mismatched model and sample exit with 4") {
  REQUIRE(run("simulate --generator cook --n 10 --seed 1 --out " + at("small.json")).code == 0);
  REQUIRE(run("simulate --generator cook --n 20 --seed 1 --out " + at("big.json")).code == 0);
  REQUIRE(run("fit --input " + at("small.json") + " --out " + at("sm.json")).code == 0);
  CHECK(run("eval --model " + at("sm.json") + " --sample " + at("big.json")).code == 4);
  CHECK(run("fit --input /nonexistent.json --out " + at("q.json")).code == 4);
}

TEST_CASE("bench cardinality, filtering and determinism") {
  const fs::path a = workdir() / "bench_a";
  const fs::path b = workdir() / "bench_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string flags = " --grid table1 --methods ktensors_fast,euclidean --reps 2 --seed 11 --restarts 2";
  const Run ra = run("bench" + flags + " --out-dir " + a.string());
  REQUIRE(ra.code == 0);
  CHECK(ra.out.find("records,24") != std::string::npos);
  REQUIRE(run("bench" + flags + " --threads 3 --out-dir " + b.string()).code == 0);
  const std::string results = slurp(a / "results.csv");
  CHECK(count_data_rows(results) == 6 * 2 * 2);
  std::istringstream rows(results);
  for (std::string line; std::getline(rows, line);) {
    if (!line.empty() && line[0] != '#') CHECK(line.find("log_det") == std::string::npos);
  }
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "plot.csv") == slurp(b / "plot.csv"));
  CHECK(run("bench --grid table9 --out-dir " + a.string()).code == 2);
}
