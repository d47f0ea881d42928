/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = NIAD_CLI_PATH;

int run(const std::string& args, const std::string& log = "/dev/null") {
  std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("niad_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_q3(const std::string& path) {
  std::ofstream out(path);
  out << "1,0,0\n1,1,0\n0,1,1\n";
}

}  // namespace

TEST_CASE("partition subcommand writes json and table") {
  TempDir dir;
  write_q3(dir / "q.csv");
  CHECK(run("partition --q " + (dir / "q.csv") + " --out " + (dir / "out"),
            dir / "log.txt") == 0);
  std::string json = slurp(dir.path / "out" / "partition.json");
  CHECK(json.find("\"000\"") != std::string::npos);
  CHECK(json.find("\"min_rep\"") != std::string::npos);
  std::string log = slurp(dir.path / "log.txt");
  CHECK(log.find("5 equivalence classes over 8 profiles") != std::string::npos);
}

TEST_CASE("input errors exit with code 2") {
  TempDir dir;
  CHECK(run("partition --q " + (dir / "absent.csv") + " --out " + (dir / "out")) == 2);
  {
    std::ofstream out(dir / "bad.csv");
    out << "1,0,3\n";
  }
  CHECK(run("partition --q " + (dir / "bad.csv") + " --out " + (dir / "out")) == 2);
  CHECK(run("fit --q " + (dir / "bad.csv") + " --data " + (dir / "absent.csv") +
            " --variant nope --out " + (dir / "out")) == 2);
  // failed runs must not leave partial outputs behind
  CHECK_FALSE(fs::exists(dir.path / "out" / "partition.json"));
}

TEST_CASE("simulate is byte-identical across reruns with one seed") {
  TempDir dir;
  REQUIRE(run("simulate --scenario paper-sim --n 400 --seed 33 --out " + (dir / "a")) == 0);
  REQUIRE(run("simulate --scenario paper-sim --n 400 --seed 33 --out " + (dir / "b")) == 0);
  CHECK(slurp(dir.path / "a" / "responses.csv") == slurp(dir.path / "b" / "responses.csv"));
  CHECK(slurp(dir.path / "a" / "truth.csv") == slurp(dir.path / "b" / "truth.csv"));
  REQUIRE(run("simulate --scenario paper-sim --n 400 --seed 34 --out " + (dir / "c")) == 0);
  CHECK(slurp(dir.path / "a" / "responses.csv") != slurp(dir.path / "c" / "responses.csv"));
}

TEST_CASE("full pipeline: simulate, fit, classify, evaluate, report") {
  TempDir dir;
  REQUIRE(run("simulate --scenario paper-sim --n 1500 --seed 3 --out " + (dir / "sim")) == 0);
  REQUIRE(fs::exists(dir.path / "sim" / "q.csv"));

  REQUIRE(run("fit --q " + (dir / "sim/q.csv") + " --data " + (dir / "sim/responses.csv") +
              " --variant niad --restarts 4 --seed 1 --out " + (dir / "fit"),
              dir / "fit.log") == 0);
  std::string fit_json = slurp(dir.path / "fit" / "fit_NIAD.json");
  CHECK(fit_json.find("\"converged\": true") != std::string::npos);
  CHECK(fit_json.find("\"n_params\": 17") != std::string::npos);

  REQUIRE(run("classify --q " + (dir / "sim/q.csv") + " --data " +
              (dir / "sim/responses.csv") + " --fit " + (dir / "fit/fit_NIAD.json") +
              " --truth " + (dir / "sim/truth.csv") + " --out " + (dir / "cls"),
              dir / "cls.log") == 0);
  std::string csv = slurp(dir.path / "cls" / "classification.csv");
  CHECK(csv.rfind("id,decision_1", 0) == 0);
  CHECK(csv.find("*") != std::string::npos);
  CHECK(slurp(dir.path / "cls.log").find("misclassification") != std::string::npos);

  REQUIRE(run("evaluate --q " + (dir / "sim/q.csv") + " --fit " +
              (dir / "fit/fit_NIAD.json") + " --emit-tmatrix --out " + (dir / "ev"),
              dir / "ev.log") == 0);
  CHECK(fs::exists(dir.path / "ev" / "zeta.json"));
  CHECK(fs::exists(dir.path / "ev" / "tmatrix.csv"));
  CHECK(slurp(dir.path / "ev.log").find("zeta_3") != std::string::npos);

  REQUIRE(run("report " + (dir / "fit/fit_NIAD.json"), dir / "rep.log") == 0);
  CHECK(slurp(dir.path / "rep.log").find("AIC") != std::string::npos);
}

TEST_CASE("fit JSON is byte-identical across reruns with one seed") {
  TempDir dir;
  REQUIRE(run("simulate --scenario paper-sim --n 400 --seed 6 --out " + (dir / "sim")) == 0);
  std::string fit_cmd = "fit --q " + (dir / "sim/q.csv") + " --data " +
                        (dir / "sim/responses.csv") + " --restarts 3 --seed 11 --out ";
  REQUIRE(run(fit_cmd + (dir / "a")) == 0);
  REQUIRE(run(fit_cmd + (dir / "b")) == 0);
  CHECK(slurp(dir.path / "a" / "fit_NIAD.json") == slurp(dir.path / "b" / "fit_NIAD.json"));
}

TEST_CASE("classify without a fit file fits inline") {
  TempDir dir;
  REQUIRE(run("simulate --scenario paper-sim --n 500 --seed 8 --out " + (dir / "sim")) == 0);
  CHECK(run("classify --q " + (dir / "sim/q.csv") + " --data " +
            (dir / "sim/responses.csv") + " --restarts 3 --out " + (dir / "cls")) == 0);
  CHECK(fs::exists(dir.path / "cls" / "classification.csv"));
}

TEST_CASE("non-convergence exits 3 but still writes outputs") {
  TempDir dir;
  REQUIRE(run("simulate --scenario paper-sim --n 800 --seed 5 --out " + (dir / "sim")) == 0);
  CHECK(run("fit --q " + (dir / "sim/q.csv") + " --data " + (dir / "sim/responses.csv") +
            " --variant niad --max-iter 2 --restarts 1 --out " + (dir / "fit")) == 3);
  std::string fit_json = slurp(dir.path / "fit" / "fit_NIAD.json");
  CHECK(fit_json.find("\"converged\": false") != std::string::npos);
}

TEST_CASE("fit handles all variants in one invocation") {
  TempDir dir;
  REQUIRE(run("simulate --scenario paper-sim --n 600 --seed 2 --out " + (dir / "sim")) == 0);
  REQUIRE(run("fit --q " + (dir / "sim/q.csv") + " --data " + (dir / "sim/responses.csv") +
              " --variant all --restarts 3 --out " + (dir / "fit"),
              dir / "fit.log") == 0);
  for (const char* name : {"fit_NIAD.json", "fit_ind.json", "fit_HO.json", "fit_RHO.json"})
    CHECK(fs::exists(dir.path / "fit" / name));
  std::string log = slurp(dir.path / "fit.log");
  CHECK(log.find("NIAD") != std::string::npos);
  CHECK(log.find("RHO") != std::string::npos);
}
