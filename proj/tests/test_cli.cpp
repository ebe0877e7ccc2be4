#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rggm/io.hpp"

namespace fs = std::filesystem;
using rggm::io::Json;

namespace {

/// Runs the CLI quietly and returns its exit status.
int run(const std::string& args) {
  const std::string cmd = std::string("\"") + RGGM_CLI_PATH + "\" --quiet " + args + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("rggm_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

}  // namespace

TEST_CASE("simulate: shape, clean labels, determinism") {
  Scratch t;
  REQUIRE(run("simulate --p 5 --n 200 --model ii --epsilon 0.1 --eta 5 --seed 1 --out " + (t / "a")) == 0);
  const auto csv = lines(t / "a/data.csv");
  REQUIRE(csv.size() == 201);  // header + rows
  for (std::size_t i = 1; i < csv.size(); ++i) CHECK(std::count(csv[i].begin(), csv[i].end(), ',') == 4);

  REQUIRE(run("simulate --p 5 --n 200 --model ii --epsilon 0.1 --eta 5 --seed 1 --out " + (t / "b")) == 0);
  CHECK(slurp(t / "a/data.csv") == slurp(t / "b/data.csv"));
  CHECK(slurp(t / "a/truth.json") == slurp(t / "b/truth.json"));

  REQUIRE(run("simulate --p 5 --n 200 --epsilon 0 --seed 1 --out " + (t / "c")) == 0);
  const Json truth = rggm::io::read_json(t / "c/truth.json");
  REQUIRE(truth["labels"].size() == 200);
  for (const auto& l : truth["labels"]) CHECK(l == false);

  CHECK(run("simulate --p 5 --n 200 --epsilon 1.5 --out " + (t / "d")) == 1);
}

TEST_CASE("fit: default grid, determinism, gamma zero against glasso") {
  Scratch t;
  REQUIRE(run("simulate --p 5 --n 200 --seed 3 --out " + (t / "sim")) == 0);
  const std::string x = t / "sim/data.csv";
  const std::string cmd = "fit --estimator gamma --gamma 0.1 --lambda-grid default --input " + x +
                          " --normalize mad --seed 7 --out ";
  REQUIRE(run(cmd + (t / "f1")) == 0);
  const auto tsv = lines(t / "f1/path.tsv");
  REQUIRE(tsv.size() == 11);
  CHECK(tsv[0].rfind("lambda\tnnz", 0) == 0);
  std::istringstream first(tsv[1]);
  std::string lam, nnz;
  std::getline(first, lam, '\t');
  std::getline(first, nnz, '\t');
  CHECK(nnz == "0");

  REQUIRE(run(cmd + (t / "f2")) == 0);
  CHECK(slurp(t / "f1/fit.json") == slurp(t / "f2/fit.json"));
  CHECK(slurp(t / "f1/path.tsv") == slurp(t / "f2/path.tsv"));

  for (const char* lam2 : {"0.05", "0.15"}) {
    const std::string tail = std::string(" --inner-tol 1e-10 --lambda ") + lam2 + " --input " + x + " --out ";
    REQUIRE(run("fit --estimator gamma --gamma 0 --tol 1e-12" + tail + (t / "g0")) == 0);
    REQUIRE(run("fit --estimator glasso" + tail + (t / "gl")) == 0);
    const Json a = rggm::io::read_json(t / "g0/fit.json")["fits"][0]["omega"];
    const Json b = rggm::io::read_json(t / "gl/fit.json")["fits"][0]["omega"];
    REQUIRE(a.size() == 5);
    double worst = 0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        worst = std::max(worst, std::abs(a[i][j].get<double>() - b[i][j].get<double>()));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("every estimator runs from the command line") {
  Scratch t;
  REQUIRE(run("simulate --p 6 --n 150 --seed 5 --out " + (t / "sim")) == 0);
  for (const char* e : {"gamma", "glasso", "tlasso", "npn"}) {
    const std::string out = t / e;
    CHECK(run(std::string("fit --estimator ") + e + " --input " + (t / "sim/data.csv") + " --out " + out) == 0);
    CHECK(lines(fs::path(out) / "path.tsv").size() == 11);
  }
}

TEST_CASE("input errors exit 1") {
  Scratch t;
  std::ofstream(t / "ragged.csv") << "a,b\n1,2\n3\n";
  std::ofstream(t / "missing.csv") << "a,b\n1,\n2,3\n";
  std::ofstream(t / "junk.csv") << "1,2\nfoo,3\n";
  std::ofstream(t / "empty.csv") << "";
  for (const char* f : {"ragged.csv", "missing.csv", "junk.csv", "empty.csv", "absent.csv"})
    CHECK(run("fit --input " + (t / f) + " --out " + (t / "o")) == 1);
  CHECK(run("fit --estimator nope --input " + (t / "junk.csv")) == 1);
  CHECK(run("no-such-command") == 1);
}

TEST_CASE("evaluate: self comparison and perfect recovery") {
  Scratch t;
  REQUIRE(run("simulate --p 5 --n 4000 --epsilon 0 --seed 2 --out " + (t / "sim")) == 0);
  REQUIRE(run("fit --estimator glasso --K 20 --delta 0.01 --input " + (t / "sim/data.csv") + " --out " + (t / "f")) ==
          0);
  REQUIRE(run("evaluate --fit " + (t / "f/fit.json") + " --truth " + (t / "sim/truth.json") + " --compare " +
              (t / "f/fit.json") + " --out " + (t / "m")) == 0);
  const Json m = rggm::io::read_json(t / "m/metrics.json");
  for (const auto& row : m["rows"]) CHECK(row["total_agreement"] == 1.0);

  // a truth equal to the 6th grid point's own estimate
  const Json fit = rggm::io::read_json(t / "f/fit.json");
  Json truth = rggm::io::read_json(t / "sim/truth.json");
  truth["omega"] = fit["fits"][5]["omega"];
  truth["edges"] = fit["fits"][5]["edges"];
  REQUIRE(!truth["edges"].empty());
  rggm::io::write_json(t / "self.json", truth);
  REQUIRE(run("evaluate --fit " + (t / "f/fit.json") + " --truth " + (t / "self.json") + " --out " + (t / "m1")) == 0);
  const Json row = rggm::io::read_json(t / "m1/metrics.json")["rows"][5];
  CHECK(row["tpr"] == 1.0);
  CHECK(row["nnz"] == 2 * truth["edges"].size());
  CHECK(row["mse_offdiag"] == 0.0);

  // a truth with no edges cannot give a TPR
  Json empty = truth;
  empty["edges"] = Json::array();
  rggm::io::write_json(t / "empty.json", empty);
  CHECK(run("evaluate --fit " + (t / "f/fit.json") + " --truth " + (t / "empty.json") + " --out " + (t / "m2")) == 1);
}
