#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef GGEFT_CLI_PATH
#define GGEFT_CLI_PATH "ggeft"
#endif

namespace {

std::string tmp_path(const std::string &name) {
  return std::string("cli_test_") + name;
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

std::string read_file(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::string &args) {
  const std::string cmd = std::string(GGEFT_CLI_PATH) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const char *kExchangeConfig = R"({
  "schema_version": 1,
  "mode": "exchange",
  "model": {"type": "heisenberg", "J": 1.0, "omega": 1.0, "beta": 1.0, "beta_r": 0.5, "tau": 3.14159265358979312},
  "grid": {"theta_min": 0.0, "theta_max": 3.14159265358979312, "points": 9}
})";

}  // namespace

TEST_CASE("sweep subcommand writes the CSV and a summary line") {
  write_file(tmp_path("fig1.json"), kExchangeConfig);
  const int rc = run("sweep --config " + tmp_path("fig1.json") + " --out " + tmp_path("fig1.csv"));
  CHECK(rc == 0);
  const std::string csv = read_file(tmp_path("fig1.csv"));
  std::istringstream in(csv);
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);
  const std::string summary = read_file("cli_stdout.txt");
  CHECK(summary.find("max|ft-1|") != std::string::npos);

  // identical invocation gives byte-identical output
  const int rc2 = run("sweep --config " + tmp_path("fig1.json") + " --out " + tmp_path("fig1b.csv"));
  CHECK(rc2 == 0);
  CHECK(read_file(tmp_path("fig1b.csv")) == csv);
}

TEST_CASE("missing config exits with code 1 and names the path") {
  const int rc = run("sweep --config /definitely/missing.json --out x.csv");
  CHECK(rc == 1);
  CHECK(read_file("cli_stderr.txt").find("/definitely/missing.json") != std::string::npos);
}

TEST_CASE("force-epsilon-zero flag moves the ft column off one") {
  write_file(tmp_path("cfg.json"), kExchangeConfig);
  const int rc = run("sweep --config " + tmp_path("cfg.json") + " --flag force-epsilon-zero --out " +
                     tmp_path("noeps.csv"));
  CHECK(rc == 0);
  // at interior angles the eps-omitted estimator deviates from one
  std::istringstream in(read_file(tmp_path("noeps.csv")));
  std::string line;
  std::getline(in, line);  // header
  bool someone_off = false;
  int idx = 0;
  while (std::getline(in, line)) {
    // ft_exchange is column 10 (0-based 9)
    size_t pos = 0;
    for (int c = 0; c < 9; ++c) pos = line.find(',', pos) + 1;
    const double ft = std::strtod(line.c_str() + pos, nullptr);
    if (idx != 0 && idx != 8 && std::abs(ft - 1.0) > 1e-4) someone_off = true;
    ++idx;
  }
  CHECK(someone_off);
}

TEST_CASE("verify subcommand passes on the exchange config") {
  write_file(tmp_path("v.json"), kExchangeConfig);
  const int rc = run("verify --config " + tmp_path("v.json") + " --out " + tmp_path("v.out.json"));
  CHECK(rc == 0);
  const std::string console = read_file("cli_stdout.txt");
  CHECK(console.find("PASS exchange_ft_dev") != std::string::npos);
  const std::string report = read_file(tmp_path("v.out.json"));
  CHECK(report.find("\"ft_report\"") != std::string::npos);
}

TEST_CASE("trajectories subcommand dumps the 64-row lattice") {
  write_file(tmp_path("t.json"), kExchangeConfig);
  const int rc = run("trajectories --config " + tmp_path("t.json") + " --theta 1.5707963267948966 --out " +
                     tmp_path("t.csv"));
  CHECK(rc == 0);
  std::istringstream in(read_file(tmp_path("t.csv")));
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("i,mu,m,j,nu,n,p_fwd,p_rev", 0) == 0);
  int rows = 0;
  double mass = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    size_t pos = 0;
    for (int c = 0; c < 6; ++c) pos = line.find(',', pos) + 1;
    mass += std::strtod(line.c_str() + pos, nullptr);
  }
  CHECK(rows == 64);
  CHECK(mass == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("bad flag is rejected") {
  write_file(tmp_path("f.json"), kExchangeConfig);
  const int rc = run("sweep --config " + tmp_path("f.json") + " --flag bogus --out x.csv");
  CHECK(rc == 1);
}

TEST_CASE("row failures map to exit code 2") {
  write_file(tmp_path("bad_rows.json"), R"({
    "schema_version": 1,
    "mode": "exchange",
    "model": {"type": "heisenberg", "beta": -1.0},
    "grid": {"points": 3}
  })");
  const int rc = run("sweep --config " + tmp_path("bad_rows.json") + " --out " +
                     tmp_path("bad_rows.csv"));
  CHECK(rc == 2);
  CHECK(read_file(tmp_path("bad_rows.csv")).find("error:") != std::string::npos);
}

TEST_CASE("verify rejects malformed operator expressions") {
  write_file(tmp_path("bad_expr.json"), R"({
    "schema_version": 1,
    "mode": "custom",
    "model": {
      "type": "custom",
      "n_sites_system": 1, "n_sites_reservoir": 1,
      "system_charges": ["Q"], "reservoir_charges": ["Z"],
      "affinities": [1.0], "reservoir_affinities": [1.0],
      "interaction": "ZZ"
    }
  })");
  const int rc = run("verify --config " + tmp_path("bad_expr.json"));
  CHECK(rc == 1);
}
