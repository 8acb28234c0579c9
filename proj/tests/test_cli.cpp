// End-to-end tests of the command-line binary. The harness sets CAPSTOKES_BIN
// to the built executable; every case spawns it with std::system, captures
// stdout/stderr to files, and inspects exit codes and written artifacts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "capstokes/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary_path() {
  const char* env = std::getenv("CAPSTOKES_BIN");
  return env ? env : "./capstokes";
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("capstokes_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// args are appended after the binary name; stdout/stderr land in logdir.
CliRun run_cli(const std::string& args, const fs::path& logdir) {
  static int counter = 0;
  const fs::path out = logdir / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = logdir / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd =
      "\"" + binary_path() + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliRun r;
  if (status != -1 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      tokens.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  tokens.push_back(cur);
  return tokens;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_csv_line(line));
  return rows;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  TempDir d;
  CHECK(run_cli("", d.path).code == 2);
  CHECK(run_cli("frobnicate", d.path).code == 2);
  CHECK(run_cli("simulate", d.path).code == 2);
  const CliRun missing = run_cli("simulate --config " + d.str() + "/does_not_exist.json", d.path);
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("help text is available and exits cleanly") {
  TempDir d;
  const CliRun r = run_cli("--help", d.path);
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);
  CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("verify writes a JSON report, is deterministic, and respects --quiet") {
  TempDir d1;
  const CliRun quiet = run_cli("--out " + d1.str() + " --quiet verify --suite geometry", d1.path);
  CHECK(quiet.code == 0);
  CHECK(quiet.out.empty());

  const json report = json::parse(slurp(d1.path / "verify_report.json"));
  CHECK(report["suite"] == "geometry");
  CHECK(report["passed"] == true);
  REQUIRE(report["reports"].size() == 3);
  for (const auto& r : report["reports"]) {
    CHECK(r.contains("identity"));
    CHECK(r.contains("residual_l2"));
    CHECK(r.contains("relative"));
    CHECK(r["grid"]["N"].get<int>() >= 8);
  }

  TempDir d2;
  const CliRun loud = run_cli("--out " + d2.str() + " verify --suite geometry", d2.path);
  CHECK(loud.code == 0);
  CHECK(loud.out.find("geometry") != std::string::npos);
  CHECK(slurp(d2.path / "verify_report.json") == slurp(d1.path / "verify_report.json"));
}

TEST_CASE("verify rejects an unknown suite with exit code 2") {
  TempDir d;
  const CliRun r = run_cli("--out " + d.str() + " verify --suite nope", d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown suite") != std::string::npos);
}

TEST_CASE("malformed configs exit 2 and name the offending key") {
  TempDir d;
  const fs::path cfg = d.path / "bad.json";

  spit(cfg, "this is not json {{{");
  CliRun r = run_cli("simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("invalid JSON") != std::string::npos);

  spit(cfg, "{}");
  r = run_cli("simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("grid") != std::string::npos);
  CHECK(r.err.find("missing required key") != std::string::npos);

  spit(cfg, R"({"grid": {"L": 8.0, "N": 65}, "profile": {"family": "flat"}})");
  r = run_cli("simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("grid.N") != std::string::npos);

  spit(cfg, R"({"grid": {"L": 8.0, "N": 64}, "profile": {"family": "wiggle"}})");
  r = run_cli("simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("profile.family") != std::string::npos);

  spit(cfg, R"({"grid": {"L": 8.0, "N": 64}, "profile": {"family": "gaussian", "amplitude": 0.1}})");
  r = run_cli("simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("profile.width") != std::string::npos);

  spit(cfg, R"({"grid": {"L": 8.0, "N": 64}, "profile": {"family": "flat"},
                "time": {"T": 0.1}, "sweep": {"mu_plus_list": []}})");
  r = run_cli("sweep --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("sweep.mu_plus_list") != std::string::npos);

  // structurally fine config, but the command needs a time block
  spit(cfg, R"({"grid": {"L": 8.0, "N": 64}, "profile": {"family": "flat"}})");
  r = run_cli("--out " + d.str() + " simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("time.T") != std::string::npos);
}

TEST_CASE("simulate on a flat profile leaves the interface unchanged") {
  TempDir d;
  const fs::path cfg = d.path / "flat.json";
  spit(cfg, R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "flat"},
    "time": {"T": 0.25, "output_times": [0.1]}
  })");
  const CliRun r = run_cli("--out " + d.str() + " --quiet simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 0);

  const auto rows = read_csv(d.path / "trajectory.csv");
  REQUIRE(rows.size() == 4);  // header + t in {0, 0.1, 0.25}
  CHECK(rows[0][0] == "t");
  CHECK(rows[0].size() == 65);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 65);
    for (std::size_t j = 1; j < rows[i].size(); ++j) CHECK(std::stod(rows[i][j]) == 0.0);
  }
  CHECK(std::stod(rows[3][0]) == 0.25);

  const json summary = json::parse(slurp(d.path / "summary.json"));
  CHECK(summary["final_time"] == 0.25);
  CHECK(summary["contamination"] == 0.0);
  CHECK(summary["steps_accepted"].get<int>() >= 1);
  for (const auto& entry : summary["norm_trail"]) CHECK(entry[1] == 0.0);
}

TEST_CASE("identical simulate configs produce byte-identical outputs") {
  const std::string cfg_text = R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "gaussian", "amplitude": 0.1, "width": 1.0},
    "physics": {"mu": 1.0, "mu_plus": 0.0, "sigma": 1.0},
    "time": {"T": 0.1, "output_times": [0.05]},
    "controls": {"rk_tol": 1e-8}
  })";
  TempDir d1, d2;
  spit(d1.path / "run.json", cfg_text);
  spit(d2.path / "run.json", cfg_text);
  CHECK(run_cli("--out " + d1.str() + " --quiet simulate --config " + (d1.path / "run.json").string(),
                d1.path).code == 0);
  CHECK(run_cli("--out " + d2.str() + " --quiet simulate --config " + (d2.path / "run.json").string(),
                d2.path).code == 0);

  const std::string traj = slurp(d1.path / "trajectory.csv");
  CHECK(!traj.empty());
  CHECK(traj == slurp(d2.path / "trajectory.csv"));
  const std::string summary = slurp(d1.path / "summary.json");
  CHECK(!summary.empty());
  CHECK(summary == slurp(d2.path / "summary.json"));

  // capillarity relaxes the bump: the norm trail must not grow
  const json s = json::parse(summary);
  const auto& trail = s["norm_trail"];
  REQUIRE(trail.size() >= 2);
  for (std::size_t i = 1; i < trail.size(); ++i)
    CHECK(trail[i][1].get<double>() <= trail[i - 1][1].get<double>() + 1e-8);
}

TEST_CASE("a run that trips the contamination guard exits 1 with diagnostics") {
  TempDir d;
  // constant offset: stationary under the flow, but its mass sits on the
  // window edge, so the contamination ratio is 1
  std::ostringstream samples;
  for (int j = 0; j < 64; ++j) samples << "0.1\n";
  spit(d.path / "profile.txt", samples.str());
  const fs::path cfg = d.path / "run.json";
  spit(cfg, R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "file", "path": ")" + (d.path / "profile.txt").string() + R"("},
    "time": {"T": 0.25}
  })");
  const CliRun r = run_cli("--out " + d.str() + " --quiet simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 1);
  CHECK(r.err.find("simulate failed") != std::string::npos);
  const json err = json::parse(slurp(d.path / "error.json"));
  CHECK(err["command"] == "simulate");
  CHECK(err["error"].get<std::string>().find("boundary contamination") != std::string::npos);
}

TEST_CASE("file profiles round-trip bit-exactly through simulate at T = 0") {
  TempDir d;
  const int N = 64;
  std::vector<std::string> want;
  std::ostringstream samples;
  for (int j = 0; j < N; ++j) {
    const double v = 0.05 * std::sin(2.0 * M_PI * j / N) + 0.01;
    want.push_back(capstokes::format_full(v));
    samples << want.back() << "\n";
  }
  spit(d.path / "profile.txt", samples.str());
  const fs::path cfg = d.path / "run.json";
  spit(cfg, R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "file", "path": ")" + (d.path / "profile.txt").string() + R"("},
    "time": {"T": 0.0}
  })");
  const CliRun r = run_cli("--out " + d.str() + " --quiet simulate --config " + cfg.string(), d.path);
  CHECK(r.code == 0);
  const auto rows = read_csv(d.path / "trajectory.csv");
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[1].size() == static_cast<std::size_t>(N + 1));
  CHECK(rows[1][0] == "0");
  for (int j = 0; j < N; ++j) CHECK(rows[1][j + 1] == want[j]);

  // sample count mismatch is a config error
  spit(d.path / "short.txt", "0.1 0.2 0.3\n");
  spit(cfg, R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "file", "path": ")" + (d.path / "short.txt").string() + R"("},
    "time": {"T": 0.0}
  })");
  const CliRun bad = run_cli("--out " + d.str() + " simulate --config " + cfg.string(), d.path);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("profile.path") != std::string::npos);
}

TEST_CASE("fields on a flat interface are zero and near-boundary points are marked") {
  TempDir d;
  const fs::path cfg = d.path / "fields.json";
  spit(cfg, R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "flat"},
    "points": [[0.3, -1.0], [-2.0, -3.5], [0.4, 0.0]]
  })");
  const CliRun r = run_cli("--out " + d.str() + " fields --config " + cfg.string(), d.path);
  CHECK(r.code == 0);
  CHECK(r.out.find("1 rejected") != std::string::npos);

  const auto rows = read_csv(d.path / "fields.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "x1");
  for (int i : {1, 2}) {
    REQUIRE(rows[i].size() == 7);
    CHECK(rows[i][6] == "ok");
    CHECK(std::stod(rows[i][2]) == 0.0);  // v1
    CHECK(std::stod(rows[i][3]) == 0.0);  // v2
    CHECK(std::stod(rows[i][4]) == 0.0);  // p
    CHECK(std::stod(rows[i][5]) == 0.0);  // residual
  }
  CHECK(rows[3][6] == "rejected-near-boundary");
  CHECK(rows[3][2].empty());
}

TEST_CASE("fields on a curved interface satisfy the interior equations") {
  TempDir d;
  std::ostringstream pts;
  pts << "[";
  bool first = true;
  for (double x1 : {-1.5, -0.5, 0.5, 1.5}) {
    for (double x2 : {-1.5, -2.0, -2.5}) {
      if (!first) pts << ", ";
      pts << "[" << x1 << ", " << x2 << "]";
      first = false;
    }
  }
  pts << ", [0.0, 0.3]";  // exactly on the interface apex
  pts << "]";
  const fs::path cfg = d.path / "fields.json";
  spit(cfg, R"({
    "grid": {"L": 16.0, "N": 256},
    "profile": {"family": "gaussian", "amplitude": 0.3, "width": 1.0},
    "points": )" + pts.str() + R"(
  })");
  const CliRun r = run_cli("--out " + d.str() + " --quiet fields --config " + cfg.string(), d.path);
  CHECK(r.code == 0);

  const auto rows = read_csv(d.path / "fields.csv");
  REQUIRE(rows.size() == 14);
  for (int i = 1; i <= 12; ++i) {
    REQUIRE(rows[i].size() == 7);
    CHECK(rows[i][6] == "ok");
    CHECK(std::stod(rows[i][5]) <= 1e-5);
  }
  CHECK(rows[13][6] == "rejected-near-boundary");
}

TEST_CASE("sweep writes per-run trajectories and a rate report") {
  TempDir d;
  const fs::path cfg = d.path / "sweep.json";
  spit(cfg, R"({
    "grid": {"L": 8.0, "N": 64},
    "profile": {"family": "gaussian", "amplitude": 0.1, "width": 1.0},
    "time": {"T": 0.05},
    "controls": {"rk_tol": 1e-6},
    "sweep": {"mu_plus_list": [0.05, 0.1]}
  })");
  const CliRun r = run_cli("--out " + d.str() + " sweep --config " + cfg.string(), d.path);
  CHECK(r.code == 0);
  CHECK(r.out.find("fitted slope") != std::string::npos);

  CHECK(fs::exists(d.path / "run_mu_0.csv"));
  CHECK(fs::exists(d.path / "run_mu_0.05.csv"));
  CHECK(fs::exists(d.path / "run_mu_0.1.csv"));

  const json report = json::parse(slurp(d.path / "rate_report.json"));
  REQUIRE(report["runs"].size() == 2);
  for (const auto& run : report["runs"]) {
    CHECK(run["mu_plus"].get<double>() > 0.0);
    CHECK(run["error_high"].get<double>() >= 0.0);
    CHECK(run["total"].get<double>() > 0.0);
    CHECK(std::isfinite(run["total"].get<double>()));
  }
  CHECK(std::isfinite(report["slope"].get<double>()));

  // two-point fit: larger viscosity contrast gives the larger error
  const double t0 = report["runs"][0]["total"].get<double>();
  const double t1 = report["runs"][1]["total"].get<double>();
  CHECK(t1 > t0);
}
