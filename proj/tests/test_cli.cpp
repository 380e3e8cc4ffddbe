#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellsim/ndjson.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + BELLSIM_CLI_PATH + "\" " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    res.out.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bellsim_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("version flag") {
  const CliResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(!r.out.empty());
}

TEST_CASE("simulate writes parseable ndjson to stdout and to files") {
  const CliResult r = run_cli("simulate --model sign --n 5 --seed 1");
  CHECK(r.exit_code == 0);
  const bellsim::Ensemble e = bellsim::ndjson_from_string(r.out);
  CHECK(e.runs.size() == 5);
  CHECK(e.model_id == "sign");

  TempDir tmp;
  const fs::path out = tmp.path / "e.ndjson";
  const CliResult rf = run_cli("simulate --model leak --n 50 --seed 2 --out " +
                               out.string());
  CHECK(rf.exit_code == 0);
  CHECK(bellsim::read_ndjson_file(out.string()).runs.size() == 50);
}

TEST_CASE("repeat runs and thread counts produce identical bytes") {
  TempDir tmp;
  const fs::path f1 = tmp.path / "a.ndjson";
  const fs::path f2 = tmp.path / "b.ndjson";
  const fs::path f3 = tmp.path / "c.ndjson";
  CHECK(run_cli("simulate --model leak --n 400 --seed 9 --out " + f1.string())
            .exit_code == 0);
  CHECK(run_cli("simulate --model leak --n 400 --seed 9 --out " + f2.string())
            .exit_code == 0);
  CHECK(run_cli("simulate --model leak --n 400 --seed 9 --threads 4 --out " +
                f3.string())
            .exit_code == 0);
  const std::string b1 = slurp(f1);
  CHECK(!b1.empty());
  CHECK(b1 == slurp(f2));
  CHECK(b1 == slurp(f3));
}

TEST_CASE("chsh exact pins the reference values") {
  const CliResult r = run_cli("chsh --model singlet --exact");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "exact");
  CHECK(std::abs(j["S"].get<double>() - 2.8284271247461903) < 1e-12);

  const CliResult r2 = run_cli("chsh --model sign --exact");
  const json j2 = json::parse(r2.out);
  CHECK(std::abs(j2["S"].get<double>() - 2.0) < 1e-12);
}

TEST_CASE("chsh empirical estimates carry an error bar") {
  const CliResult r =
      run_cli("chsh --model sign --empirical --n 20000 --seed 4");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "mc");
  const double s = j["S"].get<double>();
  const double se = j["stderr"].get<double>();
  CHECK(se > 0.0);
  CHECK(std::abs(s - 2.0) < 5 * se);
}

TEST_CASE("audit exact emits the verdict table") {
  const CliResult r = run_cli("audit --model leak --exact");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.contains("audits"));
  bool saw_mi = false, saw_sl = false;
  for (const auto& v : j["audits"]) {
    if (v["condition"] == "microstate_independence") {
      saw_mi = true;
      CHECK(v["passed"] == false);
      CHECK(v["mode"] == "exact");
    }
    if (v["condition"] == "structural_locality") {
      saw_sl = true;
      CHECK(v["passed"] == true);
    }
  }
  CHECK(saw_mi);
  CHECK(saw_sl);
  CHECK(j["all_passed"] == false);
}

TEST_CASE("audit all_passed ignores the pattern detector") {
  const CliResult r = run_cli("audit --model \"dice:0.9,0.2\" --exact");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["all_passed"] == true);
  bool saw_inv = false;
  for (const auto& v : j["audits"]) {
    if (v["condition"] == "inverted_oi_pattern") {
      saw_inv = true;
      CHECK(v["passed"] == false);
    }
  }
  CHECK(saw_inv);
}

TEST_CASE("audit reads recorded ensembles back") {
  TempDir tmp;
  const fs::path data = tmp.path / "leak.ndjson";
  REQUIRE(run_cli("simulate --model leak --n 60000 --seed 3 --out " +
                  data.string())
              .exit_code == 0);
  const CliResult r = run_cli("audit --in " + data.string() + " --bins 8");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  bool saw_si = false, saw_mi = false;
  for (const auto& v : j["audits"]) {
    if (v["condition"] == "settings_independence") {
      saw_si = true;
      CHECK(v["mode"] == "empirical");
      CHECK(v["passed"] == true);
    }
    if (v["condition"] == "microstate_independence") {
      saw_mi = true;
      CHECK(v["passed"] == false);
      CHECK(v["p_value"].get<double>() < 1e-3);
    }
  }
  CHECK(saw_si);
  CHECK(saw_mi);
}

TEST_CASE("single-condition audit") {
  const CliResult r =
      run_cli("audit --model resultleak --exact --condition inverted_oi_pattern");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["audits"].size() == 1);
  CHECK(j["audits"][0]["condition"] == "inverted_oi_pattern");
  CHECK(j["audits"][0]["passed"] == true);
  CHECK(std::abs(j["audits"][0]["divergence"].get<double>() - 0.5) < 1e-9);
}

TEST_CASE("sweep emits the grid as csv") {
  const CliResult r =
      run_cli("sweep --model sign --grid 0:90:4 --n 2000 --seed 1");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "theta_rad,E_exact,E_mc,stderr");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  REQUIRE(rows.size() == 4);
  // Second row: theta = 30 degrees, E = -1 + 2/6.
  std::istringstream row(rows[1]);
  std::string cell;
  std::getline(row, cell, ',');
  CHECK(std::abs(std::stod(cell) - 0.5235987755982988) < 1e-12);
  std::getline(row, cell, ',');
  CHECK(std::abs(std::stod(cell) - (-1.0 + 1.0 / 3.0)) < 1e-12);
}

TEST_CASE("game subcommand reports the score") {
  const CliResult r =
      run_cli("game --strategy pilotwave --leak --n 3000 --seed 2");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["rounds"] == 3000);
  REQUIRE(j.contains("chsh"));
  CHECK(j["chsh"].get<double>() > 2.5);
  CHECK(j["max_abs_deviation"].get<double>() < 0.1);
}

TEST_CASE("game transcripts audit like any recorded ensemble") {
  TempDir tmp;
  const fs::path transcript = tmp.path / "rounds.ndjson";
  REQUIRE(run_cli("game --strategy pilotwave --leak --n 20000 --seed 6 "
                  "--transcript " + transcript.string())
              .exit_code == 0);
  const CliResult r = run_cli("audit --in " + transcript.string() + " --bins 8");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["all_passed"] == false);
  bool saw_mi = false, saw_sl = false;
  for (const auto& v : j["audits"]) {
    if (v["condition"] == "microstate_independence") {
      saw_mi = true;
      CHECK(v["passed"] == false);
    }
    if (v["condition"] == "structural_locality") {
      saw_sl = true;
      CHECK(v["passed"] == true);
    }
    if (v["condition"] == "settings_independence") CHECK(v["passed"] == true);
    if (v["condition"] == "outcome_independence") CHECK(v["passed"] == true);
  }
  CHECK(saw_mi);
  CHECK(saw_sl);

  // The replay id also works as a --model, like any other registry id.
  const CliResult sim = run_cli(
      "chsh --model game:sign:none --empirical --n 10000 --seed 7");
  REQUIRE(sim.exit_code == 0);
  const json s = json::parse(sim.out);
  CHECK(std::abs(s["S"].get<double>() - 2.0) <
        5 * s["stderr"].get<double>());
}

TEST_CASE("exit codes distinguish usage errors from model failures") {
  CHECK(run_cli("simulate --model nosuch --n 10").exit_code == 2);
  CHECK(run_cli("simulate --model \"dice:0.5,0.5\" --n 10").exit_code == 2);
  CHECK(run_cli("chsh --model \"dice:0.9,0.2\" --exact").exit_code == 3);
  CHECK(run_cli("game --strategy pilotwave --n 10").exit_code == 3);
  CHECK(run_cli("audit --model settings-biased --exact").exit_code == 2);
  CHECK(run_cli("nosuchcommand").exit_code == 2);
}
