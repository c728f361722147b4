#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
};

CmdResult run_cli(const std::string& args) {
  std::string cmd = std::string(FPA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("fpa_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("equilibria outputs") {
  CmdResult r = run_cli("equilibria --values 4,4,4");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("3") != std::string::npos);

  CmdResult both = run_cli("equilibria --values 4,4 --method both");
  CHECK(both.exit_code == 0);
  CHECK(both.out.find("\"agreement\": true") != std::string::npos);

  CmdResult tiny = run_cli("equilibria --values 1,1 --method brute");
  CHECK(tiny.exit_code == 0);
}

TEST_CASE("exit codes: usage and capacity") {
  CHECK(run_cli("simulate --values 4,4 --algo eps-greedy --rounds 0")
            .exit_code == 2);
  CHECK(run_cli("simulate --rounds 10").exit_code == 2);
  CHECK(run_cli("nonsense-subcommand").exit_code == 2);
  CHECK(run_cli("reproduce no-such-id").exit_code == 2);
  // 16^7 profiles blow the enumeration guard.
  CHECK(run_cli("equilibria --values 16,16,16,16,16,16,16 --method brute")
            .exit_code == 3);
}

TEST_CASE("simulate writes the run artifacts") {
  fs::path dir = fresh_dir("sim");
  CmdResult r = run_cli(
      "simulate --values 10,7,7 --algo ftl --tiebreak example1 --rounds 9 "
      "--out-dir " +
      dir.string());
  CHECK(r.exit_code == 0);
  std::string trace = slurp(dir / "trace.csv");
  CHECK(trace.rfind("t,bid_1,bid_2,bid_3,in_ne\n", 0) == 0);
  CHECK(trace.find("1,7,6,1,1\n") != std::string::npos);
  CHECK(trace.find("3,7,1,1,0\n") != std::string::npos);
  std::string run_json = slurp(dir / "run.json");
  CHECK(run_json.find("\"verdict\"") != std::string::npos);
  CHECK(run_json.find("\"checkpoints\"") != std::string::npos);
}

TEST_CASE("simulate is reproducible byte for byte") {
  fs::path a = fresh_dir("rep_a");
  fs::path b = fresh_dir("rep_b");
  std::string flags =
      "simulate --values 4,4 --algo mwu --rounds 300 --seed 7 --out-dir ";
  CmdResult ra = run_cli(flags + a.string());
  CmdResult rb = run_cli(flags + b.string());
  CHECK(ra.exit_code == 0);
  CHECK(ra.out == rb.out);
  CHECK(slurp(a / "run.json") == slurp(b / "run.json"));
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("montecarlo emits summary and bands") {
  fs::path dir = fresh_dir("mc");
  CmdResult r = run_cli(
      "montecarlo --values 4,4 --algo eps-greedy --rounds 150 --runs 8 "
      "--master-seed 11 --svg --out-dir " +
      dir.string());
  CHECK(r.exit_code == 0);
  std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"counts\"") != std::string::npos);
  CHECK(summary.find("\"v_minus_1\"") != std::string::npos);
  CHECK(fs::exists(dir / "band_bidder1_bid3.csv"));
  CHECK(fs::exists(dir / "band_bidder1_bid2.csv"));
  CHECK(fs::exists(dir / "band_bidder1_bid3.svg"));
  CHECK(slurp(dir / "band_bidder1_bid3.csv")
            .rfind("t, freq_q10, freq_median, freq_q90\n", 0) == 0);

  // Same master seed reruns byte-identically.
  fs::path dir2 = fresh_dir("mc2");
  run_cli(
      "montecarlo --values 4,4 --algo eps-greedy --rounds 150 --runs 8 "
      "--master-seed 11 --out-dir " +
      dir2.string());
  CHECK(slurp(dir / "summary.json") == slurp(dir2 / "summary.json"));
}

TEST_CASE("config file supplies defaults but flags win") {
  fs::path dir = fresh_dir("cfg");
  fs::path cfg = dir / "run.toml";
  std::ofstream(cfg) << "values = \"4,4\"\n"
                        "algo = \"mwu\"\n"
                        "rounds = 50\n"
                        "seed = 3\n";
  CmdResult from_file = run_cli("simulate --config " + cfg.string() +
                                " --out-dir " + (dir / "a").string());
  CHECK(from_file.exit_code == 0);

  // Explicit --rounds overrides the file's 50.
  CmdResult overridden =
      run_cli("simulate --config " + cfg.string() + " --rounds 10 --out-dir " +
              (dir / "b").string());
  CHECK(overridden.exit_code == 0);
  std::string trace = slurp(dir / "b" / "trace.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 11);  // header + 10
}

TEST_CASE("audit replays and grades traces") {
  CmdResult clean = run_cli(
      "audit --values 4,4 --algo ftl --gamma zero --rounds 200 --seed 5");
  CHECK(clean.exit_code == 0);
  CHECK(clean.out.find("violations: 0") != std::string::npos);

  CmdResult eg = run_cli(
      "audit --values 4,4 --algo eps-greedy --gamma eps --rounds 200 --seed 5 "
      "--strict");
  CHECK(eg.exit_code == 0);
  CHECK(eg.out.find("violations: 0") != std::string::npos);

  // MWU is not 0-mean-based: strict audit against gamma = 0 must fail.
  CmdResult mwu = run_cli(
      "audit --values 4,4 --algo mwu --gamma zero --rounds 200 --seed 5 "
      "--strict");
  CHECK(mwu.exit_code == 4);
  CHECK(mwu.out.find("violations: 0") == std::string::npos);
}

TEST_CASE("audit can replay a recorded run file") {
  fs::path dir = fresh_dir("audit_run");
  run_cli(
      "simulate --values 4,4 --algo eps-greedy --rounds 100 --seed 9 "
      "--out-dir " +
      dir.string());
  CmdResult r =
      run_cli("audit --run " + (dir / "run.json").string() + " --strict");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("violations: 0") != std::string::npos);

  // A file without a config echo cannot be replayed.
  fs::path bare = dir / "bare.json";
  std::ofstream(bare) << "{\"verdict\": \"not-converged\"}\n";
  CHECK(run_cli("audit --run " + bare.string()).exit_code == 2);
}

TEST_CASE("reproduce runs the example cycle") {
  fs::path dir = fresh_dir("repro_ex1");
  CmdResult r = run_cli("reproduce example1 --out-dir " + dir.string());
  CHECK(r.exit_code == 0);
  std::string trace = slurp(dir / "trace.csv");
  CHECK(trace.find("1,7,6,1,1\n") != std::string::npos);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 301);
}
