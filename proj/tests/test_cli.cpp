#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cascade/environment.hpp"
#include "cascade/ingestion.hpp"
#include "cli.hpp"

using namespace cascade;

namespace {

namespace fs = std::filesystem;

std::string fixture(const std::string& name) {
  return std::string(CASCADE_FIXTURE_DIR) + "/" + name;
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "cascade_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("cascade");
  for (const auto& a : args) storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const auto& s : storage) argv.push_back(s.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

// Swaps the stdout file descriptor while `fn` runs so printed output can be
// inspected; both printf-style and iostream writes land in the capture file.
std::string capture_stdout(const std::function<void()>& fn) {
  auto path = scratch_dir() / "captured_stdout.txt";
  std::fflush(stdout);
  std::cout.flush();
  int saved = ::dup(STDOUT_FILENO);
  REQUIRE(saved >= 0);
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  REQUIRE(fd >= 0);
  ::dup2(fd, STDOUT_FILENO);
  ::close(fd);
  fn();
  std::fflush(stdout);
  std::cout.flush();
  ::dup2(saved, STDOUT_FILENO);
  ::close(saved);
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char ch : text) {
    if (ch == '\n') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("bound subcommand prints the radius and the bound") {
  int rc = -1;
  std::string out = capture_stdout([&] {
    rc = run_cli({"bound", "-n", "100", "-K", "2", "-d", "2"});
  });
  CHECK(rc == 0);
  CHECK(out.find("c = 5.45273800787545") != std::string::npos);
  CHECK(out.find("bound = 796.918158702571") != std::string::npos);

  // Non-default sigma and theta-norm change the numbers but still succeed.
  rc = -1;
  out = capture_stdout([&] {
    rc = run_cli({"bound", "-n", "1000", "-K", "4", "-d", "10", "--sigma", "0.5",
                  "--theta-norm", "0.8"});
  });
  CHECK(rc == 0);
  CHECK(out.find("c = ") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({"bound", "--nope", "3"}) == 1);
  CHECK(run_cli({"run"}) == 1);  // --config is required
  CHECK(run_cli({"bound", "-n", "100"}) == 1);
}

TEST_CASE("help exits cleanly") {
  int rc = -1;
  std::string out = capture_stdout([&] { rc = run_cli({"--help"}); });
  CHECK(rc == 0);
  CHECK(out.find("run") != std::string::npos);
  CHECK(out.find("bound") != std::string::npos);
}

TEST_CASE("data errors exit with code 2") {
  auto dir = scratch_dir();
  CHECK(run_cli({"run", "--config", (dir / "missing.json").string()}) == 2);

  auto bad = dir / "bad.json";
  write_text(bad, R"({"algo":"cascade_lin_ts","n_steps":10,"runs":1,"K":1,"d":1,
                      "synthetic_L":4,"mystery":1})");
  CHECK(run_cli({"run", "--config", bad.string()}) == 2);

  // Out-of-range bound arguments are data errors, not usage errors.
  CHECK(run_cli({"bound", "-n", "0", "-K", "2", "-d", "2"}) == 2);
  fs::remove(bad);
}

TEST_CASE("run subcommand writes a deterministic trace") {
  auto dir = scratch_dir();
  auto cfg_path = dir / "synth.json";
  auto out1 = dir / "out1";
  auto out2 = dir / "out2";
  auto out3 = dir / "out3";
  write_text(cfg_path, R"({
    "algo": "cascade_lin_ts", "n_steps": 200, "runs": 2, "K": 2, "d": 2,
    "synthetic_L": 12, "synthetic_theta_seed": 4, "master_seed": 10,
    "out_dir": ")" + out1.string() + R"("
  })");

  int rc = -1;
  std::string msg = capture_stdout(
      [&] { rc = run_cli({"run", "--config", cfg_path.string()}); });
  REQUIRE(rc == 0);
  CHECK(msg.find("wrote ") != std::string::npos);
  CHECK(msg.find("final mean cumulative regret") != std::string::npos);

  std::string trace1 = read_bytes(out1 / "trace.csv");
  CHECK(count_lines(trace1) == 201);  // header plus one row per step
  CHECK(trace1.rfind("step,mean_regret,stderr,mean_reward\n", 0) == 0);

  // Same config, different output directory: byte-identical trace.
  capture_stdout([&] {
    rc = run_cli({"run", "--config", cfg_path.string(), "--out", out2.string()});
  });
  REQUIRE(rc == 0);
  CHECK(read_bytes(out2 / "trace.csv") == trace1);

  // A different master seed must change the trajectory.
  capture_stdout([&] {
    rc = run_cli({"run", "--config", cfg_path.string(), "--out", out3.string(),
                  "--seed", "11"});
  });
  REQUIRE(rc == 0);
  CHECK(read_bytes(out3 / "trace.csv") != trace1);

  // An algorithm override takes effect.
  capture_stdout([&] {
    rc = run_cli({"run", "--config", cfg_path.string(), "--out", out3.string(),
                  "--algo", "cascade_ucb1"});
  });
  REQUIRE(rc == 0);
  CHECK(read_bytes(out3 / "trace.csv") != trace1);

  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::remove_all(out3);
  fs::remove(cfg_path);
}

TEST_CASE("features subcommand builds a CSV") {
  auto dir = scratch_dir();
  auto out = dir / "feats.csv";
  int rc = -1;
  capture_stdout([&] {
    rc = run_cli({"features", "--input", fixture("ratings_comma.csv"), "--format",
                  "comma", "--threshold", "3", "-d", "2", "--out", out.string()});
  });
  REQUIRE(rc == 0);
  std::string text = read_bytes(out);
  CHECK(text.rfind("item,f1,f2\n", 0) == 0);
  CHECK(count_lines(text) == 4);  // header + 3 items

  // The split variant trains on half the users but covers every item.
  capture_stdout([&] {
    rc = run_cli({"features", "--input", fixture("ratings_comma.csv"), "--format",
                  "comma", "--threshold", "3", "-d", "2", "--out", out.string(),
                  "--split-seed", "5"});
  });
  REQUIRE(rc == 0);
  CHECK(count_lines(read_bytes(out)) == 4);

  CHECK(run_cli({"features", "--input", fixture("ratings_comma.csv"), "--format",
                 "comma", "--rule", "sometimes", "-d", "2", "--out", out.string()}) == 2);
  CHECK(run_cli({"features", "--input", fixture("ratings_comma.csv"), "--format",
                 "comma", "-d", "99", "--out", out.string()}) == 2);
  fs::remove(out);
}

TEST_CASE("oracle subcommand reports the greedy list and its coverage") {
  auto dir = scratch_dir();
  auto matrix_path = dir / "matrix.csv";
  {
    Eigen::MatrixXd dense(4, 3);
    dense << 1, 0, 0,
             1, 0, 0,
             0, 1, 0,
             0, 0, 1;
    write_matrix_csv(FeedbackMatrix::from_dense(dense), {"a", "b", "c"},
                     matrix_path.string());
  }

  int rc = -1;
  std::string out = capture_stdout([&] {
    rc = run_cli({"oracle", "--input", matrix_path.string(), "-K", "2"});
  });
  REQUIRE(rc == 0);
  CHECK(out.find("astar_indices: 0 1\n") != std::string::npos);
  CHECK(out.find("astar_items: a b\n") != std::string::npos);
  CHECK(out.find("coverage: 0.75 (3/4 users)") != std::string::npos);

  CHECK(run_cli({"oracle", "--input", matrix_path.string(), "-K", "9"}) == 2);
  CHECK(run_cli({"oracle", "--input", (dir / "nope.csv").string(), "-K", "1"}) == 2);
  fs::remove(matrix_path);
}
