#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "risuav/cli.hpp"

using namespace risuav;
namespace fs = std::filesystem;

namespace {

struct Call {
  int code;
  std::string out;
  std::string err;
};

Call cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("risuav_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

const char* kSmall = R"({"arrays": {"uav_rows": 2, "uav_cols": 2, "ris_rows": 2, "ris_cols": 2}})";

}  // namespace

TEST_CASE("missing config file exits 2 and names the path") {
  const Call c = cli({"run", "--config", "/nonexistent/dir/desk.json", "--quiet"});
  CHECK(c.code == exit_config);
  CHECK(c.err.find("/nonexistent/dir/desk.json") != std::string::npos);
  CHECK(c.out.empty());
}

TEST_CASE("bad flags and values are config errors") {
  CHECK(cli({}).code == exit_config);
  CHECK(cli({"launch"}).code == exit_config);
  CHECK(cli({"run", "--mode", "best", "--quiet"}).code == exit_config);
  CHECK(cli({"run", "--timeblocks", "0", "--quiet"}).code == exit_config);
  CHECK(cli({"sweep", "--axis", "bandwidth", "--values", "1", "--quiet"}).code == exit_config);
  CHECK(cli({"sweep", "--values", "1", "--quiet"}).code == exit_config);
  const fs::path dir = scratch_dir();
  const std::string broken = write_config(dir, "broken.json", "{\"network\": ");
  const Call c = cli({"run", "--config", broken, "--quiet"});
  CHECK(c.code == exit_config);
  CHECK(c.err.find("broken.json") != std::string::npos);
  const Call bad_dir = cli({"run", "--mode", "random", "--timeblocks", "1", "--out", "/nonexistent/x.csv", "--quiet"});
  CHECK(bad_dir.code == exit_config);
}

TEST_CASE("run writes one CSV row per timeblock through an atomic rename") {
  const fs::path dir = scratch_dir();
  const std::string cfg = write_config(dir, "desk.json", kSmall);
  const fs::path out = dir / "out.csv";
  const Call c = cli({"run", "--config", cfg, "--mode", "random", "--timeblocks", "100", "--seed", "7", "--out",
                      out.string(), "--quiet"});
  CHECK(c.code == exit_ok);
  CHECK(c.out.empty());
  CHECK_FALSE(fs::exists(dir / "out.csv.tmp"));
  const std::string body = read(out);
  CHECK(count_lines(body) == 101);
  CHECK(body.rfind("mode,seed,timeblock,", 0) == 0);
  CHECK(body.find("\nrandom,7,99,") != std::string::npos);
  // identical invocations give identical bytes; stdout carries the same CSV
  const Call again = cli({"run", "--config", cfg, "--mode", "random", "--timeblocks", "100", "--seed", "7", "--quiet"});
  CHECK(again.code == exit_ok);
  CHECK(again.out == body);
}

TEST_CASE("seed override changes the draws") {
  const Call a = cli({"run", "--mode", "random", "--timeblocks", "2", "--seed", "1", "--quiet"});
  const Call b = cli({"run", "--mode", "random", "--timeblocks", "2", "--seed", "2", "--quiet"});
  CHECK(a.code == exit_ok);
  CHECK(b.code == exit_ok);
  CHECK(a.out != b.out);
}

TEST_CASE("log lines go to stderr unless quiet") {
  const Call loud = cli({"run", "--mode", "random", "--timeblocks", "1"});
  CHECK(loud.code == exit_ok);
  CHECK(loud.err.find("run mode=random") != std::string::npos);
  CHECK(loud.out.find("mode,seed") == 0);
  const Call quiet = cli({"run", "--mode", "random", "--timeblocks", "1", "--quiet"});
  CHECK(quiet.err.empty());
}

TEST_CASE("sweep emits one group per value") {
  const Call c = cli({"sweep", "--axis", "num_ris", "--values", "0,1,2", "--mode", "random", "--timeblocks", "3",
                      "--quiet"});
  CHECK(c.code == exit_ok);
  CHECK(count_lines(c.out) == 10);
  CHECK(c.out.rfind("axis,value,mode,", 0) == 0);
  for (const char* v : {"\nnum_ris,0,", "\nnum_ris,1,", "\nnum_ris,2,"}) CHECK(c.out.find(v) != std::string::npos);
}

TEST_CASE("unmet minimum rate exits 3 after writing the CSV") {
  const fs::path dir = scratch_dir();
  const std::string cfg = write_config(
      dir, "hard.json",
      R"({"arrays": {"uav_rows": 1, "uav_cols": 1, "ris_rows": 1, "ris_cols": 1}, "radio": {"min_rate": 1000}})");
  const Call c = cli({"run", "--config", cfg, "--mode", "fixed-sched", "--timeblocks", "1"});
  CHECK(c.code == exit_infeasible);
  CHECK(count_lines(c.out) == 2);
  CHECK(c.err.find("infeasible") != std::string::npos);
}

TEST_CASE("oracle-check reports agreement") {
  const Call c = cli({"oracle-check", "--instances", "5", "--seed", "3"});
  CHECK(c.code == exit_ok);
  CHECK(c.out.find("instances=5 mismatches=0") != std::string::npos);
  CHECK(cli({"oracle-check", "--instances", "0"}).code == exit_config);
}

TEST_CASE("atomic write replaces the target") {
  const fs::path dir = scratch_dir();
  const fs::path p = dir / "file.txt";
  write_file_atomic(p.string(), "first");
  write_file_atomic(p.string(), "second");
  CHECK(read(p) == "second");
  CHECK_FALSE(fs::exists(dir / "file.txt.tmp"));
  CHECK_THROWS(write_file_atomic((dir / "missing" / "f.txt").string(), "x"));
  fs::remove_all(dir);
}
