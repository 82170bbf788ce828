#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandResult {
  int status = -1;
  std::string output;
};

// Runs a shell command, capturing stdout+stderr and the exit status.
CommandResult run_raw(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, got);
  const int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

CommandResult run_cli(const std::string& args) {
  return run_raw(std::string(BALANCELAB_CLI_PATH) + " " + args);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++count;
  return count;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("balancelab_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("run reports a summary line and succeeds") {
  const auto r = run_cli("run --n 8 --m 100 --dist point --seed 7");
  CHECK(r.status == 0);
  CHECK(r.output.find("steps=") != std::string::npos);
  CHECK(r.output.find("capped=no") != std::string::npos);
  CHECK(r.output.find("digest=") != std::string::npos);
}

TEST_CASE("identical invocations produce identical output") {
  const std::string args = "run --n 12 --m 300 --dist uniform --seed 11 --mode skip";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.status == 0);
  CHECK(a.output == b.output);
  CHECK(!a.output.empty());
}

TEST_CASE("the seed environment variable matches the flag") {
  const auto via_env =
      run_raw(std::string("BALANCELAB_SEED=99 ") + BALANCELAB_CLI_PATH +
              " run --n 8 --m 100 --dist point");
  const auto via_flag = run_cli("run --n 8 --m 100 --dist point --seed 99");
  CHECK(via_env.status == 0);
  CHECK(via_env.output == via_flag.output);
}

TEST_CASE("a fixed-step run performs exactly the requested steps") {
  const auto r = run_cli("run --n 8 --m 100 --dist point --seed 3 --steps 100");
  CHECK(r.status == 0);
  CHECK(first_line(r.output).rfind("steps=100 ", 0) == 0);
}

TEST_CASE("a capped run is reported and exits nonzero") {
  const auto r = run_cli("run --n 8 --m 100 --dist point --seed 3 --step-cap 3");
  CHECK(r.status == 1);
  CHECK(r.output.find("capped=yes") != std::string::npos);
}

TEST_CASE("trace, summary and token files are written") {
  TempDir dir;
  const auto r = run_cli("run --n 8 --m 96 --dist point --seed 5 --mode skip --trace-out " +
                         dir.file("trace.csv") + " --summary-out " + dir.file("summary.json") +
                         " --tokens-out " + dir.file("tokens.csv"));
  CHECK(r.status == 0);

  const std::string trace = slurp(dir.file("trace.csv"));
  CHECK(first_line(trace) ==
        "t,u,v,load_u_before,load_v_before,load_u_after,load_v_after,phi_times_n2,max,min");
  CHECK(count_lines(trace) > 1);

  const std::string summary = slurp(dir.file("summary.json"));
  CHECK(summary.find("\"digest\"") != std::string::npos);
  CHECK(summary.find("\"phi_samples\"") != std::string::npos);

  const std::string tokens = slurp(dir.file("tokens.csv"));
  CHECK(first_line(tokens) == "token,node,height,normalized_height");
  CHECK(count_lines(tokens) == 96 + 1);
}

TEST_CASE("ensemble writes one CSV row per replication") {
  TempDir dir;
  const auto r = run_cli("ensemble --n 8 --m 64 --dist point --reps 10 --seed 2 --csv-out " +
                         dir.file("ens.csv"));
  CHECK(r.status == 0);
  CHECK(r.output.find("cap_hits=0") != std::string::npos);
  const std::string csv = slurp(dir.file("ens.csv"));
  CHECK(first_line(csv) == "replication,seed,t1,t2,t3,delta0,capped");
  CHECK(count_lines(csv) == 10 + 1);
}

TEST_CASE("fit consumes ensemble reports") {
  TempDir dir;
  const int ns[] = {12, 16, 24, 32};
  std::string files;
  for (int n : ns) {
    const std::string out = dir.file("e" + std::to_string(n) + ".json");
    const auto r = run_cli("ensemble --n " + std::to_string(n) + " --m " +
                           std::to_string(n * n) + " --dist point --reps 20 --seed 5 --json-out " +
                           out);
    REQUIRE(r.status == 0);
    files += " " + out;
  }
  const auto fit = run_cli("fit" + files + " --out " + dir.file("fit.json"));
  CHECK(fit.status == 0);
  CHECK(fit.output.find("points=4") != std::string::npos);
  CHECK(fit.output.find("slope=") != std::string::npos);
  CHECK(fit.output.find("r_squared=") != std::string::npos);
  CHECK(slurp(dir.file("fit.json")).find("\"slope\"") != std::string::npos);
}

TEST_CASE("verify runs a filtered subset") {
  const auto r = run_cli("verify --checks split,identity --seed 1");
  CHECK(r.status == 0);
  CHECK(count_occurrences(r.output, "[PASS]") == 2);
  CHECK(count_occurrences(r.output, "[FAIL]") == 0);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_cli("run --n 4 --m 8 --dist explicit").status == 2);
  CHECK(run_cli("verify --checks no-such-check").status == 2);
  CHECK(run_cli("run --n 8 --m 100 --dist point --mode shuffle --c 3").status == 2);
}

TEST_CASE("I/O errors exit with status 3") {
  CHECK(run_cli("fit /nonexistent/ensemble.json").status == 3);
}

TEST_CASE("a config file reproduces a flag invocation") {
  TempDir dir;
  {
    std::ofstream cfg(dir.file("run.toml"));
    cfg << "[run]\n"
        << "n=8\n"
        << "m=100\n"
        << "dist=\"point\"\n"
        << "seed=4\n";
  }
  const auto via_config = run_cli("--config " + dir.file("run.toml") + " run");
  const auto via_flags = run_cli("run --n 8 --m 100 --dist point --seed 4");
  CHECK(via_config.status == 0);
  CHECK(via_config.output == via_flags.output);
}
