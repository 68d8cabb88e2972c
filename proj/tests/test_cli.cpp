#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* path = std::getenv("MICHS_CLI");
  REQUIRE(path != nullptr);
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("michs_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long line_count(const fs::path& path) {
  const std::string text = slurp(path);
  long count = 0;
  for (const char c : text)
    if (c == '\n') ++count;
  return count;
}

// Small synthetic dataset + dictionary used by classify/trace tests.
fs::path prepared_dataset(const std::string& name) {
  const auto dir = fresh_dir(name);
  REQUIRE(run_cli("synth --classes 3 --tpc 3 --dim 24 --subspace-dim 2 --views-per-subject 4 "
                  "--seed 5 --out " +
                  dir.string()) == 0);
  REQUIRE(run_cli("build-dict --train " + (dir / "train.csv").string() + " --labels " +
                  (dir / "train_labels.txt").string() + " --out " + dir.string()) == 0);
  return dir;
}

}  // namespace

TEST_CASE("cli synth: manifest accounting and determinism", "[cli]") {
  const auto dir_a = fresh_dir("synth_a");
  const auto dir_b = fresh_dir("synth_b");
  const std::string flags = "synth --classes 10 --tpc 5 --dim 64 --seed 7 --out ";
  REQUIRE(run_cli(flags + dir_a.string()) == 0);
  REQUIRE(run_cli(flags + dir_b.string()) == 0);
  // 50 training vectors -> 50 manifest rows plus the header.
  CHECK(line_count(dir_a / "train_meta.csv") == 51);
  for (const char* file : {"train.csv", "train_labels.txt", "train_meta.csv", "test.csv",
                           "test_meta.csv"})
    CHECK(slurp(dir_a / file) == slurp(dir_b / file));
}

TEST_CASE("cli synth: invalid tpc exits with code 2", "[cli]") {
  const auto dir = fresh_dir("synth_bad");
  CHECK(run_cli("synth --tpc 0 --out " + dir.string()) == 2);
}

TEST_CASE("cli classify: schema, determinism, and method parity", "[cli]") {
  const auto dir = prepared_dataset("classify");
  const std::string common = "classify --dict " + dir.string() + " --test " +
                             (dir / "test.csv").string() + " --test-meta " +
                             (dir / "test_meta.csv").string() +
                             " --views 2 --trials 3 --seed 7 --max-iter 150 --burn-in 30 ";
  const auto out_a = dir / "results_a.csv";
  const auto out_b = dir / "results_b.csv";
  REQUIRE(run_cli(common + "--out " + out_a.string()) == 0);
  REQUIRE(run_cli(common + "--out " + out_b.string()) == 0);
  const std::string text = slurp(out_a);
  CHECK(text.substr(0, text.find('\n')) ==
        "sample_id,true_class,predicted,cost_1,cost_2,cost_3,wall_ms");
  CHECK(line_count(out_a) == 4);  // header + 3 samples
  CHECK(text == slurp(out_b));

  const auto out_src = dir / "results_src.csv";
  REQUIRE(run_cli(common + "--method src_l1 --out " + out_src.string()) == 0);
  const std::string src_text = slurp(out_src);
  CHECK(src_text.substr(0, src_text.find('\n')) ==
        "sample_id,true_class,predicted,cost_1,cost_2,cost_3,wall_ms");
  CHECK(line_count(out_src) == 4);
}

TEST_CASE("cli classify: config file merges with flag overrides", "[cli]") {
  const auto dir = prepared_dataset("config");
  std::ofstream(dir / "run.cfg") << "views=2\ntrials=3\nseed=7\nmax-iter=150\nburn-in=30\n";
  const std::string common = "classify --dict " + dir.string() + " --test " +
                             (dir / "test.csv").string() + " --test-meta " +
                             (dir / "test_meta.csv").string() + " --config " +
                             (dir / "run.cfg").string() + " ";
  const auto out_cfg = dir / "results_cfg.csv";
  REQUIRE(run_cli(common + "--out " + out_cfg.string()) == 0);
  // Equivalent flag-only run matches byte for byte.
  const auto out_flags = dir / "results_flags.csv";
  REQUIRE(run_cli("classify --dict " + dir.string() + " --test " + (dir / "test.csv").string() +
                  " --test-meta " + (dir / "test_meta.csv").string() +
                  " --views 2 --trials 3 --seed 7 --max-iter 150 --burn-in 30 --out " +
                  out_flags.string()) == 0);
  CHECK(slurp(out_cfg) == slurp(out_flags));
  // A flag wins over the config value: one trial instead of three.
  const auto out_override = dir / "results_override.csv";
  REQUIRE(run_cli(common + "--trials 1 --out " + out_override.string()) == 0);
  CHECK(line_count(out_override) == 2);
}

TEST_CASE("cli benchmark: grid accounting and validation", "[cli]") {
  const auto dir = fresh_dir("bench");
  const std::string common =
      "benchmark --classes 3 --dim 24 --subspace-dim 2 --views-per-subject 4 --trials 4 "
      "--views 1,2 --tpc 3 --seed 11 --max-iter 120 --burn-in 20 --out ";
  REQUIRE(run_cli(common + dir.string()) == 0);
  // methods x views x tpc = 2*2*1 cells -> 4 rows plus header.
  CHECK(line_count(dir / "summary.csv") == 5);
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.substr(0, summary.find('\n')) == "method,views,tpc,trials,accuracy,mean_wall_ms");
  CHECK(fs::exists(dir / "accuracy_vs_views_tpc3.csv"));
  CHECK(fs::exists(dir / "accuracy_vs_tpc_T1.csv"));
  CHECK(fs::exists(dir / "confusion_michs_T2_tpc3.csv"));
  CHECK(line_count(dir / "confusion_michs_T2_tpc3.csv") == 3);

  const auto dir_b = fresh_dir("bench_b");
  REQUIRE(run_cli(common + dir_b.string()) == 0);
  CHECK(slurp(dir / "summary.csv") == slurp(dir_b / "summary.csv"));

  CHECK(run_cli("benchmark --methods \"\" --out " + dir.string()) == 2);
  CHECK(run_cli("benchmark --trials 0 --out " + dir.string()) == 2);
}

TEST_CASE("cli chain-trace: diagnostic dump schema", "[cli]") {
  const auto dir = prepared_dataset("trace");
  const auto out = dir / "trace.csv";
  REQUIRE(run_cli("chain-trace --dict " + dir.string() + " --test " +
                  (dir / "test.csv").string() + " --test-meta " +
                  (dir / "test_meta.csv").string() +
                  " --sample 0 --target-class 1 --max-iter 50 --burn-in 10 --seed 3 --out " +
                  out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(text.substr(0, text.find('\n')) == "iteration,atom_index,gamma_value");
  // 40 kept sweeps x 9 atoms.
  CHECK(line_count(out) == 1 + 40 * 9);
}

TEST_CASE("cli: unknown flags and missing subcommand exit with code 2", "[cli]") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("classify --no-such-flag") == 2);
  CHECK(run_cli("synth --classes 3 --monkey 4 --out /tmp/x") == 2);
}
