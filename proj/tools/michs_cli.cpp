// Command-line surface: synthetic dataset generation, dictionary building,
// classification, benchmark sweeps, and chain diagnostics. Every run is
// reproducible from --seed; CSV outputs are byte-stable unless --timing is on.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "michs/michs.hpp"

namespace fs = std::filesystem;
using namespace michs;

namespace {

// Plain key=value config file ('#' comments). Keys are long option names
// without the leading dashes. The pairs are injected right after the
// subcommand token, so explicit command-line flags always win.
std::vector<std::string> merge_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t sub_pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!args[i].empty() && args[i][0] != '-') {
      sub_pos = i;
      break;
    }
  if (sub_pos == args.size()) return args;
  std::string config_path;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw ValidationError("cannot open config file " + config_path);
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
  };
  std::vector<std::string> injected;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ValidationError(config_path + ":" + std::to_string(lineno) +
                            ": expected key=value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw ValidationError(config_path + ":" + std::to_string(lineno) + ": empty key");
    injected.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + sub_pos + 1, injected.begin(), injected.end());
  return args;
}

struct HyperOpts {
  PriorParams params;
  double kappa_in = 0.4;
  double kappa_out = 0.01;
  ChainConfig chain;
  BaselineConfig baseline;
  std::string assign_by = "cost";
  std::string method = "michs";
  std::uint64_t seed = 0;
  int threads = 0;
  bool timing = false;

  AssignBy assign_mode() const {
    if (assign_by == "cost") return AssignBy::kCost;
    if (assign_by == "residual") return AssignBy::kResidual;
    throw ValidationError("--assign-by must be 'cost' or 'residual'");
  }
  Method method_mode() const { return parse_method(method); }
  static Method parse_method(const std::string& name) {
    if (name == "michs") return Method::kMichs;
    if (name == "src_l1") return Method::kSrcL1;
    throw ValidationError("--method must be 'michs' or 'src_l1', got '" + name + "'");
  }
};

void add_model_options(CLI::App* cmd, HyperOpts& h) {
  cmd->add_option("--sigma2", h.params.sigma2, "slab scale numerator")->capture_default_str();
  cmd->add_option("--sigma-n2", h.params.sigma_n2, "noise variance")->capture_default_str();
  cmd->add_option("--lambda", h.params.lambda, "slab precision multiplier")->capture_default_str();
  cmd->add_option("--kappa-in", h.kappa_in, "prior inclusion probability, hypothesized class")
      ->capture_default_str();
  cmd->add_option("--kappa-out", h.kappa_out, "prior inclusion probability, other classes")
      ->capture_default_str();
  cmd->add_option("--max-iter", h.chain.max_iter, "Gibbs iterations")->capture_default_str();
  cmd->add_option("--burn-in", h.chain.burn_in, "discarded initial iterations")
      ->capture_default_str();
  cmd->add_option("--threshold", h.chain.inclusion_threshold,
                  "inclusion-frequency cutoff for the selected support")
      ->capture_default_str();
  cmd->add_option("--thin", h.chain.thin, "keep every k-th post-burn-in sweep")
      ->capture_default_str();
  cmd->add_option("--l1-penalty", h.baseline.l1_penalty, "baseline l1 penalty")
      ->capture_default_str();
  cmd->add_option("--l1-max-iter", h.baseline.max_iterations, "baseline iteration cap")
      ->capture_default_str();
  cmd->add_option("--l1-tol", h.baseline.step_tolerance, "baseline convergence tolerance")
      ->capture_default_str();
  cmd->add_option("--assign-by", h.assign_by, "class assignment score: cost|residual")
      ->capture_default_str();
  cmd->add_option("--seed", h.seed, "master seed; all streams derive from it")
      ->capture_default_str();
  cmd->add_option("--threads", h.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  cmd->add_flag("--timing", h.timing, "write real wall times into CSV (breaks byte determinism)");
}

void add_synth_options(CLI::App* cmd, SyntheticSpec& spec) {
  cmd->add_option("--classes", spec.num_classes, "number of subjects")->capture_default_str();
  cmd->add_option("--dim", spec.feature_dim, "feature dimension")->capture_default_str();
  cmd->add_option("--views-per-subject", spec.views_per_subject, "view tags per subject")
      ->capture_default_str();
  cmd->add_option("--subspace-dim", spec.subspace_dim, "per-class subspace dimension")
      ->capture_default_str();
  cmd->add_option("--noise-std", spec.noise_std, "additive noise stddev")->capture_default_str();
  cmd->add_option("--coherence", spec.coherence, "shared-component weight in [0,1)")
      ->capture_default_str();
}

std::string csv_double(double value, bool as_zero = false) {
  return as_zero ? "0" : format_double(value);
}

Dictionary load_dict_options(const std::string& dict_dir, const std::string& matrix,
                             const std::string& labels) {
  if (!dict_dir.empty())
    return load_dictionary((fs::path(dict_dir) / "dict.csv").string(),
                           (fs::path(dict_dir) / "dict_labels.txt").string());
  if (matrix.empty() || labels.empty())
    throw ValidationError("give either --dict DIR or both --dict-matrix and --dict-labels");
  return load_dictionary(matrix, labels);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  SyntheticSpec spec;
  int tpc = 5;
  std::string out;
};

void run_synth(const SynthArgs& args) {
  SyntheticSpec spec = args.spec;
  spec.atoms_per_class = args.tpc;
  spec.validate();
  fs::create_directories(args.out);
  const SyntheticData data = generate_synthetic(spec);

  const fs::path out(args.out);
  write_matrix_csv((out / "train.csv").string(), vectors_to_matrix(data.train));
  std::vector<int> labels;
  for (const auto& item : data.train) labels.push_back(item.class_id);
  write_labels((out / "train_labels.txt").string(), labels);
  write_pool_meta((out / "train_meta.csv").string(), data.train);
  write_matrix_csv((out / "test.csv").string(), vectors_to_matrix(data.test_pool));
  write_pool_meta((out / "test_meta.csv").string(), data.test_pool);

  std::cout << "synth: " << data.train.size() << " training vectors, "
            << data.test_pool.size() << " test-pool vectors (" << spec.num_classes
            << " classes, " << spec.views_per_subject << " views) -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// build-dict

struct BuildDictArgs {
  std::string train, labels, images, size = "32x32", out;
};

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= text.size())
    throw ValidationError("--size must look like 32x32 (HxW)");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ValidationError("--size must look like 32x32 (HxW)");
  }
}

void run_build_dict(const BuildDictArgs& args) {
  fs::create_directories(args.out);
  const fs::path out(args.out);
  Dictionary dict = [&] {
    if (!args.images.empty()) {
      const auto [h, w] = parse_size(args.size);
      const ImageDataset dataset = load_image_directory(args.images, h, w);
      for (const auto& warning : dataset.warnings)
        std::cerr << "warning: skipped " << warning << "\n";
      write_manifest((out / "manifest.csv").string(), dataset.paths, dataset.class_names,
                     dataset.images);
      return build_dictionary(dataset.images);
    }
    if (args.train.empty() || args.labels.empty())
      throw ValidationError("give either --images DIR or both --train and --labels");
    const Mat matrix = read_matrix_csv(args.train);
    const std::vector<int> labels = read_labels(args.labels);
    if (static_cast<Eigen::Index>(labels.size()) != matrix.cols())
      throw ValidationError("--labels row count does not match --train columns");
    std::vector<LabeledVector> images;
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      images.push_back({matrix.col(j), labels[j]});
    return build_dictionary(images);
  }();
  save_dictionary(dict, (out / "dict.csv").string(), (out / "dict_labels.txt").string());
  std::cout << "build-dict: " << dict.atom_count() << " atoms, " << dict.num_classes()
            << " classes, dim " << dict.feature_dim() << " -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
  std::string dict_dir, dict_matrix, dict_labels;
  std::string test, test_meta;
  int views = 3;
  int trials = 1;
  std::string out = "results.csv";
  HyperOpts hyper;
};

void run_classify(const ClassifyArgs& args) {
  args.hyper.params.validate();
  args.hyper.chain.validate();
  args.hyper.baseline.validate();
  const Method method = args.hyper.method_mode();
  const AssignBy assign_by = args.hyper.assign_mode();
  const Dictionary dict = load_dict_options(args.dict_dir, args.dict_matrix, args.dict_labels);
  const auto pool = read_pool(args.test, args.test_meta);
  for (const auto& item : pool)
    if (item.features.size() != dict.feature_dim())
      throw Error("classify: test vectors have dimension " +
                  std::to_string(item.features.size()) + " but the dictionary has " +
                  std::to_string(dict.feature_dim()));

  ExperimentSpec exp_spec;
  exp_spec.views_per_trial = args.views;
  exp_spec.num_trials = args.trials;
  exp_spec.seed = mix_seed(args.hyper.seed, seed_domain::kTrialSampling);
  const auto samples = sample_test_matrices(pool, exp_spec);

  const auto count = static_cast<long>(samples.size());
  std::vector<ClassificationResult> results(count);
  std::vector<double> wall(count, 0.0);
  parallel_for(count, args.hyper.threads, [&](long i) {
    const auto start = std::chrono::steady_clock::now();
    if (method == Method::kMichs) {
      ChainConfig chain = args.hyper.chain;
      chain.seed = mix_seed(mix_seed(args.hyper.seed, seed_domain::kSample),
                            static_cast<std::uint64_t>(i));
      results[i] = classify(dict, samples[i].views, args.hyper.params, args.hyper.kappa_in,
                            args.hyper.kappa_out, chain, assign_by);
    } else {
      results[i] = src_l1_classify(dict, samples[i].views, args.hyper.baseline);
    }
    wall[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
  });

  std::ofstream csv(args.out, std::ios::binary);
  if (!csv) throw IoError("classify: cannot open " + args.out);
  csv << "sample_id,true_class,predicted";
  for (int r = 1; r <= dict.num_classes(); ++r) csv << ",cost_" << r;
  csv << ",wall_ms\n";
  long correct = 0;
  for (long i = 0; i < count; ++i) {
    const int predicted_label = dict.label(results[i].predicted_class);
    csv << i << ',' << samples[i].true_class << ',' << predicted_label;
    for (Eigen::Index r = 0; r < results[i].per_class_cost.size(); ++r)
      csv << ',' << format_double(results[i].per_class_cost[r]);
    csv << ',' << csv_double(wall[i], !args.hyper.timing) << '\n';
    if (predicted_label == samples[i].true_class) ++correct;
    std::cout << "sample " << i << ": true=" << samples[i].true_class
              << " predicted=" << predicted_label << " costs=[";
    for (Eigen::Index r = 0; r < results[i].per_class_cost.size(); ++r)
      std::cout << (r ? " " : "") << format_double(results[i].per_class_cost[r]);
    std::cout << "]\n";
    if (!results[i].l1_converged)
      std::cerr << "warning: sample " << i << ": l1 baseline hit the iteration cap\n";
  }
  if (!csv) throw IoError("classify: write failed for " + args.out);
  std::cout << "classify: " << correct << "/" << count << " correct -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
  SyntheticSpec spec;
  std::vector<int> views{1, 3};
  std::vector<int> tpc{3, 5, 7};
  std::vector<std::string> methods{"michs", "src_l1"};
  int trials = 500;
  std::string out;
  HyperOpts hyper;
};

struct BenchmarkCell {
  std::string method;
  int views = 0;
  int tpc = 0;
  EvalMetrics metrics;
};

void run_benchmark(const BenchmarkArgs& args) {
  require(!args.methods.empty(), "benchmark: --methods must not be empty");
  require(!args.views.empty(), "benchmark: --views must not be empty");
  require(!args.tpc.empty(), "benchmark: --tpc must not be empty");
  require(args.trials >= 1, "benchmark: --trials must be >= 1");
  for (const auto& name : args.methods) HyperOpts::parse_method(name);
  args.hyper.params.validate();
  args.hyper.chain.validate();
  args.hyper.baseline.validate();

  SyntheticSpec spec = args.spec;
  spec.atoms_per_class = *std::max_element(args.tpc.begin(), args.tpc.end());
  spec.seed = mix_seed(args.hyper.seed, seed_domain::kDataset);
  spec.validate();
  for (const int tpc : args.tpc) require(tpc >= 1, "benchmark: tpc values must be >= 1");

  const SyntheticData data = generate_synthetic(spec);
  std::map<int, Dictionary> dict_by_tpc;
  for (const int tpc : args.tpc)
    dict_by_tpc.emplace(tpc, build_dictionary(subset_train_per_class(data.train, tpc)));

  std::map<int, std::vector<LabeledObservation>> samples_by_views;
  for (const int views : args.views) {
    ExperimentSpec exp_spec;
    exp_spec.views_per_trial = views;
    exp_spec.num_trials = args.trials;
    exp_spec.seed = mix_seed(mix_seed(args.hyper.seed, seed_domain::kTrialSampling),
                             static_cast<std::uint64_t>(views));
    samples_by_views.emplace(views, sample_test_matrices(data.test_pool, exp_spec));
  }

  std::vector<BenchmarkCell> cells;
  for (const auto& method_name : args.methods) {
    for (const int views : args.views) {
      for (const int tpc : args.tpc) {
        EvalConfig cfg;
        cfg.method = HyperOpts::parse_method(method_name);
        cfg.params = args.hyper.params;
        cfg.kappa_in = args.hyper.kappa_in;
        cfg.kappa_out = args.hyper.kappa_out;
        cfg.chain = args.hyper.chain;
        cfg.baseline = args.hyper.baseline;
        cfg.assign_by = args.hyper.assign_mode();
        cfg.threads = args.hyper.threads;
        cfg.seed = mix_seed(mix_seed(mix_seed(args.hyper.seed, seed_domain::kCell),
                                     static_cast<std::uint64_t>(views)),
                            static_cast<std::uint64_t>(tpc));
        const auto start = std::chrono::steady_clock::now();
        BenchmarkCell cell{method_name, views, tpc,
                           evaluate(dict_by_tpc.at(tpc), samples_by_views.at(views), cfg)};
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "cell method=" << method_name << " T=" << views << " tpc=" << tpc
                  << ": accuracy=" << cell.metrics.accuracy << " (" << seconds << " s)\n";
        cells.push_back(std::move(cell));
      }
    }
  }

  // All files are written only after the grid finishes, in a fixed order.
  fs::create_directories(args.out);
  const fs::path out(args.out);
  {
    std::ofstream csv(out / "summary.csv", std::ios::binary);
    if (!csv) throw IoError("benchmark: cannot open summary.csv");
    csv << "method,views,tpc,trials,accuracy,mean_wall_ms\n";
    for (const auto& cell : cells)
      csv << cell.method << ',' << cell.views << ',' << cell.tpc << ',' << args.trials << ','
          << format_double(cell.metrics.accuracy) << ','
          << csv_double(cell.metrics.mean_wall_ms, !args.hyper.timing) << '\n';
  }
  const auto find_cell = [&](const std::string& method, int views, int tpc) {
    for (const auto& cell : cells)
      if (cell.method == method && cell.views == views && cell.tpc == tpc) return &cell;
    return static_cast<const BenchmarkCell*>(nullptr);
  };
  for (const int tpc : args.tpc) {
    std::ofstream csv(out / ("accuracy_vs_views_tpc" + std::to_string(tpc) + ".csv"),
                      std::ios::binary);
    csv << "method";
    for (const int views : args.views) csv << ",T=" << views;
    csv << '\n';
    for (const auto& method : args.methods) {
      csv << method;
      for (const int views : args.views)
        csv << ',' << format_double(find_cell(method, views, tpc)->metrics.accuracy);
      csv << '\n';
    }
  }
  for (const int views : args.views) {
    std::ofstream csv(out / ("accuracy_vs_tpc_T" + std::to_string(views) + ".csv"),
                      std::ios::binary);
    csv << "method";
    for (const int tpc : args.tpc) csv << ",TPC=" << tpc;
    csv << '\n';
    for (const auto& method : args.methods) {
      csv << method;
      for (const int tpc : args.tpc)
        csv << ',' << format_double(find_cell(method, views, tpc)->metrics.accuracy);
      csv << '\n';
    }
  }
  for (const auto& cell : cells) {
    std::ofstream csv(out / ("confusion_" + cell.method + "_T" + std::to_string(cell.views) +
                             "_tpc" + std::to_string(cell.tpc) + ".csv"),
                      std::ios::binary);
    for (Eigen::Index r = 0; r < cell.metrics.confusion.rows(); ++r) {
      for (Eigen::Index c = 0; c < cell.metrics.confusion.cols(); ++c) {
        if (c) csv << ',';
        csv << cell.metrics.confusion(r, c);
      }
      csv << '\n';
    }
  }
  std::cout << "benchmark: " << cells.size() << " cells -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// chain-trace

struct ChainTraceArgs {
  std::string dict_dir, dict_matrix, dict_labels;
  std::string test, test_meta;
  int sample = 0;
  int target_class = 1;
  std::string out = "trace.csv";
  HyperOpts hyper;
};

void run_chain_trace(const ChainTraceArgs& args) {
  args.hyper.params.validate();
  const Dictionary dict = load_dict_options(args.dict_dir, args.dict_matrix, args.dict_labels);
  const auto pool = read_pool(args.test, args.test_meta);
  require(args.sample >= 0 && args.sample < static_cast<int>(pool.size()),
          "chain-trace: --sample out of range");
  int internal_class = 0;
  for (int r = 1; r <= dict.num_classes(); ++r)
    if (dict.label(r) == args.target_class) internal_class = r;
  require(internal_class != 0,
          "chain-trace: no dictionary class labeled " + std::to_string(args.target_class));

  Vec y = pool[args.sample].features;
  if (y.norm() > 0.0) y /= y.norm();
  const auto prior =
      build_inclusion_matrix(dict, internal_class, 1, args.hyper.kappa_in, args.hyper.kappa_out);
  ChainConfig cfg = args.hyper.chain;
  cfg.seed = args.hyper.seed;
  cfg.retain_gamma_sequence = true;
  const ChainTrace trace =
      run_chain(dict, y, prior.kappa.row(0).transpose(), args.hyper.params, cfg);

  std::ofstream csv(args.out, std::ios::binary);
  if (!csv) throw IoError("chain-trace: cannot open " + args.out);
  csv << "iteration,atom_index,gamma_value\n";
  for (std::size_t s = 0; s < trace.gamma_sequence.size(); ++s) {
    const long iteration = cfg.burn_in + 1 + static_cast<long>(s) * cfg.thin;
    for (Eigen::Index i = 0; i < trace.gamma_sequence[s].size(); ++i)
      csv << iteration << ',' << i << ',' << trace.gamma_sequence[s][i] << '\n';
  }
  if (!csv) throw IoError("chain-trace: write failed for " + args.out);

  const SupportVec support = select_support(trace, cfg.inclusion_threshold);
  std::cout << "chain-trace: kept " << trace.samples_kept << " sweeps, selected "
            << support.sum() << " atoms:";
  for (Eigen::Index i = 0; i < support.size(); ++i)
    if (support[i] == 1)
      std::cout << " " << i << " (freq " << format_double(trace.inclusion_freq[i]) << ")";
  std::cout << " -> " << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task sparse classification with collaborative spike-and-slab priors"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic multi-view dataset");
  synth->set_config("--config", "", "key=value config file (flags win)");
  add_synth_options(synth, synth_args.spec);
  synth->add_option("--tpc", synth_args.tpc, "training vectors per class")->capture_default_str();
  synth->add_option("--seed", synth_args.spec.seed, "dataset seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "output directory")->required();

  BuildDictArgs build_args;
  auto* build = app.add_subcommand("build-dict", "build a normalized dictionary");
  build->set_config("--config", "", "key=value config file (flags win)");
  build->add_option("--train", build_args.train, "training matrix CSV");
  build->add_option("--labels", build_args.labels, "class id per column, one per line");
  build->add_option("--images", build_args.images, "image directory <root>/<class>/<files>");
  build->add_option("--size", build_args.size, "target image size HxW")->capture_default_str();
  build->add_option("--out", build_args.out, "output directory")->required();

  ClassifyArgs classify_args;
  auto* cls = app.add_subcommand("classify", "classify sampled multi-view test matrices");
  cls->set_config("--config", "", "key=value config file (flags win)");
  cls->add_option("--dict", classify_args.dict_dir, "dictionary directory from build-dict");
  cls->add_option("--dict-matrix", classify_args.dict_matrix, "dictionary matrix CSV");
  cls->add_option("--dict-labels", classify_args.dict_labels, "dictionary label sidecar");
  cls->add_option("--test", classify_args.test, "test pool matrix CSV")->required();
  cls->add_option("--test-meta", classify_args.test_meta, "test pool metadata CSV")->required();
  cls->add_option("--views", classify_args.views, "views per test matrix (T)")
      ->capture_default_str();
  cls->add_option("--trials", classify_args.trials, "number of sampled test matrices")
      ->capture_default_str();
  cls->add_option("--method", classify_args.hyper.method, "michs|src_l1")->capture_default_str();
  cls->add_option("--out", classify_args.out, "results CSV path")->capture_default_str();
  add_model_options(cls, classify_args.hyper);

  BenchmarkArgs bench_args;
  bench_args.hyper.chain.max_iter = 1000;
  bench_args.hyper.chain.burn_in = 200;
  auto* bench = app.add_subcommand("benchmark", "accuracy sweep over (method, T, TPC)");
  bench->set_config("--config", "", "key=value config file (flags win)");
  add_synth_options(bench, bench_args.spec);
  bench->add_option("--trials", bench_args.trials, "trials per cell")->capture_default_str();
  bench->add_option("--views", bench_args.views, "comma-separated T values")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--tpc", bench_args.tpc, "comma-separated TPC values")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--methods", bench_args.methods, "comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--out", bench_args.out, "output directory")->required();
  add_model_options(bench, bench_args.hyper);

  ChainTraceArgs trace_args;
  auto* trace = app.add_subcommand("chain-trace", "dump the Gibbs support sequence");
  trace->set_config("--config", "", "key=value config file (flags win)");
  trace->add_option("--dict", trace_args.dict_dir, "dictionary directory from build-dict");
  trace->add_option("--dict-matrix", trace_args.dict_matrix, "dictionary matrix CSV");
  trace->add_option("--dict-labels", trace_args.dict_labels, "dictionary label sidecar");
  trace->add_option("--test", trace_args.test, "test pool matrix CSV")->required();
  trace->add_option("--test-meta", trace_args.test_meta, "test pool metadata CSV")->required();
  trace->add_option("--sample", trace_args.sample, "pool column to trace")->capture_default_str();
  trace->add_option("--target-class", trace_args.target_class, "class label whose prior is used")
      ->capture_default_str();
  trace->add_option("--out", trace_args.out, "trace CSV path")->capture_default_str();
  add_model_options(trace, trace_args.hyper);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) run_synth(synth_args);
    if (build->parsed()) run_build_dict(build_args);
    if (cls->parsed()) run_classify(classify_args);
    if (bench->parsed()) run_benchmark(bench_args);
    if (trace->parsed()) run_chain_trace(trace_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
