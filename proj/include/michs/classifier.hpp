#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "michs/common.hpp"
#include "michs/model.hpp"
#include "michs/solver.hpp"

namespace michs {

// Class assignment can score the full objective or the reconstruction
// residual alone.
enum class AssignBy { kCost, kResidual };

struct ClassificationResult {
  int predicted_class = 1;
  Vec per_class_cost;
  std::vector<ClassSolution> per_class_solutions;  // retained on request
  bool l1_converged = true;                        // baseline only
};

inline int argmin_lowest_index(const Vec& costs) {
  require(costs.size() >= 1, "argmin_lowest_index: empty cost vector");
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < costs.size(); ++r)
    if (costs[r] < costs[best]) best = r;
  return static_cast<int>(best) + 1;
}

namespace detail {

inline Mat normalized_columns(const Mat& y) {
  Mat out = y;
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    const double norm = out.col(t).norm();
    if (norm > 0.0) out.col(t) /= norm;
  }
  return out;
}

}  // namespace detail

// Runs the full per-class pipeline with explicit per-class chain seeds. The
// public classify() derives those seeds from cfg.seed; this variant exists so
// callers can pin identical seeds across classes.
inline ClassificationResult classify_with_class_seeds(
    const Dictionary& dict, const ObservationMatrix& observations, const PriorParams& params,
    double kappa_in, double kappa_out, const ChainConfig& cfg,
    std::span<const std::uint64_t> class_seeds, AssignBy assign_by = AssignBy::kCost,
    bool retain_solutions = false) {
  params.validate();
  cfg.validate();
  const int num_classes = dict.num_classes();
  require(observations.cols() >= 1, "classify: need at least one observation column");
  require(observations.rows() == dict.feature_dim(), "classify: observation dimension mismatch");
  require(static_cast<int>(class_seeds.size()) == num_classes,
          "classify: class seed count != C");
  const auto num_tasks = static_cast<int>(observations.cols());
  const Mat y = detail::normalized_columns(observations);

  ClassificationResult result;
  result.per_class_cost.resize(num_classes);
  if (retain_solutions) result.per_class_solutions.resize(num_classes);
  for (int r = 1; r <= num_classes; ++r) {
    const InclusionMatrix prior = build_inclusion_matrix(dict, r, num_tasks, kappa_in, kappa_out);
    ChainConfig class_cfg = cfg;
    class_cfg.seed = class_seeds[r - 1];
    ClassSolution solution = solve_class(dict, y, prior, params, class_cfg);
    if (assign_by == AssignBy::kCost) {
      result.per_class_cost[r - 1] = solution.objective;
    } else {
      result.per_class_cost[r - 1] = (y - dict.atoms() * solution.codes).squaredNorm();
    }
    if (retain_solutions) result.per_class_solutions[r - 1] = std::move(solution);
  }
  result.predicted_class = argmin_lowest_index(result.per_class_cost);
  return result;
}

// MICHS classification: for each class build the class-indicator prior, solve
// the T tasks, and pick the class with the smallest cost (lowest index on
// ties). Observation columns are unit-normalized first so the default
// variance scales are data-independent. Deterministic given cfg.seed.
inline ClassificationResult classify(const Dictionary& dict, const ObservationMatrix& observations,
                                     const PriorParams& params, double kappa_in, double kappa_out,
                                     const ChainConfig& cfg, AssignBy assign_by = AssignBy::kCost,
                                     bool retain_solutions = false) {
  std::vector<std::uint64_t> class_seeds(dict.num_classes());
  for (int r = 1; r <= dict.num_classes(); ++r)
    class_seeds[r - 1] =
        mix_seed(mix_seed(cfg.seed, seed_domain::kClass), static_cast<std::uint64_t>(r));
  return classify_with_class_seeds(dict, observations, params, kappa_in, kappa_out, cfg,
                                   class_seeds, assign_by, retain_solutions);
}

struct BaselineConfig {
  double l1_penalty = 0.05;
  int max_iterations = 2000;
  double step_tolerance = 1e-7;

  void validate() const {
    require(l1_penalty >= 0.0, "BaselineConfig: l1_penalty must be >= 0");
    require(max_iterations >= 1, "BaselineConfig: max_iterations must be >= 1");
    require(step_tolerance > 0.0, "BaselineConfig: step_tolerance must be > 0");
  }
};

struct IstaResult {
  Vec x;
  bool converged = false;
  int iterations = 0;
};

// Iterative soft-thresholding for min |y - Ax|^2 + 2*penalty*|x|_1 with the
// fixed step 1/L, L the spectral norm of A'A. The iterate objective is
// non-increasing at this step size.
inline IstaResult ista_solve(const Dictionary& dict, const Vec& y, const BaselineConfig& cfg) {
  cfg.validate();
  require(y.size() == dict.feature_dim(), "ista_solve: y dimension mismatch");
  const double lipschitz = dict.gram_spectral_norm();
  const double step = 1.0 / lipschitz;
  const double shrink = cfg.l1_penalty * step;
  const Vec aty = dict.atoms().transpose() * y;

  IstaResult res;
  res.x = Vec::Zero(dict.atom_count());
  Vec grad_point(dict.atom_count());
  for (res.iterations = 1; res.iterations <= cfg.max_iterations; ++res.iterations) {
    grad_point = res.x - step * (dict.gram() * res.x - aty);
    double step_norm2 = 0.0;
    for (Eigen::Index i = 0; i < grad_point.size(); ++i) {
      const double v = grad_point[i];
      const double next = v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
      const double delta = next - res.x[i];
      step_norm2 += delta * delta;
      res.x[i] = next;
    }
    if (std::sqrt(step_norm2) <= cfg.step_tolerance * std::max(1.0, res.x.norm())) {
      res.converged = true;
      break;
    }
  }
  return res;
}

// SRC baseline: per task, an l1 sparse code over the whole dictionary, then
// the class with the smallest class-restricted reconstruction residual wins
// the task's vote. Tasks fuse by majority vote, lowest class index on ties.
// The reported per-class costs are the summed residuals.
inline ClassificationResult src_l1_classify(const Dictionary& dict,
                                            const ObservationMatrix& observations,
                                            const BaselineConfig& cfg) {
  cfg.validate();
  const int num_classes = dict.num_classes();
  require(observations.cols() >= 1, "src_l1_classify: need at least one observation column");
  require(observations.rows() == dict.feature_dim(),
          "src_l1_classify: observation dimension mismatch");
  const Mat y = detail::normalized_columns(observations);

  ClassificationResult result;
  result.per_class_cost = Vec::Zero(num_classes);
  std::vector<int> votes(num_classes, 0);
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    const IstaResult ista = ista_solve(dict, y.col(t), cfg);
    result.l1_converged = result.l1_converged && ista.converged;
    Vec residuals(num_classes);
    for (int r = 1; r <= num_classes; ++r) {
      const auto [begin, end] = dict.class_range(r);
      Vec reconstruction = y.col(t);
      reconstruction.noalias() -=
          dict.atoms().middleCols(begin, end - begin) * ista.x.segment(begin, end - begin);
      residuals[r - 1] = reconstruction.norm();
    }
    ++votes[argmin_lowest_index(residuals) - 1];
    result.per_class_cost += residuals;
  }
  int best = 0;
  for (int r = 1; r < num_classes; ++r)
    if (votes[r] > votes[best]) best = r;
  result.predicted_class = best + 1;
  return result;
}

enum class Method { kMichs, kSrcL1 };

struct EvalConfig {
  Method method = Method::kMichs;
  PriorParams params;
  double kappa_in = 0.4;
  double kappa_out = 0.01;
  ChainConfig chain;
  BaselineConfig baseline;
  AssignBy assign_by = AssignBy::kCost;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

struct EvalMetrics {
  double accuracy = 0.0;
  Vec per_class_accuracy;
  Eigen::MatrixXi confusion;  // row = true class, column = predicted
  double mean_wall_ms = 0.0;
  long num_samples = 0;
};

// Classifies every sample in the test set and accumulates accuracy, per-class
// accuracy, the confusion matrix, and mean per-sample wall time. Sample i uses
// the derived seed mix(seed, kSample, i); samples may run on several threads
// with results gathered in index order, so the metrics do not depend on
// scheduling.
inline EvalMetrics evaluate(const Dictionary& dict,
                            const std::vector<LabeledObservation>& test_set,
                            const EvalConfig& cfg) {
  require(!test_set.empty(), "evaluate: empty test set");
  const int num_classes = dict.num_classes();
  for (const auto& sample : test_set)
    require(sample.true_class >= 1 && sample.true_class <= num_classes,
            "evaluate: sample true class out of range");

  const auto count = static_cast<long>(test_set.size());
  std::vector<int> predicted(count, 0);
  std::vector<double> wall_ms(count, 0.0);
  parallel_for(count, cfg.threads, [&](long i) {
    const auto start = std::chrono::steady_clock::now();
    if (cfg.method == Method::kMichs) {
      ChainConfig chain = cfg.chain;
      chain.seed = mix_seed(mix_seed(cfg.seed, seed_domain::kSample), static_cast<std::uint64_t>(i));
      predicted[i] = classify(dict, test_set[i].views, cfg.params, cfg.kappa_in, cfg.kappa_out,
                              chain, cfg.assign_by)
                         .predicted_class;
    } else {
      predicted[i] = src_l1_classify(dict, test_set[i].views, cfg.baseline).predicted_class;
    }
    wall_ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                     .count();
  });

  EvalMetrics metrics;
  metrics.num_samples = count;
  metrics.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
  long correct = 0;
  double total_ms = 0.0;
  for (long i = 0; i < count; ++i) {
    metrics.confusion(test_set[i].true_class - 1, predicted[i] - 1) += 1;
    if (predicted[i] == test_set[i].true_class) ++correct;
    total_ms += wall_ms[i];
  }
  metrics.accuracy = static_cast<double>(correct) / static_cast<double>(count);
  metrics.mean_wall_ms = total_ms / static_cast<double>(count);
  metrics.per_class_accuracy.resize(num_classes);
  for (int r = 0; r < num_classes; ++r) {
    const long row_total = metrics.confusion.row(r).sum();
    metrics.per_class_accuracy[r] =
        row_total > 0 ? static_cast<double>(metrics.confusion(r, r)) / static_cast<double>(row_total)
                      : std::nan("");
  }
  return metrics;
}

}  // namespace michs
