#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "michs/common.hpp"
#include "michs/model.hpp"
#include "michs/sampler.hpp"

namespace michs {

// Exact contribution values on a selected support:
//   ((sigma2/sigma_n2) A_S'A_S + lambda I) x_S = (sigma2/sigma_n2) A_S'y,
// inactive coordinates exactly zero. lambda > 0 keeps the system positive
// definite, so an empty support is the only special case (zero vector).
inline Vec ridge_on_support(const Dictionary& dict, const Vec& y, const SupportVec& gamma,
                            const PriorParams& params) {
  params.validate();
  require(y.size() == dict.feature_dim(), "ridge_on_support: y dimension mismatch");
  require(gamma.size() == dict.atom_count(), "ridge_on_support: gamma dimension mismatch");
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    require(gamma[i] == 0 || gamma[i] == 1, "ridge_on_support: gamma must be binary");
    if (gamma[i] == 1) active.push_back(i);
  }
  Vec x = Vec::Zero(dict.atom_count());
  const auto k = static_cast<Eigen::Index>(active.size());
  if (k == 0) return x;

  const double w = params.data_weight();
  Mat normal(k, k);
  Vec rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    rhs[a] = w * dict.atoms().col(active[a]).dot(y);
    for (Eigen::Index b = 0; b < k; ++b)
      normal(a, b) = w * dict.gram()(active[a], active[b]);
    normal(a, a) += params.lambda;
  }
  const Vec x_active = Eigen::LLT<Mat>(normal).solve(rhs);
  for (Eigen::Index a = 0; a < k; ++a) x[active[a]] = x_active[a];
  return x;
}

// Per-task cost, the bracketed term of the decomposed objective:
//   (sigma2/sigma_n2) |y - A x|^2 + lambda |x|^2 + sum_{i active} rho_i.
// The penalty sum runs over active coordinates in ascending order so repeated
// evaluations are bit-identical.
inline double task_objective(const Dictionary& dict, const Vec& y, const Vec& x,
                             const SupportVec& gamma, const Vec& rho_row,
                             const PriorParams& params) {
  params.validate();
  require(y.size() == dict.feature_dim(), "task_objective: y dimension mismatch");
  require(x.size() == dict.atom_count(), "task_objective: x dimension mismatch");
  require(rho_row.size() == dict.atom_count(), "task_objective: rho row length mismatch");
  require_spike_consistent(x, gamma, "task_objective");

  const Vec residual = y - dict.atoms() * x;
  double value = params.data_weight() * residual.squaredNorm();
  value += params.lambda * x.squaredNorm();
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    if (gamma[i] == 1) value += rho_row[i];
  return value;
}

struct TaskSolution {
  Vec code;
  SupportVec support;
  double objective = 0.0;
};

// Full single-task pipeline: Gibbs support search, majority-frequency support
// selection, ridge refit on the survivors, then the task cost.
inline TaskSolution solve_task(const Dictionary& dict, const Vec& y, const Vec& kappa_row,
                               const PriorParams& params, const ChainConfig& cfg) {
  const ChainTrace trace = run_chain(dict, y, kappa_row, params, cfg);
  TaskSolution sol;
  sol.support = select_support(trace, cfg.inclusion_threshold);
  sol.code = ridge_on_support(dict, y, sol.support, params);
  sol.objective = task_objective(dict, y, sol.code, sol.support,
                                 rho_row(params, kappa_row), params);
  return sol;
}

struct ClassSolution {
  CodeMatrix codes;
  SupportMat supports;
  double objective = 0.0;
};

// Solves the T tasks independently and assembles (X*, Gamma*, L). Task t uses
// seed task_seeds[t] when given, otherwise mix_seed(cfg.seed, t) tagged with
// the task domain. The objective accumulates in ascending task order.
inline ClassSolution solve_class(const Dictionary& dict, const ObservationMatrix& observations,
                                 const InclusionMatrix& prior, const PriorParams& params,
                                 const ChainConfig& cfg,
                                 std::span<const std::uint64_t> task_seeds = {}) {
  const Eigen::Index num_tasks = observations.cols();
  require(num_tasks >= 1, "solve_class: need at least one observation column");
  require(observations.rows() == dict.feature_dim(), "solve_class: observation dimension mismatch");
  require(prior.kappa.rows() == num_tasks, "solve_class: inclusion matrix row count != T");
  require(prior.kappa.cols() == dict.atom_count(), "solve_class: inclusion matrix column count != n");
  require(task_seeds.empty() || static_cast<Eigen::Index>(task_seeds.size()) == num_tasks,
          "solve_class: task seed count != T");

  ClassSolution out;
  out.codes.resize(dict.atom_count(), num_tasks);
  out.supports.resize(dict.atom_count(), num_tasks);
  out.objective = 0.0;
  for (Eigen::Index t = 0; t < num_tasks; ++t) {
    ChainConfig task_cfg = cfg;
    task_cfg.seed = task_seeds.empty()
                        ? mix_seed(mix_seed(cfg.seed, seed_domain::kTask), static_cast<std::uint64_t>(t))
                        : task_seeds[t];
    const TaskSolution sol =
        solve_task(dict, observations.col(t), prior.kappa.row(t).transpose(), params, task_cfg);
    out.codes.col(t) = sol.code;
    out.supports.col(t) = sol.support;
    out.objective += sol.objective;
  }
  return out;
}

}  // namespace michs
