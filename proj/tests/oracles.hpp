#pragma once

// Brute-force and independently-derived reference implementations used only by
// tests. Everything here deliberately avoids the library's computational
// shortcuts: marginal likelihoods go through dense m x m covariance
// factorizations, objectives through plain scalar loops, and linear systems
// through full-pivot LU.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "michs/michs.hpp"

namespace oracle {

using michs::Mat;
using michs::SupportVec;
using michs::Vec;

inline SupportVec mask_to_gamma(std::uint32_t mask, Eigen::Index n) {
  SupportVec gamma = SupportVec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask & (1u << i)) gamma[i] = 1;
  return gamma;
}

// log N(y; 0, sigma_n2 I + tau2 A_S A_S') through a dense Cholesky of the
// m x m covariance; no Sherman-Morrison, no Gram shortcuts.
inline double log_marginal_given_support(const Mat& atoms, const Vec& y, std::uint32_t mask,
                                         const michs::PriorParams& params) {
  const Eigen::Index m = atoms.rows();
  Mat cov = params.sigma_n2 * Mat::Identity(m, m);
  const double tau2 = params.sigma2 / params.lambda;
  for (Eigen::Index i = 0; i < atoms.cols(); ++i)
    if (mask & (1u << i)) cov.noalias() += tau2 * atoms.col(i) * atoms.col(i).transpose();
  Eigen::LLT<Mat> llt(cov);
  const Vec solved = llt.solve(y);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (m * std::log(2.0 * std::numbers::pi) + log_det + y.dot(solved));
}

// Exact posterior over all 2^n supports, f(gamma | y) with X integrated out.
inline std::vector<double> enumerate_posterior(const Mat& atoms, const Vec& y,
                                               const Vec& kappa_row,
                                               const michs::PriorParams& params) {
  const Eigen::Index n = atoms.cols();
  const std::uint32_t count = 1u << n;
  std::vector<double> log_post(count);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    double lp = log_marginal_given_support(atoms, y, mask, params);
    for (Eigen::Index i = 0; i < n; ++i)
      lp += (mask & (1u << i)) ? std::log(kappa_row[i]) : std::log(1.0 - kappa_row[i]);
    log_post[mask] = lp;
    max_log = std::max(max_log, lp);
  }
  double total = 0.0;
  for (auto& lp : log_post) {
    lp = std::exp(lp - max_log);
    total += lp;
  }
  for (auto& lp : log_post) lp /= total;
  return log_post;
}

inline Vec posterior_inclusion_marginals(const Mat& atoms, const Vec& y, const Vec& kappa_row,
                                         const michs::PriorParams& params) {
  const auto post = enumerate_posterior(atoms, y, kappa_row, params);
  Vec marginals = Vec::Zero(atoms.cols());
  for (std::uint32_t mask = 0; mask < post.size(); ++mask)
    for (Eigen::Index i = 0; i < atoms.cols(); ++i)
      if (mask & (1u << i)) marginals[i] += post[mask];
  return marginals;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
  return 0.5 * tv;
}

// Exhaustive MAP search: every support scored by the library's refit and cost.
struct MapResult {
  std::uint32_t mask = 0;
  double objective = std::numeric_limits<double>::infinity();
};

inline MapResult enumerate_map(const michs::Dictionary& dict, const Vec& y, const Vec& rho_row,
                               const michs::PriorParams& params) {
  const Eigen::Index n = dict.atom_count();
  MapResult best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const SupportVec gamma = mask_to_gamma(mask, n);
    const Vec x = michs::ridge_on_support(dict, y, gamma, params);
    const double value = michs::task_objective(dict, y, x, gamma, rho_row, params);
    if (value < best.objective) {
      best.objective = value;
      best.mask = mask;
    }
  }
  return best;
}

// Matrix-form objective evaluated directly on (Y, X, Gamma) with Frobenius
// norms; verifies the per-task decomposition.
inline double frobenius_objective(const michs::Dictionary& dict, const Mat& y, const Mat& x,
                                  const michs::SupportMat& gamma, const Mat& rho,
                                  const michs::PriorParams& params) {
  const Mat residual = y - dict.atoms() * x;
  double value = (params.sigma2 / params.sigma_n2) * residual.squaredNorm() +
                 params.lambda * x.squaredNorm();
  for (Eigen::Index t = 0; t < gamma.cols(); ++t)
    for (Eigen::Index i = 0; i < gamma.rows(); ++i)
      if (gamma(i, t) == 1) value += rho(t, i);
  return value;
}

// Scalar-loop evaluation of the per-task cost; no Eigen reductions.
inline double naive_task_objective(const Mat& atoms, const Vec& y, const Vec& x,
                                   const SupportVec& gamma, const Vec& rho_row,
                                   const michs::PriorParams& params) {
  double data = 0.0;
  for (Eigen::Index r = 0; r < atoms.rows(); ++r) {
    double fit = 0.0;
    for (Eigen::Index i = 0; i < atoms.cols(); ++i) fit += atoms(r, i) * x[i];
    const double diff = y[r] - fit;
    data += diff * diff;
  }
  double smooth = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) smooth += x[i] * x[i];
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    if (gamma[i] == 1) penalty += rho_row[i];
  return (params.sigma2 / params.sigma_n2) * data + params.lambda * smooth + penalty;
}

// Reduced normal equations assembled from scratch and solved by full-pivot LU.
inline Vec dense_ridge(const Mat& atoms, const Vec& y, const SupportVec& gamma,
                       const michs::PriorParams& params) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    if (gamma[i] == 1) active.push_back(i);
  Vec x = Vec::Zero(atoms.cols());
  if (active.empty()) return x;
  const auto k = static_cast<Eigen::Index>(active.size());
  Mat sub(atoms.rows(), k);
  for (Eigen::Index a = 0; a < k; ++a) sub.col(a) = atoms.col(active[a]);
  const double w = params.sigma2 / params.sigma_n2;
  const Mat normal = w * sub.transpose() * sub + params.lambda * Mat::Identity(k, k);
  const Vec solved = normal.fullPivLu().solve(w * sub.transpose() * y);
  for (Eigen::Index a = 0; a < k; ++a) x[active[a]] = solved[a];
  return x;
}

// 1-D marginal likelihood ratio for one atom by adaptive Simpson quadrature:
//   integral of N(r; a x, sigma_n2 I) N(x; 0, tau2) dx over N(r; 0, sigma_n2 I).
inline double marginal_ratio_quadrature(const Vec& atom, const Vec& r,
                                        const michs::PriorParams& params) {
  const double tau2 = params.sigma2 / params.lambda;
  const double sn2 = params.sigma_n2;
  const auto log_num_integrand = [&](double x) {
    double ss = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double diff = r[i] - atom[i] * x;
      ss += diff * diff;
    }
    return -0.5 * ss / sn2 - 0.5 * x * x / tau2 -
           0.5 * std::log(2.0 * std::numbers::pi * tau2);
  };
  // Recenter at the integrand's peak so the exp stays in range.
  const double a2 = atom.squaredNorm();
  const double peak = (atom.dot(r) / sn2) / (a2 / sn2 + 1.0 / tau2);
  const double log_peak = log_num_integrand(peak);
  const auto f = [&](double x) { return std::exp(log_num_integrand(x) - log_peak); };
  const double width = 12.0 * std::sqrt(1.0 / (a2 / sn2 + 1.0 / tau2));

  std::function<double(double, double, double, double, double, int)> simpson =
      [&](double lo, double hi, double flo, double fhi, double fmid, int depth) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double flm = f(lmid), frm = f(rmid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (depth > 24 || std::abs(left + right - whole) < 1e-13 * std::abs(left + right))
      return left + right;
    return simpson(lo, mid, flo, fmid, flm, depth + 1) +
           simpson(mid, hi, fmid, fhi, frm, depth + 1);
  };
  const double lo = peak - width, hi = peak + width;
  const double integral =
      simpson(lo, hi, f(lo), f(hi), f(0.5 * (lo + hi)), 0) * std::exp(log_peak);
  const double log_denom = -0.5 * r.squaredNorm() / sn2;
  return integral / std::exp(log_denom);
}

}  // namespace oracle
