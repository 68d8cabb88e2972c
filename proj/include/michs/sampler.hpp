#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "michs/common.hpp"
#include "michs/model.hpp"
#include "michs/rng.hpp"

namespace michs {

struct ChainConfig {
  int max_iter = 5000;
  int burn_in = 500;
  double inclusion_threshold = 0.5;
  std::uint64_t seed = 0;
  int thin = 1;
  bool retain_gamma_sequence = false;

  void validate() const {
    require(max_iter >= 1, "ChainConfig: max_iter must be >= 1");
    require(burn_in >= 0 && burn_in < max_iter,
            "ChainConfig: need 0 <= burn_in < max_iter");
    require(inclusion_threshold > 0.0 && inclusion_threshold < 1.0,
            "ChainConfig: inclusion_threshold must lie in (0,1)");
    require(thin >= 1, "ChainConfig: thin must be >= 1");
    require(kept_samples() >= 1, "ChainConfig: no samples kept after burn-in/thinning");
  }

  long kept_samples() const {
    if (max_iter <= burn_in) return 0;
    return (static_cast<long>(max_iter) - burn_in + thin - 1) / thin;
  }
};

// Record of one chain: per-atom inclusion frequencies over the kept sweeps,
// plus the full support sequence when diagnostics retention is on.
struct ChainTrace {
  Vec inclusion_freq;
  long samples_kept = 0;
  std::vector<SupportVec> gamma_sequence;
};

namespace detail {

// Joint draw of the active coefficients from the conjugate Gaussian posterior
// with precision P = A_S'A_S / sigma_n2 + (lambda/sigma2) I and mean
// P^{-1} A_S'y / sigma_n2. Draw order follows ascending atom index.
inline void draw_active_code(const Dictionary& dict, const Vec& aty,
                             const std::vector<Eigen::Index>& active,
                             const PriorParams& params, Rng& rng, Vec& x_out) {
  const auto k = static_cast<Eigen::Index>(active.size());
  if (k == 0) return;
  Mat precision(k, k);
  Vec rhs(k);
  const double inv_noise = 1.0 / params.sigma_n2;
  const double slab_prec = params.lambda / params.sigma2;
  for (Eigen::Index a = 0; a < k; ++a) {
    rhs[a] = aty[active[a]] * inv_noise;
    for (Eigen::Index b = 0; b < k; ++b)
      precision(a, b) = dict.gram()(active[a], active[b]) * inv_noise;
    precision(a, a) += slab_prec;
  }
  Eigen::LLT<Mat> llt(precision);
  Vec z(k);
  for (Eigen::Index a = 0; a < k; ++a) z[a] = rng.normal();
  // x = mean + U^{-1} z with P = U'U, so cov(x) = P^{-1}.
  Vec x_active = llt.solve(rhs);
  x_active += llt.matrixU().solve(z);
  for (Eigen::Index a = 0; a < k; ++a) x_out[active[a]] = x_active[a];
}

inline double logistic(double log_odds) {
  if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

}  // namespace detail

// One draw of the full coefficient vector given a fixed support. Entries off
// the support are exactly zero; an empty support consumes no randomness.
inline Vec sample_code_given_support(const Dictionary& dict, const Vec& y,
                                     const SupportVec& gamma, const PriorParams& params,
                                     Rng& rng) {
  params.validate();
  require(y.size() == dict.feature_dim(), "sample_code_given_support: y dimension mismatch");
  require(gamma.size() == dict.atom_count(),
          "sample_code_given_support: gamma dimension mismatch");
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    require(gamma[i] == 0 || gamma[i] == 1, "sample_code_given_support: gamma must be binary");
    if (gamma[i] == 1) active.push_back(i);
  }
  Vec x = Vec::Zero(dict.atom_count());
  if (active.empty()) return x;
  const Vec aty = dict.atoms().transpose() * y;
  detail::draw_active_code(dict, aty, active, params, rng, x);
  return x;
}

// Collapsed support odds for one atom. residual_excl_i is y minus every other
// active atom's contribution; x_i itself is marginalized over the slab, so the
// move stays nondegenerate under the point-mass spike. With tau2 = sigma2/lambda:
//   log odds = logit(kappa_i) - (1/2) log(1 + tau2 |a_i|^2 / sigma_n2)
//            + tau2 (a_i'r)^2 / (2 sigma_n2^2 (1 + tau2 |a_i|^2 / sigma_n2)).
inline double support_log_odds(const Dictionary& dict, const Vec& residual_excl_i,
                               Eigen::Index atom_index, const PriorParams& params,
                               double kappa_i) {
  params.validate();
  require(kappa_i > 0.0 && kappa_i < 1.0, "support_log_odds: kappa must lie in (0,1)");
  require(atom_index >= 0 && atom_index < dict.atom_count(),
          "support_log_odds: atom index out of range");
  require(residual_excl_i.size() == dict.feature_dim(),
          "support_log_odds: residual dimension mismatch");
  const double tau2 = params.slab_var();
  const double sn2 = params.sigma_n2;
  const double atom_sq = dict.gram()(atom_index, atom_index);
  const double q = tau2 * atom_sq / sn2;
  const double corr = dict.atoms().col(atom_index).dot(residual_excl_i);
  return std::log(kappa_i / (1.0 - kappa_i)) - 0.5 * std::log1p(q) +
         tau2 * corr * corr / (2.0 * sn2 * sn2 * (1.0 + q));
}

// Systematic-scan Gibbs chain over (x, gamma). Initialization: gamma all ones
// and x the ridge estimate with the model's own lambda*sigma_n2/sigma2
// regularizer. Each sweep redraws x given gamma, then updates every gamma_i in
// ascending order from the collapsed conditional (the partially updated gamma
// is in effect), refreshing x_i from its slab posterior whenever the atom ends
// the step active. Inclusion frequencies accumulate after burn_in.
inline ChainTrace run_chain(const Dictionary& dict, const Vec& y, const Vec& kappa_row,
                            const PriorParams& params, const ChainConfig& cfg) {
  params.validate();
  cfg.validate();
  const Eigen::Index n = dict.atom_count();
  require(y.size() == dict.feature_dim(), "run_chain: y dimension mismatch");
  require(kappa_row.size() == n, "run_chain: kappa row length mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    require(kappa_row[i] > 0.0 && kappa_row[i] < 1.0,
            "run_chain: kappa entries must lie in (0,1)");

  Rng rng(cfg.seed);
  const double tau2 = params.slab_var();
  const double sn2 = params.sigma_n2;
  const double slab_prec = params.lambda / params.sigma2;
  const Vec aty = dict.atoms().transpose() * y;

  // Precompute the per-atom pieces of the collapsed odds.
  Vec prior_logit(n), half_log_det(n), quad_scale(n), post_var(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double atom_sq = dict.gram()(i, i);
    const double q = tau2 * atom_sq / sn2;
    prior_logit[i] = std::log(kappa_row[i] / (1.0 - kappa_row[i]));
    half_log_det[i] = 0.5 * std::log1p(q);
    quad_scale[i] = tau2 / (2.0 * sn2 * sn2 * (1.0 + q));
    post_var[i] = 1.0 / (atom_sq / sn2 + slab_prec);
  }

  SupportVec gamma = SupportVec::Ones(n);
  Vec x(n);
  {
    // Ridge start: (A'A + (lambda*sigma_n2/sigma2) I) x = A'y.
    Mat reg = dict.gram();
    reg.diagonal().array() += params.lambda * sn2 / params.sigma2;
    x = Eigen::LLT<Mat>(reg).solve(aty);
  }
  Vec residual = y - dict.atoms() * x;

  std::vector<Eigen::Index> active;
  active.reserve(n);
  Vec freq = Vec::Zero(n);
  ChainTrace trace;
  trace.samples_kept = 0;
  if (cfg.retain_gamma_sequence) trace.gamma_sequence.reserve(cfg.kept_samples());

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    // Block draw of x given the current support.
    active.clear();
    for (Eigen::Index i = 0; i < n; ++i)
      if (gamma[i] == 1) active.push_back(i);
    x.setZero();
    detail::draw_active_code(dict, aty, active, params, rng, x);
    residual = y;
    for (const Eigen::Index i : active) residual -= dict.atoms().col(i) * x[i];

    // Sweep the supports; residual always equals y minus active contributions.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x[i] != 0.0) residual += dict.atoms().col(i) * x[i];
      const double corr = dict.atoms().col(i).dot(residual);
      const double log_odds = prior_logit[i] - half_log_det[i] + quad_scale[i] * corr * corr;
      if (rng.uniform() < detail::logistic(log_odds)) {
        gamma[i] = 1;
        const double mean = post_var[i] * corr / sn2;
        x[i] = mean + std::sqrt(post_var[i]) * rng.normal();
        residual -= dict.atoms().col(i) * x[i];
      } else {
        gamma[i] = 0;
        x[i] = 0.0;
      }
    }

    if (iter > cfg.burn_in && (iter - cfg.burn_in - 1) % cfg.thin == 0) {
      for (Eigen::Index i = 0; i < n; ++i) freq[i] += gamma[i];
      ++trace.samples_kept;
      if (cfg.retain_gamma_sequence) trace.gamma_sequence.push_back(gamma);
    }
  }

  trace.inclusion_freq = freq / static_cast<double>(trace.samples_kept);
  return trace;
}

// gamma*_i = 1 iff the inclusion frequency strictly exceeds the threshold.
inline SupportVec select_support(const ChainTrace& trace, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "select_support: threshold must lie in (0,1)");
  SupportVec gamma(trace.inclusion_freq.size());
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    gamma[i] = trace.inclusion_freq[i] > threshold ? 1 : 0;
  return gamma;
}

}  // namespace michs
