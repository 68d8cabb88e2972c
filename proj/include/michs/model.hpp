#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "michs/common.hpp"

namespace michs {

// Hyperparameters of the spike-and-slab hierarchy. The slab on an active
// coefficient is N(0, sigma2 / lambda); the observation noise is N(0, sigma_n2 I).
struct PriorParams {
  double sigma2 = 1.0;
  double sigma_n2 = 0.01;
  double lambda = 1.0;

  void validate() const {
    require(sigma2 > 0.0, "PriorParams: sigma2 must be > 0");
    require(sigma_n2 > 0.0, "PriorParams: sigma_n2 must be > 0");
    require(lambda > 0.0, "PriorParams: lambda must be > 0");
  }

  double slab_var() const { return sigma2 / lambda; }
  // Weight of the squared-residual term in the objective.
  double data_weight() const { return sigma2 / sigma_n2; }
};

struct LabeledVector {
  Vec features;
  int class_id = 0;
  int view_tag = 0;
};

// Column-normalized atom matrix with a contiguous class labeling. Immutable
// after construction; the Gram matrix and its spectral norm are precomputed so
// concurrent solvers can share one instance read-only.
class Dictionary {
 public:
  // atoms must already have unit-norm columns; class ids must be grouped in
  // ascending runs. Use build_dictionary to get both from raw inputs.
  Dictionary(Mat atoms, std::vector<int> class_of)
      : atoms_(std::move(atoms)), class_of_(std::move(class_of)) {
    require(atoms_.rows() >= 1 && atoms_.cols() >= 1,
            "Dictionary: needs at least one row and one column");
    require(static_cast<Eigen::Index>(class_of_.size()) == atoms_.cols(),
            "Dictionary: one class id per column required");
    for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
      require(std::abs(atoms_.col(j).norm() - 1.0) < 1e-9,
              "Dictionary: column " + std::to_string(j) + " is not unit-norm");
    }
    // Contiguous ascending runs of equal ids partition the columns.
    Eigen::Index begin = 0;
    for (Eigen::Index j = 1; j <= atoms_.cols(); ++j) {
      if (j == atoms_.cols() || class_of_[j] != class_of_[begin]) {
        require(ranges_.empty() || class_of_[begin] > labels_.back(),
                "Dictionary: class ids must be grouped in ascending order");
        labels_.push_back(class_of_[begin]);
        ranges_.emplace_back(begin, j);
        begin = j;
      }
    }
    // Internal ids are 1..C in label order.
    for (std::size_t r = 0; r < ranges_.size(); ++r)
      for (Eigen::Index j = ranges_[r].first; j < ranges_[r].second; ++j)
        class_of_[j] = static_cast<int>(r) + 1;

    gram_.noalias() = atoms_.transpose() * atoms_;
    gram_spectral_norm_ = power_iteration_norm(gram_);
  }

  Eigen::Index feature_dim() const { return atoms_.rows(); }
  Eigen::Index atom_count() const { return atoms_.cols(); }
  int num_classes() const { return static_cast<int>(ranges_.size()); }

  const Mat& atoms() const { return atoms_; }
  const Mat& gram() const { return gram_; }
  double gram_spectral_norm() const { return gram_spectral_norm_; }

  // Internal class id of a column, in 1..C.
  int class_of(Eigen::Index col) const { return class_of_[col]; }
  // Column range [begin, end) of a class, internal id in 1..C.
  std::pair<Eigen::Index, Eigen::Index> class_range(int class_id) const {
    require(class_id >= 1 && class_id <= num_classes(),
            "Dictionary: unknown class id " + std::to_string(class_id));
    return ranges_[class_id - 1];
  }
  // Original label of an internal class id (identity when inputs were 1..C).
  int label(int class_id) const {
    require(class_id >= 1 && class_id <= num_classes(),
            "Dictionary: unknown class id " + std::to_string(class_id));
    return labels_[class_id - 1];
  }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<int> column_labels() const {
    std::vector<int> out(class_of_.size());
    for (std::size_t j = 0; j < class_of_.size(); ++j) out[j] = labels_[class_of_[j] - 1];
    return out;
  }

 private:
  static double power_iteration_norm(const Mat& g) {
    const Eigen::Index n = g.rows();
    Vec v = Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lam = 0.0;
    for (int it = 0; it < 500; ++it) {
      Vec w = g * v;
      const double norm = w.norm();
      if (norm == 0.0) return 0.0;
      w /= norm;
      const double next = w.dot(g * w);
      const bool settled = std::abs(next - lam) <= 1e-12 * std::max(1.0, std::abs(next));
      lam = next;
      v.swap(w);
      if (settled) break;
    }
    return lam;
  }

  Mat atoms_;
  std::vector<int> class_of_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges_;
  std::vector<int> labels_;
  Mat gram_;
  double gram_spectral_norm_ = 0.0;
};

// Groups training vectors by ascending class id, normalizes each column to
// unit Euclidean norm, and records the per-class column ranges.
inline Dictionary build_dictionary(const std::vector<LabeledVector>& images) {
  require(!images.empty(), "build_dictionary: no training vectors given");
  const Eigen::Index m = images.front().features.size();
  require(m > 0, "build_dictionary: image 0 has zero length");
  for (std::size_t k = 0; k < images.size(); ++k) {
    require(images[k].features.size() == m,
            "build_dictionary: dimension mismatch at image " + std::to_string(k) +
                " (got " + std::to_string(images[k].features.size()) + ", expected " +
                std::to_string(m) + ")");
  }
  std::vector<std::size_t> order(images.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return images[a].class_id < images[b].class_id;
  });

  Mat atoms(m, static_cast<Eigen::Index>(images.size()));
  std::vector<int> class_of(images.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto& img = images[order[j]];
    const double norm = img.features.norm();
    require(norm > 0.0 && std::isfinite(norm),
            "build_dictionary: image " + std::to_string(order[j]) +
                " has zero or non-finite norm");
    atoms.col(static_cast<Eigen::Index>(j)) = img.features / norm;
    class_of[j] = img.class_id;
  }
  return Dictionary(std::move(atoms), std::move(class_of));
}

// T x n matrix of prior inclusion probabilities, entries strictly inside (0,1).
struct InclusionMatrix {
  Mat kappa;

  void validate() const {
    require(kappa.rows() >= 1 && kappa.cols() >= 1, "InclusionMatrix: empty");
    for (Eigen::Index t = 0; t < kappa.rows(); ++t)
      for (Eigen::Index i = 0; i < kappa.cols(); ++i)
        require(kappa(t, i) > 0.0 && kappa(t, i) < 1.0,
                "InclusionMatrix: entries must lie in the open interval (0,1)");
  }
};

// Two-level class-indicator prior: kappa_in on the target class's columns,
// kappa_out elsewhere, replicated across the T task rows.
inline InclusionMatrix build_inclusion_matrix(const Dictionary& dict, int target_class,
                                              int num_tasks, double kappa_in,
                                              double kappa_out) {
  require(num_tasks >= 1, "build_inclusion_matrix: need at least one task");
  require(kappa_in > 0.0 && kappa_in < 1.0,
          "build_inclusion_matrix: kappa_in must lie in (0,1)");
  require(kappa_out > 0.0 && kappa_out <= kappa_in,
          "build_inclusion_matrix: need 0 < kappa_out <= kappa_in");
  const auto [begin, end] = dict.class_range(target_class);
  Mat kappa = Mat::Constant(num_tasks, dict.atom_count(), kappa_out);
  kappa.middleCols(begin, end - begin).setConstant(kappa_in);
  return InclusionMatrix{std::move(kappa)};
}

// Inclusion penalty of one coefficient:
//   rho = sigma2 * log(2*pi*sigma2*(1-kappa)^2 / (lambda*kappa^2)).
// Negative for large kappa, i.e. a favored atom is rewarded for being active.
inline double rho(const PriorParams& params, double kappa) {
  params.validate();
  require(kappa > 0.0 && kappa < 1.0, "rho: kappa must lie in (0,1)");
  const double ratio = (1.0 - kappa) / kappa;
  return params.sigma2 *
         std::log(2.0 * std::numbers::pi * params.sigma2 * ratio * ratio / params.lambda);
}

inline Vec rho_row(const PriorParams& params, const Vec& kappa_row) {
  Vec out(kappa_row.size());
  for (Eigen::Index i = 0; i < kappa_row.size(); ++i) out[i] = rho(params, kappa_row[i]);
  return out;
}

}  // namespace michs
