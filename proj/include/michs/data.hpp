#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "michs/common.hpp"
#include "michs/model.hpp"
#include "michs/rng.hpp"

namespace michs {

// Synthetic stand-in for a multi-view face corpus: C subjects, each a low
// dimensional subspace of feature space, observed through V view-specific
// subspace mixings plus additive Gaussian noise. Classes share a common
// subspace component controlled by `coherence`.
struct SyntheticSpec {
  int num_classes = 10;
  int atoms_per_class = 5;  // training vectors per class (TPC)
  int feature_dim = 64;
  int views_per_subject = 7;
  int subspace_dim = 4;
  double noise_std = 0.12;
  double coherence = 0.55;
  std::uint64_t seed = 0;

  void validate() const {
    require(num_classes >= 1, "SyntheticSpec: num_classes must be >= 1");
    require(atoms_per_class >= 1, "SyntheticSpec: atoms_per_class must be >= 1");
    require(feature_dim >= 1, "SyntheticSpec: feature_dim must be >= 1");
    require(views_per_subject >= 1, "SyntheticSpec: views_per_subject must be >= 1");
    require(subspace_dim >= 1, "SyntheticSpec: subspace_dim must be >= 1");
    require(subspace_dim <= feature_dim,
            "SyntheticSpec: subspace_dim cannot exceed feature_dim");
    require((num_classes + 1) * subspace_dim <= feature_dim,
            "SyntheticSpec: feature_dim too small for (num_classes+1)*subspace_dim "
            "orthogonal subspaces");
    require(noise_std >= 0.0, "SyntheticSpec: noise_std must be >= 0");
    require(coherence >= 0.0 && coherence < 1.0, "SyntheticSpec: coherence must lie in [0,1)");
  }
};

struct SyntheticData {
  std::vector<LabeledVector> train;      // grouped by class, generation order
  std::vector<LabeledVector> test_pool;  // two samples per (class, view)
  int num_classes = 0;
  int views = 0;
};

// Training poses are the even view tags, a strict subset of the V test poses
// whenever V >= 2.
inline std::vector<int> default_train_views(int views_per_subject) {
  std::vector<int> tags;
  for (int v = 0; v < views_per_subject; v += 2) tags.push_back(v);
  return tags;
}

namespace detail {

inline Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

inline Mat thin_q(const Mat& a) {
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(a.rows(), a.cols());
}

}  // namespace detail

// Deterministic in spec.seed. Per class: an orthonormal subspace basis taken
// from one global frame (mutually orthogonal across classes at coherence 0)
// blended with a shared block by `coherence` and re-orthonormalized. A view v
// sample is B_c * (M_v w) with w standard normal and M_v a view-specific
// rotation times a decaying diagonal, so each view emphasizes its own subspace
// directions; training covers only the even view tags. Per-class streams are
// consumed sequentially, so the TPC-k training set is a prefix of the TPC-k'
// one for k < k'.
inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const int C = spec.num_classes;
  const int V = spec.views_per_subject;
  const Eigen::Index m = spec.feature_dim;
  const Eigen::Index d = spec.subspace_dim;
  constexpr double kViewAnisotropy = 0.5;
  constexpr int kTestSamplesPerView = 2;

  Rng basis_rng(mix_seed(spec.seed, seed_domain::kDataset));
  const Mat frame = detail::thin_q(detail::gaussian_matrix(m, (C + 1) * d, basis_rng));
  const Mat shared = frame.middleCols(static_cast<Eigen::Index>(C) * d, d);

  std::vector<Mat> basis(C);
  for (int c = 0; c < C; ++c) {
    const Mat own = frame.middleCols(static_cast<Eigen::Index>(c) * d, d);
    basis[c] = spec.coherence == 0.0
                   ? own
                   : detail::thin_q((1.0 - spec.coherence) * own + spec.coherence * shared);
  }

  std::vector<Mat> view_mix(V);
  for (int v = 0; v < V; ++v) {
    Rng view_rng(mix_seed(mix_seed(spec.seed, 3000), static_cast<std::uint64_t>(v)));
    Mat rotation = detail::thin_q(detail::gaussian_matrix(d, d, view_rng));
    Vec gains(d);
    for (Eigen::Index k = 0; k < d; ++k) gains[k] = std::pow(kViewAnisotropy, k);
    view_mix[v] = rotation * gains.asDiagonal();
  }

  const auto draw_sample = [&](int c, int v, Rng& rng) {
    Vec w(d);
    for (Eigen::Index k = 0; k < d; ++k) w[k] = rng.normal();
    Vec sample = basis[c] * (view_mix[v] * w);
    if (spec.noise_std > 0.0)
      for (Eigen::Index i = 0; i < m; ++i) sample[i] += spec.noise_std * rng.normal();
    return sample;
  };

  SyntheticData data;
  data.num_classes = C;
  data.views = V;
  const std::vector<int> train_views = default_train_views(V);
  for (int c = 0; c < C; ++c) {
    Rng rng(mix_seed(mix_seed(spec.seed, 1000), static_cast<std::uint64_t>(c)));
    for (int k = 0; k < spec.atoms_per_class; ++k) {
      const int v = train_views[k % train_views.size()];
      data.train.push_back({draw_sample(c, v, rng), c + 1, v});
    }
  }
  for (int c = 0; c < C; ++c) {
    Rng rng(mix_seed(mix_seed(spec.seed, 2000), static_cast<std::uint64_t>(c)));
    for (int v = 0; v < V; ++v)
      for (int rep = 0; rep < kTestSamplesPerView; ++rep)
        data.test_pool.push_back({draw_sample(c, v, rng), c + 1, v});
  }
  return data;
}

// First `atoms_per_class` training vectors of each class, in order. Because
// per-class generation streams are sequential this equals regenerating with
// the smaller TPC.
inline std::vector<LabeledVector> subset_train_per_class(const std::vector<LabeledVector>& train,
                                                         int atoms_per_class) {
  require(atoms_per_class >= 1, "subset_train_per_class: atoms_per_class must be >= 1");
  std::map<int, int> taken;
  std::vector<LabeledVector> out;
  for (const auto& item : train)
    if (taken[item.class_id]++ < atoms_per_class) out.push_back(item);
  return out;
}

struct ExperimentSpec {
  int views_per_trial = 3;  // T
  int num_trials = 1;
  std::vector<int> train_view_subset;  // informational; dictionary building filter
  std::vector<int> test_view_set;      // empty = every view present in the pool
  std::uint64_t seed = 0;

  void validate() const {
    require(views_per_trial >= 1, "ExperimentSpec: views_per_trial must be >= 1");
    require(num_trials >= 1, "ExperimentSpec: num_trials must be >= 1");
  }
};

// Trial protocol: pick a subject uniformly, then T distinct views of that
// subject uniformly without replacement (column order is the shuffled draw
// order), then one pool sample per chosen view. Deterministic given spec.seed.
inline std::vector<LabeledObservation> sample_test_matrices(
    const std::vector<LabeledVector>& test_pool, const ExperimentSpec& spec) {
  spec.validate();
  require(!test_pool.empty(), "sample_test_matrices: empty test pool");

  std::map<int, std::map<int, std::vector<std::size_t>>> by_class_view;
  for (std::size_t idx = 0; idx < test_pool.size(); ++idx) {
    const auto& item = test_pool[idx];
    if (!spec.test_view_set.empty() &&
        std::find(spec.test_view_set.begin(), spec.test_view_set.end(), item.view_tag) ==
            spec.test_view_set.end())
      continue;
    by_class_view[item.class_id][item.view_tag].push_back(idx);
  }
  require(!by_class_view.empty(), "sample_test_matrices: no pool entries in the test view set");

  std::vector<int> classes;
  std::vector<std::vector<int>> views_of;
  for (const auto& [class_id, views] : by_class_view) {
    require(static_cast<int>(views.size()) >= spec.views_per_trial,
            "sample_test_matrices: subject " + std::to_string(class_id) + " has only " +
                std::to_string(views.size()) + " views, need " +
                std::to_string(spec.views_per_trial));
    classes.push_back(class_id);
    std::vector<int> tags;
    for (const auto& [tag, indices] : views) tags.push_back(tag);
    views_of.push_back(std::move(tags));
  }

  const Eigen::Index m = test_pool.front().features.size();
  Rng rng(spec.seed);
  std::vector<LabeledObservation> trials;
  trials.reserve(spec.num_trials);
  for (int trial = 0; trial < spec.num_trials; ++trial) {
    const auto ci = static_cast<std::size_t>(rng.uniform_below(classes.size()));
    const int class_id = classes[ci];
    std::vector<int> tags = views_of[ci];
    for (int j = 0; j < spec.views_per_trial; ++j) {
      const auto pick = j + static_cast<std::size_t>(rng.uniform_below(tags.size() - j));
      std::swap(tags[j], tags[pick]);
    }
    ObservationMatrix views(m, spec.views_per_trial);
    for (int j = 0; j < spec.views_per_trial; ++j) {
      const auto& bucket = by_class_view[class_id][tags[j]];
      views.col(j) = test_pool[bucket[rng.uniform_below(bucket.size())]].features;
    }
    trials.push_back({std::move(views), class_id});
  }
  return trials;
}

}  // namespace michs
