#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "michs/model.hpp"
#include "michs/rng.hpp"

using michs::build_dictionary;
using michs::build_inclusion_matrix;
using michs::Dictionary;
using michs::LabeledVector;
using michs::PriorParams;
using michs::Vec;

namespace {

std::vector<LabeledVector> two_class_images() {
  std::vector<LabeledVector> images;
  images.push_back({Vec{{1.0, 0.0, 0.0}}, 1});
  images.push_back({Vec{{0.0, 2.0, 0.0}}, 1});
  images.push_back({Vec{{0.0, 0.0, 3.0}}, 2});
  images.push_back({Vec{{1.0, 1.0, 0.0}}, 2});
  return images;
}

}  // namespace

TEST_CASE("build_dictionary groups classes and records ranges", "[model]") {
  const Dictionary dict = build_dictionary(two_class_images());
  CHECK(dict.feature_dim() == 3);
  CHECK(dict.atom_count() == 4);
  CHECK(dict.num_classes() == 2);
  CHECK(dict.class_range(1) == std::pair<Eigen::Index, Eigen::Index>{0, 2});
  CHECK(dict.class_range(2) == std::pair<Eigen::Index, Eigen::Index>{2, 4});
  CHECK(dict.class_of(0) == 1);
  CHECK(dict.class_of(3) == 2);
}

TEST_CASE("build_dictionary normalizes columns", "[model]") {
  std::vector<LabeledVector> images;
  images.push_back({Vec{{3.0, 4.0, 0.0}}, 1});
  images.push_back({Vec{{0.0, 0.0, 5.0}}, 2});
  const Dictionary dict = build_dictionary(images);
  CHECK(dict.atoms()(0, 0) == Catch::Approx(0.6).margin(1e-15));
  CHECK(dict.atoms()(1, 0) == Catch::Approx(0.8).margin(1e-15));
  CHECK(dict.atoms()(2, 0) == 0.0);
}

TEST_CASE("build_dictionary column norms stay within 1e-9 of one", "[model]") {
  michs::Rng rng(7);
  std::vector<LabeledVector> images;
  for (int k = 0; k < 40; ++k) {
    Vec v(12);
    for (int i = 0; i < 12; ++i) v[i] = 3.0 * rng.normal();
    images.push_back({v, 1 + k % 5});
  }
  const Dictionary dict = build_dictionary(images);
  for (Eigen::Index j = 0; j < dict.atom_count(); ++j)
    CHECK(std::abs(dict.atoms().col(j).norm() - 1.0) < 1e-9);
}

TEST_CASE("build_dictionary rejects dimension mismatch naming the image", "[model]") {
  std::vector<LabeledVector> images;
  images.push_back({Vec{{1.0, 0.0, 0.0}}, 1});
  images.push_back({Vec{{1.0, 0.0, 0.0, 0.0}}, 2});
  CHECK_THROWS_WITH(build_dictionary(images),
                    Catch::Matchers::ContainsSubstring("image 1"));
}

TEST_CASE("build_dictionary rejects zero columns and empty input", "[model]") {
  CHECK_THROWS_AS(build_dictionary({}), michs::ValidationError);
  std::vector<LabeledVector> images;
  images.push_back({Vec::Zero(3), 1});
  CHECK_THROWS_AS(build_dictionary(images), michs::ValidationError);
}

TEST_CASE("build_dictionary remaps sparse labels but keeps them", "[model]") {
  std::vector<LabeledVector> images;
  images.push_back({Vec{{0.0, 1.0}}, 7});
  images.push_back({Vec{{1.0, 0.0}}, 3});
  const Dictionary dict = build_dictionary(images);
  CHECK(dict.num_classes() == 2);
  CHECK(dict.label(1) == 3);
  CHECK(dict.label(2) == 7);
  CHECK(dict.class_of(0) == 1);  // column 0 is the class-3 image after sorting
  CHECK(dict.atoms()(0, 0) == 1.0);
}

TEST_CASE("build_inclusion_matrix marks the target class", "[model]") {
  const Dictionary dict = build_dictionary(two_class_images());
  const auto prior = build_inclusion_matrix(dict, 1, 2, 0.4, 0.01);
  REQUIRE(prior.kappa.rows() == 2);
  REQUIRE(prior.kappa.cols() == 4);
  for (int t = 0; t < 2; ++t) {
    CHECK(prior.kappa(t, 0) == 0.4);
    CHECK(prior.kappa(t, 1) == 0.4);
    CHECK(prior.kappa(t, 2) == 0.01);
    CHECK(prior.kappa(t, 3) == 0.01);
  }
}

TEST_CASE("build_inclusion_matrix degenerate and invalid cases", "[model]") {
  const Dictionary dict = build_dictionary(two_class_images());
  const auto uniform = build_inclusion_matrix(dict, 2, 3, 0.3, 0.3);
  CHECK((uniform.kappa.array() == 0.3).all());
  CHECK_THROWS_AS(build_inclusion_matrix(dict, 1, 2, 1.0, 0.01), michs::ValidationError);
  CHECK_THROWS_AS(build_inclusion_matrix(dict, 3, 2, 0.4, 0.01), michs::ValidationError);
  CHECK_THROWS_AS(build_inclusion_matrix(dict, 1, 2, 0.4, 0.5), michs::ValidationError);
}

TEST_CASE("build_inclusion_matrix rows are identical across tasks", "[model]") {
  const Dictionary dict = build_dictionary(two_class_images());
  const auto prior = build_inclusion_matrix(dict, 2, 5, 0.37, 0.02);
  for (int t = 1; t < 5; ++t) CHECK(prior.kappa.row(t) == prior.kappa.row(0));
}

TEST_CASE("rho matches its closed form", "[model]") {
  // lambda = 2*pi makes the log argument exactly one.
  CHECK(michs::rho({1.0, 1.0, 2.0 * std::numbers::pi}, 0.5) == 0.0);
  CHECK(michs::rho({1.0, 1.0, 1.0}, 0.5) ==
        Catch::Approx(1.8378770664093454).epsilon(1e-13));
  CHECK(michs::rho({2.0, 1.0, 1.0}, 0.9) ==
        Catch::Approx(-3.7268498154062959).epsilon(1e-13));
}

TEST_CASE("rho is strictly decreasing in kappa", "[model]") {
  michs::Rng rng(11);
  const PriorParams params{0.7, 0.02, 2.3};
  for (int k = 0; k < 200; ++k) {
    double a = 0.001 + 0.998 * rng.uniform();
    double b = 0.001 + 0.998 * rng.uniform();
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(michs::rho(params, a) > michs::rho(params, b));
  }
}

TEST_CASE("rho rejects endpoint kappa and bad params", "[model]") {
  CHECK_THROWS_AS(michs::rho({1.0, 1.0, 1.0}, 0.0), michs::ValidationError);
  CHECK_THROWS_AS(michs::rho({1.0, 1.0, 1.0}, 1.0), michs::ValidationError);
  CHECK_THROWS_AS(michs::rho({-1.0, 1.0, 1.0}, 0.5), michs::ValidationError);
}

TEST_CASE("spike consistency helper", "[model]") {
  Vec x{{0.0, 1.5, 0.0}};
  michs::SupportVec gamma{{0, 1, 0}};
  CHECK(michs::spike_consistent(x, gamma));
  x[0] = 1e-300;
  CHECK_FALSE(michs::spike_consistent(x, gamma));
}
