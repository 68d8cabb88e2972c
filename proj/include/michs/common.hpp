#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace michs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SupportVec = Eigen::VectorXi;
using SupportMat = Eigen::MatrixXi;

// One test vector per task/view, stacked as columns (m x T).
using ObservationMatrix = Mat;
// Coefficients, one column per task (n x T).
using CodeMatrix = Mat;

// A labeled multi-view test sample.
struct LabeledObservation {
  ObservationMatrix views;
  int true_class = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or violated precondition; the CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Filesystem or parse failure; the CLI maps this to exit code 1.
class IoError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

// gamma entries must be 0/1 and gamma_i = 0 forces x_i to be exactly zero.
inline bool spike_consistent(const Vec& x, const SupportVec& gamma) {
  if (x.size() != gamma.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const int g = gamma[i];
    if (g != 0 && g != 1) return false;
    if (g == 0 && x[i] != 0.0) return false;
  }
  return true;
}

inline void require_spike_consistent(const Vec& x, const SupportVec& gamma,
                                     const std::string& where) {
  if (!spike_consistent(x, gamma))
    throw ValidationError(where + ": code/support pair violates spike consistency");
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Callers write to
// disjoint slots indexed by i, so results do not depend on scheduling.
template <class Fn>
void parallel_for(long count, int threads, Fn&& fn) {
  if (count <= 0) return;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (threads <= 0) threads = hw;
  threads = static_cast<int>(std::min<long>(threads, count));
  if (threads <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace michs
