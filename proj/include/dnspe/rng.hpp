#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace dnspe {

// Seedable random stream. One instance per Monte Carlo run; runs derive their
// seed as master_seed ^ run_index so they can execute in parallel without
// shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double gaussian() { return normal_(eng_); }
  double uniform() { return uni_(eng_); }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  Eigen::MatrixXd gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    // Column-major fill so a matrix draw equals a vec-ordered vector draw.
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = gaussian();
    return m;
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

}  // namespace dnspe
