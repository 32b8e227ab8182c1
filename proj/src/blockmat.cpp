#include "dnspe/blockmat.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>
#include <stdexcept>

namespace dnspe {

int partition_total(const Partition& p) {
  int total = 0;
  for (int s : p) {
    if (s < 1) throw std::invalid_argument("partition entries must be >= 1");
    total += s;
  }
  return total;
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix commutation_matrix(int m, int n) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("commutation_matrix: dims must be positive");
  Matrix k = Matrix::Zero(m * n, m * n);
  // vec(A)[i + j*m] = A(i,j) maps to vec(A^T)[j + i*n].
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) k(j + i * n, i + j * m) = 1.0;
  return k;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b,
                  const Partition& rows_a, const Partition& cols_a,
                  const Partition& rows_b, const Partition& cols_b) {
  if (rows_a.size() != rows_b.size() || cols_a.size() != cols_b.size())
    throw std::invalid_argument("khatri_rao: partition count mismatch");
  if (partition_total(rows_a) != a.rows() || partition_total(cols_a) != a.cols() ||
      partition_total(rows_b) != b.rows() || partition_total(cols_b) != b.cols())
    throw std::invalid_argument("khatri_rao: partition/dim mismatch");

  const int nr = static_cast<int>(rows_a.size());
  const int nc = static_cast<int>(cols_a.size());
  int out_rows = 0, out_cols = 0;
  for (int i = 0; i < nr; ++i) out_rows += rows_a[i] * rows_b[i];
  for (int j = 0; j < nc; ++j) out_cols += cols_a[j] * cols_b[j];
  Matrix out = Matrix::Zero(out_rows, out_cols);

  int ra = 0, rb = 0, ro = 0;
  for (int i = 0; i < nr; ++i) {
    int ca = 0, cb = 0, co = 0;
    for (int j = 0; j < nc; ++j) {
      out.block(ro, co, rows_a[i] * rows_b[i], cols_a[j] * cols_b[j]) =
          kron(a.block(ra, ca, rows_a[i], cols_a[j]),
               b.block(rb, cb, rows_b[i], cols_b[j]));
      ca += cols_a[j];
      cb += cols_b[j];
      co += cols_a[j] * cols_b[j];
    }
    ra += rows_a[i];
    rb += rows_b[i];
    ro += rows_a[i] * rows_b[i];
  }
  return out;
}

Matrix block_diag(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

double weighted_sq_norm(const Vector& x, const Matrix& sigma) {
  if (sigma.rows() != x.size() || sigma.cols() != x.size())
    throw std::invalid_argument("weighted_sq_norm: dim mismatch");
  return x.dot(sigma * x);
}

double block_max_norm(const Vector& x, const BlockLayout& layout) {
  if (layout.total() != x.size())
    throw std::invalid_argument("block_max_norm: layout/dim mismatch");
  double best = 0.0;
  int off = 0;
  for (int s : layout.sizes) {
    best = std::max(best, x.segment(off, s).norm());
    off += s;
  }
  return best;
}

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("spectral_radius: matrix not square");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  if (n < 512) {
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Power iteration tracking the geometric mean of the norm growth over a
  // trailing window; this converges to the spectral radius even when the
  // dominant eigenvalue is a complex pair.
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  constexpr int kWindow = 64;
  double window_log = 0.0, prev_estimate = -1.0;
  std::vector<double> logs;
  logs.reserve(kWindow);
  for (int it = 0; it < 10000; ++it) {
    Vector w = a * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (static_cast<int>(logs.size()) == kWindow) {
      window_log -= logs[it % kWindow];
      logs[it % kWindow] = std::log(nw);
    } else {
      logs.push_back(std::log(nw));
    }
    window_log += std::log(nw);
    if (static_cast<int>(logs.size()) == kWindow && (it + 1) % kWindow == 0) {
      const double estimate = std::exp(window_log / kWindow);
      if (prev_estimate >= 0.0 &&
          std::abs(estimate - prev_estimate) < 1e-10 * std::max(1.0, estimate))
        return estimate;
      prev_estimate = estimate;
    }
  }
  return std::exp(window_log / std::max<size_t>(1, logs.size()));
}

}  // namespace dnspe
