#include <doctest.h>

#include <random>

#include "dnspe/blockmat.hpp"

using namespace dnspe;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& eng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(eng);
  return m;
}

}  // namespace

TEST_CASE("vec stacks column-major") {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  Vector v = vec(m);
  CHECK(v[0] == 1);
  CHECK(v[1] == 3);
  CHECK(v[2] == 2);
  CHECK(v[3] == 4);

  CHECK(vec(Matrix::Zero(2, 3)).isZero());
  CHECK(vec(Matrix::Zero(2, 3)).size() == 6);
}

TEST_CASE("vec identity vec(ABC) = (C^T kron A) vec(B)") {
  std::mt19937_64 eng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(2, 2, eng), b = random_matrix(2, 2, eng),
           c = random_matrix(2, 2, eng);
    Vector lhs = vec(a * b * c);
    Vector rhs = kron(c.transpose(), a) * vec(b);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("kron basics") {
  CHECK(kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3))
            .isApprox(Matrix::Identity(6, 6)));
  std::mt19937_64 eng(1);
  Matrix b = random_matrix(3, 2, eng);
  Matrix scalar(1, 1);
  scalar << 2.0;
  CHECK(kron(scalar, b).isApprox(2.0 * b));
}

TEST_CASE("kron mixed product (A kron B)(C kron D) = AC kron BD") {
  std::mt19937_64 eng(2);
  Matrix a = random_matrix(2, 2, eng), b = random_matrix(2, 2, eng),
         c = random_matrix(2, 2, eng), d = random_matrix(2, 2, eng);
  CHECK((kron(a, b) * kron(c, d)).isApprox(kron(a * c, b * d), 1e-12));
}

TEST_CASE("commutation matrix defining identity") {
  CHECK(commutation_matrix(1, 4).isApprox(Matrix::Identity(4, 4)));

  Matrix a(2, 2);
  a << 1, 2, 3, 4;  // vec = [1,3,2,4]
  Vector permuted = commutation_matrix(2, 2) * vec(a);
  CHECK(permuted.isApprox(vec(a.transpose())));

  CHECK((commutation_matrix(2, 3) * commutation_matrix(3, 2))
            .isApprox(Matrix::Identity(6, 6)));

  std::mt19937_64 eng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(eng() % 5);
    const int n = 1 + static_cast<int>(eng() % 5);
    Matrix x = random_matrix(m, n, eng);
    CHECK((commutation_matrix(m, n) * vec(x) - vec(x.transpose())).norm() == 0.0);
  }
}

TEST_CASE("commutation matrix is a permutation") {
  Matrix k = commutation_matrix(3, 4);
  for (int i = 0; i < k.rows(); ++i) {
    CHECK(k.row(i).sum() == 1.0);
    CHECK(k.col(i).sum() == 1.0);
    for (int j = 0; j < k.cols(); ++j) CHECK((k(i, j) == 0.0 || k(i, j) == 1.0));
  }
}

TEST_CASE("khatri_rao degenerate partitions") {
  std::mt19937_64 eng(4);
  Matrix a = random_matrix(3, 3, eng), b = random_matrix(3, 3, eng);

  // All 1x1 blocks: elementwise product.
  Partition ones{1, 1, 1};
  CHECK(khatri_rao(a, b, ones, ones, ones, ones).isApprox(a.cwiseProduct(b)));

  // Single block: plain Kronecker product.
  Partition whole{3};
  CHECK(khatri_rao(a, b, whole, whole, whole, whole).isApprox(kron(a, b)));
}

TEST_CASE("khatri_rao node selection pattern") {
  // diag(e_k) as 1x1 blocks against blockdiag{I_2, I_3} keeps only node k's
  // identity block.
  Matrix ek = Matrix::Zero(2, 2);
  ek(1, 1) = 1.0;
  Matrix y = block_diag({Matrix::Identity(2, 2), Matrix::Identity(3, 3)});
  Partition ones{1, 1}, dims{2, 3};
  Matrix sel = khatri_rao(ek, y, ones, ones, dims, dims);
  Matrix expected = Matrix::Zero(5, 5);
  expected.block(2, 2, 3, 3) = Matrix::Identity(3, 3);
  CHECK(sel.isApprox(expected));
}

TEST_CASE("khatri_rao partition mismatch throws") {
  Matrix a = Matrix::Identity(2, 2), b = Matrix::Identity(2, 2);
  CHECK_THROWS(khatri_rao(a, b, Partition{2}, Partition{2}, Partition{1, 1}, Partition{2}));
}

TEST_CASE("block_diag") {
  CHECK(block_diag({Matrix::Identity(2, 2), Matrix::Identity(3, 3)})
            .isApprox(Matrix::Identity(5, 5)));
  std::mt19937_64 eng(5);
  Matrix a = random_matrix(2, 2, eng);
  CHECK(block_diag({a}).isApprox(a));
  Matrix b = random_matrix(3, 3, eng);
  CHECK(block_diag({a, b}).trace() == doctest::Approx(a.trace() + b.trace()));
}

TEST_CASE("weighted_sq_norm") {
  std::mt19937_64 eng(6);
  Vector x = random_matrix(4, 1, eng);
  CHECK(weighted_sq_norm(x, Matrix::Identity(4, 4)) == doctest::Approx(x.squaredNorm()));
  Matrix b = random_matrix(4, 4, eng);
  Matrix sigma = b.transpose() * b;
  CHECK(weighted_sq_norm(Vector::Zero(4), sigma) == 0.0);
  CHECK(weighted_sq_norm(x, sigma) == doctest::Approx(x.dot(sigma * x)));
  CHECK(weighted_sq_norm(x, sigma) >= 0.0);
  CHECK_THROWS(weighted_sq_norm(x, Matrix::Identity(3, 3)));
}

TEST_CASE("block_max_norm") {
  BlockLayout layout{{2, 3}};
  Vector x(5);
  x << 3, 4, 5, 0, 0;
  CHECK(block_max_norm(x, layout) == doctest::Approx(5.0));
  CHECK(block_max_norm(Vector::Zero(5), layout) == 0.0);
  BlockLayout single{{5}};
  CHECK(block_max_norm(x, single) == doctest::Approx(x.norm()));
  CHECK_THROWS(block_max_norm(Vector::Zero(4), layout));

  // norm sandwich: bmax <= ||x|| <= sqrt(#blocks) * bmax
  std::mt19937_64 eng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Vector r = random_matrix(5, 1, eng);
    const double bm = block_max_norm(r, layout);
    CHECK(bm <= r.norm() + 1e-14);
    CHECK(r.norm() <= std::sqrt(2.0) * bm + 1e-14);
  }
}

TEST_CASE("spectral_radius") {
  CHECK(spectral_radius(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = -0.9;
  CHECK(spectral_radius(d) == doctest::Approx(0.9));

  std::mt19937_64 eng(9);
  Matrix a = random_matrix(5, 5, eng);
  Eigen::EigenSolver<Matrix> es(a, false);
  CHECK(spectral_radius(a) ==
        doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-8));
  CHECK_THROWS(spectral_radius(random_matrix(2, 3, eng)));
}

TEST_CASE("spectral_radius power-iteration path") {
  // 600-dim diagonal-ish matrix exercises the > 512 branch.
  std::mt19937_64 eng(10);
  Matrix a = Matrix::Zero(600, 600);
  std::uniform_real_distribution<double> uni(0.0, 0.8);
  for (int i = 0; i < 600; ++i) a(i, i) = uni(eng);
  a(0, 0) = 0.95;
  a += 0.001 * random_matrix(600, 600, eng);
  Eigen::EigenSolver<Matrix> es(a, false);
  const double exact = es.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(spectral_radius(a) == doctest::Approx(exact).epsilon(1e-6));
}
