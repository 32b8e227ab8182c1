#pragma once

#include <Eigen/Dense>
#include <vector>

// Dense matrix utilities used by the steady-state analysis: vectorization,
// Kronecker/Khatri-Rao products, commutation matrices, block-diagonal
// assembly, weighted norms and spectral radius. Everything here is real-valued
// and operates on column-major Eigen matrices.

namespace dnspe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Block sizes along one axis of a partitioned matrix. All entries >= 1 and
// their sum equals the partitioned dimension.
using Partition = std::vector<int>;

int partition_total(const Partition& p);

// Ordered block sizes of a stacked network vector (one entry per block, in
// stacking order).
struct BlockLayout {
  Partition sizes;
  int total() const { return partition_total(sizes); }
};

// Column-major stacking of M into a (rows*cols) vector.
Vector vec(const Matrix& m);

// Inverse of vec for a known shape.
Matrix unvec(const Vector& v, int rows, int cols);

Matrix kron(const Matrix& a, const Matrix& b);

// The mn x mn permutation K_{(m,n)} with K vec(A) = vec(A^T) for every m x n A.
Matrix commutation_matrix(int m, int n);

// Blockwise Kronecker product over matched partitions: block (i,j) of the
// result is kron(A_ij, B_ij). A and B must have the same number of row blocks
// and of column blocks.
Matrix khatri_rao(const Matrix& a, const Matrix& b,
                  const Partition& rows_a, const Partition& cols_a,
                  const Partition& rows_b, const Partition& cols_b);

Matrix block_diag(const std::vector<Matrix>& blocks);

// x^T Sigma x for symmetric PSD Sigma.
double weighted_sq_norm(const Vector& x, const Matrix& sigma);

// Max over blocks of the per-block Euclidean norm.
double block_max_norm(const Vector& x, const BlockLayout& layout);

// Max |eigenvalue|. Full eigensolve below dimension 512, power iteration
// (tol 1e-10, at most 10000 iterations) above.
double spectral_radius(const Matrix& a);

}  // namespace dnspe
