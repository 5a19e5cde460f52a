#pragma once

#include <span>
#include <vector>

namespace rabi {

/// Real symmetric matrix with `bandwidth` non-zero sub-diagonals, stored by
/// diagonals: element (j + k, j) lives at data[k * dim + j].
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix(int dimension, int bandwidth);

  int dimension() const noexcept { return dim_; }
  int bandwidth() const noexcept { return band_; }

  /// Zero outside the band.
  double operator()(int i, int j) const noexcept;
  /// Sets (i, j) and (j, i). Throws InvalidArgument outside the band.
  void set(int i, int j, double value);

  double max_abs() const noexcept;
  std::vector<double> multiply(std::span<const double> x) const;

 private:
  int dim_;
  int band_;
  std::vector<double> data_;
};

/// Column-major dense square matrix.
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;

  explicit DenseMatrix(int size = 0) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(j) * n + i]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * n + i]; }

  static DenseMatrix identity(int size);
  static DenseMatrix from_band(const SymmetricBandMatrix& band);
};

/// diag[i] = T(i, i); off[i] = T(i, i + 1) for i < n - 1 (off has size n).
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

/// Orthogonal similarity reduction of a band matrix to tridiagonal form by
/// Givens rotations with bulge chasing. O(n^2 b).
Tridiagonal band_to_tridiagonal(const SymmetricBandMatrix& band);

/// Householder reduction of a dense symmetric matrix. If `q` is non-null it
/// receives the orthogonal factor with A = Q T Q^T.
Tridiagonal householder_tridiagonalize(const DenseMatrix& a, DenseMatrix* q = nullptr);

/// Implicit-shift QL iteration on a tridiagonal matrix. Eigenvalues come back
/// ascending. If `vectors` is non-null it must hold the matrix that reduced
/// the original problem (identity for a plain tridiagonal); on return its
/// columns are the eigenvectors in the same order. Throws ConvergenceFailure
/// after 60 sweeps on one eigenvalue.
std::vector<double> tridiagonal_eigen(Tridiagonal t, DenseMatrix* vectors = nullptr);

struct DenseEigen {
  std::vector<double> values;
  DenseMatrix vectors;
};

/// Full eigensystem of a dense symmetric matrix (Householder + QL).
DenseEigen symmetric_eigen(const DenseMatrix& a);

/// All eigenvalues of a band matrix, ascending.
std::vector<double> band_eigenvalues(const SymmetricBandMatrix& band);

}  // namespace rabi
