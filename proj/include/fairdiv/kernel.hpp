// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_KERNEL_HPP
#define FAIRDIV_KERNEL_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "fairdiv/subset.hpp"

namespace fairdiv {

enum class RowNormalization { kNone, kL1, kL2 };

// n x d nonnegative feature matrix, one row per item. Rows must be finite,
// entrywise >= 0 and have positive norm.
class FeatureMatrix {
 public:
  // Validates and takes ownership; throws InputError on violation.
  static FeatureMatrix create(Eigen::MatrixXd values);

  int n() const { return static_cast<int>(values_.rows()); }
  int d() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  explicit FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}
  Eigen::MatrixXd values_;
};

// Symmetric positive semidefinite Gram matrix. Construction symmetrizes the
// input (after checking near-symmetry to 1e-12 relative) and rejects matrices
// whose smallest eigenvalue falls below -1e-9 times the largest.
class Kernel {
 public:
  static Kernel from_matrix(Eigen::MatrixXd m);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(int x, int y) const { return entries_(x, y); }

  // Principal submatrix K_{S,S} in the order given by items.
  Eigen::MatrixXd submatrix(std::span<const int> items) const;

 private:
  explicit Kernel(Eigen::MatrixXd m) : entries_(std::move(m)) {}
  Eigen::MatrixXd entries_;
};

// ln det of a principal submatrix; singular carries -inf semantics.
class LogDet {
 public:
  static LogDet finite(double v) { return LogDet(v, false); }
  static LogDet singular() {
    return LogDet(-std::numeric_limits<double>::infinity(), true);
  }

  bool is_singular() const { return singular_; }
  double value() const { return value_; }

 private:
  LogDet(double v, bool s) : value_(v), singular_(s) {}
  double value_;
  bool singular_;
};

// Eigendecomposition with eigenvalues sorted descending; values below
// 1e-12 times the largest are clamped to zero. Eigenvectors are columns,
// aligned with the sorted eigenvalues.
struct KernelSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  int n() const { return static_cast<int>(eigenvalues.size()); }
  int rank() const;  // count of nonzero (post-clamp) eigenvalues
};

// Rank-revealing factorization used for log-determinants and Schur
// complements. Pivots below 1e-12 times the largest initial diagonal entry
// stop the factorization.
struct PivotedCholesky {
  Eigen::MatrixXd factor;  // lower-triangular in pivot order, m x m
  std::vector<int> perm;   // pivot order; first `rank` rows carry the factor
  int rank = 0;
  double log_det = 0.0;    // sum of ln(pivot) over the first `rank` steps
};

PivotedCholesky pivoted_cholesky(Eigen::MatrixXd a);

// K[x][y] = <row_x, row_y> after the selected per-row normalization.
Kernel build_gram_kernel(const FeatureMatrix& features,
                         RowNormalization mode = RowNormalization::kL2);

// ln det(K_{S,S}) via pivoted Cholesky; the empty set yields 0 (det = 1).
// Throws InputError on out-of-range or duplicate indices.
LogDet log_det_submatrix(const Kernel& kernel, std::span<const int> items);
LogDet log_det_submatrix(const Kernel& kernel, const Subset& s);

KernelSpectrum spectral_decompose(const Kernel& kernel);

}  // namespace fairdiv

#endif  // FAIRDIV_KERNEL_HPP
