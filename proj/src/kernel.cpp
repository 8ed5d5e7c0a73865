// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv {

namespace {
constexpr double kSymmetryRelTol = 1e-12;
constexpr double kPsdRelTol = 1e-9;
constexpr double kPivotRelTol = 1e-12;
constexpr double kEigenClampRelTol = 1e-12;
}  // namespace

FeatureMatrix FeatureMatrix::create(Eigen::MatrixXd values) {
  if (values.rows() == 0 || values.cols() == 0) {
    throw InputError("feature matrix must have at least one row and column");
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    double norm_sq = 0.0;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v)) {
        throw InputError("feature matrix entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") is not finite");
      }
      if (v < 0.0) {
        throw InputError("feature matrix entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") is negative");
      }
      norm_sq += v * v;
    }
    if (norm_sq <= 0.0) {
      throw InputError("feature row " + std::to_string(i) + " has zero norm");
    }
  }
  return FeatureMatrix(std::move(values));
}

Kernel Kernel::from_matrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InputError("kernel matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw InputError("kernel matrix has non-finite entries");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > kSymmetryRelTol * scale) {
    throw InputError("kernel matrix is not symmetric (relative asymmetry " +
                     std::to_string(asym / scale) + ")");
  }
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                        Eigen::EigenvaluesOnly);
  const double lambda_max = solver.eigenvalues().maxCoeff();
  const double lambda_min = solver.eigenvalues().minCoeff();
  if (lambda_min < -kPsdRelTol * std::max(lambda_max, 0.0)) {
    throw InputError("kernel matrix is not positive semidefinite (lambda_min " +
                     std::to_string(lambda_min) + ", lambda_max " +
                     std::to_string(lambda_max) + ")");
  }
  return Kernel(std::move(sym));
}

Eigen::MatrixXd Kernel::submatrix(std::span<const int> items) const {
  const int m = static_cast<int>(items.size());
  Eigen::MatrixXd out(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      out(a, b) = entries_(items[a], items[b]);
    }
  }
  return out;
}

int KernelSpectrum::rank() const {
  int r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > 0.0) ++r;
  }
  return r;
}

PivotedCholesky pivoted_cholesky(Eigen::MatrixXd a) {
  const int m = static_cast<int>(a.rows());
  PivotedCholesky result;
  result.perm.resize(m);
  for (int i = 0; i < m; ++i) result.perm[i] = i;
  if (m == 0) return result;

  const double max_diag = a.diagonal().maxCoeff();
  const double tol = kPivotRelTol * std::max(max_diag, 0.0);

  for (int step = 0; step < m; ++step) {
    int pivot = step;
    for (int i = step + 1; i < m; ++i) {
      if (a(i, i) > a(pivot, pivot)) pivot = i;
    }
    if (!(a(pivot, pivot) > tol)) {
      break;  // remaining Schur diagonal is numerically zero (or negative)
    }
    if (pivot != step) {
      a.row(step).swap(a.row(pivot));
      a.col(step).swap(a.col(pivot));
      std::swap(result.perm[step], result.perm[pivot]);
    }
    const double d = a(step, step);
    result.log_det += std::log(d);
    const double root = std::sqrt(d);
    a(step, step) = root;
    for (int i = step + 1; i < m; ++i) a(i, step) /= root;
    // Keep the trailing block symmetric; pivot swaps read both triangles.
    for (int j = step + 1; j < m; ++j) {
      for (int i = j; i < m; ++i) {
        const double v = a(i, j) - a(i, step) * a(j, step);
        a(i, j) = v;
        a(j, i) = v;
      }
    }
    result.rank = step + 1;
  }
  // Only the lower triangle of the first `rank` columns is meaningful.
  result.factor = std::move(a);
  return result;
}

Kernel build_gram_kernel(const FeatureMatrix& features, RowNormalization mode) {
  Eigen::MatrixXd rows = features.values();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double norm = 0.0;
    switch (mode) {
      case RowNormalization::kL2:
        norm = rows.row(i).norm();
        break;
      case RowNormalization::kL1:
        norm = rows.row(i).lpNorm<1>();
        break;
      case RowNormalization::kNone:
        norm = 1.0;
        break;
    }
    if (norm <= 0.0) {
      throw InputError("feature row " + std::to_string(i) + " has zero norm");
    }
    rows.row(i) /= norm;
  }
  Eigen::MatrixXd gram = rows * rows.transpose();
  gram = 0.5 * (gram + gram.transpose().eval());  // exact symmetry
  return Kernel::from_matrix(std::move(gram));
}

LogDet log_det_submatrix(const Kernel& kernel, std::span<const int> items) {
  const int n = kernel.n();
  std::vector<char> seen(n, 0);
  for (int id : items) {
    if (id < 0 || id >= n) {
      throw InputError("subset index " + std::to_string(id) +
                       " out of range for kernel of size " + std::to_string(n));
    }
    if (seen[id]) {
      throw InputError("subset index " + std::to_string(id) + " repeated");
    }
    seen[id] = 1;
  }
  if (items.empty()) return LogDet::finite(0.0);

  PivotedCholesky chol = pivoted_cholesky(kernel.submatrix(items));
  if (chol.rank < static_cast<int>(items.size())) return LogDet::singular();
  return LogDet::finite(chol.log_det);
}

LogDet log_det_submatrix(const Kernel& kernel, const Subset& s) {
  return log_det_submatrix(kernel, std::span<const int>(s.items));
}

KernelSpectrum spectral_decompose(const Kernel& kernel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel.matrix());
  if (solver.info() != Eigen::Success) {
    throw InputError("eigendecomposition failed");
  }
  const int n = kernel.n();
  KernelSpectrum spectrum;
  spectrum.eigenvalues.resize(n);
  spectrum.eigenvectors.resize(n, n);
  // Eigen sorts ascending; flip to descending.
  for (int i = 0; i < n; ++i) {
    spectrum.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    spectrum.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  const double lambda_max = std::max(spectrum.eigenvalues(0), 0.0);
  for (int i = 0; i < n; ++i) {
    if (spectrum.eigenvalues(i) < kEigenClampRelTol * lambda_max) {
      spectrum.eigenvalues(i) = 0.0;
    }
  }
  return spectrum;
}

}  // namespace fairdiv
