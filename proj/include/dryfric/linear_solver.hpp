#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace dryfric::linalg {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using SpMatC = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;

/// Bookkeeping returned with every solve.
struct SolveReport {
  double lambda = 0.0;
  double residual = 0.0;  ///< largest relative residual seen so far
  int factorizations = 0;
  int solves = 0;
  std::size_t n = 0;
  std::size_t nnz = 0;
};

/// Sparse LU factorization (UMFPACK) of a square matrix, reused across
/// right-hand sides. Every solve checks the relative residual
/// |Ax - b|_inf / (|A|_inf |x|_inf + |b|_inf) against `tolerance` and throws
/// NumericError when it is exceeded.
template <class Scalar>
class DirectLU {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit DirectLU(Matrix A, double tolerance = 1e-9);
  ~DirectLU();
  DirectLU(DirectLU&&) noexcept;
  DirectLU& operator=(DirectLU&&) noexcept;

  Vector solve(const Vector& b);

  const SolveReport& report() const noexcept { return report_; }
  SolveReport& report() noexcept { return report_; }
  Eigen::Index rows() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SolveReport report_;
  double tolerance_;
};

extern template class DirectLU<double>;
extern template class DirectLU<std::complex<double>>;

using RealLU = DirectLU<double>;
using ComplexLU = DirectLU<std::complex<double>>;

}  // namespace dryfric::linalg
