#include "dryfric/linear_solver.hpp"

#include <Eigen/UmfPackSupport>

#include <sstream>

#include "dryfric/error.hpp"

namespace dryfric::linalg {

template <class Scalar>
struct DirectLU<Scalar>::Impl {
  Matrix A;
  Eigen::UmfPackLU<Matrix> lu;
  double norm_inf = 0.0;
};

template <class Scalar>
DirectLU<Scalar>::DirectLU(Matrix A, double tolerance)
    : impl_(std::make_unique<Impl>()), tolerance_(tolerance) {
  if (A.rows() != A.cols()) throw InvalidArgument("DirectLU needs a square matrix");
  A.makeCompressed();
  impl_->A = std::move(A);
  const Matrix& M = impl_->A;
  Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(M.rows());
  for (Eigen::Index c = 0; c < M.outerSize(); ++c)
    for (typename Matrix::InnerIterator it(M, c); it; ++it) row_abs[it.row()] += std::abs(it.value());
  impl_->norm_inf = M.rows() ? row_abs.maxCoeff() : 0.0;

  impl_->lu.compute(M);
  if (impl_->lu.info() != Eigen::Success)
    throw NumericError("sparse LU factorization failed (singular or out of memory)");
  report_.factorizations = 1;
  report_.n = static_cast<std::size_t>(M.rows());
  report_.nnz = static_cast<std::size_t>(M.nonZeros());
}

template <class Scalar>
DirectLU<Scalar>::~DirectLU() = default;
template <class Scalar>
DirectLU<Scalar>::DirectLU(DirectLU&&) noexcept = default;
template <class Scalar>
DirectLU<Scalar>& DirectLU<Scalar>::operator=(DirectLU&&) noexcept = default;

template <class Scalar>
Eigen::Index DirectLU<Scalar>::rows() const noexcept {
  return impl_->A.rows();
}

template <class Scalar>
typename DirectLU<Scalar>::Vector DirectLU<Scalar>::solve(const Vector& b) {
  if (b.size() != impl_->A.rows()) throw InvalidArgument("DirectLU::solve: size mismatch");
  Vector x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success) throw NumericError("sparse LU solve failed");
  ++report_.solves;
  const double r = (impl_->A * x - b).cwiseAbs().maxCoeff();
  const double scale = impl_->norm_inf * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
  const double rel = scale > 0.0 ? r / scale : r;
  if (!(rel <= tolerance_)) {
    std::ostringstream os;
    os << "linear solve residual " << rel << " exceeds tolerance " << tolerance_;
    throw NumericError(os.str());
  }
  report_.residual = std::max(report_.residual, rel);
  return x;
}

template class DirectLU<double>;
template class DirectLU<std::complex<double>>;

}  // namespace dryfric::linalg
