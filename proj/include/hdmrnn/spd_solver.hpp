#pragma once

// Regularized Gram matrix assembly and Cholesky solve for GPR coefficients.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "hdmrnn/errors.hpp"
#include "hdmrnn/kernels.hpp"

namespace hdmrnn {

template <typename Scalar = double>
class GramSystem {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GramSystem(Matrix matrix, Scalar delta) : matrix_(std::move(matrix)), delta_(delta) {}

  Eigen::Index size() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Scalar delta() const { return delta_; }

  // Same kernel block with a different regularizer on the diagonal.
  GramSystem with_delta(Scalar delta) const {
    Matrix m = matrix_;
    m.diagonal().array() += delta - delta_;
    return GramSystem(std::move(m), delta);
  }

 private:
  Matrix matrix_;
  Scalar delta_;
};

namespace detail {

// Eigen's LLT does not expose where it broke down; replay an unblocked
// left-looking factorization to find the first non-positive pivot.
template <typename Matrix>
std::size_t failing_pivot(const Matrix& K) {
  using Scalar = typename Matrix::Scalar;
  const Eigen::Index n = K.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Scalar d = K(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > Scalar(0)) || !std::isfinite(d)) return static_cast<std::size_t>(j);
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      L(i, j) = (K(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return static_cast<std::size_t>(n);
}

}  // namespace detail

template <typename Scalar, typename Derived>
GramSystem<Scalar> assemble(const AdditiveKernelSpec<Scalar>& spec,
                            const Eigen::MatrixBase<Derived>& X, Scalar delta) {
  if (X.rows() < 1) throw DomainError("assemble: no training points");
  if (X.cols() != spec.dim()) throw DomainError("assemble: input width does not match kernel");
  if (!X.allFinite()) throw DomainError("assemble: non-finite training input");
  if (!(delta >= Scalar(0)) || !std::isfinite(delta))
    throw DomainError("assemble: delta must be finite and nonnegative");
  // (a - b)^2 == (b - a)^2 in floating point, so K is exactly symmetric.
  auto K = cross_covariance(spec, X, X);
  K.diagonal().array() += delta;
  return GramSystem<Scalar>(std::move(K), delta);
}

// Solves (K + delta I) c = f with an LLT factorization. Throws
// ConditioningError carrying the first non-positive pivot on failure.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const GramSystem<Scalar>& system,
                                               const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != system.size()) throw DomainError("solve: target length does not match system");
  if (!f.allFinite()) throw DomainError("solve: non-finite target");
  const auto& K = system.matrix();
  Eigen::LLT<typename GramSystem<Scalar>::Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    const std::size_t pivot = detail::failing_pivot(K);
    throw ConditioningError("solve: matrix is not numerically positive definite at pivot " +
                                std::to_string(pivot) + " (delta " +
                                std::to_string(system.delta()) + ")",
                            pivot);
  }
  return llt.solve(f.template cast<Scalar>().eval());
}

// Opt-in jitter escalation: on ConditioningError multiply delta by `factor`
// and retry, up to `max_delta`. Each retry is reported through `warn`.
struct RetryPolicy {
  bool enabled = false;
  double factor = 10.0;
  double max_delta = 1e-2;
  std::function<void(std::string_view)> warn;
};

template <typename Scalar>
struct SolveResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
  Scalar delta;
};

template <typename Scalar, typename Derived>
SolveResult<Scalar> solve_with_retry(const GramSystem<Scalar>& system,
                                     const Eigen::MatrixBase<Derived>& f,
                                     const RetryPolicy& policy) {
  GramSystem<Scalar> current = system;
  while (true) {
    try {
      return {solve(current, f), current.delta()};
    } catch (const ConditioningError& e) {
      if (!policy.enabled) throw;
      Scalar next = current.delta() > Scalar(0) ? current.delta() * Scalar(policy.factor)
                                                : Scalar(1e-10);
      if (next > Scalar(policy.max_delta)) throw;
      if (policy.warn)
        policy.warn("factorization failed at pivot " + std::to_string(e.pivot()) +
                    "; retrying with delta " + std::to_string(next));
      current = current.with_delta(next);
    }
  }
}

}  // namespace hdmrnn
