#pragma once

// Additive Gaussian process regression (posterior mean only) and the
// component functions induced by an additive kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdmrnn/coords.hpp"
#include "hdmrnn/errors.hpp"
#include "hdmrnn/kernels.hpp"
#include "hdmrnn/spd_solver.hpp"

namespace hdmrnn {

// Whether component inputs are user coordinates or already scaled features.
enum class InputSpace { Raw, Scaled };

struct GprOptions {
  ScalerMode scaler = ScalerMode::None;
  // Subtract the training mean from the targets and add it back on prediction.
  bool center_targets = true;
  RetryPolicy retry;
};

template <typename Scalar = double>
struct ComponentStats {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> stddev;
  // Subset indices by descending stddev, ties by ascending index.
  std::vector<std::size_t> ranking;
};

template <typename Scalar = double>
class TrainedGpr {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Rows evaluated per block in batch routines; bounds the size of the
  // temporary cross-covariance.
  static constexpr Eigen::Index kBlockRows = 1024;

  TrainedGpr(Matrix inputs, Vector coefficients, AdditiveKernelSpec<Scalar> kernel, Scalar delta,
             FeatureScaler<Scalar> scaler, Scalar target_offset)
      : inputs_(std::move(inputs)), coefficients_(std::move(coefficients)),
        kernel_(std::move(kernel)), delta_(delta), scaler_(std::move(scaler)),
        target_offset_(target_offset) {
    if (inputs_.rows() != coefficients_.size())
      throw DomainError("TrainedGpr: coefficient count does not match training points");
    if (inputs_.cols() != kernel_.dim() || scaler_.dim() != kernel_.dim())
      throw DomainError("TrainedGpr: kernel, scaler and input widths disagree");
  }

  // Scaled training features, one row per point.
  const Matrix& inputs() const { return inputs_; }
  const Vector& coefficients() const { return coefficients_; }
  const AdditiveKernelSpec<Scalar>& kernel() const { return kernel_; }
  Scalar delta() const { return delta_; }
  const FeatureScaler<Scalar>& scaler() const { return scaler_; }
  Scalar target_offset() const { return target_offset_; }
  Eigen::Index dim() const { return kernel_.dim(); }
  Eigen::Index training_size() const { return inputs_.rows(); }

  template <typename Derived>
  Scalar predict(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != dim()) throw DomainError("predict: input length does not match model");
    if (!x.allFinite()) throw DomainError("predict: non-finite input");
    const Vector z = scaler_.transform(x);
    Scalar sum(0);
    for (Eigen::Index n = 0; n < inputs_.rows(); ++n)
      sum += eval_additive(kernel_, z, inputs_.row(n).transpose()) * coefficients_(n);
    return sum + target_offset_;
  }

  template <typename Derived>
  Vector predict_rows(const Eigen::MatrixBase<Derived>& X) const {
    if (X.cols() != dim()) throw DomainError("predict: input width does not match model");
    Vector out(X.rows());
    for (Eigen::Index start = 0; start < X.rows(); start += kBlockRows) {
      const Eigen::Index len = std::min(kBlockRows, X.rows() - start);
      const Matrix Z = scaler_.transform_rows(X.middleRows(start, len));
      out.segment(start, len) = cross_covariance(kernel_, Z, inputs_) * coefficients_;
    }
    return (out.array() + target_offset_).matrix();
  }

  // f_i(u) = sum_n k_i(u, X_n restricted to subset i) c_n.
  template <typename Derived>
  Scalar component_value(std::size_t subset_index, const Eigen::MatrixBase<Derived>& u,
                         InputSpace space = InputSpace::Raw) const {
    if (subset_index >= kernel_.size())
      throw DomainError("component_value: subset index out of range");
    const Subset& s = kernel_.subset(subset_index);
    if (u.size() != static_cast<Eigen::Index>(s.size()))
      throw DomainError("component_value: input length does not match subset");
    const Scalar inv_l = Scalar(1) / kernel_.base().length_scale();
    Vector z(u.size());
    for (Eigen::Index k = 0; k < u.size(); ++k)
      z(k) = space == InputSpace::Raw ? scaler_.transform_coordinate(s[k], Scalar(u(k)))
                                      : Scalar(u(k));
    Scalar sum(0);
    for (Eigen::Index n = 0; n < inputs_.rows(); ++n) {
      Scalar sq(0);
      for (std::size_t k = 0; k < s.size(); ++k) {
        const Scalar d = (z(k) - inputs_(n, s[k])) * inv_l;
        sq += d * d;
      }
      sum += detail::matern_from_scaled_sq(kernel_.base().family, kernel_.base().amplitude, sq) *
             coefficients_(n);
    }
    return sum;
  }

  // Column i holds component i evaluated at every row of X (full points).
  template <typename Derived>
  Matrix component_matrix(const Eigen::MatrixBase<Derived>& X,
                          InputSpace space = InputSpace::Raw) const {
    if (X.cols() != dim()) throw DomainError("component_matrix: input width does not match model");
    Matrix out(X.rows(), static_cast<Eigen::Index>(kernel_.size()));
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> work;
    for (Eigen::Index start = 0; start < X.rows(); start += kBlockRows) {
      const Eigen::Index len = std::min(kBlockRows, X.rows() - start);
      const Matrix Z = space == InputSpace::Raw ? scaler_.transform_rows(X.middleRows(start, len))
                                                : Matrix(X.middleRows(start, len));
      for (std::size_t i = 0; i < kernel_.size(); ++i) {
        detail::subset_block(kernel_, i, Z, inputs_, work);
        out.col(static_cast<Eigen::Index>(i)).segment(start, len).noalias() =
            work.matrix() * coefficients_;
      }
    }
    return out;
  }

 private:
  Matrix inputs_;
  Vector coefficients_;
  AdditiveKernelSpec<Scalar> kernel_;
  Scalar delta_;
  FeatureScaler<Scalar> scaler_;
  Scalar target_offset_;
};

template <typename Scalar, typename DerivedX, typename DerivedF>
TrainedGpr<Scalar> train(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedF>& f,
                         const AdditiveKernelSpec<Scalar>& kernel, Scalar delta,
                         const GprOptions& options = {}) {
  using Vector = typename TrainedGpr<Scalar>::Vector;
  if (X.rows() < 1) throw DomainError("train: no training points");
  if (X.cols() != kernel.dim()) throw DomainError("train: input width does not match kernel");
  if (f.size() != X.rows()) throw DomainError("train: target count does not match inputs");
  if (!f.allFinite()) throw DomainError("train: non-finite target");

  auto scaler = fit_scaler<Scalar>(options.scaler, X);
  typename TrainedGpr<Scalar>::Matrix Z = scaler.transform_rows(X);
  const Scalar offset = options.center_targets ? Scalar(f.template cast<Scalar>().mean()) : Scalar(0);
  const Vector centered = (f.template cast<Scalar>().array() - offset).matrix();
  const auto system = assemble(kernel, Z, delta);
  auto solved = solve_with_retry(system, centered, options.retry);
  return TrainedGpr<Scalar>(std::move(Z), std::move(solved.coefficients), kernel, solved.delta,
                            std::move(scaler), offset);
}

// Training-set mean and population stddev of every component function.
template <typename Scalar>
ComponentStats<Scalar> component_stats(const TrainedGpr<Scalar>& model) {
  const auto values = model.component_matrix(model.inputs(), InputSpace::Scaled);
  ComponentStats<Scalar> stats;
  const auto m = static_cast<Scalar>(values.rows());
  stats.mean = values.colwise().mean().transpose();
  stats.stddev.resize(values.cols());
  for (Eigen::Index i = 0; i < values.cols(); ++i)
    stats.stddev(i) = std::sqrt((values.col(i).array() - stats.mean(i)).square().sum() / m);
  stats.ranking.resize(static_cast<std::size_t>(values.cols()));
  std::iota(stats.ranking.begin(), stats.ranking.end(), std::size_t{0});
  std::stable_sort(stats.ranking.begin(), stats.ranking.end(), [&](std::size_t a, std::size_t b) {
    return stats.stddev(static_cast<Eigen::Index>(a)) > stats.stddev(static_cast<Eigen::Index>(b));
  });
  return stats;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rmse(const Eigen::MatrixBase<DerivedA>& predicted,
                               const Eigen::MatrixBase<DerivedB>& reference) {
  if (predicted.size() == 0) throw DomainError("rmse: empty evaluation set");
  if (predicted.size() != reference.size()) throw DomainError("rmse: length mismatch");
  return std::sqrt((predicted - reference).squaredNorm() /
                   static_cast<typename DerivedA::Scalar>(predicted.size()));
}

template <typename Scalar, typename DerivedX, typename DerivedF>
Scalar rmse(const TrainedGpr<Scalar>& model, const Eigen::MatrixBase<DerivedX>& X,
            const Eigen::MatrixBase<DerivedF>& f) {
  if (X.rows() == 0) throw DomainError("rmse: empty evaluation set");
  return rmse(model.predict_rows(X), f.template cast<Scalar>());
}

}  // namespace hdmrnn
