#pragma once

// A single-hidden-layer network whose neurons are the component functions
// of a first-order additive GPR over rule-generated coordinates y = W x.
// Each neuron n applies its own activation sigma_n to y_n; the output is the
// sum of the activations plus a constant.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdmrnn/coords.hpp"
#include "hdmrnn/errors.hpp"
#include "hdmrnn/gpr.hpp"
#include "hdmrnn/kernels.hpp"

namespace hdmrnn {

// Where feature scaling is applied: on the redundant coordinates y (the
// regression features) or on the original inputs x before mapping.
enum class ScaleSpace { Features, Inputs };

struct BuildOptions {
  ScalerMode scaler = ScalerMode::UnitVariance;
  ScaleSpace scale_space = ScaleSpace::Features;
  bool center_targets = true;
  RetryPolicy retry;
};

enum class PruneMode {
  Mask,   // deactivate neurons, keep coefficients
  Refit,  // retrain the GPR on the kept coordinates only
};

template <typename Scalar = double>
class NeuralAdditiveModel {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  NeuralAdditiveModel(CoordinateMap<Scalar> map, FeatureScaler<Scalar> input_scaler,
                      TrainedGpr<Scalar> core, ComponentStats<Scalar> stats,
                      std::vector<bool> active, Scalar prune_constant, PruneMode mode,
                      Matrix train_inputs, Vector train_targets)
      : map_(std::move(map)), input_scaler_(std::move(input_scaler)), core_(std::move(core)),
        stats_(std::move(stats)), active_(std::move(active)), prune_constant_(prune_constant),
        mode_(mode), train_inputs_(std::move(train_inputs)),
        train_targets_(std::move(train_targets)) {
    const auto n = static_cast<std::size_t>(map_.size());
    if (core_.dim() != map_.size()) throw DomainError("NeuralAdditiveModel: core width != N");
    if (active_.size() != n || static_cast<std::size_t>(stats_.stddev.size()) != n)
      throw DomainError("NeuralAdditiveModel: mask or stats size != N");
    if (input_scaler_.dim() != map_.input_dim())
      throw DomainError("NeuralAdditiveModel: input scaler width != D");
    if (train_inputs_.cols() != map_.input_dim() || train_inputs_.rows() != train_targets_.size())
      throw DomainError("NeuralAdditiveModel: training data shape mismatch");
    const auto& subsets = core_.kernel().subsets();
    if (mode_ == PruneMode::Mask) {
      if (subsets.size() != n || !core_.kernel().is_first_order())
        throw DomainError("NeuralAdditiveModel: core must have N singleton subsets");
    } else if (!core_.kernel().is_first_order()) {
      throw DomainError("NeuralAdditiveModel: core must be first order");
    }
  }

  const CoordinateMap<Scalar>& map() const { return map_; }
  const FeatureScaler<Scalar>& input_scaler() const { return input_scaler_; }
  const TrainedGpr<Scalar>& core() const { return core_; }
  const ComponentStats<Scalar>& stats() const { return stats_; }
  const std::vector<bool>& active() const { return active_; }
  Scalar prune_constant() const { return prune_constant_; }
  PruneMode prune_mode() const { return mode_; }
  const Matrix& train_inputs() const { return train_inputs_; }
  const Vector& train_targets() const { return train_targets_; }

  Eigen::Index input_dim() const { return map_.input_dim(); }
  Eigen::Index neurons() const { return map_.size(); }
  std::size_t active_count() const {
    return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
  }
  bool all_active() const { return active_count() == active_.size(); }

  // y = W x (after input scaling when scale_space is Inputs).
  template <typename Derived>
  Vector project(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != input_dim()) throw DomainError("predict: input length does not match model");
    return map_.apply(input_scaler_.transform(x));
  }

  template <typename Derived>
  Matrix project_rows(const Eigen::MatrixBase<Derived>& X) const {
    return map_.apply_rows(input_scaler_.transform_rows(X));
  }

  // sigma_n(y): the activation of neuron n at pre-scaling coordinate value y.
  // Defined for inactive neurons too.
  Scalar activation(Eigen::Index neuron, Scalar y) const {
    if (neuron < 0 || neuron >= neurons()) throw DomainError("activation: neuron out of range");
    const auto& base = core_.kernel().base();
    const Scalar z = core_.scaler().transform_coordinate(neuron, y);
    const Scalar inv_l = Scalar(1) / base.length_scale();
    const auto& Y = core_.inputs();
    const auto& c = core_.coefficients();
    Scalar sum(0);
    for (Eigen::Index m = 0; m < Y.rows(); ++m) {
      const Scalar d = (z - Y(m, neuron)) * inv_l;
      sum += detail::matern_from_scaled_sq(base.family, base.amplitude, d * d) * c(m);
    }
    return sum;
  }

  // Mask-mode models always sum per-neuron terms, adding the prune constant
  // last, so masking constant components leaves predictions unchanged.
  template <typename Derived>
  Scalar predict(const Eigen::MatrixBase<Derived>& x) const {
    const Vector y = project(x);
    if (mode_ == PruneMode::Refit) return core_.predict(y);
    Scalar sum = core_.target_offset();
    for (Eigen::Index n = 0; n < neurons(); ++n)
      if (active_[static_cast<std::size_t>(n)]) sum += activation(n, y(n));
    return sum + prune_constant_;
  }

  template <typename Derived>
  Vector predict_rows(const Eigen::MatrixBase<Derived>& X) const {
    const Matrix Y = project_rows(X);
    if (mode_ == PruneMode::Refit) return core_.predict_rows(Y);
    const Matrix C = core_.component_matrix(Y);
    Vector out = Vector::Constant(X.rows(), core_.target_offset());
    for (Eigen::Index n = 0; n < neurons(); ++n)
      if (active_[static_cast<std::size_t>(n)]) out += C.col(n);
    return (out.array() + prune_constant_).matrix();
  }

  // Tabulates sigma_n on a grid of y values.
  std::vector<std::pair<Scalar, Scalar>> activation_table(Eigen::Index neuron,
                                                          const std::vector<Scalar>& grid) const {
    if (neuron < 0 || neuron >= neurons())
      throw DomainError("activation_table: neuron out of range");
    std::vector<std::pair<Scalar, Scalar>> table;
    table.reserve(grid.size());
    for (Scalar y : grid) table.emplace_back(y, activation(neuron, y));
    return table;
  }

 private:
  CoordinateMap<Scalar> map_;
  FeatureScaler<Scalar> input_scaler_;
  TrainedGpr<Scalar> core_;
  ComponentStats<Scalar> stats_;
  std::vector<bool> active_;
  Scalar prune_constant_;
  PruneMode mode_;
  Matrix train_inputs_;
  Vector train_targets_;
};

template <typename Scalar, typename DerivedX, typename DerivedF>
NeuralAdditiveModel<Scalar> build(const Eigen::MatrixBase<DerivedX>& X,
                                  const Eigen::MatrixBase<DerivedF>& f, CoordinateMap<Scalar> map,
                                  const KernelSpec<Scalar>& kernel, Scalar delta,
                                  const BuildOptions& options = {}) {
  using Matrix = typename NeuralAdditiveModel<Scalar>::Matrix;
  if (X.cols() != map.input_dim()) throw DomainError("build: input width does not match map");
  if (X.rows() < 1) throw DomainError("build: no training points");
  if (!X.allFinite()) throw DomainError("build: non-finite input");

  const bool scale_inputs = options.scale_space == ScaleSpace::Inputs;
  auto input_scaler = scale_inputs ? fit_scaler<Scalar>(options.scaler, X)
                                   : FeatureScaler<Scalar>::identity(map.input_dim());
  const Matrix Y = map.apply_rows(input_scaler.transform_rows(X));

  GprOptions gpr_options;
  gpr_options.scaler = scale_inputs ? ScalerMode::None : options.scaler;
  gpr_options.center_targets = options.center_targets;
  gpr_options.retry = options.retry;
  auto core =
      train(Y, f, AdditiveKernelSpec<Scalar>::first_order(map.size(), kernel), delta, gpr_options);
  auto stats = component_stats(core);
  std::vector<bool> active(static_cast<std::size_t>(map.size()), true);
  return NeuralAdditiveModel<Scalar>(std::move(map), std::move(input_scaler), std::move(core),
                                     std::move(stats), std::move(active), Scalar(0),
                                     PruneMode::Mask, Matrix(X.template cast<Scalar>()),
                                     f.template cast<Scalar>());
}

template <typename Scalar, typename DerivedX, typename DerivedF>
NeuralAdditiveModel<Scalar> build(const Eigen::MatrixBase<DerivedX>& X,
                                  const Eigen::MatrixBase<DerivedF>& f,
                                  const CoordinateScheme& scheme, const KernelSpec<Scalar>& kernel,
                                  Scalar delta, const BuildOptions& options = {}) {
  return build(X, f, make_map<Scalar>(static_cast<int>(X.cols()), scheme), kernel, delta, options);
}

// Indices of the keep_n highest-ranked neurons, ascending.
template <typename Scalar>
std::vector<std::size_t> top_neurons(const ComponentStats<Scalar>& stats, std::size_t keep_n) {
  std::vector<std::size_t> kept(stats.ranking.begin(),
                                stats.ranking.begin() + static_cast<std::ptrdiff_t>(keep_n));
  std::sort(kept.begin(), kept.end());
  return kept;
}

// Keeps the keep_n neurons with the largest training-set stddev. In Mask
// mode coefficients are untouched and the training means of the dropped
// components move into the prune constant. Pruning is always relative to
// the model's original ranking, so pruning back to N restores it exactly.
template <typename Scalar>
NeuralAdditiveModel<Scalar> prune(const NeuralAdditiveModel<Scalar>& model, std::size_t keep_n,
                                  PruneMode mode = PruneMode::Mask) {
  const auto n = static_cast<std::size_t>(model.neurons());
  if (keep_n < 1 || keep_n > n) throw DomainError("prune: keep count out of range");
  const auto kept = top_neurons(model.stats(), keep_n);
  std::vector<bool> active(n, false);
  for (std::size_t i : kept) active[i] = true;

  if (mode == PruneMode::Mask) {
    if (model.prune_mode() == PruneMode::Refit)
      throw DomainError("prune: cannot mask a refitted model; prune the original instead");
    Scalar constant(0);
    for (std::size_t i = 0; i < n; ++i)
      if (!active[i]) constant += model.stats().mean(static_cast<Eigen::Index>(i));
    return NeuralAdditiveModel<Scalar>(model.map(), model.input_scaler(), model.core(),
                                       model.stats(), std::move(active), constant, PruneMode::Mask,
                                       model.train_inputs(), model.train_targets());
  }

  const auto& old = model.core();
  std::vector<Subset> subsets;
  for (std::size_t i : kept) subsets.push_back({static_cast<Eigen::Index>(i)});
  AdditiveKernelSpec<Scalar> kernel(model.neurons(), std::move(subsets), old.kernel().base());
  // Refit in the same scaled feature space; the scaler is carried over.
  const auto system = assemble(kernel, old.inputs(), old.delta());
  const auto& f = model.train_targets();
  const Scalar offset = old.target_offset();
  auto c = solve(system, (f.array() - offset).matrix().eval());
  TrainedGpr<Scalar> core(old.inputs(), std::move(c), std::move(kernel), old.delta(),
                          old.scaler(), offset);
  return NeuralAdditiveModel<Scalar>(model.map(), model.input_scaler(), std::move(core),
                                     model.stats(), std::move(active), Scalar(0),
                                     PruneMode::Refit, model.train_inputs(), model.train_targets());
}

template <typename Scalar>
struct PruneScanRow {
  std::size_t keep_n;
  Scalar train_rmse;
  Scalar test_rmse;
};

// Train/test rmse for Mask-mode pruning to each keep_n, from a single
// evaluation of every component on both point sets.
template <typename Scalar, typename DX1, typename DF1, typename DX2, typename DF2>
std::vector<PruneScanRow<Scalar>> prune_scan(const NeuralAdditiveModel<Scalar>& model,
                                             const Eigen::MatrixBase<DX1>& X_train,
                                             const Eigen::MatrixBase<DF1>& f_train,
                                             const Eigen::MatrixBase<DX2>& X_test,
                                             const Eigen::MatrixBase<DF2>& f_test,
                                             const std::vector<std::size_t>& keep_list) {
  using Matrix = typename NeuralAdditiveModel<Scalar>::Matrix;
  using Vector = typename NeuralAdditiveModel<Scalar>::Vector;
  if (model.prune_mode() != PruneMode::Mask)
    throw DomainError("prune_scan: needs an unrefitted model");
  const auto n = static_cast<std::size_t>(model.neurons());
  for (std::size_t k : keep_list)
    if (k < 1 || k > n) throw DomainError("prune_scan: keep count out of range");
  const Matrix C_train = model.core().component_matrix(model.project_rows(X_train));
  const Matrix C_test = model.core().component_matrix(model.project_rows(X_test));
  const auto& stats = model.stats();

  auto evaluate = [&](const Matrix& C, const auto& f, const std::vector<bool>& active) {
    Vector pred = Vector::Constant(C.rows(), model.core().target_offset());
    Scalar constant(0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      if (active[i]) pred += C.col(col);
      else constant += stats.mean(col);
    }
    return rmse((pred.array() + constant).matrix().eval(), f.template cast<Scalar>());
  };

  std::vector<PruneScanRow<Scalar>> rows;
  for (std::size_t k : keep_list) {
    std::vector<bool> active(n, false);
    for (std::size_t i : top_neurons(stats, k)) active[i] = true;
    rows.push_back({k, evaluate(C_train, f_train, active), evaluate(C_test, f_test, active)});
  }
  return rows;
}

// Train/test rmse for Refit-mode pruning to each keep_n. Kept sets are
// nested along the ranking, so the Gram and test covariance are grown one
// neuron at a time and only the solve is repeated.
template <typename Scalar, typename DX1, typename DF1, typename DX2, typename DF2>
std::vector<PruneScanRow<Scalar>> prune_scan_refit(const NeuralAdditiveModel<Scalar>& model,
                                                   const Eigen::MatrixBase<DX1>& X_train,
                                                   const Eigen::MatrixBase<DF1>& f_train,
                                                   const Eigen::MatrixBase<DX2>& X_test,
                                                   const Eigen::MatrixBase<DF2>& f_test,
                                                   std::vector<std::size_t> keep_list) {
  using Matrix = typename NeuralAdditiveModel<Scalar>::Matrix;
  using Vector = typename NeuralAdditiveModel<Scalar>::Vector;
  if (model.prune_mode() != PruneMode::Mask)
    throw DomainError("prune_scan_refit: needs an unrefitted model");
  const auto n = static_cast<std::size_t>(model.neurons());
  for (std::size_t k : keep_list)
    if (k < 1 || k > n) throw DomainError("prune_scan_refit: keep count out of range");
  const auto& core = model.core();
  const Matrix& Y = core.inputs();
  const Matrix Z_train = core.scaler().transform_rows(model.project_rows(X_train));
  const Matrix Z_test = core.scaler().transform_rows(model.project_rows(X_test));
  const Scalar offset = core.target_offset();
  const Vector centered = (model.train_targets().array() - offset).matrix();

  std::vector<std::size_t> wanted = keep_list;
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  Matrix K = Matrix::Zero(Y.rows(), Y.rows());
  Matrix K_train = Matrix::Zero(Z_train.rows(), Y.rows());
  Matrix K_test = Matrix::Zero(Z_test.rows(), Y.rows());
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> work;
  std::vector<std::pair<Scalar, Scalar>> errors(wanted.size());
  std::size_t added = 0;
  for (std::size_t w = 0; w < wanted.size(); ++w) {
    for (; added < wanted[w]; ++added) {
      const std::size_t i = model.stats().ranking[added];
      detail::subset_block(core.kernel(), i, Y, Y, work);
      K.array() += work;
      detail::subset_block(core.kernel(), i, Z_train, Y, work);
      K_train.array() += work;
      detail::subset_block(core.kernel(), i, Z_test, Y, work);
      K_test.array() += work;
    }
    Matrix A = K;
    A.diagonal().array() += core.delta();
    const Vector c = solve(GramSystem<Scalar>(std::move(A), core.delta()), centered);
    const Vector p_train = ((K_train * c).array() + offset).matrix();
    const Vector p_test = ((K_test * c).array() + offset).matrix();
    errors[w] = {rmse(p_train, f_train.template cast<Scalar>()),
                 rmse(p_test, f_test.template cast<Scalar>())};
  }
  std::vector<PruneScanRow<Scalar>> rows;
  for (std::size_t k : keep_list) {
    const auto w = static_cast<std::size_t>(
        std::lower_bound(wanted.begin(), wanted.end(), k) - wanted.begin());
    rows.push_back({k, errors[w].first, errors[w].second});
  }
  return rows;
}

}  // namespace hdmrnn
