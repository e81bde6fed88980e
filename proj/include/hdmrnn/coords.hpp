#pragma once

// Redundant coordinates y = W x generated by fixed rules (no biases), and
// per-feature affine scaling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hdmrnn/errors.hpp"
#include "hdmrnn/rng.hpp"
#include "hdmrnn/sobol.hpp"

namespace hdmrnn {

struct IdentityScheme {
  friend bool operator==(const IdentityScheme&, const IdentityScheme&) = default;
};

// Repeated pair averaging. With pair_cap set, each cycle appends a seeded
// uniform subset of at most pair_cap pairs instead of all of them.
struct PairwiseScheme {
  int cycles = 1;
  std::optional<std::size_t> pair_cap;
  std::uint64_t pair_seed = 0;
  friend bool operator==(const PairwiseScheme&, const PairwiseScheme&) = default;
};

// Rows are consecutive Sobol' points after skipping `skip` leading points.
struct SobolScheme {
  Eigen::Index count = 1;
  std::uint64_t skip = 1;
  friend bool operator==(const SobolScheme&, const SobolScheme&) = default;
};

// A user-supplied weight matrix with no generating rule.
struct CustomScheme {
  friend bool operator==(const CustomScheme&, const CustomScheme&) = default;
};

using CoordinateScheme = std::variant<IdentityScheme, PairwiseScheme, SobolScheme, CustomScheme>;

std::string describe(const CoordinateScheme& scheme);

template <typename Scalar = double>
class CoordinateMap {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CoordinateMap(Matrix weights, CoordinateScheme provenance)
      : weights_(std::move(weights)), provenance_(std::move(provenance)) {
    if (weights_.rows() < 1 || weights_.cols() < 1)
      throw DomainError("CoordinateMap: empty weight matrix");
    if (!weights_.allFinite()) throw DomainError("CoordinateMap: non-finite weight");
  }

  static CoordinateMap identity(Eigen::Index dim) {
    if (dim < 1) throw DomainError("CoordinateMap::identity: dimension must be positive");
    return CoordinateMap(Matrix::Identity(dim, dim), IdentityScheme{});
  }

  Eigen::Index input_dim() const { return weights_.cols(); }
  Eigen::Index size() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  const CoordinateScheme& provenance() const { return provenance_; }

  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != input_dim()) throw DomainError("apply_map: input length does not match map");
    return weights_ * x.template cast<Scalar>();
  }

  // Maps every row of X (points as rows): returns X W^T.
  template <typename Derived>
  Matrix apply_rows(const Eigen::MatrixBase<Derived>& X) const {
    if (X.cols() != input_dim()) throw DomainError("apply_map: input width does not match map");
    return X.template cast<Scalar>() * weights_.transpose();
  }

 private:
  Matrix weights_;
  CoordinateScheme provenance_;
};

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_map(const CoordinateMap<Scalar>& map,
                                                   const Eigen::MatrixBase<Derived>& x) {
  return map.apply(x);
}

// Appends, per cycle, (r_i + r_j) / 2 for each unordered pair i < j of the
// current rows, pairs taken in lexicographic order.
template <typename Scalar>
CoordinateMap<Scalar> pairwise_expand(const CoordinateMap<Scalar>& map, int cycles,
                                      std::optional<std::size_t> pair_cap = std::nullopt,
                                      std::uint64_t pair_seed = 0) {
  using Matrix = typename CoordinateMap<Scalar>::Matrix;
  if (cycles < 1) throw DomainError("pairwise_expand: cycles must be at least 1");
  if (map.size() < 2) throw DomainError("pairwise_expand: need at least two rows");
  if (pair_cap && *pair_cap == 0) throw DomainError("pairwise_expand: pair cap must be positive");

  SplitMix64 rng(pair_seed);
  Matrix rows = map.weights();
  for (int cycle = 0; cycle < cycles; ++cycle) {
    const Eigen::Index n = rows.rows();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    if (pair_cap && *pair_cap < pairs.size()) {
      auto picked = sample_without_replacement(rng, pairs.size(), *pair_cap);
      std::sort(picked.begin(), picked.end());
      std::vector<std::pair<Eigen::Index, Eigen::Index>> kept;
      kept.reserve(picked.size());
      for (std::size_t p : picked) kept.push_back(pairs[p]);
      pairs = std::move(kept);
    }
    Matrix grown(n + static_cast<Eigen::Index>(pairs.size()), rows.cols());
    grown.topRows(n) = rows;
    Eigen::Index r = n;
    for (const auto& [i, j] : pairs) grown.row(r++) = (rows.row(i) + rows.row(j)) / Scalar(2);
    rows = std::move(grown);
  }

  CoordinateScheme provenance = CustomScheme{};
  if (std::holds_alternative<IdentityScheme>(map.provenance())) {
    provenance = PairwiseScheme{cycles, pair_cap, pair_seed};
  } else if (const auto* p = std::get_if<PairwiseScheme>(&map.provenance());
             p && !p->pair_cap && !pair_cap) {
    provenance = PairwiseScheme{p->cycles + cycles, std::nullopt, 0};
  }
  return CoordinateMap<Scalar>(std::move(rows), std::move(provenance));
}

// N x D map whose n-th row is the n-th delivered Sobol' point.
template <typename Scalar = double>
CoordinateMap<Scalar> sobol_map(int dim, Eigen::Index count, std::uint64_t skip = 1) {
  return CoordinateMap<Scalar>(sobol_points(dim, count, skip).template cast<Scalar>(),
                               SobolScheme{count, skip});
}

template <typename Scalar = double>
CoordinateMap<Scalar> make_map(int dim, const CoordinateScheme& scheme) {
  return std::visit(
      [dim](const auto& s) -> CoordinateMap<Scalar> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IdentityScheme>) {
          return CoordinateMap<Scalar>::identity(dim);
        } else if constexpr (std::is_same_v<S, PairwiseScheme>) {
          return pairwise_expand(CoordinateMap<Scalar>::identity(dim), s.cycles, s.pair_cap,
                                 s.pair_seed);
        } else if constexpr (std::is_same_v<S, SobolScheme>) {
          return sobol_map<Scalar>(dim, s.count, s.skip);
        } else {
          throw DomainError("make_map: a custom scheme has no generating rule");
        }
      },
      scheme);
}

enum class ScalerMode { None, UnitVariance, UnitCube };

std::string_view to_string(ScalerMode mode);
ScalerMode parse_scaler_mode(std::string_view name);

// Per-column affine map z = (y - offset) / scale fitted on training data.
// Constant columns get scale 1 and are flagged as degenerate.
template <typename Scalar = double>
class FeatureScaler {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  FeatureScaler() = default;
  FeatureScaler(ScalerMode mode, Vector offset, Vector scale, std::vector<bool> degenerate)
      : mode_(mode), offset_(std::move(offset)), scale_(std::move(scale)),
        degenerate_(std::move(degenerate)) {
    if (offset_.size() != scale_.size() ||
        degenerate_.size() != static_cast<std::size_t>(scale_.size()))
      throw DomainError("FeatureScaler: inconsistent sizes");
    if (!(scale_.array() > Scalar(0)).all() || !scale_.allFinite() || !offset_.allFinite())
      throw DomainError("FeatureScaler: scales must be positive and finite");
  }

  static FeatureScaler identity(Eigen::Index dim) {
    return FeatureScaler(ScalerMode::None, Vector::Zero(dim), Vector::Ones(dim),
                         std::vector<bool>(static_cast<std::size_t>(dim), false));
  }

  ScalerMode mode() const { return mode_; }
  Eigen::Index dim() const { return offset_.size(); }
  const Vector& offset() const { return offset_; }
  const Vector& scale() const { return scale_; }
  const std::vector<bool>& degenerate() const { return degenerate_; }

  template <typename Derived>
  Vector transform(const Eigen::MatrixBase<Derived>& y) const {
    if (y.size() != dim()) throw DomainError("FeatureScaler: vector length does not match");
    return ((y.template cast<Scalar>() - offset_).array() / scale_.array()).matrix();
  }

  template <typename Derived>
  Matrix transform_rows(const Eigen::MatrixBase<Derived>& Y) const {
    if (Y.cols() != dim()) throw DomainError("FeatureScaler: column count does not match");
    return ((Y.template cast<Scalar>().rowwise() - offset_.transpose()).array().rowwise() /
            scale_.transpose().array())
        .matrix();
  }

  // Scales a single coordinate.
  Scalar transform_coordinate(Eigen::Index i, Scalar value) const {
    return (value - offset_(i)) / scale_(i);
  }

  friend bool operator==(const FeatureScaler& a, const FeatureScaler& b) {
    return a.mode_ == b.mode_ && a.offset_ == b.offset_ && a.scale_ == b.scale_ &&
           a.degenerate_ == b.degenerate_;
  }

 private:
  ScalerMode mode_ = ScalerMode::None;
  Vector offset_;
  Vector scale_;
  std::vector<bool> degenerate_;
};

// UnitVariance uses the sample (M - 1) variance, UnitCube the column min/max.
template <typename Scalar, typename Derived>
FeatureScaler<Scalar> fit_scaler(ScalerMode mode, const Eigen::MatrixBase<Derived>& Y) {
  using Vector = typename FeatureScaler<Scalar>::Vector;
  const Eigen::Index m = Y.rows();
  const Eigen::Index n = Y.cols();
  if (m < 1) throw DomainError("fit_scaler: no rows");
  if (!Y.allFinite()) throw DomainError("fit_scaler: non-finite value");
  if (mode == ScalerMode::None) return FeatureScaler<Scalar>::identity(n);
  if (mode == ScalerMode::UnitVariance && m < 2)
    throw DomainError("fit_scaler: unit-variance scaling needs at least two rows");

  Vector offset(n), scale(n);
  std::vector<bool> degenerate(static_cast<std::size_t>(n), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto col = Y.col(j).template cast<Scalar>();
    Scalar spread;
    if (mode == ScalerMode::UnitVariance) {
      offset(j) = col.mean();
      spread = std::sqrt((col.array() - offset(j)).square().sum() / Scalar(m - 1));
    } else {
      offset(j) = col.minCoeff();
      spread = col.maxCoeff() - offset(j);
    }
    if (spread > Scalar(0) && std::isfinite(spread)) {
      scale(j) = spread;
    } else {
      scale(j) = Scalar(1);
      degenerate[static_cast<std::size_t>(j)] = true;
    }
  }
  return FeatureScaler<Scalar>(mode, std::move(offset), std::move(scale), std::move(degenerate));
}

}  // namespace hdmrnn
