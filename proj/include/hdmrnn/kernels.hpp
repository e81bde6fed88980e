#pragma once

// Stationary base covariances (closed-form Matern family) and additive
// kernels built as sums of base kernels over coordinate subsets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "hdmrnn/errors.hpp"

namespace hdmrnn {

enum class KernelFamily {
  Exponential,         // nu = 1/2
  Matern32,            // nu = 3/2
  Matern52,            // nu = 5/2
  SquaredExponential,  // nu -> infinity
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

template <typename Scalar = double>
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  // The length scale is exp(log_length_scale).
  Scalar log_length_scale = Scalar(0);
  Scalar amplitude = Scalar(1);

  Scalar length_scale() const { return std::exp(log_length_scale); }
};

namespace detail {

// Base kernel as a function of the squared scaled distance s2 = (r / l)^2.
// Works elementwise on Eigen arrays as well as on plain scalars.
template <typename Scalar, typename T>
auto matern_from_scaled_sq(KernelFamily family, Scalar amplitude, const T& s2) {
  using std::exp;
  using std::sqrt;
  if constexpr (std::is_arithmetic_v<T>) {
    switch (family) {
      case KernelFamily::Exponential:
        return amplitude * exp(-sqrt(s2));
      case KernelFamily::Matern32: {
        const T a = sqrt(T(3) * s2);
        return amplitude * (T(1) + a) * exp(-a);
      }
      case KernelFamily::Matern52: {
        const T a = sqrt(T(5) * s2);
        return amplitude * (T(1) + a + T(5) * s2 / T(3)) * exp(-a);
      }
      case KernelFamily::SquaredExponential:
        return amplitude * exp(-s2 / T(2));
    }
    return T(0);
  } else {
    using Array = typename T::PlainObject;
    switch (family) {
      case KernelFamily::Exponential:
        return Array(amplitude * (-s2.sqrt()).exp());
      case KernelFamily::Matern32: {
        const Array a = (Scalar(3) * s2).sqrt();
        return Array(amplitude * (Scalar(1) + a) * (-a).exp());
      }
      case KernelFamily::Matern52: {
        const Array a = (Scalar(5) * s2).sqrt();
        return Array(amplitude * (Scalar(1) + a + Scalar(5) * s2 / Scalar(3)) * (-a).exp());
      }
      case KernelFamily::SquaredExponential:
        return Array(amplitude * (-s2 / Scalar(2)).exp());
    }
    return Array(Array::Zero(s2.rows(), s2.cols()));
  }
}

}  // namespace detail

// Covariance at Euclidean distance r.
template <typename Scalar>
Scalar eval_base(const KernelSpec<Scalar>& spec, Scalar r) {
  if (!std::isfinite(r)) throw DomainError("eval_base: distance is not finite");
  if (r < Scalar(0)) throw DomainError("eval_base: distance is negative");
  const Scalar s = r / spec.length_scale();
  return detail::matern_from_scaled_sq(spec.family, spec.amplitude, s * s);
}

// Strictly increasing, 0-based coordinate indices.
using Subset = std::vector<Eigen::Index>;

// All strictly increasing d-tuples of {0..dim-1}, lexicographic.
std::vector<Subset> subsets_of_order(Eigen::Index dim, Eigen::Index order);

template <typename Scalar = double>
class AdditiveKernelSpec {
 public:
  AdditiveKernelSpec(Eigen::Index dim, std::vector<Subset> subsets, KernelSpec<Scalar> base)
      : dim_(dim), subsets_(std::move(subsets)), base_(base) {
    if (dim_ < 1) throw DomainError("AdditiveKernelSpec: dimension must be positive");
    if (subsets_.empty()) throw DomainError("AdditiveKernelSpec: no subsets");
    std::set<Subset> seen;
    for (const auto& s : subsets_) {
      if (s.empty()) throw DomainError("AdditiveKernelSpec: empty subset");
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < 0 || s[k] >= dim_)
          throw DomainError("AdditiveKernelSpec: subset index out of range");
        if (k > 0 && s[k] <= s[k - 1])
          throw DomainError("AdditiveKernelSpec: subset indices must be strictly increasing");
      }
      if (!seen.insert(s).second) throw DomainError("AdditiveKernelSpec: duplicate subset");
    }
  }

  static AdditiveKernelSpec first_order(Eigen::Index dim, KernelSpec<Scalar> base) {
    return of_order(dim, 1, base);
  }
  static AdditiveKernelSpec of_order(Eigen::Index dim, Eigen::Index order,
                                     KernelSpec<Scalar> base) {
    return AdditiveKernelSpec(dim, subsets_of_order(dim, order), base);
  }
  // A single subset holding every coordinate: the plain full-dimensional kernel.
  static AdditiveKernelSpec full(Eigen::Index dim, KernelSpec<Scalar> base) {
    return of_order(dim, dim, base);
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<Subset>& subsets() const { return subsets_; }
  const Subset& subset(std::size_t i) const { return subsets_.at(i); }
  std::size_t size() const { return subsets_.size(); }
  const KernelSpec<Scalar>& base() const { return base_; }

  bool is_first_order() const {
    return std::all_of(subsets_.begin(), subsets_.end(),
                       [](const Subset& s) { return s.size() == 1; });
  }

  // Kernel value at zero distance, i.e. the diagonal of any Gram matrix.
  Scalar zero_distance_value() const { return Scalar(subsets_.size()) * base_.amplitude; }

  friend bool operator==(const AdditiveKernelSpec& a, const AdditiveKernelSpec& b) {
    return a.dim_ == b.dim_ && a.subsets_ == b.subsets_ && a.base_.family == b.base_.family &&
           a.base_.log_length_scale == b.base_.log_length_scale &&
           a.base_.amplitude == b.base_.amplitude;
  }

 private:
  Eigen::Index dim_;
  std::vector<Subset> subsets_;
  KernelSpec<Scalar> base_;
};

template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar eval_additive(const AdditiveKernelSpec<Scalar>& spec, const Eigen::MatrixBase<DerivedA>& x,
                     const Eigen::MatrixBase<DerivedB>& xp) {
  if (x.size() != spec.dim() || xp.size() != spec.dim())
    throw DomainError("eval_additive: vector length does not match kernel dimension");
  const Scalar inv_l = Scalar(1) / spec.base().length_scale();
  Scalar total(0);
  for (const auto& s : spec.subsets()) {
    Scalar sq(0);
    for (Eigen::Index i : s) {
      const Scalar d = (x(i) - xp(i)) * inv_l;
      sq += d * d;
    }
    total += detail::matern_from_scaled_sq(spec.base().family, spec.base().amplitude, sq);
  }
  return total;
}

namespace detail {

// Writes k_i(A_i, B_i) for one subset into `work`, reusing its storage.
template <typename Scalar, typename DerivedA, typename DerivedB>
void subset_block(const AdditiveKernelSpec<Scalar>& spec, std::size_t subset_index,
                  const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
                  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& work) {
  const Subset& s = spec.subset(subset_index);
  const Scalar inv_l = Scalar(1) / spec.base().length_scale();
  work.resize(A.rows(), B.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    auto col = work.col(j);
    col = ((A.col(s[0]).array().template cast<Scalar>() - Scalar(B(j, s[0]))) * inv_l).square();
    for (std::size_t k = 1; k < s.size(); ++k)
      col += ((A.col(s[k]).array().template cast<Scalar>() - Scalar(B(j, s[k]))) * inv_l).square();
  }
  const auto family = spec.base().family;
  const Scalar amp = spec.base().amplitude;
  switch (family) {
    case KernelFamily::SquaredExponential:
      work = amp * (work * Scalar(-0.5)).exp();
      break;
    case KernelFamily::Exponential:
      work = amp * (-work.sqrt()).exp();
      break;
    default:
      work = matern_from_scaled_sq(family, amp, work);
      break;
  }
}

}  // namespace detail

// Covariance between the rows of A and the rows of B restricted to one
// subset of coordinates: the kernel section k_i(A_i, B_i).
template <typename Scalar, typename DerivedA, typename DerivedB>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> subset_cross_covariance(
    const AdditiveKernelSpec<Scalar>& spec, std::size_t subset_index,
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> work;
  detail::subset_block(spec, subset_index, A, B, work);
  return work.matrix();
}

// Full covariance block between the rows of A and the rows of B.
template <typename Scalar, typename DerivedA, typename DerivedB>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cross_covariance(
    const AdditiveKernelSpec<Scalar>& spec, const Eigen::MatrixBase<DerivedA>& A,
    const Eigen::MatrixBase<DerivedB>& B) {
  if (A.cols() != spec.dim() || B.cols() != spec.dim())
    throw DomainError("cross_covariance: column count does not match kernel dimension");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(A.rows(), B.rows());
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> work;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    detail::subset_block(spec, i, A, B, work);
    K.array() += work;
  }
  return K;
}

// Plain-text config form: key = value lines, subsets as 1-based tuples.
std::string to_config(const AdditiveKernelSpec<double>& spec);
AdditiveKernelSpec<double> additive_kernel_from_config(std::string_view text);

}  // namespace hdmrnn
