#pragma once

// Sobol' low-discrepancy sequence, Gray-code construction, unscrambled.

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hdmrnn {

inline constexpr int kSobolMaxDim = 256;
inline constexpr int kSobolBits = 32;

namespace detail {

struct SobolPolynomial {
  int degree;
  std::uint32_t coefficients;  // interior coefficients a_1..a_{s-1}, MSB first
  std::array<std::uint32_t, 16> initial;
};

extern const std::array<SobolPolynomial, kSobolMaxDim - 1> kSobolTable;

}  // namespace detail

class SobolSequence {
 public:
  explicit SobolSequence(int dim);

  int dim() const { return dim_; }
  std::uint64_t index() const { return index_; }

  // Integer numerators over 2^32 of the point at index(), then advances.
  const std::vector<std::uint32_t>& next_integer();
  // Same point as doubles in [0, 1).
  Eigen::VectorXd next();
  void skip(std::uint64_t count);

  // Direction numbers v_{j,k} scaled to 32 bits, k = 0..31.
  const std::array<std::uint32_t, kSobolBits>& direction_numbers(int j) const {
    return directions_[static_cast<std::size_t>(j)];
  }

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, kSobolBits>> directions_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> current_;
};

// `count` consecutive points after skipping `skip` leading points, one per row.
Eigen::MatrixXd sobol_points(int dim, Eigen::Index count, std::uint64_t skip);

}  // namespace hdmrnn
