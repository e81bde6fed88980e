#include "hdmrnn/sobol.hpp"

#include <bit>
#include <string>

#include "hdmrnn/errors.hpp"

namespace hdmrnn {

SobolSequence::SobolSequence(int dim) : dim_(dim) {
  if (dim < 1 || dim > kSobolMaxDim)
    throw UnsupportedDimension("Sobol dimension " + std::to_string(dim) +
                               " outside supported range 1.." + std::to_string(kSobolMaxDim));
  directions_.resize(static_cast<std::size_t>(dim));
  // Dimension 1: m_k = 1 for all k.
  for (int k = 0; k < kSobolBits; ++k) directions_[0][k] = std::uint32_t{1} << (31 - k);

  for (int j = 1; j < dim; ++j) {
    const auto& poly = detail::kSobolTable[static_cast<std::size_t>(j - 1)];
    const int s = poly.degree;
    std::array<std::uint32_t, kSobolBits> m{};
    for (int k = 0; k < s && k < kSobolBits; ++k) m[k] = poly.initial[k];
    // m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}
    for (int k = s; k < kSobolBits; ++k) {
      std::uint32_t value = m[k - s] ^ (m[k - s] << s);
      for (int i = 1; i < s; ++i) {
        const std::uint32_t a_i = (poly.coefficients >> (s - 1 - i)) & 1u;
        if (a_i) value ^= m[k - i] << i;
      }
      m[k] = value;
    }
    for (int k = 0; k < kSobolBits; ++k) directions_[j][k] = m[k] << (31 - k);
  }
  state_.assign(static_cast<std::size_t>(dim), 0);
  current_ = state_;
}

const std::vector<std::uint32_t>& SobolSequence::next_integer() {
  current_ = state_;
  // Gray-code step: flip the direction number of the lowest zero bit of index.
  const int bit = std::countr_one(index_);
  if (bit >= kSobolBits) throw DomainError("Sobol sequence exhausted (2^32 points)");
  for (int j = 0; j < dim_; ++j) state_[j] ^= directions_[j][bit];
  ++index_;
  return current_;
}

Eigen::VectorXd SobolSequence::next() {
  const auto& ints = next_integer();
  Eigen::VectorXd x(dim_);
  for (int j = 0; j < dim_; ++j) x(j) = static_cast<double>(ints[j]) * 0x1.0p-32;
  return x;
}

void SobolSequence::skip(std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) next_integer();
}

Eigen::MatrixXd sobol_points(int dim, Eigen::Index count, std::uint64_t skip) {
  if (count < 1) throw DomainError("sobol_points: count must be positive");
  SobolSequence seq(dim);
  seq.skip(skip);
  Eigen::MatrixXd out(count, dim);
  for (Eigen::Index n = 0; n < count; ++n) out.row(n) = seq.next().transpose();
  return out;
}

}  // namespace hdmrnn
