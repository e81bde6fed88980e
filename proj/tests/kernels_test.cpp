#include "hdmrnn/kernels.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace hdmrnn {
namespace {

constexpr double kExpMinusHalf = 0.606530659712633423603799534991;
constexpr double kExpMinusOne = 0.367879441171442321595523770161;

const KernelFamily kAllFamilies[] = {KernelFamily::Exponential, KernelFamily::Matern32,
                                     KernelFamily::Matern52, KernelFamily::SquaredExponential};

TEST(EvalBase, SquaredExponentialExamples) {
  KernelSpec<double> se{KernelFamily::SquaredExponential, 0.0, 1.0};
  EXPECT_EQ(eval_base(se, 0.0), 1.0);
  EXPECT_NEAR(eval_base(se, 1.0), kExpMinusHalf, 1e-15);
}

TEST(EvalBase, ExponentialExample) {
  KernelSpec<double> k{KernelFamily::Exponential, 0.0, 1.0};
  EXPECT_NEAR(eval_base(k, 1.0), kExpMinusOne, 1e-15);
}

TEST(EvalBase, LengthScaleIsExpOfLogLengthScale) {
  // exp(-r^2 / (2 exp(l)^2)) with l = 1, r = e: exp(-1/2).
  KernelSpec<double> se{KernelFamily::SquaredExponential, 1.0, 1.0};
  EXPECT_NEAR(eval_base(se, std::exp(1.0)), kExpMinusHalf, 1e-15);
}

TEST(EvalBase, MaternClosedForms) {
  const double r = 0.7, l = 0.3;
  const double s = r / std::exp(l);
  KernelSpec<double> k32{KernelFamily::Matern32, l, 2.0};
  KernelSpec<double> k52{KernelFamily::Matern52, l, 2.0};
  EXPECT_NEAR(eval_base(k32, r), 2.0 * (1 + std::sqrt(3.0) * s) * std::exp(-std::sqrt(3.0) * s),
              1e-14);
  EXPECT_NEAR(eval_base(k52, r),
              2.0 * (1 + std::sqrt(5.0) * s + 5.0 * s * s / 3.0) * std::exp(-std::sqrt(5.0) * s),
              1e-14);
}

TEST(EvalBase, RejectsNonFiniteAndNegativeDistance) {
  KernelSpec<double> se;
  EXPECT_THROW(eval_base(se, std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(eval_base(se, std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(eval_base(se, -1.0), DomainError);
}

TEST(EvalBase, ExponentialMatchesExpOfScaledDistance) {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(0.0, 20.0);
    const double l = rng.uniform(-2.0, 2.0);
    const double amp = rng.uniform(0.1, 5.0);
    KernelSpec<double> k{KernelFamily::Exponential, l, amp};
    const double want = amp * std::exp(-r / std::exp(l));
    EXPECT_LE(std::abs(eval_base(k, r) - want), 1e-14 * want) << "r=" << r << " l=" << l;
  }
}

TEST(EvalBase, FamilyInvariants) {
  SplitMix64 rng(11);
  for (auto family : kAllFamilies) {
    KernelSpec<double> k{family, rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0)};
    EXPECT_EQ(eval_base(k, 0.0), k.amplitude);
    double previous = k.amplitude;
    for (double r = 0.01; r < 10.0; r += 0.01) {
      const double v = eval_base(k, r);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, previous);
      previous = v;
    }
  }
}

TEST(SubsetsOfOrder, Examples) {
  EXPECT_EQ(subsets_of_order(3, 1), (std::vector<Subset>{{0}, {1}, {2}}));
  EXPECT_EQ(subsets_of_order(3, 2), (std::vector<Subset>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(subsets_of_order(6, 3).size(), 20u);
  EXPECT_THROW(subsets_of_order(3, 4), DomainError);
  EXPECT_THROW(subsets_of_order(3, 0), DomainError);
}

TEST(SubsetsOfOrder, MatchesBitmaskEnumeration) {
  for (int dim = 1; dim <= 8; ++dim) {
    for (int order = 1; order <= dim; ++order) {
      std::vector<Subset> oracle;
      for (unsigned mask = 0; mask < (1u << dim); ++mask) {
        if (std::popcount(mask) != order) continue;
        Subset s;
        for (int i = 0; i < dim; ++i)
          if (mask & (1u << i)) s.push_back(i);
        oracle.push_back(s);
      }
      std::sort(oracle.begin(), oracle.end());
      EXPECT_EQ(subsets_of_order(dim, order), oracle) << dim << " choose " << order;
    }
  }
}

TEST(AdditiveKernelSpec, ValidatesSubsets) {
  KernelSpec<double> base;
  EXPECT_THROW(AdditiveKernelSpec<double>(3, {{0}, {3}}, base), DomainError);
  EXPECT_THROW(AdditiveKernelSpec<double>(3, {{0}, {0}}, base), DomainError);
  EXPECT_THROW(AdditiveKernelSpec<double>(3, {{1, 0}}, base), DomainError);
  EXPECT_THROW(AdditiveKernelSpec<double>(3, {{}}, base), DomainError);
  EXPECT_THROW(AdditiveKernelSpec<double>(3, {}, base), DomainError);
  const auto first = AdditiveKernelSpec<double>::first_order(5, base);
  EXPECT_EQ(first.size(), 5u);
  EXPECT_TRUE(first.is_first_order());
}

TEST(EvalAdditive, Examples) {
  KernelSpec<double> se;
  const auto k3 = AdditiveKernelSpec<double>::first_order(3, se);
  const Eigen::Vector3d x(0.3, -1.2, 4.0);
  EXPECT_EQ(eval_additive(k3, x, x), 3.0);

  const auto k2 = AdditiveKernelSpec<double>::first_order(2, se);
  EXPECT_NEAR(eval_additive(k2, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)),
              1.606530659712633423603799534991, 1e-15);

  const auto k1 = AdditiveKernelSpec<double>::first_order(1, se);
  Eigen::VectorXd a(1), b(1);
  a << 0.25;
  b << -1.5;
  EXPECT_DOUBLE_EQ(eval_additive(k1, a, b), eval_base(se, 1.75));

  EXPECT_THROW(eval_additive(k3, Eigen::Vector2d(0, 0), x), DomainError);
}

TEST(EvalAdditive, SymmetricForRandomInputs) {
  SplitMix64 rng(3);
  for (auto family : kAllFamilies) {
    KernelSpec<double> base{family, 0.4, 1.3};
    const auto spec = AdditiveKernelSpec<double>::of_order(4, 2, base);
    for (int i = 0; i < 200; ++i) {
      const Eigen::VectorXd x = testing::random_vector(rng, 4, -3, 3);
      const Eigen::VectorXd y = testing::random_vector(rng, 4, -3, 3);
      EXPECT_EQ(eval_additive(spec, x, y), eval_additive(spec, y, x));
    }
  }
}

TEST(EvalAdditive, FullSubsetIsThePlainKernel) {
  SplitMix64 rng(5);
  for (auto family : kAllFamilies) {
    KernelSpec<double> base{family, -0.2, 1.0};
    const auto spec = AdditiveKernelSpec<double>::full(4, base);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd x = testing::random_vector(rng, 4);
      const Eigen::VectorXd y = testing::random_vector(rng, 4);
      EXPECT_NEAR(eval_additive(spec, x, y), eval_base(base, (x - y).norm()), 1e-14);
    }
  }
}

TEST(CrossCovariance, MatchesPointwiseEvaluation) {
  SplitMix64 rng(9);
  for (auto family : kAllFamilies) {
    KernelSpec<double> base{family, 0.1, 0.8};
    const auto spec = AdditiveKernelSpec<double>::of_order(3, 2, base);
    const Eigen::MatrixXd A = testing::random_matrix(rng, 7, 3);
    const Eigen::MatrixXd B = testing::random_matrix(rng, 5, 3);
    const Eigen::MatrixXd K = cross_covariance(spec, A, B);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < B.rows(); ++j)
        EXPECT_NEAR(K(i, j), eval_additive(spec, A.row(i), B.row(j)), 1e-15);
  }
}

TEST(KernelConfig, RoundTrip) {
  KernelSpec<double> base{KernelFamily::Matern52, 0.123456789012345678, 1.5};
  const AdditiveKernelSpec<double> spec(4, {{0}, {1, 3}, {0, 2, 3}}, base);
  const auto text = to_config(spec);
  EXPECT_NE(text.find("subsets = (1) (2,4) (1,3,4)"), std::string::npos) << text;
  EXPECT_EQ(additive_kernel_from_config(text), spec);
}

TEST(KernelConfig, RejectsBadInput) {
  EXPECT_THROW(additive_kernel_from_config("family = bessel\ndim = 1\nsubsets = (1)\n"),
               DomainError);
  EXPECT_THROW(additive_kernel_from_config("family = matern32\ndim = 2\n"), ParseError);
  EXPECT_THROW(additive_kernel_from_config("family = matern32\ndim = 2\nsubsets = (0)\n"),
               ParseError);
  EXPECT_THROW(additive_kernel_from_config("family = matern32\ndim = 2\nsubsets = (3)\n"),
               DomainError);
}

}  // namespace
}  // namespace hdmrnn
