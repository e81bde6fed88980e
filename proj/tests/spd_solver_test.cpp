#include "hdmrnn/spd_solver.hpp"

#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace hdmrnn {
namespace {

// Analytic inverse of [[1, a], [a, 1]] with a = exp(-1/2), applied to (0, 1):
// c = (-a, 1) / (1 - a^2), evaluated in 30-digit arithmetic.
constexpr double kA = 0.606530659712633423603799534991;
constexpr double kC0 = -0.959517375667471859746101439363;
constexpr double kC1 = 1.58197670686932642438500200511;

KernelSpec<double> se() { return {KernelFamily::SquaredExponential, 0.0, 1.0}; }

TEST(Assemble, SinglePointDiagonal) {
  const auto spec = AdditiveKernelSpec<double>::first_order(4, se());
  Eigen::MatrixXd X(1, 4);
  X << 0.1, 0.2, 0.3, 0.4;
  const auto sys = assemble(spec, X, 1e-6);
  ASSERT_EQ(sys.size(), 1);
  EXPECT_EQ(sys.matrix()(0, 0), 4.0 + 1e-6);
}

TEST(Assemble, TwoPointClosedForm) {
  const auto spec = AdditiveKernelSpec<double>::first_order(1, se());
  Eigen::MatrixXd X(2, 1);
  X << 0, 1;
  const auto sys = assemble(spec, X, 0.0);
  EXPECT_EQ(sys.matrix()(0, 0), 1.0);
  EXPECT_EQ(sys.matrix()(1, 1), 1.0);
  EXPECT_NEAR(sys.matrix()(0, 1), kA, 1e-16);
  EXPECT_EQ(sys.matrix()(0, 1), sys.matrix()(1, 0));
}

TEST(Assemble, InvariantsOnRandomData) {
  SplitMix64 rng(1);
  const auto spec = AdditiveKernelSpec<double>::of_order(3, 2, se());
  const Eigen::MatrixXd X = testing::random_matrix(rng, 40, 3);
  const double delta = 1e-3;
  const auto sys = assemble(spec, X, delta);
  EXPECT_LE((sys.matrix() - sys.matrix().transpose()).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    EXPECT_EQ(sys.matrix()(i, i), spec.zero_distance_value() + delta);
}

TEST(Assemble, PermutationEquivariant) {
  SplitMix64 rng(2);
  const auto spec = AdditiveKernelSpec<double>::first_order(3, se());
  const Eigen::MatrixXd X = testing::random_matrix(rng, 25, 3);
  std::vector<Eigen::Index> perm(25);
  std::iota(perm.begin(), perm.end(), 0);
  for (Eigen::Index i = 24; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  Eigen::MatrixXd P(25, 3);
  for (Eigen::Index i = 0; i < 25; ++i) P.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
  const auto K = assemble(spec, X, 1e-6).matrix();
  const auto KP = assemble(spec, P, 1e-6).matrix();
  for (Eigen::Index i = 0; i < 25; ++i)
    for (Eigen::Index j = 0; j < 25; ++j)
      EXPECT_EQ(KP(i, j), K(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]));
}

TEST(Assemble, RejectsBadInput) {
  const auto spec = AdditiveKernelSpec<double>::first_order(2, se());
  Eigen::MatrixXd X(2, 2);
  X << 0, std::numeric_limits<double>::quiet_NaN(), 1, 1;
  EXPECT_THROW(assemble(spec, X, 0.0), DomainError);
  EXPECT_THROW(assemble(spec, Eigen::MatrixXd(0, 2), 0.0), DomainError);
  EXPECT_THROW(assemble(spec, Eigen::MatrixXd::Zero(2, 3), 0.0), DomainError);
  EXPECT_THROW(assemble(spec, Eigen::MatrixXd::Zero(2, 2), -1.0), DomainError);
}

TEST(Solve, ScalarSystem) {
  const auto spec = AdditiveKernelSpec<double>::first_order(3, se());
  const auto sys = assemble(spec, Eigen::MatrixXd::Zero(1, 3), 1e-6);
  Eigen::VectorXd f(1);
  f << 2.5;
  EXPECT_DOUBLE_EQ(solve(sys, f)(0), 2.5 / (3.0 + 1e-6));
}

TEST(Solve, TwoPointAnalyticInverse) {
  const auto spec = AdditiveKernelSpec<double>::first_order(1, se());
  Eigen::MatrixXd X(2, 1);
  X << 0, 1;
  const auto c = solve(assemble(spec, X, 0.0), Eigen::Vector2d(0, 1));
  EXPECT_NEAR(c(0), kC0, 1e-12);
  EXPECT_NEAR(c(1), kC1, 1e-12);
  EXPECT_NEAR(c(0), -0.959519, 1e-5);
  EXPECT_NEAR(c(1), 1.581977, 1e-5);
}

TEST(Solve, HomogeneousSystem) {
  SplitMix64 rng(4);
  const auto spec = AdditiveKernelSpec<double>::first_order(2, se());
  const auto sys = assemble(spec, testing::random_matrix(rng, 10, 2), 1e-6);
  EXPECT_EQ(solve(sys, Eigen::VectorXd::Zero(10)), Eigen::VectorXd::Zero(10));
}

TEST(Solve, ResidualBoundOnRandomSystems) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = static_cast<Eigen::Index>(1 + rng.below(200));
    const auto d = static_cast<Eigen::Index>(1 + rng.below(4));
    const auto spec = AdditiveKernelSpec<double>::first_order(d, se());
    const auto sys = assemble(spec, testing::random_matrix(rng, m, d, -2, 2), 1e-2);
    const Eigen::VectorXd f = testing::random_vector(rng, m, -10, 10);
    const Eigen::VectorXd c = solve(sys, f);
    const double residual = (sys.matrix() * c - f).cwiseAbs().maxCoeff();
    EXPECT_LE(residual, 1e-8 * std::max(1.0, f.cwiseAbs().maxCoeff())) << "M=" << m;
  }
}

TEST(Solve, LinearInTargets) {
  SplitMix64 rng(6);
  const auto spec = AdditiveKernelSpec<double>::first_order(3, se());
  const auto sys = assemble(spec, testing::random_matrix(rng, 50, 3), 1e-4);
  const Eigen::VectorXd f = testing::random_vector(rng, 50);
  const Eigen::VectorXd c1 = solve(sys, f);
  const Eigen::VectorXd c2 = solve(sys, (2.0 * f).eval());
  EXPECT_LE((c2 - 2.0 * c1).cwiseAbs().maxCoeff(), 1e-12 * c1.cwiseAbs().maxCoeff());
}

TEST(Solve, DuplicatedPointIsFactorizableWithDelta) {
  const auto spec = AdditiveKernelSpec<double>::first_order(2, se());
  Eigen::MatrixXd X(3, 2);
  X << 0.1, 0.2, 0.1, 0.2, 0.5, -0.3;
  EXPECT_NO_THROW(solve(assemble(spec, X, 1e-6), Eigen::Vector3d(1, 1, 2)));
}

TEST(Solve, IndefiniteMatrixReportsPivot) {
  Eigen::MatrixXd K(3, 3);
  K << 4, 2, 0, 2, 1, 0, 0, 0, 1;  // second pivot is 1 - 2*2/4 = 0
  GramSystem<double> sys(K, 0.0);
  try {
    solve(sys, Eigen::Vector3d(1, 2, 3));
    FAIL() << "expected ConditioningError";
  } catch (const ConditioningError& e) {
    EXPECT_EQ(e.pivot(), 1u);
  }
}

TEST(SolveWithRetry, DisabledByDefault) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Ones(2, 2);
  GramSystem<double> sys(K, 0.0);
  EXPECT_THROW(solve_with_retry(sys, Eigen::Vector2d(1, 1), RetryPolicy{}), ConditioningError);
}

TEST(SolveWithRetry, EscalatesDeltaAndWarns) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Ones(2, 2);
  GramSystem<double> sys(K, 0.0);
  std::vector<std::string> warnings;
  RetryPolicy policy;
  policy.enabled = true;
  policy.warn = [&](std::string_view msg) { warnings.emplace_back(msg); };
  const auto result = solve_with_retry(sys, Eigen::Vector2d(1, 1), policy);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_GT(result.delta, 0.0);
  EXPECT_TRUE(result.coefficients.allFinite());
}

TEST(SolveWithRetry, GivesUpAboveMaxDelta) {
  Eigen::MatrixXd K(2, 2);
  K << 1, 2, 2, 1;  // eigenvalue -1: no small jitter helps
  GramSystem<double> sys(K, 1e-6);
  int retries = 0;
  RetryPolicy policy;
  policy.enabled = true;
  policy.warn = [&](std::string_view) { ++retries; };
  EXPECT_THROW(solve_with_retry(sys, Eigen::Vector2d(1, 1), policy), ConditioningError);
  EXPECT_EQ(retries, 4);  // 1e-5, 1e-4, 1e-3, 1e-2
}

}  // namespace
}  // namespace hdmrnn
