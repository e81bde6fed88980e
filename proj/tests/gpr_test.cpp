#include "hdmrnn/gpr.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "hdmrnn/datasets.hpp"
#include "test_support.hpp"

namespace hdmrnn {
namespace {

constexpr double kC0 = -0.959517375667471859746101439363;
constexpr double kC1 = 1.58197670686932642438500200511;

KernelSpec<double> se(double l = 0.0) { return {KernelFamily::SquaredExponential, l, 1.0}; }

GprOptions raw() {
  GprOptions o;
  o.center_targets = false;
  return o;
}

// Plain full-dimensional GPR mean from explicit loops and an LU solve.
Eigen::VectorXd naive_gpr(const KernelSpec<double>& k, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& f, double delta, const Eigen::MatrixXd& Xq) {
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) K(i, j) = eval_base(k, (X.row(i) - X.row(j)).norm());
  K.diagonal().array() += delta;
  const Eigen::VectorXd c = K.fullPivLu().solve(f);
  Eigen::VectorXd out(Xq.rows());
  for (Eigen::Index q = 0; q < Xq.rows(); ++q) {
    out(q) = 0;
    for (Eigen::Index i = 0; i < m; ++i) out(q) += eval_base(k, (Xq.row(q) - X.row(i)).norm()) * c(i);
  }
  return out;
}

TEST(Train, TwoPointExample) {
  Eigen::MatrixXd X(2, 1);
  X << 0, 1;
  const auto model =
      train(X, Eigen::Vector2d(0, 1), AdditiveKernelSpec<double>::first_order(1, se()), 0.0, raw());
  EXPECT_NEAR(model.coefficients()(0), kC0, 1e-12);
  EXPECT_NEAR(model.coefficients()(1), kC1, 1e-12);
  EXPECT_NEAR(model.predict(Eigen::VectorXd::Constant(1, 1.0)), 1.0, 1e-12);
}

TEST(Train, SinglePoint) {
  const auto kernel = AdditiveKernelSpec<double>::first_order(3, se());
  Eigen::VectorXd f(1);
  f << 2.5;
  const auto model = train(Eigen::MatrixXd::Zero(1, 3), f, kernel, 1e-6, raw());
  EXPECT_DOUBLE_EQ(model.coefficients()(0), 2.5 / (3 + 1e-6));
  // Centered, the single residual is zero and the prediction is the mean.
  const auto centered = train(Eigen::MatrixXd::Zero(1, 3), f, kernel, 1e-6);
  EXPECT_EQ(centered.coefficients()(0), 0.0);
  EXPECT_EQ(centered.predict(Eigen::Vector3d(4, 5, 6)), 2.5);
}

TEST(Train, RejectsBadInput) {
  const auto kernel = AdditiveKernelSpec<double>::first_order(2, se());
  EXPECT_THROW(train(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(2), kernel, 1e-6),
               DomainError);
  EXPECT_THROW(train(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3), kernel, 1e-6),
               DomainError);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(3);
  f(1) = std::nan("");
  EXPECT_THROW(train(Eigen::MatrixXd::Zero(3, 2), f, kernel, 1e-6), DomainError);
}

TEST(Train, InterpolatesWithTinyDelta) {
  SplitMix64 rng(1);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 50, 3);
  const Eigen::VectorXd f = testing::random_vector(rng, 50);
  const auto model = train(X, f, AdditiveKernelSpec<double>::of_order(3, 2, se()), 1e-10);
  EXPECT_LE((model.predict_rows(X) - f).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Train, DecompositionIdentity) {
  SplitMix64 rng(2);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 60, 4, -2, 2);
  const Eigen::VectorXd f = testing::random_vector(rng, 60);
  GprOptions opts;
  opts.scaler = ScalerMode::UnitVariance;
  const auto model = train(X, f, AdditiveKernelSpec<double>::of_order(4, 2, se(0.3)), 1e-6, opts);
  const Eigen::MatrixXd Xq = testing::random_matrix(rng, 20, 4, -2, 2);
  const Eigen::VectorXd pred = model.predict_rows(Xq);
  const Eigen::MatrixXd C = model.component_matrix(Xq);
  for (Eigen::Index q = 0; q < Xq.rows(); ++q) {
    double sum = model.target_offset();
    for (std::size_t i = 0; i < model.kernel().size(); ++i) {
      const auto& s = model.kernel().subset(i);
      Eigen::VectorXd u(static_cast<Eigen::Index>(s.size()));
      for (std::size_t k = 0; k < s.size(); ++k) u(static_cast<Eigen::Index>(k)) = Xq(q, s[k]);
      const double v = model.component_value(i, u);
      EXPECT_NEAR(v, C(q, static_cast<Eigen::Index>(i)), 1e-12);
      sum += v;
    }
    EXPECT_NEAR(sum, pred(q), 1e-10);
    EXPECT_NEAR(model.predict(Xq.row(q).transpose()), pred(q), 1e-10);
  }
}

TEST(Train, ComponentValueRawAndScaledAgree) {
  SplitMix64 rng(3);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 30, 2, 0, 10);
  GprOptions opts;
  opts.scaler = ScalerMode::UnitCube;
  const auto model = train(X, testing::random_vector(rng, 30),
                           AdditiveKernelSpec<double>::first_order(2, se()), 1e-6, opts);
  Eigen::VectorXd u(1), z(1);
  u << 3.7;
  z << model.scaler().transform_coordinate(1, 3.7);
  EXPECT_EQ(model.component_value(1, u), model.component_value(1, z, InputSpace::Scaled));
}

TEST(Train, OneDimensionalAdditiveIsPlainGpr) {
  SplitMix64 rng(4);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 40, 1, -3, 3);
  const Eigen::VectorXd f = testing::random_vector(rng, 40);
  const Eigen::MatrixXd Xq = testing::random_matrix(rng, 25, 1, -3, 3);
  const auto model = train(X, f, AdditiveKernelSpec<double>::first_order(1, se()), 1e-4, raw());
  EXPECT_LE((model.predict_rows(Xq) - naive_gpr(se(), X, f, 1e-4, Xq)).cwiseAbs().maxCoeff(),
            1e-8);
}

TEST(Train, FullOrderIsPlainGpr) {
  SplitMix64 rng(5);
  for (auto family : {KernelFamily::Exponential, KernelFamily::Matern52,
                      KernelFamily::SquaredExponential}) {
    KernelSpec<double> k{family, 0.2, 1.0};
    const Eigen::MatrixXd X = testing::random_matrix(rng, 40, 3);
    const Eigen::VectorXd f = testing::random_vector(rng, 40);
    const Eigen::MatrixXd Xq = testing::random_matrix(rng, 25, 3);
    const auto model = train(X, f, AdditiveKernelSpec<double>::full(3, k), 1e-4, raw());
    EXPECT_LE((model.predict_rows(Xq) - naive_gpr(k, X, f, 1e-4, Xq)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Train, LinearInTargets) {
  SplitMix64 rng(6);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 40, 3);
  const Eigen::VectorXd f = testing::random_vector(rng, 40);
  const Eigen::VectorXd g = testing::random_vector(rng, 40);
  const Eigen::MatrixXd Xq = testing::random_matrix(rng, 10, 3);
  const auto kernel = AdditiveKernelSpec<double>::first_order(3, se());
  const auto mf = train(X, f, kernel, 1e-4, raw());
  const auto mg = train(X, g, kernel, 1e-4, raw());
  const auto mh = train(X, (2.0 * f - 3.0 * g).eval(), kernel, 1e-4, raw());
  EXPECT_LE((mh.predict_rows(Xq) - (2.0 * mf.predict_rows(Xq) - 3.0 * mg.predict_rows(Xq)))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(ComponentStats, SeparableTargetRanksDominantCoordinate) {
  SplitMix64 rng(7);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 200, 3);
  Eigen::VectorXd f(200);
  for (Eigen::Index i = 0; i < 200; ++i) f(i) = 0.1 * X(i, 0) + std::sin(3 * X(i, 2));
  const auto model = train(X, f, AdditiveKernelSpec<double>::first_order(3, se()), 1e-6);
  const auto stats = component_stats(model);
  EXPECT_EQ(stats.ranking, (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_NEAR(stats.mean.sum() + model.target_offset(), f.mean(), 1e-4);
}

TEST(ComponentStats, TiesKeepAscendingIndex) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 4);
  const auto model = train(X, Eigen::VectorXd::Constant(10, 3.0),
                           AdditiveKernelSpec<double>::first_order(4, se()), 1e-6);
  const auto stats = component_stats(model);
  EXPECT_EQ(stats.stddev, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(stats.ranking, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Rmse, Examples) {
  EXPECT_EQ(rmse(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)), 0.0);
  EXPECT_DOUBLE_EQ(rmse(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)), std::sqrt(12.5));
  EXPECT_THROW(rmse(Eigen::VectorXd(0), Eigen::VectorXd(0)), DomainError);
  EXPECT_THROW(rmse(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), DomainError);
  const auto model = train(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1),
                           AdditiveKernelSpec<double>::first_order(1, se()), 1e-6);
  EXPECT_THROW(rmse(model, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)), DomainError);
}

TEST(Order, HigherOrderWinsOnCoupledTarget) {
  SynthSpec spec;
  spec.count = 1300;
  const auto [tr, te] = split(synth_coupled(spec), SplitSpec{300, 1});
  GprOptions opts;
  opts.scaler = ScalerMode::UnitVariance;
  double previous = 1e300;
  for (Eigen::Index d = 1; d <= 3; ++d) {
    const auto model =
        train(tr.inputs, tr.targets, AdditiveKernelSpec<double>::of_order(3, d, se()), 1e-6, opts);
    const double e = rmse(model, te.inputs, te.targets);
    EXPECT_LT(e, previous) << "d=" << d;
    previous = e;
  }
}

}  // namespace
}  // namespace hdmrnn
