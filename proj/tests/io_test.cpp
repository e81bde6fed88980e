#include "hdmrnn/io.hpp"

#include <filesystem>

#include <gtest/gtest.h>

#include "hdmrnn/datasets.hpp"
#include "test_support.hpp"

namespace hdmrnn {
namespace {

namespace fs = std::filesystem;

NeuralAdditiveModel<double> small_model(const CoordinateScheme& scheme, std::uint64_t seed) {
  SynthSpec spec;
  spec.count = 80;
  spec.seed = seed;
  const auto d = synth_coupled(spec);
  return build(d.inputs, d.targets, scheme, KernelSpec<double>{KernelFamily::Matern32, 0.3, 1.0},
               1e-6);
}

void expect_same(const NeuralAdditiveModel<double>& a, const NeuralAdditiveModel<double>& b) {
  EXPECT_EQ(a.map().weights(), b.map().weights());
  EXPECT_EQ(a.map().provenance(), b.map().provenance());
  EXPECT_EQ(a.input_scaler(), b.input_scaler());
  EXPECT_EQ(a.core().inputs(), b.core().inputs());
  EXPECT_EQ(a.core().coefficients(), b.core().coefficients());
  EXPECT_EQ(a.core().kernel(), b.core().kernel());
  EXPECT_EQ(a.core().delta(), b.core().delta());
  EXPECT_EQ(a.core().scaler(), b.core().scaler());
  EXPECT_EQ(a.core().target_offset(), b.core().target_offset());
  EXPECT_EQ(a.stats().mean, b.stats().mean);
  EXPECT_EQ(a.stats().stddev, b.stats().stddev);
  EXPECT_EQ(a.stats().ranking, b.stats().ranking);
  EXPECT_EQ(a.active(), b.active());
  EXPECT_EQ(a.prune_constant(), b.prune_constant());
  EXPECT_EQ(a.prune_mode(), b.prune_mode());
  EXPECT_EQ(a.train_inputs(), b.train_inputs());
  EXPECT_EQ(a.train_targets(), b.train_targets());
}

TEST(ModelJson, RoundTripIsBitExact) {
  const std::vector<CoordinateScheme> schemes{IdentityScheme{}, PairwiseScheme{2},
                                              PairwiseScheme{2, std::size_t{4}, 9},
                                              SobolScheme{17, 3}};
  std::uint64_t seed = 1;
  for (const auto& scheme : schemes) {
    const auto model = small_model(scheme, seed++);
    expect_same(neural_from_json(to_json(model)), model);
    // Through text as well, so the decimal form must be exact.
    expect_same(neural_from_json(nlohmann::json::parse(to_json(model).dump())), model);
    const auto pruned = prune(model, 2);
    expect_same(neural_from_json(to_json(pruned)), pruned);
    const auto refit = prune(model, 2, PruneMode::Refit);
    expect_same(neural_from_json(to_json(refit)), refit);
  }
}

TEST(ModelJson, GprRoundTrip) {
  SplitMix64 rng(4);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 30, 3);
  GprOptions opts;
  opts.scaler = ScalerMode::UnitCube;
  const auto model = train(X, testing::random_vector(rng, 30),
                           AdditiveKernelSpec<double>::of_order(3, 2, KernelSpec<double>{}), 1e-6,
                           opts);
  const auto back = gpr_from_json(nlohmann::json::parse(to_json(model).dump()));
  EXPECT_EQ(back.coefficients(), model.coefficients());
  EXPECT_EQ(back.inputs(), model.inputs());
  EXPECT_EQ(back.kernel(), model.kernel());
  EXPECT_EQ(back.scaler(), model.scaler());
  EXPECT_EQ(back.target_offset(), model.target_offset());
}

TEST(ModelJson, SaveLoadFile) {
  const auto dir = fs::temp_directory_path() / "hdmrnn_io_test";
  fs::create_directories(dir);
  const auto model = small_model(PairwiseScheme{1}, 3);
  save_model(model, dir / "m.json");
  const auto back = load_model(dir / "m.json");
  expect_same(back, model);
  const Eigen::MatrixXd Xq = model.train_inputs().topRows(5);
  EXPECT_EQ(back.predict_rows(Xq), model.predict_rows(Xq));
  write_text(dir / "bad.json", "{\"format\": \"something-else\"}");
  EXPECT_THROW(load_model(dir / "bad.json"), std::exception);
  EXPECT_THROW(load_model(dir / "missing.json"), std::exception);
  fs::remove_all(dir);
}

TEST(MapCsv, RoundTrip) {
  for (const auto& map : {pairwise_expand(CoordinateMap<double>::identity(3), 2),
                          sobol_map<double>(4, 33, 1), CoordinateMap<double>::identity(2)}) {
    const auto text = map_to_csv(map);
    const auto back = map_from_csv(text);
    EXPECT_EQ(back.weights(), map.weights());
    EXPECT_EQ(back.provenance(), map.provenance());
    EXPECT_EQ(map_to_csv(back), text);
  }
  EXPECT_THROW(map_from_csv("# provenance: identity\n1,0\n0\n"), ParseError);
}

TEST(ScalerCsv, RoundTrip) {
  Eigen::MatrixXd Y(3, 2);
  Y << 1, 7, 2, 7, 3.5, 7;
  const auto s = fit_scaler<double>(ScalerMode::UnitVariance, Y);
  EXPECT_EQ(scaler_from_csv(scaler_to_csv(s)), s);
}

TEST(Scheme, DescribeParseRoundTrip) {
  for (const CoordinateScheme& s :
       {CoordinateScheme{IdentityScheme{}}, CoordinateScheme{PairwiseScheme{3}},
        CoordinateScheme{PairwiseScheme{2, std::size_t{5}, 11}},
        CoordinateScheme{SobolScheme{100, 1}}, CoordinateScheme{CustomScheme{}}})
    EXPECT_EQ(parse_scheme(describe(s)), s) << describe(s);
  EXPECT_THROW(parse_scheme("halton count=3"), std::exception);
}

TEST(ActivationCsv, Format) {
  EXPECT_EQ(activation_csv({{0.5, -1.25}, {1.0, 0.0}}), "y,sigma\n0.5,-1.25\n1,0\n");
}

}  // namespace
}  // namespace hdmrnn
