#pragma once

// End-to-end commands behind the CLI. Every command is deterministic given
// its RunConfig; all randomness flows from the seeds it carries.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdmrnn/coords.hpp"
#include "hdmrnn/datasets.hpp"
#include "hdmrnn/kernels.hpp"
#include "hdmrnn/neuralize.hpp"

namespace hdmrnn {

inline constexpr const char* kOutputDirEnv = "HDMRNN_OUTPUT_DIR";

struct RunConfig {
  std::optional<std::filesystem::path> data_path;  // synthetic data when unset
  SynthSpec synth;
  SplitSpec split;
  CoordinateScheme scheme = IdentityScheme{};
  KernelSpec<double> kernel;
  double delta = 1e-6;
  ScalerMode scaler = ScalerMode::UnitVariance;
  ScaleSpace scale_space = ScaleSpace::Features;
  bool center_targets = true;
  bool retry_delta = false;
  PruneMode prune_mode = PruneMode::Mask;
  std::string units;
  std::filesystem::path output_dir = "hdmrnn-out";
};

// Throws DomainError when fields contradict each other or the dataset.
void validate(const RunConfig& config, const Dataset& data);
nlohmann::json to_json(const RunConfig& config);

Dataset load_dataset(const RunConfig& config);

struct TrainMetrics {
  double train_rmse;
  double test_rmse;
  Eigen::Index neurons;
  Eigen::Index train_size;
  Eigen::Index test_size;
  double delta_used;
  double seconds;  // wall time; kept out of metrics.json so it stays reproducible
};

nlohmann::json to_json(const TrainMetrics& metrics, const RunConfig& config);

// Writes model.json, metrics.json, timing.json and summary.txt into
// config.output_dir.
TrainMetrics cmd_train(const RunConfig& config);

struct OrderScanRow {
  Eigen::Index order;
  Eigen::Index train_size;
  double train_rmse;
  double test_rmse;
};

// Order-d additive GPR in the original coordinates for every (M, d);
// writes order_scan.csv.
std::vector<OrderScanRow> cmd_order_scan(const RunConfig& config,
                                         const std::vector<Eigen::Index>& orders,
                                         const std::vector<Eigen::Index>& train_sizes);

// Builds once and prunes to each keep_n (all of 1..N when empty); writes
// prune_scan.csv.
std::vector<PruneScanRow<double>> cmd_prune_scan(const RunConfig& config,
                                                 std::vector<std::size_t> keep_list);

// One y,sigma table per top-K neuron over [min, max] of its training
// projections, plus ranking.csv.
std::vector<std::filesystem::path> cmd_activations(const std::filesystem::path& model_path,
                                                   std::size_t top_k, std::size_t grid_size,
                                                   const std::filesystem::path& output_dir);

// Writes the configured dataset to CSV.
void cmd_gen_data(const SynthSpec& spec, const std::filesystem::path& path);

std::string order_scan_csv(const std::vector<OrderScanRow>& rows);
std::string prune_scan_csv(const std::vector<PruneScanRow<double>>& rows);

}  // namespace hdmrnn
