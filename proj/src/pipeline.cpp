#include "hdmrnn/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "hdmrnn/errors.hpp"
#include "hdmrnn/gpr.hpp"
#include "hdmrnn/io.hpp"
#include "hdmrnn/text.hpp"

namespace hdmrnn {

using nlohmann::json;

namespace {

BuildOptions build_options(const RunConfig& config) {
  BuildOptions options;
  options.scaler = config.scaler;
  options.scale_space = config.scale_space;
  options.center_targets = config.center_targets;
  options.retry.enabled = config.retry_delta;
  options.retry.warn = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return options;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw DomainError(std::string(what) + " is not finite");
}

void prepare_output(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::filesystem::remove(dir / "FAILED");
}

}  // namespace

void validate(const RunConfig& config, const Dataset& data) {
  if (!(config.delta >= 0) || !std::isfinite(config.delta))
    throw DomainError("delta must be finite and nonnegative");
  if (config.split.train_size < 1 || config.split.train_size >= data.size())
    throw DomainError("train size " + std::to_string(config.split.train_size) +
                      " must be in [1, " + std::to_string(data.size() - 1) + "]");
  if (const auto* s = std::get_if<SobolScheme>(&config.scheme)) {
    if (data.dim() > kSobolMaxDim)
      throw DomainError("sobol scheme supports at most " + std::to_string(kSobolMaxDim) +
                        " input dimensions");
    if (s->count < 1) throw DomainError("sobol neuron count must be positive");
  }
  if (const auto* p = std::get_if<PairwiseScheme>(&config.scheme)) {
    if (p->cycles < 1) throw DomainError("pairwise cycles must be at least 1");
    if (data.dim() < 2) throw DomainError("pairwise scheme needs at least two inputs");
  }
  if (std::holds_alternative<CustomScheme>(config.scheme))
    throw DomainError("custom schemes cannot be generated from a config");
}

json to_json(const RunConfig& config) {
  json j;
  if (config.data_path) {
    j["data"] = config.data_path->string();
  } else {
    j["synth"] = {{"dim", config.synth.dim},
                  {"count", config.synth.count},
                  {"seed", config.synth.seed},
                  {"beta_pair", config.synth.beta_pair},
                  {"gamma_full", config.synth.gamma_full}};
  }
  j["train_size"] = config.split.train_size;
  j["split_seed"] = config.split.seed;
  j["scheme"] = describe(config.scheme);
  j["kernel"] = std::string(to_string(config.kernel.family));
  j["log_length_scale"] = config.kernel.log_length_scale;
  j["amplitude"] = config.kernel.amplitude;
  j["delta"] = config.delta;
  j["scaler"] = std::string(to_string(config.scaler));
  j["scale_space"] = config.scale_space == ScaleSpace::Features ? "y" : "x";
  j["center_targets"] = config.center_targets;
  j["retry_delta"] = config.retry_delta;
  j["prune_mode"] = config.prune_mode == PruneMode::Mask ? "mask" : "refit";
  j["units"] = config.units;
  return j;
}

Dataset load_dataset(const RunConfig& config) {
  return config.data_path ? load_csv(*config.data_path) : synth_coupled(config.synth);
}

json to_json(const TrainMetrics& m, const RunConfig& config) {
  return {{"train_rmse", m.train_rmse}, {"test_rmse", m.test_rmse},
          {"neurons", m.neurons},       {"train_size", m.train_size},
          {"test_size", m.test_size},   {"delta_used", m.delta_used},
          {"units", config.units},      {"config", to_json(config)}};
}

TrainMetrics cmd_train(const RunConfig& config) {
  const auto data = load_dataset(config);
  validate(config, data);
  const auto [train_set, test_set] = split(data, config.split);
  prepare_output(config.output_dir);

  const auto start = std::chrono::steady_clock::now();
  const auto model = build(train_set.inputs, train_set.targets, config.scheme, config.kernel,
                           config.delta, build_options(config));
  TrainMetrics metrics{};
  metrics.train_rmse = rmse(model.predict_rows(train_set.inputs), train_set.targets);
  metrics.test_rmse = rmse(model.predict_rows(test_set.inputs), test_set.targets);
  metrics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  metrics.neurons = model.neurons();
  metrics.train_size = train_set.size();
  metrics.test_size = test_set.size();
  metrics.delta_used = model.core().delta();
  require_finite(metrics.train_rmse, "train rmse");
  require_finite(metrics.test_rmse, "test rmse");

  save_model(model, config.output_dir / "model.json");
  write_text(config.output_dir / "metrics.json", to_json(metrics, config).dump(2) + "\n");
  write_text(config.output_dir / "timing.json",
             json{{"seconds", metrics.seconds}}.dump(2) + "\n");
  std::ostringstream summary;
  summary << "N=" << metrics.neurons << " M=" << metrics.train_size
          << " train_rmse=" << format_double(metrics.train_rmse)
          << " test_rmse=" << format_double(metrics.test_rmse)
          << (config.units.empty() ? "" : " " + config.units) << " time=" << metrics.seconds
          << "s\n";
  write_text(config.output_dir / "summary.txt", summary.str());
  return metrics;
}

std::vector<OrderScanRow> cmd_order_scan(const RunConfig& config,
                                         const std::vector<Eigen::Index>& orders,
                                         const std::vector<Eigen::Index>& train_sizes) {
  const auto data = load_dataset(config);
  if (orders.empty() || train_sizes.empty()) throw DomainError("order scan needs orders and sizes");
  for (auto d : orders)
    if (d < 1 || d > data.dim())
      throw DomainError("order " + std::to_string(d) + " outside [1, " +
                        std::to_string(data.dim()) + "]");
  std::vector<OrderScanRow> rows;
  for (auto m : train_sizes) {
    RunConfig sized = config;
    sized.split.train_size = m;
    validate(sized, data);
    const auto [train_set, test_set] = split(data, sized.split);
    for (auto d : orders) {
      GprOptions options;
      options.scaler = config.scaler;
      options.center_targets = config.center_targets;
      options.retry = build_options(config).retry;
      const auto kernel = AdditiveKernelSpec<double>::of_order(data.dim(), d, config.kernel);
      const auto model = train(train_set.inputs, train_set.targets, kernel, config.delta, options);
      OrderScanRow row{d, m, rmse(model, train_set.inputs, train_set.targets),
                       rmse(model, test_set.inputs, test_set.targets)};
      require_finite(row.train_rmse, "train rmse");
      require_finite(row.test_rmse, "test rmse");
      rows.push_back(row);
    }
  }
  prepare_output(config.output_dir);
  write_text(config.output_dir / "order_scan.csv", order_scan_csv(rows));
  return rows;
}

std::vector<PruneScanRow<double>> cmd_prune_scan(const RunConfig& config,
                                                 std::vector<std::size_t> keep_list) {
  const auto data = load_dataset(config);
  validate(config, data);
  const auto [train_set, test_set] = split(data, config.split);
  const auto model = build(train_set.inputs, train_set.targets, config.scheme, config.kernel,
                           config.delta, build_options(config));
  const auto n = static_cast<std::size_t>(model.neurons());
  if (keep_list.empty())
    for (std::size_t k = 1; k <= n; ++k) keep_list.push_back(k);

  std::vector<PruneScanRow<double>> rows;
  if (config.prune_mode == PruneMode::Mask) {
    rows = prune_scan(model, train_set.inputs, train_set.targets, test_set.inputs,
                      test_set.targets, keep_list);
  } else {
    rows = prune_scan_refit(model, train_set.inputs, train_set.targets, test_set.inputs,
                            test_set.targets, keep_list);
  }
  for (const auto& r : rows) {
    require_finite(r.train_rmse, "train rmse");
    require_finite(r.test_rmse, "test rmse");
  }
  prepare_output(config.output_dir);
  write_text(config.output_dir / "prune_scan.csv", prune_scan_csv(rows));
  return rows;
}

std::vector<std::filesystem::path> cmd_activations(const std::filesystem::path& model_path,
                                                   std::size_t top_k, std::size_t grid_size,
                                                   const std::filesystem::path& output_dir) {
  if (!std::filesystem::exists(model_path))
    throw DomainError("model file not found: " + model_path.string());
  if (grid_size < 2) throw DomainError("grid size must be at least 2");
  const auto model = load_model(model_path);
  const auto& stats = model.stats();
  top_k = std::min(top_k, stats.ranking.size());
  if (top_k < 1) throw DomainError("top-K must be at least 1");
  const auto projections = model.project_rows(model.train_inputs());

  prepare_output(output_dir);
  std::vector<std::filesystem::path> written;
  std::ostringstream ranking;
  ranking << "rank,neuron,stddev,mean,active\n";
  for (std::size_t rank = 0; rank < stats.ranking.size(); ++rank) {
    const auto n = static_cast<Eigen::Index>(stats.ranking[rank]);
    ranking << rank + 1 << ',' << n + 1 << ',' << format_double(stats.stddev(n)) << ','
            << format_double(stats.mean(n)) << ','
            << (model.active()[static_cast<std::size_t>(n)] ? 1 : 0) << '\n';
    if (rank >= top_k) continue;
    const double lo = projections.col(n).minCoeff();
    const double hi = projections.col(n).maxCoeff();
    std::vector<double> grid(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g)
      grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_size - 1);
    grid.back() = hi;
    const auto path = output_dir / ("activation_rank" + std::to_string(rank + 1) + "_neuron" +
                                    std::to_string(n + 1) + ".csv");
    write_text(path, activation_csv(model.activation_table(n, grid)));
    written.push_back(path);
  }
  const auto summary = output_dir / "ranking.csv";
  write_text(summary, ranking.str());
  written.push_back(summary);
  return written;
}

void cmd_gen_data(const SynthSpec& spec, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  save_csv(synth_coupled(spec), path);
}

std::string order_scan_csv(const std::vector<OrderScanRow>& rows) {
  std::ostringstream out;
  out << "d,M,train_rmse,test_rmse\n";
  for (const auto& r : rows)
    out << r.order << ',' << r.train_size << ',' << format_double(r.train_rmse) << ','
        << format_double(r.test_rmse) << '\n';
  return out.str();
}

std::string prune_scan_csv(const std::vector<PruneScanRow<double>>& rows) {
  std::ostringstream out;
  out << "keep_n,train_rmse,test_rmse\n";
  for (const auto& r : rows)
    out << r.keep_n << ',' << format_double(r.train_rmse) << ',' << format_double(r.test_rmse)
        << '\n';
  return out.str();
}

}  // namespace hdmrnn
