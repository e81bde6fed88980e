// hdmrnn: fit single-hidden-layer models with additive-GPR activations.

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdmrnn/errors.hpp"
#include "hdmrnn/io.hpp"
#include "hdmrnn/pipeline.hpp"
#include "hdmrnn/text.hpp"

namespace fs = std::filesystem;
using namespace hdmrnn;

namespace {

// Raw flag values; resolved into a RunConfig after parsing.
struct Flags {
  std::string data;
  SynthSpec synth;
  Eigen::Index train_size = 1000;
  std::uint64_t split_seed = 1;
  std::string scheme = "identity";
  int cycles = 1;
  std::size_t pair_cap = 0;
  std::uint64_t pair_seed = 0;
  Eigen::Index neurons = 100;
  std::uint64_t sobol_skip = 1;
  std::string kernel = "squared_exponential";
  double log_length_scale = 0.0;
  double delta = 1e-6;
  std::string scaler = "unit_variance";
  std::string scale_space = "y";
  bool no_center = false;
  bool retry_delta = false;
  bool prune_refit = false;
  std::string units;
  std::string out;
};

void add_data_options(CLI::App& app, Flags& f) {
  app.add_option("--data", f.data, "CSV dataset (header x1,...,xD,f); synthetic data if absent");
  app.add_option("--synth-dim", f.synth.dim, "synthetic input dimension")->capture_default_str();
  app.add_option("--synth-count", f.synth.count, "synthetic point count")->capture_default_str();
  app.add_option("--synth-seed", f.synth.seed, "synthetic data seed")->capture_default_str();
  app.add_option("--beta-pair", f.synth.beta_pair, "pair coupling weight")->capture_default_str();
  app.add_option("--gamma-full", f.synth.gamma_full, "full coupling weight")
      ->capture_default_str();
}

void add_run_options(CLI::App& app, Flags& f) {
  add_data_options(app, f);
  app.add_option("--train-size", f.train_size, "training points M")->capture_default_str();
  app.add_option("--split-seed", f.split_seed, "train/test split seed")->capture_default_str();
  app.add_option("--scheme", f.scheme, "coordinate scheme")
      ->check(CLI::IsMember({"identity", "pairwise", "sobol"}))
      ->capture_default_str();
  app.add_option("--cycles", f.cycles, "pairwise cycles")->capture_default_str();
  app.add_option("--pair-cap", f.pair_cap, "max pairs appended per cycle (0 = all)")
      ->capture_default_str();
  app.add_option("--pair-seed", f.pair_seed, "seed for pair subsampling")->capture_default_str();
  app.add_option("--neurons", f.neurons, "sobol scheme: number of neurons N")
      ->capture_default_str();
  app.add_option("--sobol-skip", f.sobol_skip, "sobol scheme: leading points skipped")
      ->capture_default_str();
  app.add_option("--kernel", f.kernel, "exponential | matern32 | matern52 | squared_exponential")
      ->capture_default_str();
  app.add_option("--log-length-scale", f.log_length_scale, "l; the length scale is exp(l)")
      ->capture_default_str();
  app.add_option("--delta", f.delta, "diagonal regularizer")->capture_default_str();
  app.add_option("--scaler", f.scaler, "none | unit_variance | unit_cube")->capture_default_str();
  app.add_option("--scale-space", f.scale_space, "scale y (features) or x (inputs)")
      ->check(CLI::IsMember({"x", "y"}))
      ->capture_default_str();
  app.add_flag("--no-center", f.no_center, "do not subtract the training target mean");
  app.add_flag("--retry-delta", f.retry_delta, "on factorization failure retry with 10x delta");
  app.add_option("--units", f.units, "target unit label carried into outputs");
  app.add_option("--out", f.out, std::string("output directory (default $") + kOutputDirEnv +
                                     " or ./hdmrnn-out)");
  std::string unused;
  app.add_option("--config", unused, "key = value file supplying any option; flags override");
}

fs::path default_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "hdmrnn-out";
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.data.empty()) c.data_path = f.data;
  c.synth = f.synth;
  c.split = {f.train_size, f.split_seed};
  if (f.scheme == "identity") {
    c.scheme = IdentityScheme{};
  } else if (f.scheme == "pairwise") {
    PairwiseScheme s{f.cycles, std::nullopt, f.pair_seed};
    if (f.pair_cap > 0) s.pair_cap = f.pair_cap;
    c.scheme = s;
  } else {
    c.scheme = SobolScheme{f.neurons, f.sobol_skip};
  }
  c.kernel.family = parse_kernel_family(f.kernel);
  c.kernel.log_length_scale = f.log_length_scale;
  c.delta = f.delta;
  c.scaler = parse_scaler_mode(f.scaler);
  c.scale_space = f.scale_space == "x" ? ScaleSpace::Inputs : ScaleSpace::Features;
  c.center_targets = !f.no_center;
  c.retry_delta = f.retry_delta;
  c.prune_mode = f.prune_refit ? PruneMode::Refit : PruneMode::Mask;
  c.units = f.units;
  c.output_dir = default_output_dir(f.out);
  return c;
}

void mark_failed(const fs::path& dir, const std::string& message) {
  std::error_code ec;
  if (!fs::exists(dir, ec)) return;
  try {
    write_text(dir / "FAILED", message + "\n");
  } catch (...) {
  }
}

// Replaces `--config FILE` after a subcommand by `--key value` arguments
// read from FILE. Keys already given on the command line are skipped, so
// explicit flags win.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  for (const auto* candidate : app.get_subcommands({}))
    if (candidate->get_name() == args[1]) sub = candidate;
  if (sub == nullptr) return args;

  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;

  auto given = [&](const std::string& flag) {
    for (const auto& a : rest)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> out{args[0], args[1]};
  for (const auto& kv : parse_key_values(read_text(*path))) {
    std::string key = kv.key;
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    const CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw ParseError(*path + ": unknown option '" + kv.key + "'", kv.line);
    }
    if (given(flag)) continue;
    if (opt->get_expected_max() == 0) {
      if (kv.value == "true" || kv.value == "1" || kv.value == "yes") out.push_back(flag);
    } else {
      out.push_back(flag);
      out.push_back(kv.value);
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-hidden-layer regression with additive-GPR neuron activations"};
  app.require_subcommand(1);

  Flags gen_flags;
  std::string gen_path;
  auto* gen = app.add_subcommand("gen-data", "write the synthetic coupled dataset as CSV");
  add_data_options(*gen, gen_flags);
  gen->add_option("--output,-o", gen_path, "CSV path")->required();

  Flags train_flags;
  auto* train_cmd = app.add_subcommand("train", "build a model and report train/test rmse");
  add_run_options(*train_cmd, train_flags);

  Flags order_flags;
  std::vector<Eigen::Index> orders{1, 2, 3};
  std::vector<Eigen::Index> sizes{500, 1000, 2000};
  auto* order_cmd =
      app.add_subcommand("order-scan", "order-d additive GPR in original coordinates");
  add_run_options(*order_cmd, order_flags);
  order_cmd->add_option("--orders", orders, "coupling orders d")->delimiter(',')
      ->capture_default_str();
  order_cmd->add_option("--sizes", sizes, "training set sizes M")->delimiter(',')
      ->capture_default_str();

  Flags prune_flags;
  std::vector<std::size_t> keep;
  std::size_t keep_step = 0;
  auto* prune_cmd = app.add_subcommand("prune-scan", "rmse versus number of retained neurons");
  add_run_options(*prune_cmd, prune_flags);
  prune_cmd->add_option("--keep", keep, "neuron counts to keep")->delimiter(',');
  prune_cmd->add_option("--keep-step", keep_step, "scan step, ending at N (overrides --keep)");
  prune_cmd->add_flag("--prune-refit", prune_flags.prune_refit,
                      "refit coefficients after pruning instead of masking");

  std::string model_path;
  std::size_t top_k = 4;
  std::size_t grid_size = 101;
  std::string act_out;
  auto* act_cmd = app.add_subcommand("activations", "export top-K activation functions as CSV");
  act_cmd->add_option("--model", model_path, "model.json written by train")->required();
  act_cmd->add_option("--top-k", top_k, "number of neurons")->capture_default_str();
  act_cmd->add_option("--grid", grid_size, "grid points per neuron")->capture_default_str();
  act_cmd->add_option("--out", act_out, "output directory");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(app, std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  // CLI11 takes arguments in reverse order, program name excluded.
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  fs::path out_dir;
  try {
    if (gen->parsed()) {
      cmd_gen_data(gen_flags.synth, gen_path);
      std::cout << "wrote " << gen_path << '\n';
    } else if (train_cmd->parsed()) {
      const auto config = resolve(train_flags);
      out_dir = config.output_dir;
      const auto m = cmd_train(config);
      std::cout << read_text(config.output_dir / "summary.txt");
      (void)m;
    } else if (order_cmd->parsed()) {
      const auto config = resolve(order_flags);
      out_dir = config.output_dir;
      const auto rows = cmd_order_scan(config, orders, sizes);
      std::cout << order_scan_csv(rows);
    } else if (prune_cmd->parsed()) {
      const auto config = resolve(prune_flags);
      out_dir = config.output_dir;
      if (keep_step > 0) {
        // The final N is unknown until the map is generated; probe it cheaply.
        const auto data = load_dataset(config);
        const auto n = static_cast<std::size_t>(
            make_map<double>(static_cast<int>(data.dim()), config.scheme).size());
        keep.clear();
        for (std::size_t k = keep_step; k < n; k += keep_step) keep.push_back(k);
        keep.push_back(n);
      }
      const auto rows = cmd_prune_scan(config, keep);
      std::cout << prune_scan_csv(rows);
    } else if (act_cmd->parsed()) {
      out_dir = default_output_dir(act_out);
      for (const auto& p : cmd_activations(model_path, top_k, grid_size, out_dir))
        std::cout << "wrote " << p.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!out_dir.empty()) mark_failed(out_dir, e.what());
    return 1;
  }
  return 0;
}
