#pragma once

// Regression datasets: CSV ingestion, a synthetic coupled target, and
// seeded train/test splits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hdmrnn {

struct Dataset {
  Eigen::MatrixXd inputs;   // one point per row
  Eigen::VectorXd targets;
  std::vector<std::string> columns;  // D input names then the target name
  std::string name;

  Eigen::Index dim() const { return inputs.cols(); }
  Eigen::Index size() const { return inputs.rows(); }
};

// Header `x1,...,xD,f`; D is the number of columns minus one.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in, std::string name = "csv");
// Shortest round-trip decimal for every value, so re-export is byte-stable.
void write_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

struct SynthSpec {
  int dim = 3;
  Eigen::Index count = 5000;
  std::uint64_t seed = 42;
  double beta_pair = 0.5;
  double gamma_full = 0.25;
};

// f(x) = sum_i (x_i^2 + 0.1 x_i^3) + beta * sum_{i<j} x_i x_j + gamma * prod_i x_i
double coupled_target(const Eigen::Ref<const Eigen::VectorXd>& x, double beta_pair,
                      double gamma_full);

// Points uniform on [-1, 1]^D drawn row by row, coordinate by coordinate,
// from SplitMix64(seed).
Dataset synth_coupled(const SynthSpec& spec);

struct SplitSpec {
  Eigen::Index train_size = 1000;
  std::uint64_t seed = 1;
};

// Training rows are a seeded uniform sample without replacement; the test
// set is the remainder. Both keep the dataset's row order.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

}  // namespace hdmrnn
