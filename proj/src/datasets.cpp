#include "hdmrnn/datasets.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hdmrnn/errors.hpp"
#include "hdmrnn/rng.hpp"
#include "hdmrnn/text.hpp"

namespace hdmrnn {

Dataset parse_csv(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  Dataset data;
  data.name = std::move(name);

  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError("missing header", line_no);
  for (auto field : split(trim(line), ',')) {
    const auto col = trim(field);
    if (col.empty()) throw ParseError("empty column name in header", line_no);
    data.columns.emplace_back(col);
  }
  if (data.columns.size() < 2) throw ParseError("header needs at least one input and a target", line_no);
  const auto width = data.columns.size();

  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    for (auto field : fields) values.push_back(parse_double(field, line_no));
    ++rows;
  }
  if (rows == 0) throw ParseError("no data rows", 0);

  const auto dim = static_cast<Eigen::Index>(width - 1);
  data.inputs.resize(rows, dim);
  data.targets.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c)
      data.inputs(r, c) = values[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)];
    data.targets(r) = values[static_cast<std::size_t>(r) * width + width - 1];
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  try {
    return parse_csv(in, path.filename().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t c = 0; c < data.columns.size(); ++c) out << (c ? "," : "") << data.columns[c];
  out << '\n';
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    for (Eigen::Index c = 0; c < data.dim(); ++c) out << format_double(data.inputs(r, c)) << ',';
    out << format_double(data.targets(r)) << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(data, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

double coupled_target(const Eigen::Ref<const Eigen::VectorXd>& x, double beta_pair,
                      double gamma_full) {
  double first = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) first += x(i) * x(i) + 0.1 * x(i) * x(i) * x(i);
  double pairs = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = i + 1; j < x.size(); ++j) pairs += x(i) * x(j);
  return first + beta_pair * pairs + gamma_full * x.prod();
}

Dataset synth_coupled(const SynthSpec& spec) {
  if (spec.dim < 2) throw DomainError("synth_coupled: dimension must be at least 2");
  if (spec.count < 1) throw DomainError("synth_coupled: count must be positive");
  SplitMix64 rng(spec.seed);
  Dataset data;
  data.inputs.resize(spec.count, spec.dim);
  data.targets.resize(spec.count);
  for (Eigen::Index r = 0; r < spec.count; ++r) {
    for (int c = 0; c < spec.dim; ++c) data.inputs(r, c) = rng.uniform(-1.0, 1.0);
    data.targets(r) = coupled_target(data.inputs.row(r).transpose(), spec.beta_pair, spec.gamma_full);
  }
  for (int c = 0; c < spec.dim; ++c) data.columns.push_back("x" + std::to_string(c + 1));
  data.columns.push_back("f");
  std::ostringstream name;
  name << "synth_coupled(D=" << spec.dim << ",count=" << spec.count << ",seed=" << spec.seed
       << ",beta=" << format_double(spec.beta_pair) << ",gamma=" << format_double(spec.gamma_full)
       << ')';
  data.name = name.str();
  return data;
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows,
                  const std::string& suffix) {
  Dataset out;
  out.columns = data.columns;
  out.name = data.name + suffix;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.inputs.row(static_cast<Eigen::Index>(k)) = data.inputs.row(rows[k]);
    out.targets(static_cast<Eigen::Index>(k)) = data.targets(rows[k]);
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (data.size() < 2) throw DomainError("split: dataset needs at least two points");
  if (spec.train_size < 1 || spec.train_size >= data.size())
    throw DomainError("split: train size must be in [1, size - 1]");
  SplitMix64 rng(spec.seed);
  const auto picked = sample_without_replacement(rng, static_cast<std::size_t>(data.size()),
                                                 static_cast<std::size_t>(spec.train_size));
  std::vector<bool> in_train(static_cast<std::size_t>(data.size()), false);
  for (std::size_t i : picked) in_train[i] = true;
  std::vector<Eigen::Index> train_rows, test_rows;
  for (Eigen::Index r = 0; r < data.size(); ++r)
    (in_train[static_cast<std::size_t>(r)] ? train_rows : test_rows).push_back(r);
  return {take_rows(data, train_rows, "[train]"), take_rows(data, test_rows, "[test]")};
}

}  // namespace hdmrnn
