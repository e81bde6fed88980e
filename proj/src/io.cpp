#include "hdmrnn/io.hpp"

#include <fstream>
#include <sstream>

#include "hdmrnn/errors.hpp"
#include "hdmrnn/text.hpp"

namespace hdmrnn {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError("matrix payload size mismatch", 0);
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json scheme_json(const CoordinateScheme& scheme) { return describe(scheme); }

json kernel_json(const AdditiveKernelSpec<double>& k) {
  json subsets = json::array();
  for (const auto& s : k.subsets()) {
    json one = json::array();
    for (auto i : s) one.push_back(i + 1);
    subsets.push_back(std::move(one));
  }
  return {{"family", std::string(to_string(k.base().family))},
          {"log_length_scale", k.base().log_length_scale},
          {"amplitude", k.base().amplitude},
          {"dim", k.dim()},
          {"subsets", std::move(subsets)}};
}

AdditiveKernelSpec<double> kernel_from(const json& j) {
  KernelSpec<double> base;
  base.family = parse_kernel_family(j.at("family").get<std::string>());
  base.log_length_scale = j.at("log_length_scale").get<double>();
  base.amplitude = j.at("amplitude").get<double>();
  std::vector<Subset> subsets;
  for (const auto& one : j.at("subsets")) {
    Subset s;
    for (const auto& i : one) s.push_back(i.get<Eigen::Index>() - 1);
    subsets.push_back(std::move(s));
  }
  return AdditiveKernelSpec<double>(j.at("dim").get<Eigen::Index>(), std::move(subsets), base);
}

json scaler_json(const FeatureScaler<double>& s) {
  return {{"mode", std::string(to_string(s.mode()))},
          {"offset", vector_json(s.offset())},
          {"scale", vector_json(s.scale())},
          {"degenerate", s.degenerate()}};
}

FeatureScaler<double> scaler_from(const json& j) {
  return FeatureScaler<double>(parse_scaler_mode(j.at("mode").get<std::string>()),
                               vector_from(j.at("offset")), vector_from(j.at("scale")),
                               j.at("degenerate").get<std::vector<bool>>());
}

json stats_json(const ComponentStats<double>& s) {
  return {{"mean", vector_json(s.mean)}, {"stddev", vector_json(s.stddev)}, {"ranking", s.ranking}};
}

ComponentStats<double> stats_from(const json& j) {
  ComponentStats<double> s;
  s.mean = vector_from(j.at("mean"));
  s.stddev = vector_from(j.at("stddev"));
  s.ranking = j.at("ranking").get<std::vector<std::size_t>>();
  return s;
}

void check_header(const json& j, std::string_view kind) {
  if (j.value("format", "") != kModelFormat || j.value("version", 0) != kModelFormatVersion)
    throw ParseError("not an hdmrnn model file (format/version)", 0);
  if (j.value("kind", "") != kind)
    throw ParseError("model kind is '" + j.value("kind", "") + "', expected '" +
                         std::string(kind) + "'",
                     0);
}

}  // namespace

CoordinateScheme parse_scheme(std::string_view description) {
  const auto words = split(trim(description), ' ');
  if (words.empty() || words[0].empty()) throw ParseError("empty scheme description", 0);
  auto field = [&](std::string_view key) -> std::optional<std::string_view> {
    for (std::size_t i = 1; i < words.size(); ++i) {
      const auto eq = words[i].find('=');
      if (eq != std::string_view::npos && words[i].substr(0, eq) == key)
        return words[i].substr(eq + 1);
    }
    return std::nullopt;
  };
  const auto kind = words[0];
  if (kind == "identity") return IdentityScheme{};
  if (kind == "custom") return CustomScheme{};
  if (kind == "pairwise") {
    PairwiseScheme s;
    s.cycles = static_cast<int>(parse_integer(field("cycles").value_or("1")));
    if (auto cap = field("pair_cap")) s.pair_cap = static_cast<std::size_t>(parse_integer(*cap));
    if (auto seed = field("pair_seed")) s.pair_seed = std::stoull(std::string(*seed));
    return s;
  }
  if (kind == "sobol") {
    SobolScheme s;
    s.count = static_cast<Eigen::Index>(parse_integer(field("count").value_or("1")));
    s.skip = std::stoull(std::string(field("skip").value_or("1")));
    return s;
  }
  throw ParseError("unknown coordinate scheme '" + std::string(kind) + "'", 0);
}

std::string map_to_csv(const CoordinateMap<double>& map) {
  std::ostringstream out;
  out << "# provenance: " << describe(map.provenance()) << '\n';
  const auto& W = map.weights();
  for (Eigen::Index r = 0; r < W.rows(); ++r) {
    for (Eigen::Index c = 0; c < W.cols(); ++c) out << (c ? "," : "") << format_double(W(r, c));
    out << '\n';
  }
  return out.str();
}

CoordinateMap<double> map_from_csv(std::string_view text) {
  CoordinateScheme scheme = CustomScheme{};
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view tag = "# provenance:";
      if (line.substr(0, tag.size()) == tag) scheme = parse_scheme(line.substr(tag.size()));
      continue;
    }
    std::vector<double> row;
    for (auto field : split(line, ',')) row.push_back(parse_double(field, line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("ragged weight row", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no weight rows", 0);
  Eigen::MatrixXd W(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return CoordinateMap<double>(std::move(W), std::move(scheme));
}

std::string scaler_to_csv(const FeatureScaler<double>& scaler) {
  std::ostringstream out;
  out << "# scaler: " << to_string(scaler.mode()) << '\n';
  for (Eigen::Index i = 0; i < scaler.dim(); ++i)
    out << format_double(scaler.offset()(i)) << ',' << format_double(scaler.scale()(i)) << ','
        << (scaler.degenerate()[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  return out.str();
}

FeatureScaler<double> scaler_from_csv(std::string_view text) {
  std::optional<ScalerMode> mode;
  std::vector<double> offsets, scales;
  std::vector<bool> degenerate;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view tag = "# scaler:";
      if (line.substr(0, tag.size()) == tag) mode = parse_scaler_mode(trim(line.substr(tag.size())));
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) throw ParseError("expected offset,scale,degenerate", line_no);
    offsets.push_back(parse_double(fields[0], line_no));
    scales.push_back(parse_double(fields[1], line_no));
    degenerate.push_back(parse_integer(fields[2], line_no) != 0);
  }
  if (!mode) throw ParseError("missing '# scaler:' header", 0);
  const auto n = static_cast<Eigen::Index>(offsets.size());
  return FeatureScaler<double>(*mode, Eigen::Map<Eigen::VectorXd>(offsets.data(), n),
                               Eigen::Map<Eigen::VectorXd>(scales.data(), n),
                               std::move(degenerate));
}

json to_json(const TrainedGpr<double>& model) {
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"kind", "gpr"},
          {"kernel", kernel_json(model.kernel())},
          {"delta", model.delta()},
          {"scaler", scaler_json(model.scaler())},
          {"target_offset", model.target_offset()},
          {"inputs", matrix_json(model.inputs())},
          {"coefficients", vector_json(model.coefficients())},
          {"stats", stats_json(component_stats(model))}};
}

TrainedGpr<double> gpr_from_json(const json& j) {
  check_header(j, "gpr");
  return TrainedGpr<double>(matrix_from(j.at("inputs")), vector_from(j.at("coefficients")),
                            kernel_from(j.at("kernel")), j.at("delta").get<double>(),
                            scaler_from(j.at("scaler")), j.at("target_offset").get<double>());
}

json to_json(const NeuralAdditiveModel<double>& model) {
  json core = to_json(model.core());
  core.erase("stats");
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"kind", "neural"},
          {"map", {{"provenance", scheme_json(model.map().provenance())},
                   {"weights", matrix_json(model.map().weights())}}},
          {"input_scaler", scaler_json(model.input_scaler())},
          {"core", std::move(core)},
          {"stats", stats_json(model.stats())},
          {"active", model.active()},
          {"prune_constant", model.prune_constant()},
          {"prune_mode", model.prune_mode() == PruneMode::Mask ? "mask" : "refit"},
          {"train_inputs", matrix_json(model.train_inputs())},
          {"train_targets", vector_json(model.train_targets())}};
}

NeuralAdditiveModel<double> neural_from_json(const json& j) {
  check_header(j, "neural");
  const auto& m = j.at("map");
  CoordinateMap<double> map(matrix_from(m.at("weights")),
                            parse_scheme(m.at("provenance").get<std::string>()));
  const auto mode_name = j.at("prune_mode").get<std::string>();
  if (mode_name != "mask" && mode_name != "refit") throw ParseError("unknown prune mode", 0);
  return NeuralAdditiveModel<double>(
      std::move(map), scaler_from(j.at("input_scaler")), gpr_from_json(j.at("core")),
      stats_from(j.at("stats")), j.at("active").get<std::vector<bool>>(),
      j.at("prune_constant").get<double>(), mode_name == "mask" ? PruneMode::Mask : PruneMode::Refit,
      matrix_from(j.at("train_inputs")), vector_from(j.at("train_targets")));
}

void save_model(const NeuralAdditiveModel<double>& model, const std::filesystem::path& path) {
  write_text(path, to_json(model).dump() + "\n");
}

NeuralAdditiveModel<double> load_model(const std::filesystem::path& path) {
  const auto text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return neural_from_json(j);
}

std::string activation_csv(const std::vector<std::pair<double, double>>& table) {
  std::ostringstream out;
  out << "y,sigma\n";
  for (const auto& [y, s] : table) out << format_double(y) << ',' << format_double(s) << '\n';
  return out.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace hdmrnn
