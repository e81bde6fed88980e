#pragma once

// Text and JSON file formats for maps, scalers, models and activation tables.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdmrnn/coords.hpp"
#include "hdmrnn/gpr.hpp"
#include "hdmrnn/neuralize.hpp"

namespace hdmrnn {

inline constexpr std::string_view kModelFormat = "hdmrnn-model";
inline constexpr int kModelFormatVersion = 1;

// "# provenance: <scheme>" followed by one comma-separated weight row per line.
std::string map_to_csv(const CoordinateMap<double>& map);
CoordinateMap<double> map_from_csv(std::string_view text);

// "# scaler: <mode>" then "offset,scale,degenerate" per coordinate.
std::string scaler_to_csv(const FeatureScaler<double>& scaler);
FeatureScaler<double> scaler_from_csv(std::string_view text);

CoordinateScheme parse_scheme(std::string_view description);

nlohmann::json to_json(const TrainedGpr<double>& model);
TrainedGpr<double> gpr_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NeuralAdditiveModel<double>& model);
NeuralAdditiveModel<double> neural_from_json(const nlohmann::json& j);

void save_model(const NeuralAdditiveModel<double>& model, const std::filesystem::path& path);
NeuralAdditiveModel<double> load_model(const std::filesystem::path& path);

// Two columns, header "y,sigma".
std::string activation_csv(const std::vector<std::pair<double, double>>& table);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace hdmrnn
