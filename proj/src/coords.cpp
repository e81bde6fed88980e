#include "hdmrnn/coords.hpp"

namespace hdmrnn {

std::string describe(const CoordinateScheme& scheme) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IdentityScheme>) {
          return "identity";
        } else if constexpr (std::is_same_v<S, PairwiseScheme>) {
          std::string out = "pairwise cycles=" + std::to_string(s.cycles);
          if (s.pair_cap)
            out += " pair_cap=" + std::to_string(*s.pair_cap) +
                   " pair_seed=" + std::to_string(s.pair_seed);
          return out;
        } else if constexpr (std::is_same_v<S, SobolScheme>) {
          return "sobol count=" + std::to_string(s.count) + " skip=" + std::to_string(s.skip);
        } else {
          return "custom";
        }
      },
      scheme);
}

std::string_view to_string(ScalerMode mode) {
  switch (mode) {
    case ScalerMode::None:
      return "none";
    case ScalerMode::UnitVariance:
      return "unit_variance";
    case ScalerMode::UnitCube:
      return "unit_cube";
  }
  return "unknown";
}

ScalerMode parse_scaler_mode(std::string_view name) {
  if (name == "none" || name == "identity") return ScalerMode::None;
  if (name == "unit_variance" || name == "unit-variance") return ScalerMode::UnitVariance;
  if (name == "unit_cube" || name == "unit-cube") return ScalerMode::UnitCube;
  throw DomainError("unknown scaler mode '" + std::string(name) + "'");
}

}  // namespace hdmrnn
