#include "hdmrnn/kernels.hpp"

#include <charconv>
#include <sstream>

#include "hdmrnn/text.hpp"

namespace hdmrnn {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Exponential:
      return "exponential";
    case KernelFamily::Matern32:
      return "matern32";
    case KernelFamily::Matern52:
      return "matern52";
    case KernelFamily::SquaredExponential:
      return "squared_exponential";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "exponential" || name == "matern12") return KernelFamily::Exponential;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "squared_exponential" || name == "se" || name == "rbf")
    return KernelFamily::SquaredExponential;
  throw DomainError("unknown kernel family '" + std::string(name) + "'");
}

std::vector<Subset> subsets_of_order(Eigen::Index dim, Eigen::Index order) {
  if (dim < 1) throw DomainError("subsets_of_order: dimension must be positive");
  if (order < 1 || order > dim) throw DomainError("subsets_of_order: order must be in [1, dim]");
  std::vector<Subset> out;
  Subset current(static_cast<std::size_t>(order));
  for (Eigen::Index k = 0; k < order; ++k) current[static_cast<std::size_t>(k)] = k;
  while (true) {
    out.push_back(current);
    // Advance the rightmost index that still has room.
    Eigen::Index k = order - 1;
    while (k >= 0 && current[static_cast<std::size_t>(k)] == dim - order + k) --k;
    if (k < 0) break;
    ++current[static_cast<std::size_t>(k)];
    for (Eigen::Index j = k + 1; j < order; ++j)
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::string to_config(const AdditiveKernelSpec<double>& spec) {
  std::ostringstream out;
  out << "family = " << to_string(spec.base().family) << '\n';
  out << "log_length_scale = " << format_double(spec.base().log_length_scale) << '\n';
  out << "amplitude = " << format_double(spec.base().amplitude) << '\n';
  out << "dim = " << spec.dim() << '\n';
  out << "subsets =";
  for (const auto& s : spec.subsets()) {
    out << " (";
    for (std::size_t k = 0; k < s.size(); ++k) out << (k ? "," : "") << s[k] + 1;
    out << ')';
  }
  out << '\n';
  return out.str();
}

namespace {

std::vector<Subset> parse_subsets(std::string_view text, std::size_t line) {
  std::vector<Subset> out;
  std::size_t pos = 0;
  while (true) {
    pos = text.find_first_not_of(" \t", pos);
    if (pos == std::string_view::npos) break;
    if (text[pos] != '(') throw ParseError("expected '(' in subsets", line);
    const auto close = text.find(')', pos);
    if (close == std::string_view::npos) throw ParseError("unterminated subset", line);
    Subset s;
    for (auto field : split(text.substr(pos + 1, close - pos - 1), ',')) {
      const long long one_based = parse_integer(trim(field), line);
      if (one_based < 1) throw ParseError("subset indices are 1-based", line);
      s.push_back(static_cast<Eigen::Index>(one_based - 1));
    }
    out.push_back(std::move(s));
    pos = close + 1;
  }
  return out;
}

}  // namespace

AdditiveKernelSpec<double> additive_kernel_from_config(std::string_view text) {
  KernelSpec<double> base;
  Eigen::Index dim = 0;
  std::vector<Subset> subsets;
  bool have_family = false, have_dim = false, have_subsets = false;
  for (const auto& [line_no, key, value] : parse_key_values(text)) {
    if (key == "family") {
      base.family = parse_kernel_family(value);
      have_family = true;
    } else if (key == "log_length_scale") {
      base.log_length_scale = parse_double(value, line_no);
    } else if (key == "amplitude") {
      base.amplitude = parse_double(value, line_no);
    } else if (key == "dim") {
      dim = static_cast<Eigen::Index>(parse_integer(value, line_no));
      have_dim = true;
    } else if (key == "subsets") {
      subsets = parse_subsets(value, line_no);
      have_subsets = true;
    } else {
      throw ParseError("unknown kernel key '" + key + "'", line_no);
    }
  }
  if (!have_family || !have_dim || !have_subsets)
    throw ParseError("kernel config needs family, dim and subsets", 0);
  if (!(base.amplitude > 0)) throw ParseError("amplitude must be positive", 0);
  return AdditiveKernelSpec<double>(dim, std::move(subsets), base);
}

}  // namespace hdmrnn
