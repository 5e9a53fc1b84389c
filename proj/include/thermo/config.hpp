#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thermo/ldp.hpp"
#include "thermo/pressure.hpp"
#include "thermo/scan.hpp"

namespace thermo {

struct RatesBlock {
  std::vector<double> a_grid;
  std::vector<double> a_star_offsets;  ///< alternative: a = a_star + offset
};

struct LdpBlock {
  std::optional<double> a;
  std::optional<double> a_offset;  ///< a = a_star + offset
  std::optional<double> target_J;  ///< a > a_star with J(a) = target_J
  LdpRunConfig run;
};

struct LatticeBlock {
  std::vector<double> u_grid;
  int iterations = 200;
  double tol = 1e-6;
};

struct ExperimentConfig {
  std::string source_path;
  std::uint64_t hash = 0;
  std::string hash_hex;

  std::optional<Subshift> shift;
  double theta = 0.5;
  std::optional<Potential> f, tau, g;

  PressureOptions pressure;
  std::optional<RatesBlock> rates;
  std::optional<LdpBlock> ldp;
  std::optional<ScanConfig> scan;
  LatticeBlock lattice;
};

/// FNV-1a over the raw bytes.
std::uint64_t fnv1a(std::string_view bytes);

ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name = "<string>");
ExperimentConfig parse_config(const std::filesystem::path& path);

}  // namespace thermo
