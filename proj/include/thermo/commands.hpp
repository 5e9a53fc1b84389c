#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermo/config.hpp"

namespace thermo {

inline constexpr const char* kToolkitVersion = "0.3.0";

enum ExitCode { exit_ok = 0, exit_validation = 1, exit_numerical = 2, exit_guard = 3 };

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
};

/// Runs pressure|rates|ldp|scan on a config file, writing <command>.csv and
/// <command>_manifest.json into out_dir. Errors are reported on `err`; returns an ExitCode.
int run_command(const std::string& command, const std::filesystem::path& config, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

/// The LDP target value of a from the [ldp] block (explicit, offset from a_star, or by a J level).
double resolve_ldp_a(const PressureCurve& curve, const LdpBlock& blk);

/// a > a_star with J(a) = level < 0.
double a_for_rate_level(const PressureCurve& curve, double level);

/// gamma(a) = beta(xi(a)) - xi(a) a, and its derivative by a Richardson central difference.
double gamma_of(const PressureCurve& curve, double a);
double gamma_prime(const PressureCurve& curve, double a, double step = 1e-3);

/// Default u-grid for lattice probing: 0.25, 0.5, ..., 50.
std::vector<double> default_lattice_grid();

}  // namespace thermo
