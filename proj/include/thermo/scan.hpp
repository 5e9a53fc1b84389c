#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermo/transfer.hpp"

namespace thermo {

enum class SeedKind { constant_one, random_unit, cylinder_indicator };

struct ScanConfig {
  double a = 0.0;
  double c = 0.0;
  std::vector<double> b_grid;
  std::vector<double> kappa_grid;  ///< w = kappa * b
  double B = 0.5;                  ///< |kappa| bound; the sweep always includes kappa = +-B
  int m_max = 60;
  SeedKind h_seed = SeedKind::constant_one;
  std::uint64_t seed = 20240917;  ///< for random_unit
  double theta = 0.5;
  double epsilon = 0.5;
  unsigned threads = 1;
};

/// Checks grids nonempty, |b| >= 1, |kappa| <= B, m_max >= 2.
void validate_scan_config(const ScanConfig& cfg);

struct DecayFit {
  double b = 0.0;
  double w = 0.0;
  std::vector<double> log_y;  ///< log y_m for m = 0..m_max
  double rho_hat = 0.0;
  double fit_residual = 0.0;
  double max_step_growth = 0.0;  ///< max_m y_{m+1} / y_m, a crude operator-norm band

  double y(int m) const;
};

/// Operator family of f0 - (a + ib) tau + (c + iw) g with P = Pr(f0 - a tau + c g).
class ScanSystem {
public:
  ScanSystem(Potential f0, Potential tau, Potential g, double a, double c, const EigenOptions& eigen = {});

  const Potential& f0() const { return f0_; }
  const Potential& tau() const { return tau_; }
  const Potential& g() const { return g_; }
  double a() const { return a_; }
  double c() const { return c_; }
  double pressure() const { return pressure_; }
  int depth() const { return depth_; }
  std::vector<cplx> seed(SeedKind kind, std::uint64_t rng_seed) const;

private:
  Potential f0_, tau_, g_;
  double a_, c_;
  double pressure_ = 0.0;
  int depth_ = 1;
};

/// Iterates the operator on h, recording y_m = ||L^m h||_{beta,|b|} e^{-Pm} with |b| clamped below at 1;
/// rho_hat = exp(slope of log y_m over m in [m_max/2, m_max]).
DecayFit decay_sequence(const ScanSystem& sys, double b, double w, int m_max, std::span<const cplx> h, double theta);

struct EnvelopeReport {
  std::optional<double> e_fit;  ///< empty with a single b
  double C = 0.0;
  double rho_global = 0.0;
  std::vector<std::pair<double, double>> envelope;  ///< (|b|, M(b))
  bool exponent_flag = false;  ///< e_fit > epsilon
  bool no_decay_flag = false;  ///< rho_global >= 1 - 1e-6
  std::vector<std::string> notes;
};

EnvelopeReport envelope_report(std::span<const DecayFit> fits, double epsilon);

struct ScanMatrix {
  std::vector<double> b_values;
  std::vector<double> kappa_values;
  std::vector<DecayFit> cells;  ///< row-major: b outer, kappa inner

  const DecayFit& at(std::size_t ib, std::size_t ik) const { return cells[ib * kappa_values.size() + ik]; }
};

ScanMatrix two_parameter_sweep(const ScanSystem& sys, const ScanConfig& cfg);

}  // namespace thermo
