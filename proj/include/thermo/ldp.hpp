#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermo/pressure.hpp"

namespace thermo {

enum class CutoffKind { smooth_bump, triangle, trapezoid };

/// Nonnegative compactly supported cutoff with closed-form or quadrature Fourier data,
/// chi_hat(zeta) = int chi(t) e^{-i zeta t} dt, valid for complex zeta.
class CutoffFunction {
public:
  /// (1 - |t|)_+ scaled to support [-half_width, half_width].
  static CutoffFunction triangle(double half_width = 1.0);
  /// exp(1 - 1/(1 - t^2)) on (-1, 1).
  static CutoffFunction smooth_bump();
  /// 1 on [-plateau, plateau], linear down to 0 at +-half_width.
  static CutoffFunction trapezoid(double plateau, double half_width);

  CutoffKind kind() const { return kind_; }
  double half_width() const { return half_width_; }
  double amplitude() const { return amplitude_; }
  CutoffFunction scaled(double factor) const;

  double operator()(double t) const;
  double integral() const { return amplitude_ * integral_; }
  cplx fourier(cplx zeta) const;

private:
  CutoffFunction(CutoffKind kind, double plateau, double half_width, double integral);

  CutoffKind kind_;
  double plateau_;
  double half_width_;
  double integral_;
  double amplitude_ = 1.0;
};

/// The equilibrium state of the centered f and the observable g_a = g - a tau.
struct LdpSystem {
  Potential f0;  ///< normalized, L_{f0} 1 = 1
  GibbsMeasure mu;
  Potential tau;
  Potential g;
  double a;
  Potential g_a;
};

LdpSystem prepare_ldp(const PressureCurve& curve, double a);

struct EnumerationOptions {
  std::uint64_t guard = 100'000'000;  ///< max admissible words enumerated
  unsigned threads = 1;
  double snap = 1e-14;                ///< boundary snap tolerance
};

struct WindowSums {
  double rho_exact = 0.0;
  std::vector<double> smooth;      ///< one per cutoff
  std::uint64_t boundary_hits = 0;
  std::uint64_t words = 0;
};

/// Single pass over all cylinders of length max(n + depth(g_a) - 1, block length):
/// indicator of g_a^n in (-delta_n, delta_n) and sum of mass * chi(g_a^n / delta_n).
/// Throws TooLarge when the word count exceeds the guard.
WindowSums enumerate_window(const GibbsMeasure& mu, const Potential& g_a, int n, double delta_n,
                            std::span<const CutoffFunction> cutoffs, const EnumerationOptions& opts = {});

struct ExactResult {
  double value = 0.0;
  std::uint64_t boundary_hits = 0;
};

/// mu{ g^n - a tau^n in (-e^{-delta n}, e^{-delta n}) } by exact enumeration.
ExactResult rho_exact(const GibbsMeasure& mu, const Potential& tau, const Potential& g, double a, double delta, int n,
                      const EnumerationOptions& opts = {});

/// int chi(e^{delta n} g_a^n) d mu by exact enumeration.
double rho_smooth_direct(const GibbsMeasure& mu, const Potential& tau, const Potential& g, double a, double delta,
                         int n, const CutoffFunction& chi, const EnumerationOptions& opts = {});

struct QuadratureSpec {
  double u_max = 200.0;
  double step = 0.01;
  double tol = 1e-6;  ///< relative change allowed under step halving
  unsigned threads = 1;
};

struct SpectralResult {
  double value = 0.0;
  double imag = 0.0;
  double halving_change = 0.0;     ///< |I_h - I_{h/2}| / |I_{h/2}|
  double half_range_change = 0.0;  ///< |I(u_max/2) - I(u_max)| / |I(u_max)|, truncation diagnostic
};

/// Fourier-inversion path:
/// (delta_n / 2 pi) int_{|u| <= u_max} <L^n_{f0 + (xi + iu) g_a} 1, mu> chi_hat(delta_n (u - i xi)) du
/// by the trapezoid rule, certified by step halving. Throws QuadratureUnderresolved.
SpectralResult rho_smooth_spectral(const LdpSystem& sys, double xi, double delta, int n, const CutoffFunction& chi,
                                   const QuadratureSpec& quad);

enum class AsymptoteMode { indicator, smooth };

/// delta_n e^{nJ} / sqrt(2 pi omega n) times 2 (indicator) or int chi (smooth).
double asymptote(const RateReport& rr, double delta, int n, AsymptoteMode mode,
                 const CutoffFunction* chi = nullptr);

struct DeltaConstraintReport {
  double ceiling = 0.0;          ///< -log(rho_hat) / 2
  bool delta_ok = false;         ///< delta <= ceiling
  bool sequence_ok = false;      ///< n rho_hat^n e^{2 delta n} <= 1 over the range
  int worst_n = 0;
  double worst_value = 0.0;
};

DeltaConstraintReport delta_constraint_check(double delta, double rho_hat, int n_min, int n_max);

struct LdpRow {
  int n = 0;
  double delta_n = 0.0;
  double rho_exact = 0.0;
  double rho_smooth_direct = 0.0;
  double rho_smooth_spectral = 0.0;
  double asymptote_indicator = 0.0;
  double asymptote_smooth = 0.0;
  double ratio_exact = 0.0;
  double ratio_smooth = 0.0;
  double T_n = 0.0;
  double C_a = 0.0;
  std::uint64_t boundary_hits = 0;
  double spectral_imag = 0.0;
  bool guard_tripped = false;
};

struct LdpRunConfig {
  double a = 0.0;
  double delta = 0.05;
  int n_min = 1;
  int n_max = 0;
  int n_step = 1;
  CutoffKind chi = CutoffKind::triangle;
  bool spectral = true;
  QuadratureSpec quad;
  EnumerationOptions enumeration;
};

struct LdpTable {
  RateReport rates;
  std::vector<LdpRow> rows;
  bool guard_tripped = false;
};

LdpTable build_ldp_table(const PressureCurve& curve, const LdpRunConfig& cfg);

}  // namespace thermo
