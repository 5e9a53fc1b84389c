#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "thermo/transfer.hpp"

namespace thermo {

struct PressureOptions {
  EigenOptions eigen;
  double fd_first = 1e-4;   ///< step for first derivatives
  double fd_second = 1e-3;  ///< step for second derivatives
  double t_max = 30.0;      ///< achievable-range probe |t|
  double lattice_threshold = 1e-8;
};

/// Pr_sigma(phi) = log of the Perron root of L_phi.
double pressure_sigma(const Potential& phi, const EigenOptions& opts = {});

/// Unique s with Pr_sigma(f + t g - s tau) = 0 (pressure of the suspension flow for F + tG).
double pressure_flow(const Potential& f, const Potential& tau, const Potential& g, double t,
                     const EigenOptions& opts = {});

/// Expectation of psi under the equilibrium state of a real potential.
double gibbs_expectation(const Potential& phi, const Potential& psi, const EigenOptions& opts = {});

/// beta(t) = Pr_{sigma_tau}(F + tG) for the centered system f - Pr_{sigma_tau}(F) tau, so beta(0) = 0.
/// Holds an append-only cache of evaluated points; not safe for concurrent writers.
class PressureCurve {
public:
  PressureCurve(const Potential& f, const Potential& tau, const Potential& g, PressureOptions opts = {});

  const Potential& f() const { return f_; }  ///< centered f
  const Potential& tau() const { return tau_; }
  const Potential& g() const { return g_; }
  const PressureOptions& options() const { return opts_; }
  /// Pr_{sigma_tau}(F) of the uncentered input.
  double centering_shift() const { return shift_; }

  double beta(double t) const;
  /// Flow average of G at parameter t: E[g] / E[tau] under the equilibrium state of f + tg - beta(t) tau.
  double beta_prime(double t) const;
  double beta_prime_fd(double t) const;
  /// a_star = beta'(0), the flow average of G under m_F.
  double a_star() const { return beta_prime(0.0); }
  std::pair<double, double> achievable_range() const;

  /// Minimum second divided difference over the cached points (>= -tol means convex).
  double min_second_divided_difference() const;
  const std::map<double, double>& cache() const { return cache_; }

private:
  Potential f_, tau_, g_;
  PressureOptions opts_;
  double shift_ = 0.0;
  mutable std::map<double, double> cache_;
};

double beta_prime(const PressureCurve& curve, double t);

/// beta''(t) by Richardson-extrapolated central differences; equals the flow variance of G.
double variance_flow(const PressureCurve& curve, double t);

/// xi(a) with beta'(xi) = a. Throws OutOfRange or LatticeDegenerate.
double solve_xi(const PressureCurve& curve, double a);

struct RateReport {
  double a = 0.0;
  double xi = 0.0;
  double J = 0.0;       ///< Pr(f + xi (g - a tau))
  double gamma = 0.0;   ///< beta(xi) - xi a
  double omega = 0.0;   ///< d^2/dt^2 Pr(f + t g_a) at t = xi
  double mean_tau = 0.0;///< integral of tau under the equilibrium state of f + xi g_a
  double a_star = 0.0;
  double beta_second = 0.0;  ///< beta''(xi)
  // diagnostics
  double xi_residual = 0.0;     ///< |beta'(xi) - a|
  double eta = 0.0;             ///< argmin_t Pr(f + t g_a)
  double J_inf = 0.0;           ///< Pr(f + eta g_a)
  double J_identity_defect = 0.0;  ///< J - gamma * mean_tau
};

RateReport rate_J(const PressureCurve& curve, double a);

/// inf_t Pr(f + t g_a) by direct 1-D minimization over [center - 2, center + 2].
std::pair<double, double> rate_J_by_minimization(const PressureCurve& curve, double a, double center);

/// Spectral radius estimate of L_{f0 + i u psi} from iterate-norm growth.
struct LatticeReport {
  std::vector<std::pair<double, double>> radius;  ///< (u, r(u))
  double max_radius = 0.0;   ///< over u != 0
  double u_at_max = 0.0;
  bool lattice = false;
  double tol = 1e-6;
};

LatticeReport lattice_check(const Potential& f0, const Potential& psi, std::span<const double> u_grid,
                            int iterations = 200, double tol = 1e-6);

/// exp of the fitted slope of log ||L^m seed||_inf over m in [iterations/2, iterations].
double iterate_decay_rate(const TransferOperator& op, std::span<const cplx> seed, int iterations);

}  // namespace thermo
