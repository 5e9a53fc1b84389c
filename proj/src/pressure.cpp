#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thermo/errors.hpp"
#include "thermo/numerics.hpp"

namespace thermo {

namespace {

GibbsMeasure equilibrium(const Potential& phi, const EigenOptions& opts) {
  const TransferOperator op(phi);
  return GibbsMeasure(phi, leading_eigendata(op, opts));
}

void require_roof(const Potential& tau) {
  if (!tau.is_real() || tau.min_real() <= 0.0)
    throw ValidationError("roof positivity: tau must be real and strictly positive");
}

}  // namespace

double pressure_sigma(const Potential& phi, const EigenOptions& opts) {
  if (!phi.is_real()) throw ValidationError("pressure_sigma needs a real potential");
  return leading_eigendata(TransferOperator(phi), opts).pressure;
}

double gibbs_expectation(const Potential& phi, const Potential& psi, const EigenOptions& opts) {
  return equilibrium(phi, opts).expectation(psi).real();
}

double pressure_flow(const Potential& f, const Potential& tau, const Potential& g, double t,
                     const EigenOptions& opts) {
  require_roof(tau);
  const Potential base = f + g * t;
  auto F = [&](double s) { return pressure_sigma(base - tau * s, opts); };
  const double p0 = F(0.0);
  if (p0 == 0.0) return 0.0;
  // slope of F lies in [-max tau, -min tau]
  const double lo_tau = tau.min_real(), hi_tau = tau.max_real();
  double lo = p0 > 0.0 ? p0 / hi_tau : p0 / lo_tau;
  double hi = p0 > 0.0 ? p0 / lo_tau : p0 / hi_tau;
  const double pad = 1e-9 * std::max(1.0, std::abs(hi - lo) + std::abs(lo));
  lo -= pad;
  hi += pad;
  return numerics::find_root(F, lo, hi);
}

PressureCurve::PressureCurve(const Potential& f, const Potential& tau, const Potential& g, PressureOptions opts)
    : f_(f), tau_(tau), g_(g), opts_(opts) {
  if (!f.is_real() || !g.is_real()) throw ValidationError("f and g must be real-valued");
  require_roof(tau);
  if (!(f.shift() == tau.shift()) || !(f.shift() == g.shift()))
    throw SpecMismatch("SpecMismatch: f, tau, g must share one subshift");
  shift_ = pressure_flow(f, tau, g, 0.0, opts_.eigen);
  f_ = f - tau * shift_;
  cache_[0.0] = 0.0;
}

double PressureCurve::beta(double t) const {
  if (auto it = cache_.find(t); it != cache_.end()) return it->second;
  const double value = pressure_flow(f_, tau_, g_, t, opts_.eigen);
  cache_.emplace(t, value);
  return value;
}

double PressureCurve::beta_prime(double t) const {
  const Potential phi = f_ + g_ * t - tau_ * beta(t);
  const GibbsMeasure mu = equilibrium(phi, opts_.eigen);
  return mu.expectation(g_).real() / mu.expectation(tau_).real();
}

double PressureCurve::beta_prime_fd(double t) const {
  return numerics::first_derivative([this](double x) { return beta(x); }, t, opts_.fd_first);
}

std::pair<double, double> PressureCurve::achievable_range() const {
  return {beta_prime(-opts_.t_max), beta_prime(opts_.t_max)};
}

double PressureCurve::min_second_divided_difference() const {
  double worst = std::numeric_limits<double>::infinity();
  if (cache_.size() < 3) return worst;
  auto a = cache_.begin();
  auto b = std::next(a);
  auto c = std::next(b);
  for (; c != cache_.end(); ++a, ++b, ++c) {
    const double d1 = (b->second - a->second) / (b->first - a->first);
    const double d2 = (c->second - b->second) / (c->first - b->first);
    worst = std::min(worst, (d2 - d1) / (c->first - a->first));
  }
  return worst;
}

double beta_prime(const PressureCurve& curve, double t) { return curve.beta_prime(t); }

double variance_flow(const PressureCurve& curve, double t) {
  return numerics::second_derivative([&](double x) { return curve.beta(x); }, t, curve.options().fd_second);
}

double solve_xi(const PressureCurve& curve, double a) {
  const auto [lo, hi] = curve.achievable_range();
  if (!(a > lo && a < hi))
    throw OutOfRange("OutOfRange: a = " + std::to_string(a) + " outside achievable interval (" + std::to_string(lo) +
                         ", " + std::to_string(hi) + ")",
                     lo, hi);
  const double T = curve.options().t_max;
  const double xi =
      numerics::find_root([&](double t) { return curve.beta_prime(t) - a; }, -T, T, lo - a, hi - a);
  const double curvature = variance_flow(curve, xi);
  if (curvature <= curve.options().lattice_threshold)
    throw LatticeDegenerate("LatticeDegenerate: beta''(xi) = " + std::to_string(curvature) +
                            " (G cohomologous to a constant)");
  return xi;
}

RateReport rate_J(const PressureCurve& curve, double a) {
  const auto& opts = curve.options();
  RateReport r;
  r.a = a;
  r.a_star = curve.a_star();
  r.xi = solve_xi(curve, a);
  r.xi_residual = std::abs(curve.beta_prime(r.xi) - a);

  const Potential g_a = curve.g() - curve.tau() * a;
  auto tilted = [&](double t) { return pressure_sigma(curve.f() + g_a * t, opts.eigen); };
  r.J = tilted(r.xi);
  r.gamma = curve.beta(r.xi) - r.xi * a;
  r.omega = numerics::second_derivative(tilted, r.xi, opts.fd_second);
  r.mean_tau = gibbs_expectation(curve.f() + g_a * r.xi, curve.tau(), opts.eigen);
  r.beta_second = variance_flow(curve, r.xi);
  r.J_identity_defect = r.J - r.gamma * r.mean_tau;

  // eta solves E[g_a] = 0 under the equilibrium state of f + eta g_a
  auto slope = [&](double t) { return gibbs_expectation(curve.f() + g_a * t, g_a, opts.eigen); };
  double lo = r.xi - 2.0, hi = r.xi + 2.0;
  double s_lo = slope(lo), s_hi = slope(hi);
  for (int grow = 0; grow < 8 && s_lo > 0.0; ++grow) s_lo = slope(lo -= 4.0);
  for (int grow = 0; grow < 8 && s_hi < 0.0; ++grow) s_hi = slope(hi += 4.0);
  r.eta = numerics::find_root(slope, lo, hi, s_lo, s_hi);
  r.J_inf = tilted(r.eta);
  return r;
}

std::pair<double, double> rate_J_by_minimization(const PressureCurve& curve, double a, double center) {
  const Potential g_a = curve.g() - curve.tau() * a;
  return numerics::minimize([&](double t) { return pressure_sigma(curve.f() + g_a * t, curve.options().eigen); },
                            center - 2.0, center + 2.0);
}

double iterate_decay_rate(const TransferOperator& op, std::span<const cplx> seed, int iterations) {
  if (iterations < 4) throw ValidationError("decay-rate estimate needs at least 4 iterations");
  std::vector<cplx> v(seed.begin(), seed.end()), next(v.size());
  std::vector<double> ms, logs;
  double log_scale = 0.0;
  const int start = iterations / 2;
  for (int m = 1; m <= iterations; ++m) {
    op.apply(v, next);
    double norm = 0.0;
    for (const auto& x : next) norm = std::max(norm, std::abs(x));
    if (norm == 0.0) return 0.0;
    log_scale += std::log(norm);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = next[i] / norm;
    if (m >= start) {
      ms.push_back(m);
      logs.push_back(log_scale);
    }
  }
  return std::exp(numerics::fit_line(ms, logs).slope);
}

LatticeReport lattice_check(const Potential& f0, const Potential& psi, std::span<const double> u_grid,
                            int iterations, double tol) {
  if (!f0.is_real() || !psi.is_real()) throw ValidationError("lattice_check needs real f0 and psi");
  LatticeReport report;
  report.tol = tol;
  report.max_radius = -1.0;
  for (double u : u_grid) {
    const Potential phi = f0 + psi * cplx{0.0, u};
    const TransferOperator op(phi);
    const std::vector<cplx> one(op.dim(), cplx{1.0, 0.0});
    const double r = iterate_decay_rate(op, one, iterations);
    report.radius.emplace_back(u, r);
    if (u != 0.0 && r > report.max_radius) {
      report.max_radius = r;
      report.u_at_max = u;
    }
    if (u != 0.0 && r >= 1.0 - tol) report.lattice = true;
  }
  return report;
}

}  // namespace thermo
