#include "thermo/scan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "thermo/errors.hpp"
#include "thermo/numerics.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

void validate_scan_config(const ScanConfig& cfg) {
  if (cfg.b_grid.empty()) throw ValidationError("scan b_grid is empty");
  if (cfg.kappa_grid.empty()) throw ValidationError("scan kappa_grid is empty");
  for (double b : cfg.b_grid)
    if (!(std::abs(b) >= 1.0)) throw BadFrequency("BadFrequency: scan b values need |b| >= 1, got " + std::to_string(b));
  if (!(cfg.B >= 0.0)) throw ValidationError("scan B must be >= 0");
  for (double k : cfg.kappa_grid)
    if (std::abs(k) > cfg.B) throw ValidationError("scan kappa " + std::to_string(k) + " exceeds B");
  if (cfg.m_max < 2) throw ValidationError("scan m_max must be >= 2");
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw ValidationError("theta must lie in (0,1)");
}

double DecayFit::y(int m) const { return std::exp(log_y.at(static_cast<std::size_t>(m))); }

ScanSystem::ScanSystem(Potential f0, Potential tau, Potential g, double a, double c, const EigenOptions& eigen)
    : f0_(std::move(f0)), tau_(std::move(tau)), g_(std::move(g)), a_(a), c_(c) {
  depth_ = std::max({f0_.depth(), tau_.depth(), g_.depth()});
  pressure_ = pressure_sigma(combine(f0_, tau_, g_, a_, c_), eigen);
}

std::vector<cplx> ScanSystem::seed(SeedKind kind, std::uint64_t rng_seed) const {
  const std::size_t n = WordTable(f0_.shift(), depth_).size();
  std::vector<cplx> h(n, cplx{1.0, 0.0});
  switch (kind) {
    case SeedKind::constant_one:
      break;
    case SeedKind::random_unit: {
      std::mt19937_64 rng(rng_seed);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      for (auto& v : h) v = std::polar(1.0, phase(rng));
      break;
    }
    case SeedKind::cylinder_indicator:
      std::fill(h.begin(), h.end(), cplx{0.0, 0.0});
      h.front() = 1.0;
      break;
  }
  return h;
}

DecayFit decay_sequence(const ScanSystem& sys, double b, double w, int m_max, std::span<const cplx> h, double theta) {
  if (m_max < 2) throw ValidationError("m_max must be >= 2");
  const Potential phi = combine(sys.f0(), sys.tau(), sys.g(), cplx{sys.a(), b}, cplx{sys.c(), w}).lift(sys.depth());
  const TransferOperator op(phi);
  if (h.size() != op.dim()) throw ValidationError("seed length does not match operator dimension");
  const ThetaMetric metric(theta);
  const double freq = std::max(std::abs(b), 1.0);
  const double damp = std::exp(-sys.pressure());

  DecayFit fit;
  fit.b = b;
  fit.w = w;
  fit.log_y.resize(static_cast<std::size_t>(m_max) + 1);
  std::vector<cplx> v(h.begin(), h.end());
  std::vector<cplx> next(v.size());
  double log_scale = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const double norm = norm_beta_b(op.words(), v, metric, freq).combined;
    if (!std::isfinite(norm))
      throw NumericalError("non-finite iterate norm at m = " + std::to_string(m) + " for b = " + std::to_string(b) +
                           ", w = " + std::to_string(w));
    fit.log_y[static_cast<std::size_t>(m)] = log_scale + std::log(norm);
    if (m == m_max) break;
    op.apply(v, next);
    double sup = 0.0;
    for (auto& x : next) {
      x *= damp;
      sup = std::max(sup, std::abs(x));
    }
    if (sup == 0.0) {
      std::fill(fit.log_y.begin() + m + 1, fit.log_y.end(), -std::numeric_limits<double>::infinity());
      break;
    }
    for (auto& x : next) x /= sup;
    log_scale += std::log(sup);
    v.swap(next);
  }

  for (int m = 0; m < m_max; ++m)
    fit.max_step_growth =
        std::max(fit.max_step_growth, std::exp(fit.log_y[static_cast<std::size_t>(m) + 1] - fit.log_y[static_cast<std::size_t>(m)]));

  std::vector<double> xs, ys;
  for (int m = m_max / 2; m <= m_max; ++m) {
    xs.push_back(m);
    ys.push_back(fit.log_y[static_cast<std::size_t>(m)]);
  }
  if (!std::isfinite(ys.back())) {
    fit.rho_hat = 0.0;  // nilpotent on this seed
    return fit;
  }
  const auto line = numerics::fit_line(xs, ys);
  fit.rho_hat = std::exp(line.slope);
  fit.fit_residual = line.rms_residual;
  return fit;
}

EnvelopeReport envelope_report(std::span<const DecayFit> fits, double epsilon) {
  EnvelopeReport r;
  if (fits.empty()) {
    r.notes.push_back("no fits");
    return r;
  }
  for (const auto& f : fits) r.rho_global = std::max(r.rho_global, f.rho_hat);
  if (r.rho_global >= 1.0 - 1e-6) {
    r.no_decay_flag = true;
    r.notes.push_back("rho_global >= 1 - 1e-6: no decay, envelope meaningless");
  }
  const double log_rho = std::log(r.rho_global);
  std::map<double, double> by_b;  // |b| -> log M(b)
  for (const auto& f : fits) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < f.log_y.size(); ++m)
      best = std::max(best, f.log_y[m] - static_cast<double>(m) * log_rho);
    const double key = std::abs(f.b);
    auto it = by_b.find(key);
    if (it == by_b.end() || best > it->second) by_b[key] = best;
  }
  std::vector<double> xs, ys;
  for (const auto& [b, log_m] : by_b) {
    r.envelope.emplace_back(b, std::exp(log_m));
    xs.push_back(std::log(b));
    ys.push_back(log_m);
  }
  if (xs.size() < 2) {
    r.notes.push_back("single |b| in grid: e_fit undefined");
    return r;
  }
  const auto line = numerics::fit_line(xs, ys);
  r.e_fit = line.slope;
  r.C = std::exp(line.intercept);
  if (line.slope > epsilon) {
    r.exponent_flag = true;
    r.notes.push_back("e_fit " + std::to_string(line.slope) + " exceeds epsilon " + std::to_string(epsilon));
  }
  return r;
}

ScanMatrix two_parameter_sweep(const ScanSystem& sys, const ScanConfig& cfg) {
  validate_scan_config(cfg);
  ScanMatrix out;
  out.b_values = cfg.b_grid;
  out.kappa_values = cfg.kappa_grid;
  out.kappa_values.push_back(cfg.B);
  out.kappa_values.push_back(-cfg.B);
  std::sort(out.kappa_values.begin(), out.kappa_values.end());
  out.kappa_values.erase(std::unique(out.kappa_values.begin(), out.kappa_values.end()), out.kappa_values.end());

  const auto h = sys.seed(cfg.h_seed, cfg.seed);
  const std::size_t nk = out.kappa_values.size();
  out.cells.resize(out.b_values.size() * nk);
  numerics::parallel_for(out.cells.size(), cfg.threads, [&](std::size_t i) {
    const double b = out.b_values[i / nk];
    const double w = out.kappa_values[i % nk] * b;
    out.cells[i] = decay_sequence(sys, b, w, cfg.m_max, h, cfg.theta);
  });
  return out;
}

}  // namespace thermo
