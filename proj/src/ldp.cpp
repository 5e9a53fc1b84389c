#include "thermo/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "thermo/errors.hpp"
#include "thermo/numerics.hpp"

namespace thermo {

namespace {

cplx sinc(cplx x) {
  if (std::abs(x) < 1e-4) {
    const cplx x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// Fourier transform of (1 - |t|/w)_+.
cplx triangle_hat(double w, cplx zeta) {
  const cplx s = sinc(0.5 * w * zeta);
  return w * s * s;
}

double bump(double t) {
  const double q = 1.0 - t * t;
  return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
}

// Trapezoid rule on [-1, 1]. The bump is flat to all orders at the endpoints, so the error
// is the aliased transform at distance pi * panels - |zeta|; a margin of 800 puts it near e^-40.
cplx bump_hat(cplx zeta) {
  const double need = (800.0 + std::abs(zeta)) / std::numbers::pi;
  const int panels = 64 * static_cast<int>(std::ceil(need / 64.0));
  const double h = 2.0 / panels;
  cplx acc{bump(0.0), 0.0};
  for (int i = 1; i < panels / 2; ++i) {
    const double t = i * h;
    acc += 2.0 * bump(t) * std::cos(zeta * t);
  }
  return acc * h;
}

}  // namespace

CutoffFunction::CutoffFunction(CutoffKind kind, double plateau, double half_width, double integral)
    : kind_(kind), plateau_(plateau), half_width_(half_width), integral_(integral) {}

CutoffFunction CutoffFunction::triangle(double half_width) {
  if (!(half_width > 0.0)) throw ValidationError("triangle half-width must be positive");
  return CutoffFunction(CutoffKind::triangle, 0.0, half_width, half_width);
}

CutoffFunction CutoffFunction::smooth_bump() {
  static const double integral = bump_hat(0.0).real();
  return CutoffFunction(CutoffKind::smooth_bump, 0.0, 1.0, integral);
}

CutoffFunction CutoffFunction::trapezoid(double plateau, double half_width) {
  if (!(plateau > 0.0 && half_width > plateau)) throw ValidationError("trapezoid needs 0 < plateau < half_width");
  return CutoffFunction(CutoffKind::trapezoid, plateau, half_width, plateau + half_width);
}

CutoffFunction CutoffFunction::scaled(double factor) const {
  CutoffFunction out = *this;
  out.amplitude_ *= factor;
  return out;
}

double CutoffFunction::operator()(double t) const {
  const double x = std::abs(t);
  double v = 0.0;
  switch (kind_) {
    case CutoffKind::triangle:
      v = std::max(0.0, 1.0 - x / half_width_);
      break;
    case CutoffKind::trapezoid:
      v = x <= plateau_ ? 1.0 : (x < half_width_ ? (half_width_ - x) / (half_width_ - plateau_) : 0.0);
      break;
    case CutoffKind::smooth_bump:
      v = bump(t);
      break;
  }
  return amplitude_ * v;
}

cplx CutoffFunction::fourier(cplx zeta) const {
  switch (kind_) {
    case CutoffKind::triangle:
      return amplitude_ * triangle_hat(half_width_, zeta);
    case CutoffKind::trapezoid:
      return amplitude_ *
             (half_width_ * triangle_hat(half_width_, zeta) - plateau_ * triangle_hat(plateau_, zeta)) /
             (half_width_ - plateau_);
    case CutoffKind::smooth_bump:
      return amplitude_ * bump_hat(zeta);
  }
  return {0.0, 0.0};
}

LdpSystem prepare_ldp(const PressureCurve& curve, double a) {
  const auto& eigen = curve.options().eigen;
  const SpectralData sd = leading_eigendata(TransferOperator(curve.f()), eigen);
  Potential f0 = normalize_potential(curve.f(), sd, eigen.tol);
  const SpectralData sd0 = leading_eigendata(TransferOperator(f0), eigen);
  GibbsMeasure mu(f0, sd0);
  Potential g_a = curve.g() - curve.tau() * a;
  return LdpSystem{std::move(f0), std::move(mu), curve.tau(), curve.g(), a, std::move(g_a)};
}

namespace {

class WindowWalker {
public:
  WindowWalker(const GibbsMeasure& mu, const Potential& g_a, int n, double delta_n,
               std::span<const CutoffFunction> cutoffs, double snap, int length)
      : mu_(mu),
        table_(g_a.words()),
        values_(g_a.real_values()),
        n_(n),
        d_(g_a.depth()),
        delta_n_(delta_n),
        cutoffs_(cutoffs),
        snap_(snap),
        length_(length),
        word_(static_cast<std::size_t>(length)) {}

  WindowSums run(std::span<const int> prefix) {
    WindowSums out;
    out.smooth.assign(cutoffs_.size(), 0.0);
    std::copy(prefix.begin(), prefix.end(), word_.begin());
    const int len = static_cast<int>(prefix.size());
    double sum = 0.0;
    for (int j = 0; j + d_ <= len && j < n_; ++j) sum += term(j);
    const double mass = gibbs_cylinder_mass(mu_, prefix);
    const auto block = static_cast<std::size_t>(mu_.blocks().index_of(prefix.subspan(prefix.size() - mu_.block_length())));
    walk(len, block, mass, sum, out);
    return out;
  }

private:
  double term(int j) const {
    return values_[static_cast<std::size_t>(table_.index_of(std::span<const int>(word_).subspan(j, d_)))];
  }

  void walk(int len, std::size_t block, double mass, double sum, WindowSums& out) {
    if (len == length_) {
      ++out.words;
      const double gap = std::abs(sum) - delta_n_;
      if (gap < -snap_) {
        out.rho_exact += mass;
      } else if (std::abs(gap) <= snap_) {
        out.rho_exact += mass;
        ++out.boundary_hits;
      }
      for (std::size_t c = 0; c < cutoffs_.size(); ++c) out.smooth[c] += mass * cutoffs_[c](sum / delta_n_);
      return;
    }
    for (const auto& st : mu_.steps(block)) {
      word_[static_cast<std::size_t>(len)] = st.symbol;
      const int j = len + 1 - d_;
      const double next_sum = (j >= 0 && j < n_) ? sum + term(j) : sum;
      walk(len + 1, st.next, mass * st.prob, next_sum, out);
    }
  }

  const GibbsMeasure& mu_;
  const WordTable& table_;
  std::vector<double> values_;
  int n_;
  int d_;
  double delta_n_;
  std::span<const CutoffFunction> cutoffs_;
  double snap_;
  int length_;
  Word word_;
};

}  // namespace

WindowSums enumerate_window(const GibbsMeasure& mu, const Potential& g_a, int n, double delta_n,
                            std::span<const CutoffFunction> cutoffs, const EnumerationOptions& opts) {
  if (n < 1) throw ValidationError("horizon n must be >= 1");
  if (!(g_a.shift() == mu.shift())) throw SpecMismatch("SpecMismatch: observable and measure differ in subshift");
  const auto& shift = mu.shift();
  const int length = std::max(n + g_a.depth() - 1, mu.block_length());
  const std::uint64_t count = shift.count_words(length);
  if (count > opts.guard)
    throw TooLarge("TooLarge: " + std::to_string(count) + " cylinders of length " + std::to_string(length) +
                   " exceed the enumeration guard " + std::to_string(opts.guard));

  // split by prefix; results are reduced in prefix order so the sum is thread-count independent
  int prefix_len = mu.block_length();
  while (prefix_len < length && shift.count_words(prefix_len) < 256) ++prefix_len;
  const auto prefixes = shift.admissible_words(prefix_len);

  std::vector<WindowSums> partial(prefixes.size());
  numerics::parallel_for(prefixes.size(), opts.threads, [&](std::size_t i) {
    WindowWalker walker(mu, g_a, n, delta_n, cutoffs, opts.snap, length);
    partial[i] = walker.run(prefixes[i]);
  });

  WindowSums total;
  total.smooth.assign(cutoffs.size(), 0.0);
  for (const auto& p : partial) {
    total.rho_exact += p.rho_exact;
    for (std::size_t c = 0; c < cutoffs.size(); ++c) total.smooth[c] += p.smooth[c];
    total.boundary_hits += p.boundary_hits;
    total.words += p.words;
  }
  return total;
}

ExactResult rho_exact(const GibbsMeasure& mu, const Potential& tau, const Potential& g, double a, double delta, int n,
                      const EnumerationOptions& opts) {
  const auto sums = enumerate_window(mu, g - tau * a, n, std::exp(-delta * n), {}, opts);
  return {sums.rho_exact, sums.boundary_hits};
}

double rho_smooth_direct(const GibbsMeasure& mu, const Potential& tau, const Potential& g, double a, double delta,
                         int n, const CutoffFunction& chi, const EnumerationOptions& opts) {
  const auto sums = enumerate_window(mu, g - tau * a, n, std::exp(-delta * n), std::span(&chi, 1), opts);
  return sums.smooth.front();
}

SpectralResult rho_smooth_spectral(const LdpSystem& sys, double xi, double delta, int n, const CutoffFunction& chi,
                                   const QuadratureSpec& quad) {
  if (n < 1) throw ValidationError("horizon n must be >= 1");
  if (!(quad.u_max > 0.0 && quad.step > 0.0)) throw ValidationError("quadrature needs u_max > 0 and step > 0");
  const double delta_n = std::exp(-delta * n);
  const int depth = std::max(sys.f0.depth(), sys.g_a.depth());
  const Potential base = (sys.f0 + sys.g_a * xi).lift(depth);
  const TransferOperator op(base);
  const auto masses = sys.mu.cylinder_masses(base.words());
  const std::vector<cplx> one(op.dim(), cplx{1.0, 0.0});

  // coarse grid: 4 * half_intervals panels of width h, so |u| <= u_max / 2 is a node-aligned subrange
  const auto quarter = static_cast<std::size_t>(std::ceil(quad.u_max / (2.0 * quad.step)));
  const std::size_t coarse_panels = 4 * quarter;
  const double h = 2.0 * quad.u_max / static_cast<double>(coarse_panels);
  const std::size_t fine_panels = 2 * coarse_panels;
  const double hf = 0.5 * h;

  std::vector<cplx> values(fine_panels + 1);
  constexpr std::size_t chunk = 4096;
  const std::size_t chunks = (values.size() + chunk - 1) / chunk;
  numerics::parallel_for(chunks, quad.threads, [&](std::size_t c) {
    const std::size_t end = std::min(values.size(), (c + 1) * chunk);
    for (std::size_t j = c * chunk; j < end; ++j) {
      const double u = -quad.u_max + static_cast<double>(j) * hf;
      const auto v = apply_iterated(op.tilted(sys.g_a, cplx{0.0, u}), one, n);
      cplx pairing{0.0, 0.0};
      for (std::size_t i = 0; i < v.size(); ++i) pairing += v[i] * masses[i];
      values[j] = pairing * chi.fourier(delta_n * cplx{u, -xi});
    }
  });

  auto trapezoid = [&](std::size_t first, std::size_t last, std::size_t stride, double width) {
    cplx acc = 0.5 * (values[first] + values[last]);
    for (std::size_t j = first + stride; j < last; j += stride) acc += values[j];
    return acc * width * delta_n / (2.0 * std::numbers::pi);
  };
  const cplx fine = trapezoid(0, fine_panels, 1, hf);
  const cplx coarse = trapezoid(0, fine_panels, 2, h);
  const cplx half_range = trapezoid(fine_panels / 4, 3 * fine_panels / 4, 1, hf);

  SpectralResult out;
  out.value = fine.real();
  out.imag = fine.imag();
  const double scale = std::max(std::abs(fine), 1e-300);
  out.halving_change = std::abs(fine - coarse) / scale;
  out.half_range_change = std::abs(fine - half_range) / scale;
  if (out.halving_change > quad.tol)
    throw QuadratureUnderresolved("QuadratureUnderresolved: step halving changed the result by " +
                                  std::to_string(out.halving_change) + " (relative) at n = " + std::to_string(n));
  return out;
}

double asymptote(const RateReport& rr, double delta, int n, AsymptoteMode mode, const CutoffFunction* chi) {
  if (!(rr.omega > 0.0)) throw ValidationError("asymptote needs omega(a) > 0");
  double mass = 2.0;
  if (mode == AsymptoteMode::smooth) {
    if (chi == nullptr) throw ValidationError("smooth asymptote needs a cutoff");
    mass = chi->integral();
  }
  const double delta_n = std::exp(-delta * n);
  return mass * delta_n * std::exp(n * rr.J) / std::sqrt(2.0 * std::numbers::pi * rr.omega * n);
}

DeltaConstraintReport delta_constraint_check(double delta, double rho_hat, int n_min, int n_max) {
  if (!(rho_hat > 0.0 && rho_hat < 1.0)) throw ValidationError("rho_hat must lie in (0,1)");
  DeltaConstraintReport r;
  r.ceiling = -std::log(rho_hat) / 2.0;
  r.delta_ok = delta <= r.ceiling * (1.0 + 1e-12);
  r.sequence_ok = true;
  r.worst_value = -1.0;
  for (int n = std::max(1, n_min); n <= n_max; ++n) {
    const double v = n * std::exp(n * (std::log(rho_hat) + 2.0 * delta));
    if (v > r.worst_value) {
      r.worst_value = v;
      r.worst_n = n;
    }
    if (v > 1.0) r.sequence_ok = false;
  }
  return r;
}

LdpTable build_ldp_table(const PressureCurve& curve, const LdpRunConfig& cfg) {
  LdpTable table;
  table.rates = rate_J(curve, cfg.a);
  const RateReport& rr = table.rates;
  const LdpSystem sys = prepare_ldp(curve, cfg.a);
  CutoffFunction chi = cfg.chi == CutoffKind::smooth_bump ? CutoffFunction::smooth_bump() : CutoffFunction::triangle();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int length_extra = sys.g_a.depth() - 1;

  for (int n = cfg.n_min; n <= cfg.n_max; n += std::max(1, cfg.n_step)) {
    LdpRow row;
    row.n = n;
    row.delta_n = std::exp(-cfg.delta * n);
    row.asymptote_indicator = asymptote(rr, cfg.delta, n, AsymptoteMode::indicator);
    row.asymptote_smooth = asymptote(rr, cfg.delta, n, AsymptoteMode::smooth, &chi);
    row.T_n = n * rr.mean_tau;
    row.C_a = std::sqrt(rr.beta_second * rr.mean_tau / rr.omega);

    const int length = std::max(n + length_extra, sys.mu.block_length());
    if (sys.mu.shift().count_words(length) > cfg.enumeration.guard) {
      row.guard_tripped = true;
      table.guard_tripped = true;
      row.rho_exact = row.rho_smooth_direct = row.ratio_exact = row.ratio_smooth = nan;
    } else {
      const auto sums = enumerate_window(sys.mu, sys.g_a, n, row.delta_n, std::span(&chi, 1), cfg.enumeration);
      row.rho_exact = sums.rho_exact;
      row.rho_smooth_direct = sums.smooth.front();
      row.boundary_hits = sums.boundary_hits;
      row.ratio_exact = row.rho_exact / row.asymptote_indicator;
      row.ratio_smooth = row.rho_smooth_direct / row.asymptote_smooth;
    }
    if (cfg.spectral) {
      const auto sp = rho_smooth_spectral(sys, rr.xi, cfg.delta, n, chi, cfg.quad);
      row.rho_smooth_spectral = sp.value;
      row.spectral_imag = sp.imag;
    } else {
      row.rho_smooth_spectral = nan;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace thermo
