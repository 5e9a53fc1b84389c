#include <cmath>
#include <numbers>

#include "doctest.h"
#include "thermo/errors.hpp"
#include "thermo/ldp.hpp"

using namespace thermo;

namespace {

const Subshift kFull2 = Subshift::full(2);

// int chi(t) e^{-i zeta t} dt by a brute-force midpoint rule
cplx reference_fourier(const CutoffFunction& chi, cplx zeta, double half_width) {
  const int N = 400000;
  const double h = 2.0 * half_width / N;
  cplx acc{0.0, 0.0};
  for (int i = 0; i < N; ++i) {
    const double t = -half_width + (i + 0.5) * h;
    acc += chi(t) * std::exp(cplx{0.0, -1.0} * zeta * t);
  }
  return acc * h;
}

struct Desk {
  Potential f = Potential::constant(kFull2, 0.0);
  Potential tau = Potential::from_real(kFull2, 1, {1.0, 1.3}, PotentialKind::roof);
  Potential g = Potential::from_real(kFull2, 1, {0.2, 1.1});
  Potential f0 = normalize_potential(f, leading_eigendata(TransferOperator(f)));
  GibbsMeasure mu{f0, leading_eigendata(TransferOperator(f0))};
};

struct GoldenRoof {
  Potential f = Potential::constant(kFull2, 0.0);
  Potential tau = Potential::from_real(kFull2, 1, {1.0, std::numbers::phi}, PotentialKind::roof);
  Potential g = Potential::from_real(kFull2, 1, {0.0, 1.0});
};

}  // namespace

TEST_CASE("cutoff functions") {
  const auto tri = CutoffFunction::triangle();
  CHECK(tri(0.0) == 1.0);
  CHECK(tri(0.5) == 0.5);
  CHECK(tri(1.0) == 0.0);
  CHECK(tri(-3.0) == 0.0);
  CHECK(tri.integral() == 1.0);

  const auto bump = CutoffFunction::smooth_bump();
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump.integral() == doctest::Approx(1.2069003224378765).epsilon(1e-14));

  const auto trap = CutoffFunction::trapezoid(0.5, 1.5);
  CHECK(trap(0.5) == 1.0);
  CHECK(trap(1.0) == doctest::Approx(0.5));
  CHECK(trap.integral() == doctest::Approx(2.0));
  CHECK_THROWS_AS(CutoffFunction::trapezoid(1.0, 1.0), ValidationError);

  for (const auto& chi : {tri, bump, trap, CutoffFunction::triangle(0.7).scaled(3.0)}) {
    CHECK(std::abs(chi.fourier(0.0) - chi.integral()) < 1e-13);
    for (cplx zeta : {cplx{1e-6, 0.0}, cplx{0.3, -0.2}, cplx{7.0, 0.4}, cplx{-40.0, -0.6}, cplx{150.0, 0.1}}) {
      const auto ref = reference_fourier(chi, zeta, 1.5);
      CHECK(std::abs(chi.fourier(zeta) - ref) < 1e-9);
    }
  }
}

TEST_CASE("exact window probability") {
  const Desk d;
  // huge window swallows everything; g = a tau puts every word at 0
  CHECK(rho_exact(d.mu, d.tau, d.g, 0.7, -5.0, 3).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho_exact(d.mu, d.tau, d.tau * 0.8, 0.8, 0.1, 5).value == doctest::Approx(1.0).epsilon(1e-14));

  // 8-word hand enumeration at n = 3
  const double a = 0.7, delta = 0.1;
  const double dn = std::exp(-delta * 3);
  double expect = 0.0, expect_smooth = 0.0;
  const auto chi = CutoffFunction::triangle();
  for (const auto& w : kFull2.admissible_words(3)) {
    double s = 0.0;
    for (int x : w) s += (x ? 1.1 : 0.2) - a * (x ? 1.3 : 1.0);
    if (std::abs(s) < dn) expect += 0.125;
    expect_smooth += 0.125 * chi(s / dn);
  }
  const auto r = rho_exact(d.mu, d.tau, d.g, a, delta, 3);
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-14));
  CHECK(r.boundary_hits == 0);
  CHECK(rho_smooth_direct(d.mu, d.tau, d.g, a, delta, 3, chi) == doctest::Approx(expect_smooth).epsilon(1e-14));

  // all values far outside the window
  CHECK(rho_smooth_direct(d.mu, d.tau, d.g + 5.0, a, delta, 3, chi) == 0.0);
  // linear in chi
  CHECK(rho_smooth_direct(d.mu, d.tau, d.g, a, delta, 4, chi.scaled(2.5)) ==
        doctest::Approx(2.5 * rho_smooth_direct(d.mu, d.tau, d.g, a, delta, 4, chi)).epsilon(1e-14));

  EnumerationOptions small;
  small.guard = 10;
  CHECK_THROWS_AS(rho_exact(d.mu, d.tau, d.g, a, delta, 8, small), TooLarge);
  CHECK_THROWS_AS(rho_exact(d.mu, d.tau, d.g, a, delta, 0), ValidationError);
}

TEST_CASE("boundary hits are counted as inside") {
  const Desk d;
  // every one-step sum sits exactly on the window edge +-e^{-delta}
  const double delta = 0.25;
  const auto edge = Potential::from_real(kFull2, 1, {std::exp(-delta), -std::exp(-delta)});
  const auto unit_tau = Potential::constant(kFull2, 1.0, PotentialKind::roof);
  const auto r = rho_exact(d.mu, unit_tau, edge, 0.0, delta, 1);
  CHECK(r.boundary_hits > 0);
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("window probability properties") {
  const Desk d;
  const double a = 0.6;
  for (int n = 2; n <= 10; ++n) {
    // monotone in delta
    double prev = 2.0;
    for (double delta : {-0.2, 0.0, 0.05, 0.1, 0.3}) {
      const double v = rho_exact(d.mu, d.tau, d.g, a, delta, n).value;
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
    // sandwich between cutoffs below and above the indicator
    const double eps = 0.1, delta = 0.05;
    const auto narrow = CutoffFunction::trapezoid(1.0 - 2.0 * eps, 1.0 - eps);
    const auto wide = CutoffFunction::trapezoid(1.0, 1.0 + eps);
    const double exact = rho_exact(d.mu, d.tau, d.g, a, delta, n).value;
    CHECK(rho_smooth_direct(d.mu, d.tau, d.g, a, delta, n, narrow) <= exact + 1e-15);
    CHECK(exact <= rho_smooth_direct(d.mu, d.tau, d.g, a, delta, n, wide) + 1e-15);
    CHECK(rho_smooth_direct(d.mu, d.tau, d.g, a, delta, n, CutoffFunction::triangle(1.0 - eps)) <= exact + 1e-15);
  }

  // windows tiling the whole range of values partition the measure
  const int n = 7;
  const double delta = 0.137;
  const double dn = std::exp(-delta * n);
  const auto g_a = d.g - d.tau * a;
  double total = 0.0;
  std::uint64_t hits = 0;
  for (int k = -12; k <= 12; ++k) {
    const auto shifted = g_a + cplx{-2.0 * dn * k / n, 0.0};
    const auto sums = enumerate_window(d.mu, shifted, n, dn, {});
    total += sums.rho_exact;
    hits += sums.boundary_hits;
  }
  CHECK(hits == 0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration is deterministic across thread counts") {
  const GoldenRoof gr;
  const PressureCurve curve(gr.f, gr.tau, gr.g);
  const auto sys = prepare_ldp(curve, 0.4);
  const auto chi = CutoffFunction::triangle();
  EnumerationOptions one, many;
  many.threads = 3;
  const auto x = enumerate_window(sys.mu, sys.g_a, 14, 0.5, std::span(&chi, 1), one);
  const auto y = enumerate_window(sys.mu, sys.g_a, 14, 0.5, std::span(&chi, 1), many);
  CHECK(x.rho_exact == y.rho_exact);
  CHECK(x.smooth[0] == y.smooth[0]);
  CHECK(x.words == (1u << 14));
}

TEST_CASE("fourier path matches direct enumeration") {
  const GoldenRoof gr;
  const PressureCurve curve(gr.f, gr.tau, gr.g);
  const double a = curve.a_star() + 0.05;
  const auto sys = prepare_ldp(curve, a);
  const double xi = solve_xi(curve, a);
  const auto bump = CutoffFunction::smooth_bump();
  QuadratureSpec quad;
  quad.u_max = 300.0;
  quad.step = 0.05;
  quad.tol = 1e-8;
  for (int n : {6, 8, 10}) {
    const double direct = rho_smooth_direct(sys.mu, sys.tau, sys.g, a, 0.05, n, bump);
    const auto sp = rho_smooth_spectral(sys, xi, 0.05, n, bump, quad);
    CHECK(std::abs(sp.value - direct) <= 1e-6 * direct);
    CHECK(std::abs(sp.imag) <= 1e-8);
  }

  // the contour shift is exact: any real shift gives the same integral
  const double direct6 = rho_smooth_direct(sys.mu, sys.tau, sys.g, a, 0.05, 6, bump);
  CHECK(std::abs(rho_smooth_spectral(sys, 0.0, 0.05, 6, bump, quad).value - direct6) <= 1e-6 * direct6);

  // vanishing range
  QuadratureSpec tiny;
  tiny.u_max = 1e-4;
  tiny.step = 1e-5;
  const int n = 6;
  const double dn = std::exp(-0.05 * n);
  const auto sp = rho_smooth_spectral(sys, xi, 0.05, n, bump, tiny);
  const auto base = TransferOperator((sys.f0 + sys.g_a * xi).lift(2));
  const auto v = apply_iterated(base, std::vector<cplx>(base.dim(), 1.0), n);
  const auto masses = sys.mu.cylinder_masses(base.words());
  cplx pairing{0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) pairing += v[i] * masses[i];
  const double approx =
      (dn / (2.0 * std::numbers::pi) * bump.fourier(cplx{0.0, -dn * xi}) * pairing * (2.0 * tiny.u_max)).real();
  CHECK(sp.value == doctest::Approx(approx).epsilon(1e-6));

  QuadratureSpec coarse;
  coarse.u_max = 50.0;
  coarse.step = 2.0;
  coarse.tol = 1e-6;
  CHECK_THROWS_AS(rho_smooth_spectral(sys, xi, 0.05, 8, bump, coarse), QuadratureUnderresolved);
}

TEST_CASE("asymptote") {
  RateReport rr;
  rr.J = 0.0;
  rr.omega = 1.0;
  CHECK(asymptote(rr, 0.0, 1, AsymptoteMode::indicator) == doctest::Approx(2.0 / std::sqrt(2.0 * std::numbers::pi)));
  const auto two = CutoffFunction::trapezoid(0.5, 1.5);
  CHECK(asymptote(rr, 0.1, 7, AsymptoteMode::smooth, &two) == doctest::Approx(asymptote(rr, 0.1, 7, AsymptoteMode::indicator)));
  rr.J = -0.2;
  for (int n = 1; n <= 20; ++n)
    CHECK(asymptote(rr, 0.05, 2 * n, AsymptoteMode::indicator) <=
          asymptote(rr, 0.05, n, AsymptoteMode::indicator) * std::exp(n * rr.J));
  rr.omega = 0.0;
  CHECK_THROWS_AS(asymptote(rr, 0.0, 1, AsymptoteMode::indicator), ValidationError);
  CHECK_THROWS_AS(asymptote(RateReport{.omega = 1.0}, 0.0, 1, AsymptoteMode::smooth), ValidationError);
}

TEST_CASE("delta constraint") {
  const auto boundary = delta_constraint_check(0.5, std::exp(-1.0), 1, 30);
  CHECK(boundary.delta_ok);
  CHECK(boundary.ceiling == doctest::Approx(0.5));
  CHECK_FALSE(delta_constraint_check(0.5, 0.9, 1, 30).delta_ok);
  const auto ok = delta_constraint_check(0.1, 0.25, 1, 200);
  CHECK(ok.delta_ok);
  CHECK(ok.sequence_ok);
  CHECK(ok.worst_value <= 1.0);
  // the ceiling alone does not imply the sequence bound
  const auto edge = delta_constraint_check(0.5, std::exp(-1.0), 1, 30);
  CHECK_FALSE(edge.sequence_ok);
  CHECK_THROWS_AS(delta_constraint_check(0.1, 1.0, 1, 5), ValidationError);
}

TEST_CASE("ldp table") {
  const GoldenRoof gr;
  const PressureCurve curve(gr.f, gr.tau, gr.g);
  LdpRunConfig cfg;
  cfg.a = 0.4;
  cfg.n_min = 5;
  cfg.n_max = 4;
  CHECK(build_ldp_table(curve, cfg).rows.empty());

  cfg.n_min = 6;
  cfg.n_max = 12;
  cfg.n_step = 3;
  cfg.quad.u_max = 50.0;
  cfg.quad.step = 0.02;
  cfg.quad.tol = 1e-3;
  cfg.enumeration.guard = 1000;
  const auto table = build_ldp_table(curve, cfg);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.guard_tripped);
  for (const auto& row : table.rows) {
    CHECK(row.delta_n == doctest::Approx(std::exp(-0.05 * row.n)));
    CHECK(std::isfinite(row.rho_smooth_spectral));
    CHECK(row.T_n == doctest::Approx(row.n * table.rates.mean_tau));
    if (row.n <= 9) {
      CHECK_FALSE(row.guard_tripped);
      CHECK(row.rho_exact >= 0.0);
      CHECK(row.rho_exact <= 1.0);
      CHECK(row.ratio_exact == doctest::Approx(row.rho_exact / row.asymptote_indicator));
    } else {
      CHECK(row.guard_tripped);
      CHECK(std::isnan(row.rho_exact));
    }
  }
}
