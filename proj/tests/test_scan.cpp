#include <cmath>
#include <numbers>

#include "doctest.h"
#include "thermo/errors.hpp"
#include "thermo/scan.hpp"

using namespace thermo;

namespace {

const Subshift kFull2 = Subshift::full(2);

Potential normalized(const Potential& f) { return normalize_potential(f, leading_eigendata(TransferOperator(f))); }

ScanSystem golden_roof(double a = 0.0) {
  const auto f0 = normalized(Potential::constant(kFull2, 0.0));
  const auto tau = Potential::from_real(kFull2, 1, {1.0, std::numbers::phi}, PotentialKind::roof);
  const auto g = Potential::from_real(kFull2, 1, {0.0, 1.0});
  return ScanSystem(f0, tau, g, a, 0.0);
}

}  // namespace

TEST_CASE("unit seed is preserved at zero frequency") {
  const auto f = Potential::from_real(kFull2, 2, {0.1, -0.4, 0.7, 0.2});
  const auto f0 = normalized(f);
  const ScanSystem sys(f0, Potential::constant(kFull2, 1.3, PotentialKind::roof), Potential::from_real(kFull2, 1, {0.3, -0.1}),
                       0.0, 0.0);
  CHECK(std::abs(sys.pressure()) < 1e-12);
  const auto h = sys.seed(SeedKind::constant_one, 0);
  const auto fit = decay_sequence(sys, 0.0, 0.0, 40, h, 0.5);
  for (int m = 0; m <= 40; ++m) CHECK(std::abs(fit.y(m) - 1.0) < 1e-12);
  CHECK(fit.rho_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conjugate frequencies give identical norms") {
  const auto sys = golden_roof(0.2);
  for (auto kind : {SeedKind::constant_one, SeedKind::cylinder_indicator}) {
    const auto h = sys.seed(kind, 7);
    for (double b : {3.0, 17.5}) {
      for (double w : {0.0, 1.2}) {
        const auto x = decay_sequence(sys, b, w, 30, h, 0.5);
        const auto y = decay_sequence(sys, -b, -w, 30, h, 0.5);
        for (int m = 0; m <= 30; ++m) CHECK(std::abs(x.log_y[m] - y.log_y[m]) < 1e-12);
      }
    }
  }
}

TEST_CASE("first iterate norm matches the bundled norm") {
  const auto sys = golden_roof();
  const auto h = sys.seed(SeedKind::random_unit, 11);
  const auto fit = decay_sequence(sys, 5.0, 0.0, 2, h, 0.5);
  const TransferOperator op(combine(sys.f0(), sys.tau(), sys.g(), cplx{0.0, 5.0}, cplx{0.0, 0.0}).lift(sys.depth()));
  CHECK(fit.y(0) == doctest::Approx(norm_beta_b(op.words(), h, ThetaMetric(0.5), 5.0).combined).epsilon(1e-13));
  // random seeds have unit modulus and are reproducible
  for (const auto& v : h) CHECK(std::abs(v) == doctest::Approx(1.0));
  CHECK(sys.seed(SeedKind::random_unit, 11) == h);
  CHECK(sys.seed(SeedKind::random_unit, 12) != h);
}

TEST_CASE("integer roof does not decay on the lattice frequency") {
  const auto f0 = normalized(Potential::constant(kFull2, 0.0));
  const ScanSystem sys(f0, Potential::constant(kFull2, 1.0, PotentialKind::roof), Potential::from_real(kFull2, 1, {0.0, 1.0}),
                       0.0, 0.0);
  const auto fit = decay_sequence(sys, 2.0 * std::numbers::pi, 0.0, 60, sys.seed(SeedKind::constant_one, 0), 0.5);
  CHECK(fit.rho_hat == doctest::Approx(1.0).epsilon(1e-9));

  ScanConfig cfg;
  cfg.b_grid = {2.0 * std::numbers::pi};
  cfg.kappa_grid = {0.0};
  cfg.m_max = 40;
  const auto sweep = two_parameter_sweep(sys, cfg);
  const auto env = envelope_report(sweep.cells, cfg.epsilon);
  CHECK(env.no_decay_flag);
  CHECK_FALSE(env.e_fit.has_value());
}

TEST_CASE("golden roof decays at moderate frequency") {
  const auto sys = golden_roof();
  const auto fit = decay_sequence(sys, 40.0, 0.0, 60, sys.seed(SeedKind::constant_one, 0), 0.5);
  CHECK(fit.rho_hat < 1.0 - 1e-3);
  CHECK(fit.max_step_growth > 0.0);
}

TEST_CASE("two-parameter sweep") {
  const auto sys = golden_roof();
  ScanConfig cfg;
  cfg.b_grid = {-20.0, 10.0, 20.0};
  cfg.kappa_grid = {0.0, 0.25};
  cfg.B = 0.5;
  cfg.m_max = 24;
  const auto sweep = two_parameter_sweep(sys, cfg);
  CHECK(sweep.kappa_values == std::vector<double>{-0.5, 0.0, 0.25, 0.5});
  REQUIRE(sweep.cells.size() == 12);
  for (std::size_t ib = 0; ib < sweep.b_values.size(); ++ib)
    for (std::size_t ik = 0; ik < sweep.kappa_values.size(); ++ik)
      CHECK(sweep.at(ib, ik).w == doctest::Approx(sweep.kappa_values[ik] * sweep.b_values[ib]));
  // (b, kappa) and (-b, kappa) share w / b and are conjugate
  CHECK(sweep.at(0, 1).rho_hat == doctest::Approx(sweep.at(2, 1).rho_hat).epsilon(1e-12));
  CHECK(sweep.at(0, 3).rho_hat == doctest::Approx(sweep.at(2, 3).rho_hat).epsilon(1e-12));

  cfg.threads = 3;
  const auto again = two_parameter_sweep(sys, cfg);
  for (std::size_t i = 0; i < sweep.cells.size(); ++i) CHECK(again.cells[i].log_y == sweep.cells[i].log_y);

  const auto env = envelope_report(sweep.cells, cfg.epsilon);
  CHECK(env.e_fit.has_value());
  CHECK(env.envelope.size() == 2);
  CHECK_FALSE(env.no_decay_flag);
}

TEST_CASE("g identically zero makes kappa irrelevant") {
  const auto f0 = normalized(Potential::from_real(kFull2, 1, {0.3, -0.2}));
  const ScanSystem sys(f0, Potential::from_real(kFull2, 1, {1.0, std::numbers::sqrt2}, PotentialKind::roof),
                       Potential::constant(kFull2, 0.0), 0.0, 0.0);
  ScanConfig cfg;
  cfg.b_grid = {12.0};
  cfg.kappa_grid = {0.0};
  cfg.m_max = 20;
  const auto sweep = two_parameter_sweep(sys, cfg);
  for (std::size_t ik = 1; ik < sweep.kappa_values.size(); ++ik)
    CHECK(sweep.at(0, ik).log_y == sweep.at(0, 0).log_y);
}

TEST_CASE("scan validation") {
  ScanConfig cfg;
  cfg.b_grid = {10.0};
  cfg.kappa_grid = {0.0};
  CHECK_NOTHROW(validate_scan_config(cfg));
  auto bad = cfg;
  bad.b_grid = {0.5};
  CHECK_THROWS_AS(validate_scan_config(bad), BadFrequency);
  bad = cfg;
  bad.kappa_grid = {0.7};
  CHECK_THROWS_AS(validate_scan_config(bad), ValidationError);
  bad = cfg;
  bad.b_grid.clear();
  CHECK_THROWS_AS(validate_scan_config(bad), ValidationError);
  bad = cfg;
  bad.m_max = 1;
  CHECK_THROWS_AS(validate_scan_config(bad), ValidationError);
  bad = cfg;
  bad.theta = 1.0;
  CHECK_THROWS_AS(validate_scan_config(bad), ValidationError);

  const auto sys = golden_roof();
  const std::vector<cplx> wrong(5, 1.0);
  CHECK_THROWS_AS(decay_sequence(sys, 10.0, 0.0, 10, wrong, 0.5), ValidationError);
}
