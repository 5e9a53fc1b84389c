#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "thermo/errors.hpp"
#include "thermo/transfer.hpp"

using namespace thermo;

namespace {

const Subshift kFull2 = Subshift::full(2);
const Subshift kGolden({{1, 1}, {1, 0}});

std::vector<Subshift> small_shifts() {
  return {kFull2, kGolden, Subshift::full(3), Subshift({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}),
          Subshift({{0, 1, 1}, {1, 0, 1}, {1, 1, 1}})};
}

// (L^n v)(x) = sum over admissible y of length n preceding x of e^{phi^n(yx)} v(yx), word by word.
std::vector<cplx> brute_force(const Potential& phi, const std::vector<cplx>& v, int n) {
  const auto& shift = phi.shift();
  const auto& table = phi.words();
  std::vector<cplx> out(table.size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Word& x = table.word(i);
    if (n == 0) {
      out[i] = v[i];
      continue;
    }
    for (const Word& y : shift.admissible_words(n)) {
      Word yx = y;
      yx.insert(yx.end(), x.begin(), x.end());
      if (!shift.admissible(yx)) continue;
      out[i] += std::exp(birkhoff_sum(phi, yx, n)) * v[static_cast<std::size_t>(table.index_of(yx))];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("operator matrices") {
  const TransferOperator full(Potential::constant(kFull2, 0.0));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(full.entry(i, j) == cplx{1.0, 0.0});

  const TransferOperator golden(Potential::constant(kGolden, 0.0));
  CHECK(golden.entry(0, 0) == cplx{1.0, 0.0});
  CHECK(golden.entry(0, 1) == cplx{1.0, 0.0});
  CHECK(golden.entry(1, 0) == cplx{1.0, 0.0});
  CHECK(golden.entry(1, 1) == cplx{0.0, 0.0});

  const double p = 0.3, q = -1.2;
  const TransferOperator scaled(Potential::from_real(kFull2, 1, {p, q}));
  CHECK(std::abs(scaled.entry(1, 0) - std::exp(p)) < 1e-15);
  CHECK(std::abs(scaled.entry(0, 1) - std::exp(q)) < 1e-15);
  CHECK(leading_eigendata(scaled).lambda == doctest::Approx(std::exp(p) + std::exp(q)).epsilon(1e-12));
}

TEST_CASE("iterates") {
  const TransferOperator op(Potential::constant(kFull2, 0.0));
  const std::vector<cplx> h{cplx{1.0, 2.0}, -0.5};
  CHECK(apply_iterated(op, h, 0) == h);
  const std::vector<cplx> one(2, 1.0);
  for (int n = 0; n <= 10; ++n)
    for (const auto& v : apply_iterated(op, one, n)) CHECK(v.real() == std::ldexp(1.0, n));
}

TEST_CASE("iterates match brute-force preimage sums") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const auto& shift : small_shifts())
    for (int depth = 1; depth <= 2; ++depth) {
      const auto phi = Potential::from_function(shift, depth, [&](std::span<const int>) { return cplx{U(rng), U(rng)}; });
      const TransferOperator op(phi);
      std::vector<cplx> v(op.dim());
      for (auto& x : v) x = cplx{U(rng), U(rng)};
      for (int n = 0; n <= 6; ++n) {
        const auto fast = apply_iterated(op, v, n);
        const auto slow = brute_force(phi, v, n);
        double scale = 0.0, err = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i) {
          scale = std::max(scale, std::abs(slow[i]));
          err = std::max(err, std::abs(fast[i] - slow[i]));
        }
        CHECK(err <= 1e-12 * std::max(1.0, scale));
      }
    }
}

TEST_CASE("tilted operator matches a freshly built one") {
  const auto phi = Potential::from_real(kGolden, 2, {0.1, -0.4, 0.25});
  const auto psi = Potential::from_real(kGolden, 1, {0.5, -1.0});
  const cplx z{0.3, 2.0};
  const TransferOperator a = TransferOperator(phi).tilted(psi, z);
  const TransferOperator b(phi + psi * z);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) CHECK(std::abs(a.entry(i, j) - b.entry(i, j)) < 1e-14);
}

TEST_CASE("leading eigendata") {
  for (int k = 2; k <= 4; ++k) {
    const auto sd = leading_eigendata(TransferOperator(Potential::constant(Subshift::full(k), 0.0)));
    CHECK(sd.lambda == doctest::Approx(k).epsilon(1e-13));
    CHECK(std::abs(sd.pressure - std::log(k)) < 1e-10);
    for (double h : sd.h) CHECK(h == doctest::Approx(1.0).epsilon(1e-12));
    for (double nu : sd.nu_hat) CHECK(nu == doctest::Approx(1.0 / k).epsilon(1e-12));
  }
  const auto sd = leading_eigendata(TransferOperator(Potential::from_real(kFull2, 1, {0.0, std::log(3.0)})));
  CHECK(sd.lambda == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(sd.h[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd.h[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd.nu_hat[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sd.nu_hat[1] == doctest::Approx(0.75).epsilon(1e-12));

  const auto gm = leading_eigendata(TransferOperator(Potential::constant(kGolden, 0.0)));
  CHECK(std::abs(gm.pressure - std::log(std::numbers::phi)) < 1e-10);

  // normalizations and residuals on a generic depth-2 potential
  const auto phi = Potential::from_real(Subshift::full(3), 2, {0.1, -0.3, 0.7, 1.2, 0.0, -0.8, 0.4, 0.4, -1.5});
  const TransferOperator op(phi);
  const auto g = leading_eigendata(op);
  double nsum = 0.0, pair = 0.0;
  for (std::size_t i = 0; i < g.h.size(); ++i) {
    CHECK(g.h[i] > 0.0);
    CHECK(g.nu_hat[i] >= 0.0);
    nsum += g.nu_hat[i];
    pair += g.h[i] * g.nu_hat[i];
  }
  CHECK(nsum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pair == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.residual < 1e-10);

  // duality: <L u, nu> = lambda <u, nu>
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> u(op.dim()), Lu(op.dim());
  for (auto& x : u) x = U(rng);
  op.apply_real(u, Lu);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lhs += Lu[i] * g.nu_hat[i];
    rhs += g.lambda * u[i] * g.nu_hat[i];
  }
  CHECK(std::abs(lhs - rhs) < 1e-10);

  EigenOptions tight;
  tight.max_iters = 1;
  CHECK_THROWS_AS(leading_eigendata(op, tight), NoConvergence);
  CHECK_THROWS_AS(leading_eigendata(TransferOperator(phi * cplx{1.0, 1.0})), ValidationError);
}

TEST_CASE("near-periodic operators still converge") {
  // f + 30 g on the golden-mean shift: second eigenvalue is close to -lambda
  const auto phi = Potential::from_real(kGolden, 1, {0.0, 30.0});
  const auto sd = leading_eigendata(TransferOperator(phi));
  const double B = std::exp(30.0);
  CHECK(sd.lambda == doctest::Approx(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * B))).epsilon(1e-12));
}

TEST_CASE("normalized potentials") {
  for (int k = 2; k <= 3; ++k) {
    const auto f = Potential::constant(Subshift::full(k), 0.0);
    const auto f0 = normalize_potential(f, leading_eigendata(TransferOperator(f)));
    CHECK(f0.depth() == 2);
    for (const auto& v : f0.values()) CHECK(std::abs(v.real() + std::log(k)) < 1e-12);
  }
  const auto f = Potential::from_real(kFull2, 1, {0.0, std::log(3.0)});
  const auto f0 = normalize_potential(f, leading_eigendata(TransferOperator(f)));
  for (std::size_t i = 0; i < f0.values().size(); ++i) {
    const double expect = f0.words().word(i)[0] == 0 ? -std::log(4.0) : std::log(0.75);
    CHECK(std::abs(f0.at(i).real() - expect) < 1e-12);
  }

  for (const auto& shift : small_shifts()) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const auto g = Potential::from_function(shift, 2, [&](std::span<const int>) { return cplx{U(rng), 0.0}; });
    const auto g0 = normalize_potential(g, leading_eigendata(TransferOperator(g)));
    const TransferOperator M(g0);
    std::vector<double> one(M.dim(), 1.0), image(M.dim());
    M.apply_real(one, image);
    for (double v : image) CHECK(std::abs(v - 1.0) < 1e-10);
    CHECK(std::abs(leading_eigendata(M).pressure) < 1e-10);
  }
}

TEST_CASE("gibbs cylinder masses") {
  const auto zero = Potential::constant(kFull2, 0.0);
  const GibbsMeasure bern(zero, leading_eigendata(TransferOperator(zero)));
  for (int n = 1; n <= 6; ++n)
    for (const auto& w : kFull2.admissible_words(n)) CHECK(gibbs_cylinder_mass(bern, w) == doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-13));

  const auto f = Potential::from_real(kFull2, 1, {0.0, std::log(3.0)});
  const GibbsMeasure mu(f, leading_eigendata(TransferOperator(f)));
  CHECK(gibbs_cylinder_mass(mu, Word{1}) == doctest::Approx(0.75).epsilon(1e-12));

  for (const auto& shift : small_shifts()) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const auto phi = Potential::from_function(shift, 2, [&](std::span<const int>) { return cplx{U(rng), 0.0}; });
    const GibbsMeasure g(phi, leading_eigendata(TransferOperator(phi)));
    CHECK(g.stationarity_defect() < 1e-9);
    for (const auto& row : g.block_transition()) {
      double s = 0.0;
      for (double p : row) s += p;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (int n = 1; n <= 5; ++n) {
      double total = 0.0;
      for (const auto& w : shift.admissible_words(n)) {
        const double m = gibbs_cylinder_mass(g, w);
        total += m;
        double ext = 0.0, pre = 0.0;
        for (int s : shift.successors(w.back())) {
          Word x = w;
          x.push_back(s);
          ext += gibbs_cylinder_mass(g, x);
        }
        for (int j : shift.preimage_symbols(w.front())) {
          Word x{j};
          x.insert(x.end(), w.begin(), w.end());
          pre += gibbs_cylinder_mass(g, x);
        }
        CHECK(std::abs(ext - m) < 1e-12);  // Kolmogorov consistency
        CHECK(std::abs(pre - m) < 1e-12);  // shift invariance
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(gibbs_cylinder_mass(g, Word(3, 0)) >= 0.0);
  }
  CHECK(gibbs_cylinder_mass(GibbsMeasure(Potential::constant(kGolden, 0.0),
                                         leading_eigendata(TransferOperator(Potential::constant(kGolden, 0.0)))),
                            Word{1, 1}) == 0.0);
}

TEST_CASE("conjugation identity") {
  const auto f = Potential::from_real(kFull2, 2, {0.1, -0.2, 0.4, 0.0});
  const auto tau = Potential::from_real(kFull2, 1, {1.0, 1.7}, PotentialKind::roof);
  std::vector<cplx> h{1.0, cplx{0.5, -0.5}, 2.0, -1.0};
  CHECK(conjugation_identity_check(f, tau, 0.3, 5.0, 0.0, h, 4) == 0.0);

  const auto one = Potential::constant(kFull2, 1.0, PotentialKind::roof);
  CHECK(conjugation_identity_check(f, one, -0.4, 12.0, 0.9, h, 5) <= 1e-10);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial)
    CHECK(conjugation_identity_check(f, tau, U(rng), 20.0 * U(rng), U(rng), h, 1 + trial) <= 1e-10);
}
