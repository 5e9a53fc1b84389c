#include "thermo/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "thermo/errors.hpp"

namespace thermo {

TransferOperator::TransferOperator(const Potential& phi) : phi_(phi), words_(phi.table()) {
  const auto& shift = phi_.shift();
  const int m = words_->depth();
  real_ = phi_.is_real();
  row_start_.reserve(words_->size() + 1);
  row_start_.push_back(0);
  Word from(static_cast<std::size_t>(m));
  for (const auto& to : words_->words()) {
    for (int j : shift.preimage_symbols(to.front())) {
      from[0] = j;
      std::copy(to.begin(), to.begin() + (m - 1), from.begin() + 1);
      const auto col = words_->index_of(from);
      const cplx w = std::exp(phi_.at(static_cast<std::size_t>(col)));
      cols_.push_back(static_cast<std::size_t>(col));
      weights_.push_back(w);
      if (real_) real_weights_.push_back(w.real());
    }
    row_start_.push_back(cols_.size());
  }
}

TransferOperator::TransferOperator(Potential phi, const TransferOperator& pattern, std::vector<cplx> weights)
    : phi_(std::move(phi)),
      words_(pattern.words_),
      row_start_(pattern.row_start_),
      cols_(pattern.cols_),
      weights_(std::move(weights)),
      real_(phi_.is_real()) {
  if (real_)
    for (const auto& w : weights_) real_weights_.push_back(w.real());
}

TransferOperator TransferOperator::tilted(const Potential& psi, cplx z) const {
  if (psi.depth() > words_->depth()) throw ValidationError("tilt observable is deeper than the operator");
  const Potential lifted = psi.lift(words_->depth());
  std::vector<cplx> weights(weights_.size());
  std::vector<cplx> phase(lifted.values().size());
  for (std::size_t i = 0; i < phase.size(); ++i) phase[i] = std::exp(z * lifted.at(i));
  for (std::size_t e = 0; e < weights.size(); ++e) weights[e] = weights_[e] * phase[cols_[e]];
  std::vector<cplx> values(phi_.values());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += z * lifted.at(i);
  return TransferOperator(Potential(phi_.shift(), words_, std::move(values)), *this, std::move(weights));
}

cplx TransferOperator::entry(std::size_t to, std::size_t from) const {
  for (std::size_t e = row_start_[to]; e < row_start_[to + 1]; ++e)
    if (cols_[e] == from) return weights_[e];
  return {0.0, 0.0};
}

void TransferOperator::apply(std::span<const cplx> v, std::span<cplx> out) const {
  if (v.size() != dim() || out.size() != dim()) throw ValidationError("operator dimension mismatch");
  for (std::size_t r = 0; r < dim(); ++r) {
    cplx acc{0.0, 0.0};
    for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e) acc += weights_[e] * v[cols_[e]];
    out[r] = acc;
  }
}

std::vector<cplx> TransferOperator::apply(std::span<const cplx> v) const {
  std::vector<cplx> out(dim());
  apply(v, out);
  return out;
}

void TransferOperator::apply_real(std::span<const double> v, std::span<double> out) const {
  if (!real_) throw ValidationError("apply_real on a complex operator");
  if (v.size() != dim() || out.size() != dim()) throw ValidationError("operator dimension mismatch");
  for (std::size_t r = 0; r < dim(); ++r) {
    double acc = 0.0;
    for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e) acc += real_weights_[e] * v[cols_[e]];
    out[r] = acc;
  }
}

void TransferOperator::apply_transpose_real(std::span<const double> nu, std::span<double> out) const {
  if (!real_) throw ValidationError("apply_transpose_real on a complex operator");
  if (nu.size() != dim() || out.size() != dim()) throw ValidationError("operator dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < dim(); ++r)
    for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e) out[cols_[e]] += real_weights_[e] * nu[r];
}

TransferOperator build_operator(const Potential& phi) { return TransferOperator(phi); }

std::vector<cplx> apply_iterated(const TransferOperator& op, std::span<const cplx> h, int iters) {
  if (iters < 0) throw ValidationError("iteration count must be >= 0");
  std::vector<cplx> cur(h.begin(), h.end()), next(h.size());
  for (int i = 0; i < iters; ++i) {
    op.apply(cur, next);
    cur.swap(next);
  }
  return cur;
}

namespace {

// Collatz-Wielandt bracket of the Perron root from one positive vector.
std::pair<double, double> cw_bounds(std::span<const double> image, std::span<const double> v) {
  double lo = image[0] / v[0], hi = lo;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double r = image[i] / v[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

}  // namespace

SpectralData leading_eigendata(const TransferOperator& op, const EigenOptions& opts) {
  if (!op.is_real()) throw ValidationError("leading_eigendata needs a real operator");
  for (auto w : op.potential().values())
    if (!std::isfinite(std::exp(w.real()))) throw NumericalError("operator weight overflows");
  const std::size_t n = op.dim();
  int max_iters = opts.max_iters;
  if (max_iters <= 0) {
    const double d = static_cast<double>(n);
    max_iters = std::max(10000, static_cast<int>(100.0 * d * std::log(std::max(d, 2.0))));
  }

  // Past this many plain steps, iterate L + cI with c near the Perron root instead. Same
  // eigenvectors, but a subdominant eigenvalue close to -lambda no longer stalls convergence.
  constexpr int plain_steps = 500;
  std::vector<double> h(n, 1.0), nu(n, 1.0 / static_cast<double>(n)), Lh(n), Lnu(n);
  int it = 0;
  bool converged = false;
  while (it < max_iters) {
    ++it;
    op.apply_real(h, Lh);
    op.apply_transpose_real(nu, Lnu);
    const auto [lo_h, hi_h] = cw_bounds(Lh, h);
    const auto [lo_n, hi_n] = cw_bounds(Lnu, nu);
    if (hi_h - lo_h <= opts.tol * hi_h && hi_n - lo_n <= opts.tol * hi_n) converged = true;
    const double shift = (it > plain_steps && !converged) ? 0.5 * (lo_h + hi_h) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Lh[i] += shift * h[i];
      Lnu[i] += shift * nu[i];
    }
    const double hmax = *std::max_element(Lh.begin(), Lh.end());
    const double nsum = std::accumulate(Lnu.begin(), Lnu.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = Lh[i] / hmax;
      nu[i] = Lnu[i] / nsum;
    }
    if (converged) break;
  }
  if (!converged)
    throw NoConvergence("NoConvergence: power iteration did not reach tol " + std::to_string(opts.tol) + " in " +
                        std::to_string(max_iters) + " iterations");

  SpectralData sd;
  op.apply_real(h, Lh);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += nu[i] * Lh[i];
    den += nu[i] * h[i];
  }
  sd.lambda = num / den;
  sd.pressure = std::log(sd.lambda);
  sd.iterations = it;
  for (std::size_t i = 0; i < n; ++i) h[i] /= den;  // sum(nu) == 1 already
  sd.h = h;
  sd.nu_hat = nu;

  op.apply_real(sd.h, Lh);
  op.apply_transpose_real(sd.nu_hat, Lnu);
  double rh = 0.0, rn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rh = std::max(rh, std::abs(Lh[i] - sd.lambda * sd.h[i]));
    rn += std::abs(Lnu[i] - sd.lambda * sd.nu_hat[i]);
  }
  sd.residual = std::max(rh, rn);
  return sd;
}

Potential normalize_potential(const Potential& f, const SpectralData& sd, double tol) {
  const int m = f.depth();
  if (sd.h.size() != f.words().size()) throw ValidationError("spectral data does not match potential depth");
  if (!f.is_real()) throw ValidationError("normalize_potential needs a real potential");
  for (double v : sd.h)
    if (!(v > 0.0)) throw NormalizationFailed("NormalizationFailed: eigenfunction is not strictly positive");
  const double log_lambda = std::log(sd.lambda);
  const auto& table = f.words();
  Potential f0 = Potential::from_function(f.shift(), m + 1, [&](std::span<const int> w) {
    const auto head = static_cast<std::size_t>(table.index_of(w));
    const auto tail = static_cast<std::size_t>(table.index_of(w.subspan(1)));
    return cplx{f.at(head).real() + std::log(sd.h[head]) - std::log(sd.h[tail]) - log_lambda, 0.0};
  });

  const TransferOperator op(f0);
  std::vector<double> one(op.dim(), 1.0), image(op.dim());
  op.apply_real(one, image);
  double defect = 0.0;
  for (double v : image) defect = std::max(defect, std::abs(v - 1.0));
  if (defect > 10.0 * tol)
    throw NormalizationFailed("NormalizationFailed: ||L 1 - 1||_inf = " + std::to_string(defect));
  return f0;
}

GibbsMeasure::GibbsMeasure(const Potential& phi, const SpectralData& sd)
    : shift_(phi.shift()), blocks_(phi.table()), sd_(sd) {
  if (!phi.is_real()) throw ValidationError("Gibbs measure needs a real potential");
  const std::size_t n = blocks_->size();
  if (sd.h.size() != n || sd.nu_hat.size() != n) throw ValidationError("spectral data does not match potential depth");
  const int m = blocks_->depth();

  initial_.resize(n);
  for (std::size_t i = 0; i < n; ++i) initial_[i] = sd.h[i] * sd.nu_hat[i];
  const double total = std::accumulate(initial_.begin(), initial_.end(), 0.0);
  for (auto& v : initial_) v /= total;

  // P(w -> w') = e^{phi(w)} nu(w') / (lambda nu(w)), w' = (w[1..m-1], s)
  steps_.resize(n);
  Word next(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const Word& w = blocks_->word(i);
    const double weight = std::exp(phi.at(i).real()) / (sd.lambda * sd.nu_hat[i]);
    double row = 0.0;
    for (int s : shift_.successors(w.back())) {
      std::copy(w.begin() + 1, w.end(), next.begin());
      next.back() = s;
      const auto j = static_cast<std::size_t>(blocks_->index_of(next));
      const double p = weight * sd.nu_hat[j];
      steps_[i].push_back({s, j, p});
      row += p;
    }
    for (auto& st : steps_[i]) st.prob /= row;
  }

  std::vector<double> pushed(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& st : steps_[i]) pushed[st.next] += initial_[i] * st.prob;
  for (std::size_t i = 0; i < n; ++i) stationarity_defect_ += std::abs(pushed[i] - initial_[i]);
  if (stationarity_defect_ > 1e-9)
    throw NumericalError("Gibbs block chain is not stationary: defect " + std::to_string(stationarity_defect_));
}

std::vector<std::vector<double>> GibbsMeasure::block_transition() const {
  const std::size_t n = blocks_->size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& st : steps_[i]) out[i][st.next] = st.prob;
  return out;
}

std::vector<double> GibbsMeasure::cylinder_masses(const WordTable& table) const {
  std::vector<double> out;
  out.reserve(table.size());
  for (const auto& w : table.words()) out.push_back(gibbs_cylinder_mass(*this, w));
  return out;
}

cplx GibbsMeasure::expectation(const Potential& psi) const {
  if (!(psi.shift() == shift_)) throw SpecMismatch("SpecMismatch: observable lives on a different subshift");
  const int depth = std::max(block_length(), psi.depth());
  const Potential lifted = psi.lift(depth);
  const auto masses = cylinder_masses(lifted.words());
  cplx total{0.0, 0.0};
  for (std::size_t i = 0; i < masses.size(); ++i) total += masses[i] * lifted.at(i);
  return total;
}

double gibbs_cylinder_mass(const GibbsMeasure& mu, std::span<const int> w) {
  const auto& shift = mu.shift();
  if (w.empty()) return 1.0;
  if (!shift.admissible(w)) return 0.0;
  const int m = mu.block_length();
  if (static_cast<int>(w.size()) < m) {
    double total = 0.0;
    Word ext(w.begin(), w.end());
    ext.push_back(0);
    for (int s : shift.successors(w.back())) {
      ext.back() = s;
      total += gibbs_cylinder_mass(mu, ext);
    }
    return total;
  }
  auto block = static_cast<std::size_t>(mu.blocks().index_of(w));
  double mass = mu.block_initial()[block];
  for (std::size_t p = static_cast<std::size_t>(m); p < w.size(); ++p) {
    const auto& steps = mu.steps(block);
    const auto it = std::find_if(steps.begin(), steps.end(), [&](const auto& st) { return st.symbol == w[p]; });
    mass *= it->prob;
    block = it->next;
  }
  return mass;
}

double conjugation_identity_check(const Potential& f, const Potential& tau, double a, double b, double P,
                                  std::span<const cplx> h, int iters) {
  if (iters < 1) throw ValidationError("conjugation check needs at least one iterate");
  const int base = std::max(f.depth(), tau.depth());
  const WordTable base_words(f.shift(), base);
  if (h.size() != base_words.size()) throw ValidationError("h must be indexed by the common depth of f and tau");

  // e^{P tau^m} depends on iters + depth(tau) - 1 symbols
  const int depth = std::max(base, iters + tau.depth() - 1);
  const Potential zero = Potential::constant(f.shift(), 0.0);
  const Potential left_phi = combine(f, tau, zero, cplx{a, b}, 0.0).lift(depth);
  const Potential right_phi = combine(f, tau, zero, cplx{P + a, b}, 0.0).lift(depth);
  const WordTable& words = left_phi.words();

  std::vector<cplx> h_lifted(words.size()), weighted(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    h_lifted[i] = h[static_cast<std::size_t>(base_words.index_of(words.word(i)))];
    weighted[i] = std::exp(P * birkhoff_sum(tau, words.word(i), iters)) * h_lifted[i];
  }
  const auto left = apply_iterated(TransferOperator(left_phi), h_lifted, iters);
  const auto right = apply_iterated(TransferOperator(right_phi), weighted, iters);
  double worst = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) worst = std::max(worst, std::abs(left[i] - right[i]));
  return worst;
}

}  // namespace thermo
