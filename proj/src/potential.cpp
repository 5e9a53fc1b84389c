#include "thermo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermo/errors.hpp"

namespace thermo {

Potential::Potential(Subshift shift, int depth, std::vector<cplx> values, PotentialKind kind)
    : Potential(shift, std::make_shared<const WordTable>(shift, depth), std::move(values), kind) {}

Potential::Potential(Subshift shift, std::shared_ptr<const WordTable> table, std::vector<cplx> values,
                     PotentialKind kind)
    : shift_(std::move(shift)), table_(std::move(table)), values_(std::move(values)), kind_(kind) {
  if (values_.size() != table_->size())
    throw ValidationError("potential table has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(table_->size()) + " admissible words of length " + std::to_string(table_->depth()));
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ValidationError("potential value is not finite");
  if (kind_ == PotentialKind::roof) {
    if (!is_real()) throw ValidationError("roof positivity: roof function must be real-valued");
    if (min_real() <= 0.0) throw ValidationError("roof positivity: roof function must be strictly positive");
  }
}

Potential Potential::constant(const Subshift& shift, cplx c, PotentialKind kind) {
  return Potential(shift, 1, std::vector<cplx>(static_cast<std::size_t>(shift.k()), c), kind);
}

Potential Potential::from_real(const Subshift& shift, int depth, const std::vector<double>& values,
                               PotentialKind kind) {
  return Potential(shift, depth, std::vector<cplx>(values.begin(), values.end()), kind);
}

Potential Potential::from_function(const Subshift& shift, int depth,
                                   const std::function<cplx(std::span<const int>)>& fn, PotentialKind kind) {
  WordTable table(shift, depth);
  std::vector<cplx> values;
  values.reserve(table.size());
  for (const auto& w : table.words()) values.push_back(fn(w));
  return Potential(shift, depth, std::move(values), kind);
}

cplx Potential::operator()(std::span<const int> w) const {
  const auto idx = table_->index_of(w);
  if (idx < 0) {
    if (static_cast<int>(w.size()) < depth())
      throw WordTooShort("word of length " + std::to_string(w.size()) + " is shorter than potential depth " +
                         std::to_string(depth()));
    throw ValidationError("word prefix is not admissible");
  }
  return values_[static_cast<std::size_t>(idx)];
}

bool Potential::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](const cplx& v) { return v.imag() == 0.0; });
}

std::vector<double> Potential::real_values() const {
  if (!is_real()) throw ValidationError("potential is not real-valued");
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(v.real());
  return out;
}

double Potential::min_real() const {
  double m = values_.front().real();
  for (const auto& v : values_) m = std::min(m, v.real());
  return m;
}

double Potential::max_real() const {
  double m = values_.front().real();
  for (const auto& v : values_) m = std::max(m, v.real());
  return m;
}

Potential Potential::lift(int depth) const {
  if (depth < this->depth()) throw ValidationError("lift cannot lower depth; use depth_truncate");
  if (depth == this->depth()) return *this;
  WordTable target(shift_, depth);
  std::vector<cplx> values;
  values.reserve(target.size());
  for (const auto& w : target.words()) values.push_back(values_[static_cast<std::size_t>(table_->index_of(w))]);
  return Potential(shift_, depth, std::move(values), kind_);
}

Potential Potential::with_kind(PotentialKind kind) const { return Potential(shift_, table_, values_, kind); }

namespace {

Potential pointwise(const Potential& x, const Potential& y, const std::function<cplx(cplx, cplx)>& op) {
  if (!(x.shift() == y.shift())) throw SpecMismatch("SpecMismatch: potentials live on different subshifts");
  const int depth = std::max(x.depth(), y.depth());
  const Potential lx = x.lift(depth);
  const Potential ly = y.lift(depth);
  std::vector<cplx> values(lx.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = op(lx.at(i), ly.at(i));
  return Potential(x.shift(), lx.table(), std::move(values));
}

}  // namespace

Potential Potential::operator+(const Potential& other) const {
  return pointwise(*this, other, [](cplx a, cplx b) { return a + b; });
}

Potential Potential::operator-(const Potential& other) const {
  return pointwise(*this, other, [](cplx a, cplx b) { return a - b; });
}

Potential Potential::operator*(cplx c) const {
  std::vector<cplx> values(values_);
  for (auto& v : values) v *= c;
  return Potential(shift_, table_, std::move(values));
}

Potential Potential::operator+(cplx c) const {
  std::vector<cplx> values(values_);
  for (auto& v : values) v += c;
  return Potential(shift_, table_, std::move(values));
}

Potential combine(const Potential& f, const Potential& tau, const Potential& g, cplx s, cplx z) {
  if (!(f.shift() == tau.shift()) || !(f.shift() == g.shift()))
    throw SpecMismatch("SpecMismatch: f, tau, g must share one subshift");
  const int depth = std::max({f.depth(), tau.depth(), g.depth()});
  const Potential lf = f.lift(depth), lt = tau.lift(depth), lg = g.lift(depth);
  std::vector<cplx> values(lf.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = lf.at(i) - s * lt.at(i) + z * lg.at(i);
  return Potential(f.shift(), lf.table(), std::move(values));
}

Word canonical_extension(const Subshift& shift, std::span<const int> w, int length) {
  Word out(w.begin(), w.end());
  while (static_cast<int>(out.size()) < length) out.push_back(shift.successors(out.back()).front());
  return out;
}

Potential depth_truncate(const Subshift& shift, const std::function<cplx(std::span<const int>)>& source,
                         int source_length, int m) {
  if (m < 1) throw ValidationError("truncation depth must be >= 1");
  const int length = std::max(source_length, m);
  return Potential::from_function(shift, m, [&](std::span<const int> w) {
    return source(canonical_extension(shift, w, length));
  });
}

Potential depth_truncate(const Potential& source, int m) {
  if (m >= source.depth()) return source.lift(m);
  return depth_truncate(source.shift(), [&](std::span<const int> w) { return source(w); }, source.depth(), m)
      .with_kind(source.kind());
}

cplx birkhoff_sum(const Potential& phi, std::span<const int> w, int n) {
  if (n < 0) throw ValidationError("Birkhoff horizon must be >= 0");
  if (n == 0) return {0.0, 0.0};
  const std::size_t need = static_cast<std::size_t>(n + phi.depth() - 1);
  if (w.size() < need)
    throw WordTooShort("WordTooShort: Birkhoff sum of depth-" + std::to_string(phi.depth()) + " potential over " +
                       std::to_string(n) + " steps needs " + std::to_string(need) + " symbols, got " +
                       std::to_string(w.size()));
  cplx total{0.0, 0.0};
  for (int j = 0; j < n; ++j) total += phi(w.subspan(static_cast<std::size_t>(j)));
  return total;
}

double holder_seminorm(const WordTable& table, std::span<const cplx> h, const ThetaMetric& metric) {
  if (h.size() != table.size()) throw ValidationError("vector length does not match word table");
  const int m = table.depth();
  std::vector<double> inv_theta_pow(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) inv_theta_pow[j] = std::pow(metric.theta(), -j);
  double best = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t l = i + 1; l < table.size(); ++l) {
      const int j = common_prefix(table.word(i), table.word(l));
      best = std::max(best, std::abs(h[i] - h[l]) * inv_theta_pow[static_cast<std::size_t>(j)]);
    }
  return best;
}

double holder_seminorm(const Potential& phi, const ThetaMetric& metric) {
  return holder_seminorm(phi.words(), phi.values(), metric);
}

NormBundle norm_beta_b(const WordTable& table, std::span<const cplx> h, const ThetaMetric& metric, double b) {
  if (!(std::abs(b) >= 1.0)) throw BadFrequency("BadFrequency: |b| must be >= 1, got " + std::to_string(b));
  NormBundle out;
  for (const auto& v : h) out.sup_norm = std::max(out.sup_norm, std::abs(v));
  out.holder_seminorm = holder_seminorm(table, h, metric);
  out.b = b;
  out.combined = out.sup_norm + out.holder_seminorm / std::abs(b);
  return out;
}

}  // namespace thermo
