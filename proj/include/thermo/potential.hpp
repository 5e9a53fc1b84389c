#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "thermo/subshift.hpp"

namespace thermo {

using cplx = std::complex<double>;

enum class PotentialKind { generic, roof, observable };

/// A function of the first `depth` symbols, stored as one value per admissible depth-word.
/// Values are complex; real potentials simply carry zero imaginary parts.
class Potential {
public:
  Potential(Subshift shift, int depth, std::vector<cplx> values, PotentialKind kind = PotentialKind::generic);
  /// Reuses an existing word table of the same subshift.
  Potential(Subshift shift, std::shared_ptr<const WordTable> table, std::vector<cplx> values,
            PotentialKind kind = PotentialKind::generic);

  static Potential constant(const Subshift& shift, cplx c, PotentialKind kind = PotentialKind::generic);
  static Potential from_real(const Subshift& shift, int depth, const std::vector<double>& values,
                             PotentialKind kind = PotentialKind::generic);
  static Potential from_function(const Subshift& shift, int depth, const std::function<cplx(std::span<const int>)>& fn,
                                 PotentialKind kind = PotentialKind::generic);

  const Subshift& shift() const { return shift_; }
  int depth() const { return table_->depth(); }
  PotentialKind kind() const { return kind_; }
  const WordTable& words() const { return *table_; }
  std::shared_ptr<const WordTable> table() const { return table_; }

  const std::vector<cplx>& values() const { return values_; }
  cplx at(std::size_t index) const { return values_[index]; }
  /// Value on any admissible word of length >= depth().
  cplx operator()(std::span<const int> w) const;

  bool is_real() const;
  /// Real parts; throws ValidationError if any imaginary part is nonzero.
  std::vector<double> real_values() const;
  double min_real() const;
  double max_real() const;

  /// Same function represented on admissible words of a larger depth.
  Potential lift(int depth) const;
  Potential with_kind(PotentialKind kind) const;

  Potential operator+(const Potential& other) const;
  Potential operator-(const Potential& other) const;
  Potential operator*(cplx c) const;
  Potential operator+(cplx c) const;

private:
  Subshift shift_;
  std::shared_ptr<const WordTable> table_;
  std::vector<cplx> values_;
  PotentialKind kind_;
};

inline Potential operator*(cplx c, const Potential& p) { return p * c; }

/// f - s*tau + z*g at the largest of the three depths.
Potential combine(const Potential& f, const Potential& tau, const Potential& g, cplx s, cplx z);

/// Depth-m potential whose value on each m-word is the source evaluated on the
/// lexicographically smallest admissible extension of that word to `source_length`.
Potential depth_truncate(const Subshift& shift, const std::function<cplx(std::span<const int>)>& source,
                         int source_length, int m);
Potential depth_truncate(const Potential& source, int m);

/// Lexicographically smallest admissible continuation of w to the given length.
Word canonical_extension(const Subshift& shift, std::span<const int> w, int length);

/// sum_{j<n} phi(sigma^j w); needs |w| >= n + depth - 1.
cplx birkhoff_sum(const Potential& phi, std::span<const int> w, int n);

/// Hölder (Lipschitz in d_theta) seminorm of a vector indexed by the words of `table`.
double holder_seminorm(const WordTable& table, std::span<const cplx> h, const ThetaMetric& metric);
double holder_seminorm(const Potential& phi, const ThetaMetric& metric);

struct NormBundle {
  double sup_norm = 0.0;
  double holder_seminorm = 0.0;
  double beta = 1.0;
  double b = 1.0;
  double combined = 0.0;
};

/// ||h||_{beta,b} = ||h||_inf + |h|_beta / |b|. Throws BadFrequency when |b| < 1.
NormBundle norm_beta_b(const WordTable& table, std::span<const cplx> h, const ThetaMetric& metric, double b);

}  // namespace thermo
