#pragma once

#include <span>
#include <vector>

#include "thermo/potential.hpp"

namespace thermo {

/// Ruelle operator L_phi acting on functions of the first m symbols, as a sparse
/// matrix indexed by admissible m-words. Row `to` holds the preimage words
/// (j, to[0..m-2]) with weight e^{phi(j, to[0..m-2])}.
class TransferOperator {
public:
  explicit TransferOperator(const Potential& phi);

  std::size_t dim() const { return words_->size(); }
  const WordTable& words() const { return *words_; }
  const Potential& potential() const { return phi_; }
  bool is_real() const { return real_; }

  cplx entry(std::size_t to, std::size_t from) const;

  /// Operator of phi + z * psi with the same sparsity pattern; psi is lifted to this depth.
  TransferOperator tilted(const Potential& psi, cplx z) const;

  void apply(std::span<const cplx> v, std::span<cplx> out) const;
  std::vector<cplx> apply(std::span<const cplx> v) const;
  void apply_real(std::span<const double> v, std::span<double> out) const;
  /// Transpose action (no conjugation): (L^T nu)(from) = sum_to L(to, from) nu(to).
  void apply_transpose_real(std::span<const double> nu, std::span<double> out) const;

private:
  TransferOperator(Potential phi, const TransferOperator& pattern, std::vector<cplx> weights);

  Potential phi_;
  std::shared_ptr<const WordTable> words_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<cplx> weights_;
  std::vector<double> real_weights_;
  bool real_ = false;
};

TransferOperator build_operator(const Potential& phi);

/// L^iters h, exact matrix powers, no renormalization.
std::vector<cplx> apply_iterated(const TransferOperator& op, std::span<const cplx> h, int iters);

struct SpectralData {
  double lambda = 0.0;
  double pressure = 0.0;
  std::vector<double> h;       ///< right eigenvector, positive
  std::vector<double> nu_hat;  ///< left eigenvector, probability vector
  double residual = 0.0;       ///< max of |Lh - lambda h|_inf and |L^T nu - lambda nu|_1
  int iterations = 0;
};

struct EigenOptions {
  double tol = 1e-12;
  int max_iters = 0;  ///< 0: max(10000, 100 dim log dim)
};

/// Perron eigendata of a real nonnegative primitive operator by power iteration.
/// Normalized so that sum(nu_hat) = 1 and sum(h * nu_hat) = 1.
SpectralData leading_eigendata(const TransferOperator& op, const EigenOptions& opts = {});

/// f + ln h - ln h o sigma - ln lambda, at depth m + 1. Checks ||L 1 - 1||_inf <= 10 tol.
Potential normalize_potential(const Potential& f, const SpectralData& sd, double tol = 1e-12);

/// Equilibrium state of a real depth-m potential, stored as a chain on overlapping m-blocks.
class GibbsMeasure {
public:
  struct Step {
    int symbol;
    std::size_t next;
    double prob;
  };

  GibbsMeasure(const Potential& phi, const SpectralData& sd);

  const Subshift& shift() const { return shift_; }
  int block_length() const { return blocks_->depth(); }
  const WordTable& blocks() const { return *blocks_; }
  const std::vector<double>& block_initial() const { return initial_; }
  const std::vector<Step>& steps(std::size_t block) const { return steps_[block]; }
  const SpectralData& generator() const { return sd_; }
  double stationarity_defect() const { return stationarity_defect_; }

  /// Dense row-stochastic matrix over m-blocks (zeros at forbidden transitions).
  std::vector<std::vector<double>> block_transition() const;

  /// Masses of all admissible cylinders of the given length, in WordTable order.
  std::vector<double> cylinder_masses(const WordTable& table) const;

  /// Integral of a depth-d potential.
  cplx expectation(const Potential& psi) const;

private:
  Subshift shift_;
  std::shared_ptr<const WordTable> blocks_;
  std::vector<double> initial_;
  std::vector<std::vector<Step>> steps_;
  SpectralData sd_;
  double stationarity_defect_ = 0.0;
};

/// mu([w]); words shorter than the block length are summed over their extensions.
double gibbs_cylinder_mass(const GibbsMeasure& mu, std::span<const int> w);

/// Max |L_{f-(a+ib)tau}^m h - L_{f-(P+a+ib)tau}^m (e^{P tau^m} h)| over cylinders.
/// h is indexed by the words of the common depth of f and tau.
double conjugation_identity_check(const Potential& f, const Potential& tau, double a, double b, double P,
                                  std::span<const cplx> h, int iters);

}  // namespace thermo
