#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

namespace thermo::numerics {

/// Root of a continuous function with a sign change on [lo, hi], to near machine precision.
/// Throws BracketFailure if f(lo) and f(hi) have the same strict sign.
double find_root(const std::function<double(double)>& f, double lo, double hi);

/// Same as find_root when f(lo), f(hi) are already known.
double find_root(const std::function<double(double)>& f, double lo, double hi, double f_lo, double f_hi);

/// (argmin, min) of f on [lo, hi].
std::pair<double, double> minimize(const std::function<double(double)>& f, double lo, double hi);

/// f'(x) by central differences with one Richardson step (steps h and h/2).
double first_derivative(const std::function<double(double)>& f, double x, double h);

/// f''(x) by central second differences with one Richardson step (steps h and h/2).
double second_derivative(const std::function<double(double)>& f, double x, double h);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x. Needs at least two points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; callers write results by index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace thermo::numerics
