#pragma once

#include <vector>

#include "toeplab/common.hpp"

namespace toeplab::fit {

// log|y| = log(prefactor) + exponent * log(x), least squares.
struct PowerLaw {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // rms of the log residuals
};

PowerLaw power_law(const std::vector<double>& x, const std::vector<double>& y);

// Restriction of (x, y) to x in [lo, hi].
PowerLaw power_law_window(const std::vector<double>& x, const std::vector<double>& y,
                          double lo, double hi);

// y - 1 = sum_j c_j x^{-p_j} for complex data, least squares.
struct Expansion {
  std::vector<double> powers;
  std::vector<Complex> coefficients;
  double residual = 0.0;  // max |data - model|
  double condition = 0.0;
};

// Throws "ill-conditioned fit" when the design matrix condition number
// exceeds 1e12 or there are fewer than two points per coefficient.
Expansion ratio_expansion(const std::vector<double>& x, const std::vector<Complex>& y,
                          const std::vector<double>& powers);

}  // namespace toeplab::fit
