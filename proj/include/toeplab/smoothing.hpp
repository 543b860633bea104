#pragma once

#include <functional>
#include <vector>

#include "toeplab/geometry.hpp"
#include "toeplab/report.hpp"
#include "toeplab/spectral.hpp"
#include "toeplab/window.hpp"

// Exact spectral-side quantities: Gamma(lambda) = sum_j chi_hat(lambda - lambda_j)
// and the kernel S(x, y) = sum_j chi_hat(lambda - lambda_j) Phi_j(x) conj(Phi_j(y)),
// each with a certified bound on the omitted degrees.
namespace toeplab::smoothing {

using geometry::HeisenbergChart;
using geometry::PointX;
using spectral::SpectralPackage;
using window::Multiplier;

inline constexpr double kDefaultTailTolerance = 1e-10;

struct Value {
  Complex value;
  double tail_bound = 0.0;  // bound on everything not summed
};

// lambda_min(k) >= slope * k + offset for a calibrated torus model, from the
// lifted phase rates; used before any package exists.
double predicted_lower_slope(const geometry::ProjectiveModel& model);

// sum_{k > k_max} envelope(slope * k + offset - lambda) * dim_k.
double trace_tail(const Multiplier& m, int d, int k_max, double slope, double offset,
                  double lambda);

// Smallest k_max for which the trace tail stays below tol for every lambda
// up to lambda_max.
int required_kmax(const geometry::ProjectiveModel& model, const Multiplier& m,
                  double lambda_max, double tol = kDefaultTailTolerance);

// Throws InsufficientCoverage when the tail bound exceeds tol.
Value smoothed_trace(const SpectralPackage& pkg, const Multiplier& m, double lambda,
                     double tol = kDefaultTailTolerance);

Value smoothed_kernel(const SpectralPackage& pkg, const Multiplier& m, double lambda,
                      const PointX& x, const PointX& y, double tol = kDefaultTailTolerance);

// Diagonal of the kernel at chart points x0 + u / sqrt(lambda).
using Predictor = std::function<Complex(double lambda)>;

report::ScanReport scaled_diagonal_scan(const SpectralPackage& pkg, const window::Window& win,
                                        const HeisenbergChart& chart, const CVector& u,
                                        const std::vector<double>& lambda_grid,
                                        const Predictor& predict);

// Kernel diagonal at x0 + r(lambda) * direction (normal, unit), with reference
// scale (lambda / pi)^d. r(lambda) = 2 C lambda^{-7/18} when distance < 0,
// otherwise the fixed distance given.
struct OffLocus {
  double C = 1.0;
  double fixed_distance = -1.0;
};

report::ScanReport offlocus_decay_scan(const SpectralPackage& pkg, const window::Window& win,
                                       const HeisenbergChart& chart, const CVector& direction,
                                       const OffLocus& mode,
                                       const std::vector<double>& lambda_grid);

// Gamma on a grid of negative lambda against the unit reference.
report::ScanReport negative_lambda_scan(const SpectralPackage& pkg, const Multiplier& m,
                                        const std::vector<double>& lambda_grid);

struct Parity {
  Complex even, odd, plus, minus;
};

Parity parity_split(const SpectralPackage& pkg, const window::Window& win,
                    const HeisenbergChart& chart, const CVector& u, double lambda);

// Geometric (or linear) grid of count points from start to stop.
std::vector<double> make_grid(double start, double stop, int count, bool geometric);

}  // namespace toeplab::smoothing
