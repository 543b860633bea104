#pragma once

#include <random>
#include <string>
#include <vector>

#include "toeplab/fitting.hpp"
#include "toeplab/geometry.hpp"
#include "toeplab/report.hpp"
#include "toeplab/window.hpp"

// Closed-form leading terms of the local and global trace asymptotics, and the
// lemmas behind them, each with an independent numerical oracle.
namespace toeplab::asymptotics {

using geometry::FixedComponent;
using geometry::PointX;
using geometry::ProjectiveModel;

// psi_2(u, w) = i Im(sum u_j conj(w_j)) - |u - w|^2 / 2.
Complex psi2(const CVector& u, const CVector& w);

struct LocalPrediction {
  double tau0 = 0.0;
  CVector x0;
  double f = 0.0;  // f(m0)
  int d = 0;
  int f_dim = 0;   // complex dimension of the fixed component
  int c = 0;       // normal dimension
  double chi_tau0 = 1.0;
  CMatrix A;       // dphi^M_{-tau0} on the normal space
  Complex det_id_minus_a{1.0, 0.0};
};

// Throws NotClean ("locus not clean") when id - A is singular.
LocalPrediction make_local_prediction(const ProjectiveModel& model, const window::Window& win,
                                      const PointX& x0);

// 2 pi e^{-i lambda tau0} f^{-(d+1)} (lambda/pi)^d exp(psi_2(A u, u) / f) chi(tau0)
// for u in the normal space (dimension c).
Complex predict_local(const LocalPrediction& pred, const CVector& u, double lambda);

// pi^c / det(id - A).
Complex gaussian_closed_form(const CMatrix& A);

struct GaussianCheck {
  Complex closed_form;
  Complex oracle;
  double relative_error = 0.0;
  std::string method;
};

// Closed form against an independent integration of exp(psi_2(A v, v)) over C^c:
// polar quadrature for c = 1, radial reduction plus adaptive angular quadrature
// for c = 2, and for c = 3, 4 a product rule on the sphere in hyperspherical
// moduli and phases after the same radial reduction.
GaussianCheck gaussian_normal_integral(const CMatrix& A);

// Random unitary with eigenphases drawn uniformly from [phase_lo, phase_hi].
CMatrix random_unitary(int c, double phase_lo, double phase_hi, std::mt19937_64& rng);

struct FIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
};

// int over the component of f^{-(f_j + 1)} dV, dV = omega^{f_j} / f_j!, by a
// product rule on the moment simplex (the pushforward of dV is pi^{f_j} dt).
FIntegral component_f_integral(const ProjectiveModel& model, const FixedComponent& comp);

// 2 pi e^{-i lambda tau0} (lambda/pi)^{f_j} chi(tau0) / c(tau0, j) * int f^{-(f_j+1)} dV.
Complex predict_global_component(const FixedComponent& comp, double chi_tau0, double lambda,
                                 double f_integral);

struct LocalToGlobal {
  Complex numeric;
  Complex closed;
  double relative_error = 0.0;
};

// Integrates predict_local over the normal slice at every node of a moment
// quadrature of the component and sums, with no closed-form Gaussian input.
LocalToGlobal local_to_global(const ProjectiveModel& model, const window::Window& win,
                              const FixedComponent& comp, double lambda);

// Truncated phase Psi(theta, t, tau, r) = -r theta w0 - tau r a + i t (1 - e^{i theta}) - tau,
// a = upsilon_f(x0) . omega with omega = (w0, w1): w0 pairs with the vertical
// component -f and w1 (horizontal, in C^n) pairs with the horizontal field via Re<.,.>.
struct StationaryReport {
  double a = 0.0;
  std::vector<double> critical;  // (theta, t, tau, r)
  double gradient_norm = 0.0;
  Complex hessian_det;
  double expected_det = 0.0;  // a^2
  double relative_error = 0.0;
  double newton_distance = 0.0;  // Newton from a perturbed seed vs closed form
};

StationaryReport stationary_point_check(const ProjectiveModel& model, const PointX& x0,
                                        double omega0, const CVector& omega1);

// Least squares of exact/leading - 1 against lambda^{-j/2} (half powers) or
// lambda^{-j}; one fit per number of terms 1..terms.
struct ExpansionFit {
  std::vector<fit::Expansion> by_terms;
  bool residual_decreases = true;
};

ExpansionFit fit_expansion(const report::ScanReport& scan, bool half_powers, int terms);

}  // namespace toeplab::asymptotics
