#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toeplab/common.hpp"

// Quantized projective space: M = CP^d with the Fubini-Study form of total
// volume pi^d / d!, X = S^{2d+1} its unit circle bundle, and the torus-weight
// Hamiltonian f([z]) = sum_i w_i |z_i|^2 / |z|^2.
namespace toeplab::geometry {

// Constants of the lifted flow z -> exp(i * sign * tau * diag(w + shift)) z.
struct Calibration {
  int lift_sign = 0;
  double lift_shift = 0.0;
  // Largest deviation between the integrated contact field and the fitted
  // closed-form flow over tau in [0, 1].
  double residual = 0.0;
};

class ProjectiveModel {
 public:
  ProjectiveModel(int d, std::vector<int> weights,
                  std::optional<Calibration> calibration = std::nullopt);

  int d() const { return d_; }
  int n() const { return d_ + 1; }  // homogeneous coordinates
  const std::vector<int>& weights() const { return weights_; }
  int min_weight() const;
  int max_weight() const;

  bool calibrated() const { return calibration_.has_value(); }
  const Calibration& calibration() const;  // throws UncalibratedModel
  ProjectiveModel with_calibration(Calibration c) const;

  // Phase rate of coordinate i under the lifted flow: sign * (w_i + shift).
  double phase_rate(int i) const;

  // Spec string such as "d1_w1-2"; used in cache names.
  std::string tag() const;

 private:
  int d_;
  std::vector<int> weights_;
  std::optional<Calibration> calibration_;
};

// A point of X = S^{2d+1}.
class PointX {
 public:
  explicit PointX(CVector z);  // requires | |z| - 1 | <= 1e-12
  static PointX normalized(const CVector& z);

  const CVector& z() const { return z_; }
  int n() const { return static_cast<int>(z_.size()); }
  PointX rotated(double theta) const;  // circle action r_{e^{i theta}}

 private:
  CVector z_;
};

// A point of M = CP^d, stored through a unit representative.
class PointM {
 public:
  explicit PointM(PointX representative) : rep_(std::move(representative)) {}
  const PointX& representative() const { return rep_; }

 private:
  PointX rep_;
};

inline PointM project(const PointX& x) { return PointM(x); }

// Geodesic Fubini-Study distance, arctan(|z - <w,z> w| / |<w,z>|).
double dist_M(const PointM& a, const PointM& b);
// Riemannian distance on the round sphere.
double dist_X(const PointX& a, const PointX& b);

double hamiltonian(const ProjectiveModel& model, const PointX& x);

// Kaehler form omega(u, v) = Im <u, v> on horizontal vectors; half of d alpha
// for the connection form alpha = Im(zbar . dz).
double kahler_form(const CVector& u, const CVector& v);
double connection_form(const PointX& x, const CVector& v);

// Horizontal lift of the Hamiltonian vector field of f for 2 omega, obtained
// by solving 2 omega(upsilon, e) = df(e) over a real basis of the horizontal
// space at x.
CVector hamiltonian_field_horizontal(const ProjectiveModel& model, const PointX& x);

// Contact lift upsilon_f^sharp - f d/dtheta as a tangent vector at x.
CVector contact_field(const ProjectiveModel& model, const PointX& x);

// Integrates contact_field with classical RK4.
PointX integrate_contact_field(const ProjectiveModel& model, const PointX& x,
                               double tau, int steps);

// Fits (lift_sign, lift_shift) so the closed-form flow reproduces the
// integrated contact field to 1e-8 over tau in [0, 1].
Calibration calibrate(const ProjectiveModel& model);
ProjectiveModel calibrated(const ProjectiveModel& model);

PointX flow_X(const ProjectiveModel& model, double tau, const PointX& x);
PointM flow_M(const ProjectiveModel& model, double tau, const PointM& m);

struct Period {
  double tau0 = 0.0;
  bool isolated = false;
  double gap = 0.0;  // distance to the nearest other period (0 counts)
};

// Periods of the lifted flow in (0, tau_max]; empty when none.
std::vector<Period> periods(const ProjectiveModel& model, double tau_max);

// Distance from tau0 to the nearest period other than tau0 itself, counting
// tau = 0 as a period.
double period_gap(const ProjectiveModel& model, double tau0);

struct FixedComponent {
  double tau0 = 0.0;
  std::vector<int> index_set;         // coordinates spanning the component
  int f_dim = 0;                      // complex dimension on M
  std::vector<double> normal_angles;  // rotation angles of dphi^M_{-tau0} on N
  std::vector<int> normal_indices;    // coordinate carrying each angle
  Complex c_value{1.0, 0.0};          // det(id - dphi^M_{-tau0}|_N)
  double f_min = 0.0, f_max = 0.0;    // Hamiltonian range on the component
  bool lifts_to_x = true;             // false for components fixed on M only
};

// Fixed components of phi^M_{tau0}. Components fixed by phi^X_{tau0} come
// first; the remaining ones have lifts_to_x == false.
std::vector<FixedComponent> fixed_components(const ProjectiveModel& model, double tau0);
std::vector<FixedComponent> x_components(const ProjectiveModel& model, double tau0);

// Representative point of X on a component with the given moment weights
// (all equal when empty).
PointX component_point(const ProjectiveModel& model, const FixedComponent& comp,
                       const std::vector<double>& moments = {});

// Heisenberg-type chart centred at a fixed point: frame columns are the
// tangent directions of the fixed component followed by its normal
// directions. x0 + (theta, v) = e^{i theta} Exp_{x0}(sum_k (v_k + gauge v_k^2) F_k).
struct HeisenbergChart {
  PointX center;
  CMatrix frame;    // n x d, orthonormal and orthogonal to center
  int tangent_dim;  // leading columns spanning T(Fix)
  Complex gauge{0.0, 0.0};

  int normal_dim() const { return static_cast<int>(frame.cols()) - tangent_dim; }
  PointX point(double theta, const CVector& v) const;
  PointX point(const CVector& v) const { return point(0.0, v); }
  // Point x0 + v with v supported on the normal block.
  PointX normal_point(const CVector& normal_v) const;
  // Inverse of the gauge-free chart on M: v with x0 + v projecting to m.
  CVector coordinates(const PointM& m) const;
};

HeisenbergChart heisenberg_chart(const ProjectiveModel& model, const PointX& x0,
                                 double tau0, Complex gauge = {0.0, 0.0});

// Matrix of dphi^M_{-tau0} on the normal space, by central finite
// differences in the chart's normal frame.
CMatrix flow_differential_normal(const ProjectiveModel& model,
                                 const FixedComponent& comp, const PointX& x0);

// Volume density of the Fubini-Study metric in the affine chart
// zeta -> (1, zeta)/sqrt(1 + |zeta|^2), obtained as the Gram determinant of
// the finite-difference Jacobian projected to the horizontal space.
double fs_volume_density(int d, const CVector& zeta);

// pi^d / d!.
double fs_volume(int d);

}  // namespace toeplab::geometry
