#include "toeplab/asymptotics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "toeplab/quadrature.hpp"

namespace toeplab::asymptotics {

Complex psi2(const CVector& u, const CVector& w) {
  if (u.size() != w.size()) throw Error("psi2: dimension mismatch");
  const Complex herm = w.dot(u);  // sum u_j conj(w_j)
  return Complex(0.0, herm.imag()) - 0.5 * (u - w).squaredNorm();
}

LocalPrediction make_local_prediction(const ProjectiveModel& model, const window::Window& win,
                                      const PointX& x0) {
  const double tau0 = win.tau0();
  const geometry::HeisenbergChart chart = geometry::heisenberg_chart(model, x0, tau0);
  geometry::FixedComponent comp;
  comp.tau0 = tau0;
  LocalPrediction p;
  p.tau0 = tau0;
  p.x0 = x0.z();
  p.f = geometry::hamiltonian(model, x0);
  p.d = model.d();
  p.f_dim = chart.tangent_dim;
  p.c = chart.normal_dim();
  p.chi_tau0 = win.chi(tau0);
  p.A = p.c > 0 ? geometry::flow_differential_normal(model, comp, x0) : CMatrix(0, 0);
  if (p.c > 0) {
    const double unitarity = (p.A.adjoint() * p.A - CMatrix::Identity(p.c, p.c)).cwiseAbs().maxCoeff();
    if (unitarity > 1e-8) throw Error("normal differential is not unitary (" + std::to_string(unitarity) + ")");
    p.det_id_minus_a = (CMatrix::Identity(p.c, p.c) - p.A).determinant();
    if (std::abs(p.det_id_minus_a) < 1e-12) throw NotClean("locus not clean");
  }
  return p;
}

Complex predict_local(const LocalPrediction& pred, const CVector& u, double lambda) {
  if (u.size() != pred.c) throw Error("predict_local: u must lie in the normal space");
  const Complex quad = pred.c > 0 ? psi2(pred.A * u, u) : Complex(0.0);
  const double amplitude =
      kTwoPi * pred.chi_tau0 * std::pow(lambda / kPi, pred.d) / std::pow(pred.f, pred.d + 1);
  return std::polar(amplitude, -lambda * pred.tau0) * std::exp(quad / pred.f);
}

Complex gaussian_closed_form(const CMatrix& A) {
  const int c = static_cast<int>(A.rows());
  if (c == 0) return 1.0;
  const Complex det = (CMatrix::Identity(c, c) - A).determinant();
  if (std::abs(det) < 1e-12) throw Error("non-clean matrix: det(id - A) = 0");
  return std::pow(kPi, c) / det;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// q(omega) = -psi_2(A omega, omega); the integrand is exp(-|v|^2 q(v/|v|)).
Complex q_form(const CMatrix& A, const CVector& w) { return -psi2(CVector(A * w), w); }

// Smallest Re q over the unit sphere, the Gaussian decay rate.
double decay_rate(const CMatrix& A) {
  const int c = static_cast<int>(A.rows());
  const CMatrix q = CMatrix::Identity(c, c) - A;
  const CMatrix h = 0.5 * (q + q.adjoint());
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues().minCoeff();
}

template <class F>
Complex integrate_complex(F f, double a, double b, int panels) {
  Complex total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    const double re = GK::integrate([&](double x) { return f(x).real(); }, lo, hi, 10, 1e-13);
    const double im = GK::integrate([&](double x) { return f(x).imag(); }, lo, hi, 10, 1e-13);
    total += Complex(re, im);
  }
  return total;
}

Complex oracle_c1(const CMatrix& A) {
  // polar coordinates on C = R^2 with the explicit psi_2 integrand
  const double rate = decay_rate(A);
  const double radius = std::sqrt(45.0 / rate);
  const int phases = 32;
  Complex total = 0.0;
  for (int j = 0; j < phases; ++j) {
    const Complex dir = std::polar(1.0, kTwoPi * j / phases);
    auto radial = [&](double r) {
      CVector v(1);
      v[0] = r * dir;
      return std::exp(psi2(CVector(A * v), v)) * r;
    };
    const double turns = std::abs(q_form(A, CVector::Constant(1, dir)).imag()) * radius * radius;
    total += integrate_complex(radial, 0.0, radius, std::max(8, static_cast<int>(turns / 2.0)));
  }
  return total * (kTwoPi / phases);
}

Complex oracle_c2(const CMatrix& A) {
  // int e^{-r^2 q} r^3 dr = 1 / (2 q^2); the sphere measure in (t, theta) after
  // integrating the global phase is pi dt dtheta
  auto inner = [&](double t) {
    auto f = [&](double theta) {
      CVector w(2);
      w << std::sqrt(1.0 - t), std::sqrt(t) * std::polar(1.0, theta);
      const Complex q = q_form(A, w);
      return 1.0 / (2.0 * q * q);
    };
    return integrate_complex(f, 0.0, kTwoPi, 4);
  };
  return kPi * integrate_complex(inner, 0.0, 1.0, 4);
}

// Sphere integral of q^{-c} in w_j = rho_j e^{i theta_j}: the moduli rho on
// the positive part of S^{c-1} in hyperspherical angles (Gauss-Legendre, n
// nodes each), the phases by the trapezoid rule (p nodes each) with the
// global phase dropped, since q is invariant under it. q mixes rho_i rho_j,
// so the angles keep the integrand smooth where square roots of the moments
// would not.
Complex oracle_angular(const CMatrix& A, int n, int p) {
  const int c = static_cast<int>(A.rows());
  const int m = c - 1;
  const quad::Rule1D gl = quad::gauss_legendre(n, 0.0, 0.5 * kPi);
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(n) * p;
  CompensatedSum sum;
  CVector w(c);
  for (std::size_t it = 0; it < total; ++it) {
    std::size_t r = it;
    double tail = 1.0, jac = 1.0;
    for (int k = 0; k < m; ++k) {
      const std::size_t a = r % n;
      r /= n;
      const double phi = gl.nodes[a], rho = tail * std::cos(phi);
      // dt = 2^m prod(rho) dsigma_{S^m}, dsigma = prod sin^{m-1-k} dphi_k
      jac *= gl.weights[a] * 2.0 * rho * std::pow(std::sin(phi), m - 1 - k);
      w[k] = rho;
      tail *= std::sin(phi);
    }
    for (int k = 0; k < m; ++k) {
      w[k] *= std::polar(1.0, kTwoPi * static_cast<double>(r % p) / p);
      r /= p;
    }
    jac *= tail;
    w[m] = tail;
    sum.add(jac / std::pow(q_form(A, w), c));
  }
  // surface measure of S^{2c-1} = 2^{1-c} dt dtheta
  const double measure = std::pow(2.0, 1 - c) * std::pow(kTwoPi, c) / std::pow(static_cast<double>(p), m);
  return sum.value() * measure * std::tgamma(c) / 2.0;
}

}  // namespace

GaussianCheck gaussian_normal_integral(const CMatrix& A) {
  const int c = static_cast<int>(A.rows());
  GaussianCheck out;
  out.closed_form = gaussian_closed_form(A);
  if (c == 0) {
    out.oracle = 1.0;
    out.method = "empty";
    return out;
  }
  // definiteness of Re psi_2(A v, v) on sampled directions
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  for (int s = 0; s < 256; ++s) {
    CVector w(c);
    for (int j = 0; j < c; ++j) w[j] = Complex(g(rng), g(rng));
    w /= w.norm();
    if (!(q_form(A, w).real() > 0.0)) throw Error("integral not absolutely convergent");
  }
  if (c == 1) {
    out.oracle = oracle_c1(A);
    out.method = "polar quadrature";
  } else if (c == 2) {
    out.oracle = oracle_c2(A);
    out.method = "radial reduction + adaptive angular quadrature";
  } else if (c <= 4) {
    out.oracle = c == 3 ? oracle_angular(A, 12, 16) : oracle_angular(A, 10, 12);
    out.method = "hyperspherical Gauss-Legendre x trapezoid phases";
  } else {
    throw Error("gaussian_normal_integral: oracle available for c <= 4");
  }
  out.relative_error = std::abs(out.oracle - out.closed_form) / std::abs(out.closed_form);
  return out;
}

CMatrix random_unitary(int c, double phase_lo, double phase_hi, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> phase(phase_lo, phase_hi);
  CMatrix m(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
  const Eigen::HouseholderQR<CMatrix> qr(m);
  const CMatrix u = qr.householderQ();
  CVector eig(c);
  for (int j = 0; j < c; ++j) eig[j] = std::polar(1.0, phase(rng));
  return u * eig.asDiagonal() * u.adjoint();
}

FIntegral component_f_integral(const ProjectiveModel& model, const FixedComponent& comp) {
  const int m = comp.f_dim;
  auto evaluate = [&](int degree) {
    const quad::SimplexRule rule = quad::simplex_rule(m, degree);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double f = 0.0;
      for (int i = 0; i <= m; ++i) f += model.weights()[comp.index_set[i]] * rule.points[q][i];
      s += rule.weights[q] * std::pow(f, -(m + 1));
    }
    return std::pow(kPi, m) * s;
  };
  if (m == 0) return {std::pow(static_cast<double>(model.weights()[comp.index_set[0]]), -1.0), 0.0};
  FIntegral out;
  out.value = evaluate(60);
  out.error_estimate = std::abs(out.value - evaluate(40));
  return out;
}

Complex predict_global_component(const FixedComponent& comp, double chi_tau0, double lambda,
                                 double f_integral) {
  const double amplitude = kTwoPi * chi_tau0 * std::pow(lambda / kPi, comp.f_dim) * f_integral;
  return std::polar(amplitude, -lambda * comp.tau0) / comp.c_value;
}

namespace {

// int over C^c of g(u) du in polar form: Gauss-Legendre in r, uniform phases,
// and Gauss-Legendre in the moment variable for c = 2.
template <class G>
Complex normal_slice_integral(int c, double radius, G g) {
  const quad::Rule1D rr = quad::gauss_legendre(96, 0.0, radius);
  const int phases = 32;
  Complex total = 0.0;
  if (c == 1) {
    for (int j = 0; j < phases; ++j) {
      const Complex dir = std::polar(1.0, kTwoPi * j / phases);
      for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
        CVector u(1);
        u[0] = rr.nodes[i] * dir;
        total += rr.weights[i] * rr.nodes[i] * g(u);
      }
    }
    return total * (kTwoPi / phases);
  }
  if (c == 2) {
    // S^3 surface measure = (1/2) dt dtheta1 dtheta2 with t = |w_1|^2
    const quad::Rule1D tt = quad::gauss_legendre(24, 0.0, 1.0);
    for (std::size_t a = 0; a < tt.nodes.size(); ++a)
      for (int j1 = 0; j1 < phases; ++j1)
        for (int j2 = 0; j2 < phases; ++j2) {
          CVector w(2);
          w << std::sqrt(1.0 - tt.nodes[a]) * std::polar(1.0, kTwoPi * j1 / phases),
              std::sqrt(tt.nodes[a]) * std::polar(1.0, kTwoPi * j2 / phases);
          Complex radial = 0.0;
          for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
            const double r = rr.nodes[i];
            radial += rr.weights[i] * r * r * r * g(CVector(r * w));
          }
          total += tt.weights[a] * radial;
        }
    return total * 0.5 * (kTwoPi / phases) * (kTwoPi / phases);
  }
  throw Error("local_to_global: normal dimension above 2 is not supported");
}

}  // namespace

LocalToGlobal local_to_global(const ProjectiveModel& model, const window::Window& win,
                              const FixedComponent& comp, double lambda) {
  const int m = comp.f_dim;
  const int c = static_cast<int>(comp.normal_angles.size());
  const quad::SimplexRule rule = quad::simplex_rule(m, 40);
  CompensatedSum sum;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const PointX x = geometry::component_point(model, comp, rule.points[q]);
    const LocalPrediction pred = make_local_prediction(model, win, x);
    Complex slice;
    if (c == 0) {
      slice = predict_local(pred, CVector(0), lambda);
    } else {
      const double radius = std::sqrt(45.0 * pred.f / decay_rate(pred.A));
      // x0 + v with v = u / sqrt(lambda), so dv = lambda^{-c} du
      slice = normal_slice_integral(c, radius, [&](const CVector& u) {
                return predict_local(pred, u, lambda);
              }) *
              std::pow(lambda, -c);
    }
    const double weight = m == 0 ? 1.0 : std::pow(kPi, m) * rule.weights[q];
    sum.add(weight * slice);
  }
  LocalToGlobal out;
  out.numeric = sum.value();
  out.closed = predict_global_component(comp, win.chi(comp.tau0), lambda,
                                        component_f_integral(model, comp).value);
  out.relative_error = std::abs(out.numeric - out.closed) / std::abs(out.closed);
  return out;
}

namespace {

using Vec4 = Eigen::Matrix<Complex, 4, 1>;
using Mat4 = Eigen::Matrix<Complex, 4, 4>;

struct Phase {
  double w0, a;
  Complex operator()(const Vec4& p) const {
    const Complex theta = p[0], t = p[1], tau = p[2], r = p[3];
    return -r * theta * w0 - tau * r * a + kI * t * (1.0 - std::exp(kI * theta)) - tau;
  }
  Vec4 gradient(const Vec4& p) const {
    const Complex theta = p[0], t = p[1], tau = p[2], r = p[3];
    Vec4 g;
    g << -r * w0 + t * std::exp(kI * theta), kI * (1.0 - std::exp(kI * theta)), -r * a - 1.0,
        -theta * w0 - tau * a;
    return g;
  }
  Mat4 hessian_fd(const Vec4& p, double h) const {
    Mat4 hm;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Vec4 pp = p, pm = p, mp = p, mm = p;
        pp[i] += h, pp[j] += h;
        pm[i] += h, pm[j] -= h;
        mp[i] -= h, mp[j] += h;
        mm[i] -= h, mm[j] -= h;
        hm(i, j) = ((*this)(pp) - (*this)(pm) - (*this)(mp) + (*this)(mm)) / (4.0 * h * h);
      }
    return hm;
  }
};

}  // namespace

StationaryReport stationary_point_check(const ProjectiveModel& model, const PointX& x0,
                                        double omega0, const CVector& omega1) {
  if (omega1.size() != model.n()) throw Error("stationary_point_check: omega1 must lie in C^n");
  // pairing of upsilon = upsilon_h - f d/dtheta with (omega0, omega1)
  const CVector horizontal = omega1 - x0.z().dot(omega1) * x0.z();
  const double f = geometry::hamiltonian(model, x0);
  const CVector vh = geometry::hamiltonian_field_horizontal(model, x0);
  const double a = -f * omega0 + horizontal.dot(vh).real();
  if (!(-a > 0.0)) throw Error("degenerate direction: upsilon . omega >= 0");

  StationaryReport rep;
  rep.a = a;
  rep.critical = {0.0, -omega0 / a, 0.0, -1.0 / a};
  const Phase psi{omega0, a};
  Vec4 p;
  p << rep.critical[0], rep.critical[1], rep.critical[2], rep.critical[3];
  rep.gradient_norm = psi.gradient(p).norm();
  rep.hessian_det = psi.hessian_fd(p, 1e-4).determinant();
  rep.expected_det = a * a;
  rep.relative_error = std::abs(rep.hessian_det - rep.expected_det) / rep.expected_det;

  // Newton from a perturbed seed, with the finite-difference Hessian
  Vec4 q = p + Vec4::Constant(Complex(1e-2, 0.0));
  for (int it = 0; it < 50; ++it) {
    const Vec4 step = psi.hessian_fd(q, 1e-4).partialPivLu().solve(psi.gradient(q));
    q -= step;
    if (step.norm() < 1e-14) break;
  }
  rep.newton_distance = (q - p).norm();
  return rep;
}

ExpansionFit fit_expansion(const report::ScanReport& scan, bool half_powers, int terms) {
  std::vector<Complex> ratio;
  for (std::size_t i = 0; i < scan.grid.size(); ++i) ratio.push_back(scan.ratio(i));
  ExpansionFit out;
  for (int n = 1; n <= terms; ++n) {
    std::vector<double> powers;
    for (int j = 1; j <= n; ++j) powers.push_back(half_powers ? 0.5 * j : j);
    out.by_terms.push_back(fit::ratio_expansion(scan.grid, ratio, powers));
    if (n > 1 && out.by_terms[n - 1].residual > out.by_terms[n - 2].residual * (1.0 + 1e-9))
      out.residual_decreases = false;
  }
  return out;
}

}  // namespace toeplab::asymptotics
