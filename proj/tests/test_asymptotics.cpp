#include "doctest.h"

#include <random>

#include "toeplab/asymptotics.hpp"
#include "toeplab/fitting.hpp"

using namespace toeplab;
using namespace toeplab::asymptotics;
using geometry::ProjectiveModel;
using window::Shape;
using window::Window;

namespace {

ProjectiveModel curve() { return geometry::calibrated(ProjectiveModel(1, {1, 2})); }

PointX fixed_point() {
  CVector z(2);
  z << 0.0, 1.0;
  return PointX(z);
}

CVector c1(Complex v) { return CVector::Constant(1, v); }

}  // namespace

TEST_CASE("psi2") {
  const CVector u = c1(Complex(0.4, -1.2));
  CHECK(psi2(u, u) == Complex(0.0, 0.0));
  CHECK(std::abs(psi2(u, CVector::Zero(1)) - Complex(-0.5 * u.squaredNorm(), 0.0)) < 1e-15);
  CHECK(std::abs(psi2(c1(1.0), c1(kI)) - Complex(-1.0, -1.0)) < 1e-15);
  CHECK_THROWS_AS(psi2(u, CVector::Zero(2)), Error);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int s = 0; s < 10; ++s) {
    CVector a(2), b(2);
    for (int i = 0; i < 2; ++i) {
      a[i] = Complex(g(rng), g(rng));
      b[i] = Complex(g(rng), g(rng));
    }
    CHECK(psi2(a, b).real() == doctest::Approx(-0.5 * (a - b).squaredNorm()));
  }
}

TEST_CASE("Gaussian normal integral") {
  const auto minus = gaussian_normal_integral(CMatrix::Constant(1, 1, -1.0));
  CHECK(std::abs(minus.closed_form - kPi / 2) < 1e-14);
  CHECK(minus.relative_error < 1e-8);
  const auto quarter = gaussian_normal_integral(CMatrix::Constant(1, 1, kI));
  CHECK(std::abs(quarter.closed_form - kPi / Complex(1.0, -1.0)) < 1e-14);
  CHECK(quarter.relative_error < 1e-6);
  const auto empty = gaussian_normal_integral(CMatrix(0, 0));
  CHECK(empty.closed_form == Complex(1.0, 0.0));
  CHECK_THROWS_AS(gaussian_closed_form(CMatrix::Identity(2, 2)), Error);
  CHECK_THROWS_AS(gaussian_normal_integral(CMatrix::Identity(1, 1)), Error);

  std::mt19937_64 rng(9);
  const CMatrix u = random_unitary(3, 1.0, 2.0, rng);
  CHECK((u * u.adjoint() - CMatrix::Identity(3, 3)).norm() < 1e-12);
  Eigen::ComplexEigenSolver<CMatrix> es(u);
  for (int i = 0; i < 3; ++i) {
    const double phase = std::arg(es.eigenvalues()[i]);
    CHECK(phase >= 1.0 - 1e-12);
    CHECK(phase <= 2.0 + 1e-12);
  }
}

TEST_CASE("local prediction at the fixed point of w = (1, 2)") {
  const auto m = curve();
  const Window w(Shape::bump, kPi, 1.4);
  const auto pred = make_local_prediction(m, w, fixed_point());
  CHECK(pred.f == doctest::Approx(2.0));
  CHECK(pred.c == 1);
  CHECK(pred.f_dim == 0);
  CHECK(std::abs(pred.A(0, 0) + 1.0) < 1e-8);
  CHECK(std::abs(pred.det_id_minus_a - 2.0) < 1e-8);
  for (double lambda : {100.0, 301.5}) {
    const Complex p0 = predict_local(pred, CVector::Zero(1), lambda);
    CHECK(std::abs(p0 - kTwoPi * std::polar(1.0, -lambda * kPi) * (lambda / kPi) / 4.0) < 1e-12 * std::abs(p0));
    const CVector u = c1(Complex(0.8, 0.3));
    const double ratio = std::abs(predict_local(pred, u, lambda)) / std::abs(p0);
    CHECK(ratio == doctest::Approx(std::exp(psi2(CVector(pred.A * u), u).real() / pred.f)).epsilon(1e-12));
    // arg p(0) = -lambda tau0 mod 2 pi
    const double drift = std::remainder(std::arg(p0) + lambda * kPi, kTwoPi);
    CHECK(std::abs(drift) < 1e-9);
  }
  CHECK_THROWS_AS(make_local_prediction(m, w, PointX(CVector::Constant(2, 1.0 / std::sqrt(2.0)))), Error);
}

TEST_CASE("whole-manifold prediction at tau0 = 0") {
  const auto m = curve();
  const Window w(Shape::bump, 0.0, 1.4);
  const auto pred = make_local_prediction(m, w, fixed_point());
  CHECK(pred.c == 0);
  const Complex p = predict_local(pred, CVector::Zero(0), 200.0);
  CHECK(std::abs(p - kTwoPi * (200.0 / kPi) / 4.0) < 1e-10);
}

TEST_CASE("component integrals and global terms") {
  const auto m = curve();
  const auto whole = geometry::x_components(m, 0.0).at(0);
  const auto fi = component_f_integral(m, whole);
  CHECK(fi.value == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(std::abs(predict_global_component(whole, 1.0, 250.0, fi.value) - kPi * 250.0) < 1e-9);

  const auto point = geometry::x_components(m, kPi).at(0);
  const auto fp = component_f_integral(m, point);
  CHECK(fp.value == doctest::Approx(0.5));
  const Complex g = predict_global_component(point, 0.7, 300.0, fp.value);
  CHECK(std::abs(g - kTwoPi * std::polar(1.0, -300.0 * kPi) * 0.7 / (2.0 * 2.0)) < 1e-12);

  const auto plane = geometry::calibrated(ProjectiveModel(2, {2, 4, 1}));
  const auto line = geometry::x_components(plane, kPi).at(0);
  CHECK(component_f_integral(plane, line).value == doctest::Approx(kPi / 8).epsilon(1e-12));

  const auto l2g = local_to_global(m, Window(Shape::bump, kPi, 1.4), point, 300.0);
  CHECK(l2g.relative_error < 1e-4);
}

TEST_CASE("stationary point of the truncated phase") {
  const auto m = curve();
  const auto rep = stationary_point_check(m, fixed_point(), 1.0, CVector::Zero(2));
  CHECK(rep.a == doctest::Approx(-2.0));
  REQUIRE(rep.critical.size() == 4);
  CHECK(rep.critical[0] == 0.0);
  CHECK(rep.critical[1] == doctest::Approx(0.5));
  CHECK(rep.critical[3] == doctest::Approx(0.5));
  CHECK(rep.gradient_norm < 1e-10);
  CHECK(rep.relative_error < 1e-6);
  CHECK_THROWS_WITH(stationary_point_check(m, fixed_point(), -1.0, CVector::Zero(2)),
                    doctest::Contains("degenerate direction"));
}

TEST_CASE("expansion fitting") {
  std::vector<double> x;
  std::vector<Complex> y;
  for (double l = 50.0; l <= 1000.0; l *= 1.3) {
    x.push_back(l);
    y.push_back(1.0 + 3.0 / std::sqrt(l));
  }
  const auto e = fit::ratio_expansion(x, y, {0.5});
  CHECK(std::abs(e.coefficients[0] - 3.0) < 1e-6);
  CHECK_THROWS_WITH(fit::ratio_expansion({1.0, 2.0}, {1.0, 1.0}, {0.5, 1.0}), doctest::Contains("ill-conditioned fit"));

  report::ScanReport r;
  for (std::size_t i = 0; i < x.size(); ++i) r.add(x[i], y[i] + 0.5 / x[i], 1.0);
  const auto fe = fit_expansion(r, true, 2);
  REQUIRE(fe.by_terms.size() == 2);
  CHECK(fe.residual_decreases);
  CHECK(std::abs(fe.by_terms[1].coefficients[0] - 3.0) < 1e-6);
  CHECK(std::abs(fe.by_terms[1].coefficients[1] - 0.5) < 1e-6);

  const auto p = fit::power_law({1.0, 2.0, 4.0}, {3.0, 0.75, 0.1875});
  CHECK(p.exponent == doctest::Approx(-2.0));
  CHECK(p.prefactor == doctest::Approx(3.0));
}
