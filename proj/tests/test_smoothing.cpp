#include "doctest.h"

#include <random>

#include "toeplab/quadrature.hpp"
#include "toeplab/smoothing.hpp"

using namespace toeplab;
using namespace toeplab::smoothing;
using geometry::PointX;
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

}  // namespace

TEST_CASE("bump window") {
  const Window w(Shape::bump, 0.5, 0.8);
  CHECK(w.chi(0.5) == 1.0);
  CHECK(w.chi(0.5 + 0.8) == 0.0);
  CHECK(w.chi(0.5 - 0.81) == 0.0);
  CHECK(w.integral() > 0.0);
  CHECK(w.centered(0.0) == doctest::Approx(w.centered_direct(0.0)).epsilon(1e-10));
  for (double s : {0.3, 3.7, 25.0, 130.0, 199.0}) {
    CHECK(std::abs(w.centered(s) - w.centered_direct(s)) < 1e-10);
    CHECK(w.centered(-s) == w.centered(s));
    // modulation identity
    CHECK(std::abs(w.transform(s) - std::polar(w.centered_direct(s), -s * 0.5)) < 1e-10);
    CHECK(w.envelope(s) >= std::abs(w.transform(s)));
  }
  // rapid decay, measured for N = 6 on |s| <= 200
  double c6 = 0.0;
  for (double s = 0.0; s <= 200.0; s += 0.5) c6 = std::max(c6, std::abs(w.centered(s)) * std::pow(1.0 + s, 6));
  CHECK(std::isfinite(c6));
  CHECK(std::abs(w.centered(200.0)) * std::pow(201.0, 6) < c6);
  CHECK(w.transform(10.0 * w.cutoff()) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(Window(Shape::bump, 0.0, -1.0), Error);
}

TEST_CASE("gaussian window") {
  const Window g(Shape::gaussian, 0.0, 0.4);
  for (double s : {0.0, 2.0, 11.0})
    CHECK(g.centered(s) == doctest::Approx(0.4 * std::sqrt(kTwoPi) * std::exp(-0.08 * s * s)));
  CHECK(window::parse_shape("gaussian") == Shape::gaussian);
  CHECK_THROWS_AS(window::parse_shape("box"), Error);
}

TEST_CASE("toy spectra") {
  const Window w(Shape::bump, 0.0, 1.0);
  const auto toy = spectral::SpectralPackage::toy(5.0);
  for (double l : {-3.0, 4.2, 5.0, 40.0}) {
    const auto g = smoothed_trace(toy, w, l);
    CHECK(g.value == w.transform(l - 5.0));
    CHECK(g.tail_bound == 0.0);
  }
  const PointX x = fixed_point(), y = PointX::normalized(CVector::Constant(2, Complex(0.3, 1.0)));
  const auto s = smoothed_kernel(toy, w, 4.0, x, y);
  const double phi = 1.0 / std::sqrt(spectral::volume_X(toy.model().d()));
  CHECK(std::abs(s.value - w.transform(-1.0) * phi * phi) < 1e-14);

  const auto zero = spectral::SpectralPackage::toy(0.0);
  const auto scan = negative_lambda_scan(zero, w, {-30.0, -10.0});
  CHECK(scan.exact[0] == w.transform(-30.0));
}

TEST_CASE("coverage is enforced") {
  const auto m = curve();
  const Window w(Shape::bump, kPi, 1.4);
  const auto small = spectral::eigendata(m, 40);
  CHECK_THROWS_AS(smoothed_trace(small, w, 30.0), InsufficientCoverage);
  CHECK_THROWS_WITH(smoothed_trace(small, w, 30.0), doctest::Contains("insufficient spectral coverage"));
  CHECK(required_kmax(m, w, 30.0) > 40);
  CHECK(predicted_lower_slope(m) == doctest::Approx(1.0));
}

TEST_CASE("kernel identities at low degree") {
  const auto m = curve();
  const Window w(Shape::gaussian, 0.0, 0.5);
  const double lambda = 6.0;
  const int k = required_kmax(m, w, lambda, 1e-13);
  const auto pkg = spectral::eigendata(m, k);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  auto random_point = [&] {
    CVector z(2);
    for (int i = 0; i < 2; ++i) z[i] = Complex(g(rng), g(rng));
    return PointX::normalized(z);
  };
  const PointX x = random_point(), y = random_point();
  const Complex sxy = smoothed_kernel(pkg, w, lambda, x, y).value;
  const Complex syx = smoothed_kernel(pkg, w, lambda, y, x).value;
  CHECK(std::abs(sxy - std::conj(syx)) < 1e-12);
  const Complex rot = smoothed_kernel(pkg, w, lambda, x.rotated(0.9), y.rotated(0.9)).value;
  CHECK(std::abs(rot - sxy) < 1e-12);

  // Fubini: the diagonal integrates to the trace
  const auto rule = quad::sphere_rule(2, {2 * k + 4, 3, true});
  CompensatedSum integral;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    integral.add(rule.weights[q] / kTwoPi * smoothed_kernel(pkg, w, lambda, PointX(rule.points[q]),
                                                            PointX(rule.points[q])).value);
  const Complex gamma = smoothed_trace(pkg, w, lambda).value;
  CHECK(std::abs(integral.value() / gamma - 1.0) < 1e-6);
}

TEST_CASE("linearity and translation covariance") {
  const auto m = curve();
  const Window a(Shape::bump, 0.0, 1.2), b(Shape::bump, 0.3, 0.9);
  const double lambda = 60.0;
  const int k = std::max(required_kmax(m, a, 70.0), required_kmax(m, b, 70.0));
  const auto pkg = spectral::eigendata(m, k);
  window::Combination combo;
  combo.add(Complex(2.0, 1.0), a);
  combo.add(Complex(-0.5, 0.0), b);
  const Complex lhs = smoothed_trace(pkg, combo, lambda).value;
  const Complex rhs = Complex(2.0, 1.0) * smoothed_trace(pkg, a, lambda).value -
                      0.5 * smoothed_trace(pkg, b, lambda).value;
  CHECK(std::abs(lhs - rhs) < 1e-9);
  // integer spectrum: a shift by 2 pi leaves e^{i lambda_j a} = 1
  const Complex base = smoothed_trace(pkg, a, lambda + 0.3).value;
  const Complex moved = smoothed_trace(pkg, a.shifted(kTwoPi), lambda + 0.3).value;
  CHECK(std::abs(moved - std::polar(1.0, -(lambda + 0.3) * kTwoPi) * base) < 1e-9);
}

TEST_CASE("scans near the fixed point") {
  const auto m = curve();
  const Window w(Shape::bump, kPi, 1.4);
  const int k = required_kmax(m, w, 130.0);
  const auto pkg = spectral::eigendata(m, k);
  const auto chart = geometry::heisenberg_chart(m, fixed_point(), kPi);
  auto unit = [](double) { return Complex(1.0, 0.0); };
  const auto at0 = scaled_diagonal_scan(pkg, w, chart, CVector::Zero(1), {80.0, 120.0}, unit);
  CHECK(at0.exact[0] == smoothed_kernel(pkg, w, 80.0, fixed_point(), fixed_point()).value);
  const CVector u = CVector::Constant(1, 0.7);
  const PointX p = chart.point(CVector(u / std::sqrt(100.0)));
  const PointX q = chart.point(1.3, CVector(u / std::sqrt(100.0)));
  CHECK(std::abs(smoothed_kernel(pkg, w, 100.0, p, p).value - smoothed_kernel(pkg, w, 100.0, q, q).value) < 1e-10);

  const auto zero = parity_split(pkg, w, chart, CVector::Zero(1), 100.0);
  CHECK(zero.odd == Complex(0.0, 0.0));
  const auto par = parity_split(pkg, w, chart, u, 100.0);
  CHECK(par.even + par.odd == par.plus);
  CHECK_THROWS_AS(scaled_diagonal_scan(pkg, w, chart, CVector::Zero(2), {100.0}, unit), Error);
}

TEST_CASE("grids") {
  const auto g = make_grid(100.0, 800.0, 4, true);
  CHECK(g[1] == doctest::Approx(200.0));
  CHECK(g.back() == 800.0);
  const auto l = make_grid(-200.0, -20.0, 10, false);
  CHECK(l[1] == doctest::Approx(-180.0));
  CHECK_THROWS_AS(make_grid(-1.0, 1.0, 3, true), Error);
  CHECK(make_grid(2.0, 3.0, 1, false) == std::vector<double>{2.0});
}
