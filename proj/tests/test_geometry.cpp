#include "doctest.h"

#include <random>

#include "toeplab/geometry.hpp"

using namespace toeplab;
using namespace toeplab::geometry;

namespace {

ProjectiveModel curve() { return calibrated(ProjectiveModel(1, {1, 2})); }

PointX random_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector z(n);
  for (int i = 0; i < n; ++i) z[i] = Complex(g(rng), g(rng));
  return PointX::normalized(z);
}

PointX basis_point(int n, int i) {
  CVector z = CVector::Zero(n);
  z[i] = 1.0;
  return PointX(z);
}

}  // namespace

TEST_CASE("model construction rejects bad input") {
  CHECK_THROWS_AS(ProjectiveModel(1, {1, 2, 3}), Error);
  CHECK_THROWS_AS(ProjectiveModel(0, {1}), Error);
  CHECK_THROWS_AS(ProjectiveModel(1, {1, 2}).calibration(), UncalibratedModel);
  CHECK_THROWS_AS(PointX(CVector::Constant(2, 1.0)), Error);
}

TEST_CASE("calibration of the lifted flow") {
  const auto m = curve();
  CHECK(m.calibration().lift_sign == -1);
  CHECK(m.calibration().lift_shift == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(m.calibration().residual < 1e-8);
  CHECK(m.phase_rate(1) == doctest::Approx(-2.0));

  // equal weights still calibrate: f is constant and the flow is a pure phase
  const auto flat = calibrated(ProjectiveModel(2, {3, 3, 3}));
  CHECK(flat.calibration().lift_sign == -1);
  CHECK(flat.calibration().lift_shift == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("contact field is -i W z and the flow integrates it") {
  const auto m = curve();
  std::mt19937_64 rng(1);
  for (int s = 0; s < 5; ++s) {
    const PointX x = random_point(2, rng);
    const CVector v = contact_field(m, x);
    CHECK(std::abs(v[0] - (-kI * x.z()[0])) < 1e-10);
    CHECK(std::abs(v[1] - (-2.0 * kI * x.z()[1])) < 1e-10);
    const PointX a = flow_X(m, 0.7, x);
    const PointX b = integrate_contact_field(m, x, 0.7, 700);
    CHECK((a.z() - b.z()).norm() < 1e-9);
    // the horizontal part is orthogonal to the fibre
    CHECK(std::abs(x.z().dot(hamiltonian_field_horizontal(m, x))) < 1e-10);
  }
}

TEST_CASE("hamiltonian, forms and distances") {
  const auto m = curve();
  CHECK(hamiltonian(m, basis_point(2, 1)) == doctest::Approx(2.0));
  CHECK(hamiltonian(m, basis_point(2, 0)) == doctest::Approx(1.0));
  const PointX x = PointX::normalized(CVector::Constant(2, Complex(1.0, 1.0)));
  CHECK(connection_form(x, kI * x.z()) == doctest::Approx(1.0));
  CVector u(2), v(2);
  u << 1.0, 0.0;
  v << kI, 0.0;
  CHECK(kahler_form(u, v) == doctest::Approx(1.0));
  CHECK(kahler_form(v, u) == doctest::Approx(-1.0));
  const PointM a = project(basis_point(2, 0)), b = project(basis_point(2, 1));
  CHECK(dist_M(a, b) == doctest::Approx(kPi / 2));
  CHECK(dist_M(a, project(basis_point(2, 0).rotated(1.1))) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dist_X(basis_point(2, 0), basis_point(2, 0).rotated(0.5)) == doctest::Approx(0.5));
}

TEST_CASE("periods and gaps of w = (1, 2)") {
  const auto m = curve();
  CHECK(periods(m, 0.5).empty());
  const auto ps = periods(m, 7.0);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].tau0 == doctest::Approx(kPi));
  CHECK(ps[0].isolated);
  CHECK(ps[0].gap == doctest::Approx(kPi));
  CHECK(ps[1].tau0 == doctest::Approx(2 * kPi));
  CHECK(period_gap(m, kPi) == doctest::Approx(kPi));
  CHECK(period_gap(m, 0.0) == doctest::Approx(kPi));
}

TEST_CASE("fixed components") {
  const auto m = curve();
  const auto comps = fixed_components(m, kPi);
  REQUIRE(!comps.empty());
  const auto& c = comps.front();
  CHECK(c.lifts_to_x);
  CHECK(c.index_set == std::vector<int>{1});
  CHECK(c.f_dim == 0);
  CHECK(std::abs(c.c_value - Complex(2.0, 0.0)) < 1e-12);
  CHECK(c.f_min == doctest::Approx(2.0));
  // [1:0] is fixed on M but its fibre turns by -1
  REQUIRE(comps.size() == 2);
  CHECK_FALSE(comps[1].lifts_to_x);
  CHECK(x_components(m, kPi).size() == 1);
  CHECK_THROWS_WITH_AS(fixed_components(m, 1.0), doctest::Contains("not a period"), Error);

  const auto whole = x_components(m, 0.0);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].f_dim == 1);
  CHECK(whole[0].f_min == doctest::Approx(1.0));
  CHECK(whole[0].f_max == doctest::Approx(2.0));

  const auto plane = calibrated(ProjectiveModel(2, {2, 4, 1}));
  const auto line = x_components(plane, kPi);
  REQUIRE(line.size() == 1);
  CHECK(line[0].f_dim == 1);
  CHECK(std::abs(line[0].c_value - Complex(2.0, 0.0)) < 1e-12);
}

TEST_CASE("Heisenberg chart") {
  const auto m = curve();
  const PointX x0 = basis_point(2, 1);
  CHECK_THROWS_WITH_AS(heisenberg_chart(m, basis_point(2, 0), kPi), doctest::Contains("x0 not on fixed locus"),
                       Error);
  const auto chart = heisenberg_chart(m, x0, kPi);
  CHECK(chart.tangent_dim == 0);
  CHECK(chart.normal_dim() == 1);
  CHECK(std::abs(chart.frame.col(0).dot(x0.z())) < 1e-14);
  const CVector v = CVector::Constant(1, Complex(0.2, -0.1));
  const PointX p = chart.point(v);
  const PointX q = chart.point(0.8, v);
  CHECK((q.z() - p.rotated(0.8).z()).norm() < 1e-14);
  CHECK((chart.coordinates(project(p)) - v).norm() < 1e-12);
  CHECK(dist_M(project(x0), project(p)) == doctest::Approx(v.norm()).epsilon(1e-12));
  CHECK((chart.normal_point(v).z() - p.z()).norm() < 1e-14);
}

TEST_CASE("normal differential of the flow") {
  const auto m = curve();
  const auto comp = x_components(m, kPi).front();
  const CMatrix A = flow_differential_normal(m, comp, basis_point(2, 1));
  REQUIRE(A.rows() == 1);
  CHECK(std::abs(A(0, 0) - Complex(-1.0, 0.0)) < 1e-8);

  const auto m3 = calibrated(ProjectiveModel(1, {1, 3}));
  const auto c3 = x_components(m3, 2 * kPi / 3).front();
  const CMatrix A3 = flow_differential_normal(m3, c3, component_point(m3, c3));
  CHECK(std::abs(std::abs(A3(0, 0)) - 1.0) < 1e-8);
  CHECK(std::abs((1.0 - A3(0, 0)) - c3.c_value) < 1e-8);
}

TEST_CASE("Fubini-Study volume") {
  CHECK(fs_volume(1) == doctest::Approx(kPi));
  CHECK(fs_volume(2) == doctest::Approx(kPi * kPi / 2));
  CVector z(1);
  z << Complex(0.3, 0.4);
  CHECK(fs_volume_density(1, z) == doctest::Approx(1.0 / (1.25 * 1.25)).epsilon(1e-8));
  CVector w(2);
  w << Complex(0.3, 0.1), Complex(-0.2, 0.5);
  const double r2 = w.squaredNorm();
  CHECK(fs_volume_density(2, w) == doctest::Approx(std::pow(1.0 + r2, -3.0)).epsilon(1e-8));
}
