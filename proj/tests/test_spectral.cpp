#include "doctest.h"

#include <random>

#include "toeplab/geometry.hpp"
#include "toeplab/spectral.hpp"

using namespace toeplab;
using namespace toeplab::spectral;
using geometry::PointX;
using geometry::ProjectiveModel;

namespace {

ProjectiveModel curve() { return geometry::calibrated(ProjectiveModel(1, {1, 2})); }

}  // namespace

TEST_CASE("dimensions and volume") {
  CHECK(section_dimension(1, 10) == 11);
  CHECK(section_dimension(2, 3) == 10);
  CHECK(section_dimension(3, 400) == 10'827'401);
  CHECK(volume_X(1) == doctest::Approx(kPi));
  CHECK(volume_X(2) == doctest::Approx(kPi * kPi / 2));
  const auto s = section_space(2, 4);
  CHECK(s.dimension() == 15);
  CHECK(s.basis.front() == std::vector<int>{4, 0, 0});
  CHECK(s.basis.back() == std::vector<int>{0, 0, 4});
}

TEST_CASE("monomial norms against sphere quadrature") {
  const auto d2 = monomial_norms(2, 3);
  const auto space = section_space(2, 3);
  for (std::size_t i = 0; i < space.dimension(); ++i)
    CHECK(monomial_norm_quadrature(2, space.basis[i]) == doctest::Approx(d2[i]).epsilon(1e-12));
  // ||1||^2 = vol
  CHECK(monomial_norms(1, 0)[0] == doctest::Approx(kPi));
}

TEST_CASE("Toeplitz matrices: quadrature and analytic routes agree") {
  const auto m = curve();
  for (int k : {0, 1, 5, 12}) {
    const auto q = toeplitz_matrix_quadrature(m, k);
    const auto a = toeplitz_matrix_analytic(m, k);
    CHECK((q.matrix - a.matrix).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(q.gram_residual < 1e-10);
    CHECK(q.hermitian_residual < 1e-10);
    // z^alpha has eigenvalue <alpha, w>
    const auto space = section_space(1, k);
    for (std::size_t i = 0; i < space.dimension(); ++i)
      CHECK(a.matrix(i, i).real() == doctest::Approx(space.basis[i][0] + 2.0 * space.basis[i][1]));
  }
  const CMatrix B = contact_linear_part(m);
  CHECK(std::abs(B(0, 0) - Complex(0.0, -1.0)) < 1e-10);
  CHECK(std::abs(B(1, 1) - Complex(0.0, -2.0)) < 1e-10);
  CHECK(std::abs(B(0, 1)) < 1e-10);
}

TEST_CASE("eigendata and affine law") {
  const auto m = curve();
  const auto pkg = eigendata(m, 30);
  CHECK(pkg.k_max() == 30);
  CHECK(pkg.eigenvalue_count() == 31 * 32 / 2);
  const auto& law = pkg.affine_law();
  CHECK(law.slope_w == doctest::Approx(1.0));
  CHECK(std::abs(law.slope_k) < 1e-10);
  CHECK(std::abs(law.offset) < 1e-10);
  CHECK(law.residual < 1e-10);
  CHECK(pkg.block(0).eigenvalues[0] == 0.0);
  // lambda_alpha = alpha_0 + 2 alpha_1 with multiplicity floor(n/2) + 1 for n <= k_max
  for (const auto& l : pkg.levels()) {
    if (l.lambda > 30.5) break;
    const int n = static_cast<int>(std::lround(l.lambda));
    CHECK(l.multiplicity == static_cast<std::uint64_t>(n / 2 + 1));
  }
  CHECK(pkg.lambda_min_bound(31) <= 31.0 + 1e-9);
  CHECK(pkg.coverage_upper() == doctest::Approx(31.0));

  const auto sorted = pkg.sorted_eigenvalues();
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));

  const auto qpkg = eigendata(m, 8, {Route::quadrature, true});
  for (int k = 0; k <= 8; ++k)
    for (std::size_t j = 0; j < qpkg.block(k).eigenvalues.size(); ++j)
      CHECK(qpkg.block(k).eigenvalues[j] == doctest::Approx(pkg.block(k).eigenvalues[j]).epsilon(1e-10));
}

TEST_CASE("Szego diagonal is constant and eigensections are orthonormal") {
  const auto m = geometry::calibrated(ProjectiveModel(2, {1, 2, 3}));
  const auto pkg = eigendata(m, 6);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int s = 0; s < 10; ++s) {
    CVector z(3);
    for (int i = 0; i < 3; ++i) z[i] = Complex(g(rng), g(rng));
    const PointX x = PointX::normalized(z);
    CHECK(szego_diagonal(pkg, 6, x) == doctest::Approx(28.0 / volume_X(2)).epsilon(1e-10));
    // circle action multiplies degree-k sections by e^{i k theta}
    const Complex a = pkg.eigensection(6, 4, x), b = pkg.eigensection(6, 4, x.rotated(0.3));
    CHECK(std::abs(b - std::polar(1.0, 6 * 0.3) * a) < 1e-12);
  }
  CVector coeffs = CVector::Zero(section_dimension(2, 1));
  coeffs[0] = 1.0;
  CVector z(3);
  z << 1.0, 0.0, 0.0;
  CHECK(std::abs(evaluate_section(pkg, 1, coeffs, PointX(z))) ==
        doctest::Approx(1.0 / std::sqrt(monomial_norms(2, 1)[0])));
}

TEST_CASE("toy package") {
  const auto toy = SpectralPackage::toy(5.0);
  CHECK(toy.complete());
  CHECK(toy.eigenvalue_count() == 1);
  CHECK(toy.levels().at(0).lambda == 5.0);
}
