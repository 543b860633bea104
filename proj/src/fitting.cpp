#include "toeplab/fitting.hpp"

#include <cmath>

namespace toeplab::fit {

PowerLaw power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("power_law: need at least two points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0)) throw Error("power_law: nonpositive data");
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  PowerLaw out;
  out.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - out.exponent * sx) / n;
  out.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(std::abs(y[i])) - (intercept + out.exponent * std::log(x[i]));
    ss += r * r;
  }
  out.residual = std::sqrt(ss / n);
  return out;
}

PowerLaw power_law_window(const std::vector<double>& x, const std::vector<double>& y,
                          double lo, double hi) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= lo && x[i] <= hi) xs.push_back(x[i]), ys.push_back(y[i]);
  return power_law(xs, ys);
}

Expansion ratio_expansion(const std::vector<double>& x, const std::vector<Complex>& y,
                          const std::vector<double>& powers) {
  const std::size_t n = x.size(), m = powers.size();
  if (y.size() != n) throw Error("ratio_expansion: size mismatch");
  if (m == 0 || n < 2 * m) throw Error("ill-conditioned fit: fewer than two points per coefficient");
  // columns are scaled to unit norm before the solve
  CMatrix a(n, m);
  CVector b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) a(i, j) = std::pow(x[i], -powers[j]);
    b[i] = y[i] - 1.0;
  }
  RVector scale(m);
  for (std::size_t j = 0; j < m; ++j) {
    scale[j] = a.col(j).norm();
    a.col(j) /= scale[j];
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Expansion out;
  out.powers = powers;
  out.condition = sv[0] / sv[sv.size() - 1];
  if (!(out.condition < 1e12)) throw Error("ill-conditioned fit: condition number " + std::to_string(out.condition));
  const CVector c = svd.solve(b);
  for (std::size_t j = 0; j < m; ++j) out.coefficients.push_back(c[j] / scale[j]);
  out.residual = (a * c - b).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace toeplab::fit
