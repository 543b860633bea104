#include "toeplab/window.hpp"

#include <algorithm>
#include <boost/math/interpolators/quintic_hermite.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <tuple>

namespace toeplab::window {

namespace {

double bump_profile(double t) {
  const double q = 1.0 - t * t;
  return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
}

// phi_hat(sigma) = int_{-1}^{1} phi(t) cos(sigma t) dt for the unit bump phi.
// The trapezoidal rule is exact up to aliasing at sigma +- 2 pi / h for a
// compactly supported smooth profile, so h is chosen from the alias frequency.
struct BumpTable {
  static constexpr double kSigmaMax = 1500.0;
  static constexpr double kStep = 0.02;
  static constexpr double kAlias = 3500.0;

  std::vector<double> nodes_t, profile;
  double h = 0.0;
  std::vector<double> envelope;  // suffix max of |phi_hat| on the table grid
  double tail_a = 0.0, tail_b = 0.0;  // |phi_hat| <= exp(a - b sqrt(sigma)) beyond the table
  std::unique_ptr<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>> spline;

  BumpTable() {
    h = kTwoPi / (kSigmaMax + kAlias);
    const int half = static_cast<int>(std::ceil(1.0 / h));
    h = 1.0 / half;
    for (int j = -half + 1; j < half; ++j) {
      nodes_t.push_back(j * h);
      profile.push_back(bump_profile(j * h));
    }
    const int count = static_cast<int>(std::round(kSigmaMax / kStep)) + 1;
    std::vector<double> y(count), dy(count), d2y(count);
    for (int i = 0; i < count; ++i) {
      const auto [v, d1, d2] = direct(i * kStep);
      y[i] = v;
      dy[i] = d1;
      d2y[i] = d2;
    }
    envelope.assign(count, 0.0);
    double run = 0.0;
    for (int i = count - 1; i >= 0; --i) {
      run = std::max(run, std::abs(y[i]));
      envelope[i] = run;
    }
    fit_tail(y);
    spline = std::make_unique<
        boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>>(
        std::move(y), std::move(dy), std::move(d2y), 0.0, kStep);
  }

  // (phi_hat, phi_hat', phi_hat'') by the trapezoidal rule. Cosines come from a
  // rotation recurrence resynchronized every 256 steps.
  std::tuple<double, double, double> direct(double sigma) const {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    const Complex step = std::polar(1.0, sigma * h);
    Complex rot(1.0, 0.0);
    // nodes are symmetric; integrate t >= 0 and double (sine terms pair up too)
    const std::size_t mid = nodes_t.size() / 2;
    for (std::size_t j = mid, c = 0; j < nodes_t.size(); ++j, ++c) {
      if (c % 256 == 0) rot = std::polar(1.0, sigma * nodes_t[j]);
      const double t = nodes_t[j], p = profile[j];
      const double f = (j == mid) ? 0.5 : 1.0;
      s0 += f * p * rot.real();
      s1 -= f * t * p * rot.imag();
      s2 -= f * t * t * p * rot.real();
      rot *= step;
    }
    return {2.0 * h * s0, 2.0 * h * s1, 2.0 * h * s2};
  }

  // Least squares for log envelope ~ a - b sqrt(sigma) on the decaying part of
  // the table above the rounding floor, then a tenfold safety margin.
  void fit_tail(const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double sigma = i * kStep;
      if (sigma < 100.0 || envelope[i] < 1e-13) continue;
      const double x = std::sqrt(sigma), l = std::log(envelope[i]);
      sx += x, sy += l, sxx += x * x, sxy += x * l, ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    tail_b = -slope;
    tail_a = (sy - slope * sx) / n + std::log(10.0);
    // the bound must also dominate the last tabulated envelope values
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double sigma = i * kStep;
      if (sigma < 100.0 || envelope[i] < 1e-15) continue;
      tail_a = std::max(tail_a, std::log(envelope[i]) + tail_b * std::sqrt(sigma));
    }
  }

  // Zero beyond the table, where |phi_hat| is below the tail bound.
  double value(double sigma) const {
    sigma = std::abs(sigma);
    return sigma <= kSigmaMax ? (*spline)(sigma) : 0.0;
  }

  double bound(double sigma) const {
    sigma = std::abs(sigma);
    if (sigma <= kSigmaMax) {
      const auto i = static_cast<std::size_t>(std::floor(sigma / kStep));
      // grid maxima miss the peaks between nodes by O(kStep^2); pad by 2x
      return 2.0 * envelope[std::min(i, envelope.size() - 1)] + 1e-16;
    }
    return std::exp(tail_a - tail_b * std::sqrt(sigma));
  }

};

const BumpTable& bump_table() {
  static const BumpTable table;
  return table;
}

}  // namespace

Shape parse_shape(const std::string& name) {
  if (name == "bump") return Shape::bump;
  if (name == "gaussian") return Shape::gaussian;
  throw Error("unknown window shape '" + name + "' (expected bump or gaussian)");
}

std::string shape_name(Shape s) { return s == Shape::bump ? "bump" : "gaussian"; }

Window::Window(Shape shape, double tau0, double eps) : shape_(shape), tau0_(tau0), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error("window: eps must be positive");
  if (!std::isfinite(tau0)) throw Error("window: tau0 must be finite");
}

double Window::chi(double tau) const {
  const double t = (tau - tau0_) / eps_;
  return shape_ == Shape::bump ? bump_profile(t) : std::exp(-0.5 * t * t);
}

double Window::centered(double s) const {
  if (shape_ == Shape::gaussian)
    return eps_ * std::sqrt(kTwoPi) * std::exp(-0.5 * eps_ * eps_ * s * s);
  return eps_ * bump_table().value(eps_ * s);
}

double Window::centered_direct(double s) const {
  // panels of about one oscillation each keep the adaptive rule well posed
  const double half = shape_ == Shape::gaussian ? 40.0 * eps_ : eps_;
  const int panels = std::max(8, static_cast<int>(std::ceil(std::abs(s) * half / 2.0)));
  auto integrand = [&](double tau) { return chi(tau + tau0_) * std::cos(s * tau); };
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -half + 2.0 * half * p / panels;
    const double b = -half + 2.0 * half * (p + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 8, 1e-14);
  }
  return total;
}

Complex Window::transform(double s) const { return std::polar(centered(s), -s * tau0_); }

double Window::envelope(double s) const {
  s = std::abs(s);
  if (shape_ == Shape::gaussian) return centered(s);
  return eps_ * bump_table().bound(eps_ * s);
}

double Window::cutoff() const {
  if (shape_ == Shape::gaussian) return std::numeric_limits<double>::infinity();
  return BumpTable::kSigmaMax / eps_;
}

Complex Combination::transform(double s) const {
  Complex v = 0.0;
  for (const auto& [c, w] : terms_) v += c * w.transform(s);
  return v;
}

double Combination::envelope(double s) const {
  double v = 0.0;
  for (const auto& [c, w] : terms_) v += std::abs(c) * w.envelope(s);
  return v;
}

double Combination::cutoff() const {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& [coef, w] : terms_) c = std::min(c, w.cutoff());
  return c;
}

double bump_table_sigma_max() { return BumpTable::kSigmaMax; }

}  // namespace toeplab::window
