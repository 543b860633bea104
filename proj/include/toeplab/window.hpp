#pragma once

#include <memory>
#include <string>
#include <vector>

#include "toeplab/common.hpp"

// Cutoff functions chi in tau and their transforms chi_hat(s) = int chi(tau) e^{-i s tau} d tau.
namespace toeplab::window {

// Anything that can weight a spectrum: a value chi_hat(s) and a bound
// envelope(s) >= sup_{|s'| >= |s|} |chi_hat(s')| used for tail accounting.
class Multiplier {
 public:
  virtual ~Multiplier() = default;
  virtual Complex transform(double s) const = 0;
  virtual double envelope(double s) const = 0;
  // transform(s) is returned as exactly 0 for |s| > cutoff(); the true value
  // is then bounded by envelope(s), which callers add to their error bound.
  virtual double cutoff() const = 0;
};

enum class Shape { bump, gaussian };

Shape parse_shape(const std::string& name);
std::string shape_name(Shape s);

// bump:     chi(tau) = exp(1 - 1 / (1 - t^2)) for |t| < 1, t = (tau - tau0) / eps
// gaussian: chi(tau) = exp(-t^2 / 2)
// Both have chi(tau0) = 1.
class Window : public Multiplier {
 public:
  Window(Shape shape, double tau0, double eps);

  Shape shape() const { return shape_; }
  double tau0() const { return tau0_; }
  double eps() const { return eps_; }

  double chi(double tau) const;
  double chi_center() const { return 1.0; }
  double integral() const { return centered(0.0); }

  // e^{-i s tau0} times the transform of the centred window.
  Complex transform(double s) const override;
  // Transform of the window centred at 0 (real and even), from the cached table.
  double centered(double s) const;
  // Same quantity by adaptive Gauss-Kronrod quadrature, independent of the table.
  double centered_direct(double s) const;
  double envelope(double s) const override;
  double cutoff() const override;

  Window shifted(double a) const { return Window(shape_, tau0_ + a, eps_); }

 private:
  Shape shape_;
  double tau0_, eps_;
};

// sum_i c_i * window_i, for checking linearity of the spectral sums.
class Combination : public Multiplier {
 public:
  void add(Complex c, Window w) { terms_.emplace_back(c, std::move(w)); }
  Complex transform(double s) const override;
  double envelope(double s) const override;
  double cutoff() const override;

 private:
  std::vector<std::pair<Complex, Window>> terms_;
};

// Boundaries of the tabulated region of the normalized bump transform
// phi_hat(sigma), sigma = eps * s.
double bump_table_sigma_max();

}  // namespace toeplab::window
