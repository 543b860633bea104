#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace toeplab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

// Base of every error raised by the library. The message is the user-facing
// diagnostic; subclasses exist where callers need to branch on the kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UncalibratedModel : public Error {
 public:
  UncalibratedModel() : Error("uncalibrated model") {}
};

class NotClean : public Error {
 public:
  using Error::Error;
};

class InsufficientCoverage : public Error {
 public:
  using Error::Error;
};

class CacheCorrupt : public Error {
 public:
  using Error::Error;
};

// Neumaier-compensated complex accumulator. Summation order is fixed by the
// caller, so results are reproducible bit for bit.
class CompensatedSum {
 public:
  void add(Complex x) {
    add_part(re_, cre_, x.real());
    add_part(im_, cim_, x.imag());
  }
  Complex value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double re_ = 0.0, cre_ = 0.0, im_ = 0.0, cim_ = 0.0;
};

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Each index
// is handled by exactly one call; callers write to disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace toeplab
