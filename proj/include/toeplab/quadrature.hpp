#pragma once

#include <vector>

#include "toeplab/common.hpp"

namespace toeplab::quad {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Product rule on the standard simplex {t_i >= 0, sum t_i = 1} in R^{m+1},
// built from collapsed (Duffy) coordinates with Gauss-Legendre factors.
// Weights integrate against Lebesgue measure on the m-dimensional simplex
// (total mass 1/m!).
struct SimplexRule {
  int dim = 0;                            // m
  std::vector<std::vector<double>> points;  // each of length m + 1
  std::vector<double> weights;
};

// Exact for polynomials in t of total degree <= degree.
SimplexRule simplex_rule(int dim, int degree);

// Quadrature on the unit sphere S^{2n-1} in C^n parameterized by moment
// coordinates t_i = |z_i|^2 and phases theta_i. Weights integrate against the
// Euclidean surface measure (total 2 pi^n / (n-1)!).
struct SphereRule {
  int n = 0;
  std::vector<CVector> points;
  std::vector<double> weights;
};

struct SphereRuleOptions {
  int simplex_degree = 8;  // polynomial exactness in the moment variables
  int phases = 16;         // uniform phase points per coordinate
  // Drop the last phase and multiply by 2 pi. Valid only for integrands
  // invariant under z -> e^{i theta} z.
  bool reduce_global_phase = false;
};

SphereRule sphere_rule(int n, const SphereRuleOptions& options);

// Surface area of S^{2n-1}.
double sphere_area(int n);

}  // namespace toeplab::quad
