#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "toeplab/common.hpp"
#include "toeplab/geometry.hpp"

// Degree-k holomorphic sections of O(k) on CP^d, realized as CR functions on
// S^{2d+1}, and the Toeplitz operator T_f = i (contact field) restricted to
// each degree.
namespace toeplab::spectral {

using geometry::PointX;
using geometry::ProjectiveModel;

// Total mass of X under the measure sigma / (2 pi); equals vol(M).
double volume_X(int d);

// binomial(k + d, d), exact.
std::uint64_t section_dimension(int d, int k);

// Monomial basis z^alpha, |alpha| = k, in lexicographic order (alpha_0 largest
// first) with log ||z^alpha||^2 = log(pi^d alpha! / (k + d)!).
struct SectionSpace {
  int d = 0;
  int k = 0;
  std::vector<std::vector<int>> basis;
  std::vector<double> log_norm2;

  std::size_t dimension() const { return basis.size(); }
  // Orthonormalized basis values z^alpha / ||z^alpha|| at x.
  CVector values(const PointX& x) const;
};

SectionSpace section_space(int d, int k);

// ||z^alpha||^2 for each basis element (closed form).
std::vector<double> monomial_norms(int d, int k);

// ||z^alpha||^2 by direct quadrature on the sphere, the oracle for the
// closed form.
double monomial_norm_quadrature(int d, const std::vector<int>& alpha);

struct MatrixAssembly {
  CMatrix matrix;            // in the orthonormalized monomial basis
  double gram_residual = 0;  // max |G - I| (quadrature route only)
  double hermitian_residual = 0;
};

// Matrix of i * contact_field acting on the basis, by sphere quadrature of
// <T e_beta, e_alpha>. Throws "quadrature underresolved" when the Gram
// identity fails to 1e-10.
MatrixAssembly toeplitz_matrix_quadrature(const ProjectiveModel& model, int k);

// Complex-linear matrix B with contact_field(x) = B x on the sphere, fitted
// from samples; throws when the field is not linear to 1e-10.
CMatrix contact_linear_part(const ProjectiveModel& model);

// Matrix of T_f from B: (T z^beta) = i sum_{i,l} beta_i B_il z^{beta - e_i + e_l}.
MatrixAssembly toeplitz_matrix_analytic(const ProjectiveModel& model, int k);

enum class Route { analytic, quadrature };

struct Block {
  int k = 0;
  std::vector<double> eigenvalues;  // ascending for dense blocks, basis order otherwise
  // Eigenvectors as columns over the monomial basis. Empty for blocks that were
  // already diagonal; their eigensections are the basis elements themselves.
  CMatrix eigenvectors;
  bool dense = false;
  double imaginary_residue = 0;
};

// lambda(alpha) = slope_w <alpha, w> + slope_k k + offset.
struct AffineLaw {
  double slope_w = 0, slope_k = 0, offset = 0, residual = 0;
};

struct Level {
  double lambda;
  std::uint64_t multiplicity;
};

struct BuildOptions {
  Route route = Route::analytic;
  bool keep_vectors = true;  // store eigenvectors of dense blocks
};

class SpectralPackage {
 public:
  SpectralPackage(ProjectiveModel model, int k_max, std::vector<Block> blocks, Route route);

  // One-eigenvalue package on the constant section, with no further spectrum.
  static SpectralPackage toy(double lambda);

  const ProjectiveModel& model() const { return model_; }
  int k_max() const { return k_max_; }
  Route route() const { return route_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(int k) const { return blocks_.at(k); }
  const SectionSpace& space(int k) const { return spaces_.at(k); }

  // Distinct eigenvalues with multiplicity, ascending.
  const std::vector<Level>& levels() const { return levels_; }
  std::vector<double> sorted_eigenvalues() const;
  std::uint64_t eigenvalue_count() const;

  const AffineLaw& affine_law() const { return law_; }

  // lambda_min(k) >= lower_slope * k + lower_offset for every degree k,
  // including degrees above k_max (read off the affine law).
  double lower_slope() const { return lower_slope_; }
  double lower_offset() const { return lower_offset_; }
  double lambda_min_bound(int k) const { return lower_slope_ * k + lower_offset_; }
  // Every eigenvalue below this value belongs to a cached block.
  double coverage_upper() const { return lambda_min_bound(k_max_ + 1); }

  // True when the cached blocks are the whole spectrum (toy packages).
  bool complete() const { return complete_; }

  // Eigensection j of block k evaluated at x.
  Complex eigensection(int k, std::size_t j, const PointX& x) const;

 private:
  ProjectiveModel model_;
  int k_max_;
  std::vector<Block> blocks_;
  Route route_;
  std::vector<SectionSpace> spaces_;
  std::vector<Level> levels_;
  AffineLaw law_;
  double lower_slope_ = 0, lower_offset_ = 0;
  bool complete_ = false;
};

// Fits the affine law over all blocks; residual is the max absolute deviation.
AffineLaw affine_law_fit(const ProjectiveModel& model, const std::vector<Block>& blocks);

// Diagonalizes every degree 0..k_max in parallel.
SpectralPackage eigendata(const ProjectiveModel& model, int k_max,
                          const BuildOptions& options = {});

// Value of sum_alpha c_alpha z^alpha / ||z^alpha|| at x.
Complex evaluate_section(const SpectralPackage& pkg, int k, const CVector& coeffs,
                         const PointX& x);

// Pi_k(x, x) = sum_j |Phi_j(x)|^2.
double szego_diagonal(const SpectralPackage& pkg, int k, const PointX& x);

}  // namespace toeplab::spectral
