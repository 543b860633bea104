#include "toeplab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "toeplab/quadrature.hpp"

namespace toeplab::spectral {

double volume_X(int d) { return geometry::fs_volume(d); }

std::uint64_t section_dimension(int d, int k) {
  if (d < 0 || k < 0) throw Error("section_dimension: negative argument");
  std::uint64_t r = 1;
  for (int i = 1; i <= d; ++i) r = r * static_cast<std::uint64_t>(k + i) / i;
  return r;
}

namespace {

void enumerate(int n, int remaining, int pos, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    cur[pos] = a;
    enumerate(n, remaining - a, pos + 1, cur, out);
  }
}

double log_norm2_closed(int d, const std::vector<int>& alpha) {
  int k = 0;
  double s = d * std::log(kPi);
  for (int a : alpha) {
    s += std::lgamma(a + 1.0);
    k += a;
  }
  return s - std::lgamma(k + d + 1.0);
}

}  // namespace

SectionSpace section_space(int d, int k) {
  if (k < 0) throw Error("section_space: negative degree");
  SectionSpace s;
  s.d = d;
  s.k = k;
  std::vector<int> cur(d + 1, 0);
  enumerate(d + 1, k, 0, cur, s.basis);
  s.log_norm2.reserve(s.basis.size());
  for (const auto& a : s.basis) s.log_norm2.push_back(log_norm2_closed(d, a));
  return s;
}

CVector SectionSpace::values(const PointX& x) const {
  const int n = d + 1;
  std::vector<double> logabs(n), phase(n);
  std::vector<bool> zero(n);
  for (int i = 0; i < n; ++i) {
    const double m = std::abs(x.z()[i]);
    zero[i] = m == 0.0;
    logabs[i] = zero[i] ? 0.0 : std::log(m);
    phase[i] = std::arg(x.z()[i]);
  }
  CVector out(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    double lm = -0.5 * log_norm2[j], ph = 0.0;
    bool vanishes = false;
    for (int i = 0; i < n; ++i) {
      const int a = basis[j][i];
      if (a == 0) continue;
      if (zero[i]) {
        vanishes = true;
        break;
      }
      lm += a * logabs[i];
      ph += a * phase[i];
    }
    out[j] = vanishes ? Complex(0.0) : std::polar(std::exp(lm), ph);
  }
  return out;
}

std::vector<double> monomial_norms(int d, int k) {
  const SectionSpace s = section_space(d, k);
  std::vector<double> out;
  out.reserve(s.dimension());
  for (double l : s.log_norm2) out.push_back(std::exp(l));
  return out;
}

double monomial_norm_quadrature(int d, const std::vector<int>& alpha) {
  int k = 0;
  for (int a : alpha) k += a;
  // |z^alpha|^2 is torus invariant, so every phase integrates to 2 pi
  const int n = d + 1;
  const quad::SimplexRule simplex = quad::simplex_rule(d, k);
  const double scale = std::pow(2.0, 1 - n) * std::pow(kTwoPi, n);
  double s = 0.0;
  for (std::size_t q = 0; q < simplex.points.size(); ++q) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= std::pow(simplex.points[q][i], alpha[i]);
    s += simplex.weights[q] * v;
  }
  return s * scale / kTwoPi;
}

namespace {

// i * derivative of each basis CR function along the tangent vector field at x.
CVector apply_field(const SectionSpace& space, const PointX& x, const CVector& field,
                    const CVector& values) {
  const int n = space.d + 1;
  CVector ratio(n);
  for (int i = 0; i < n; ++i) ratio[i] = field[i] / x.z()[i];
  CVector out(space.dimension());
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    Complex s = 0.0;
    for (int i = 0; i < n; ++i) s += static_cast<double>(space.basis[j][i]) * ratio[i];
    out[j] = kI * s * values[j];
  }
  return out;
}

double hermitian_residual(const CMatrix& t) { return (t - t.adjoint()).cwiseAbs().maxCoeff(); }

std::size_t basis_index(const std::map<std::vector<int>, std::size_t>& index,
                        const std::vector<int>& alpha) {
  return index.at(alpha);
}

}  // namespace

MatrixAssembly toeplitz_matrix_quadrature(const ProjectiveModel& model, int k) {
  const SectionSpace space = section_space(model.d(), k);
  const std::size_t dim = space.dimension();
  quad::SphereRuleOptions opts;
  opts.simplex_degree = k + 2;
  opts.phases = 2 * k + 3;
  opts.reduce_global_phase = true;  // both integrands have degree (k, k) in (z, zbar)
  const quad::SphereRule rule = quad::sphere_rule(model.n(), opts);

  CMatrix gram = CMatrix::Zero(dim, dim);
  CMatrix t = CMatrix::Zero(dim, dim);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const PointX x(rule.points[q]);
    const CVector e = space.values(x);
    const CVector te = apply_field(space, x, geometry::contact_field(model, x), e);
    const double w = rule.weights[q] / kTwoPi;
    gram.noalias() += w * e.conjugate() * e.transpose();
    t.noalias() += w * e.conjugate() * te.transpose();
  }
  MatrixAssembly out;
  out.gram_residual = (gram - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (out.gram_residual > 1e-10)
    throw Error("quadrature underresolved: Gram residual " +
                std::to_string(out.gram_residual) + " at k = " + std::to_string(k));
  out.hermitian_residual = hermitian_residual(t);
  out.matrix = std::move(t);
  return out;
}

CMatrix contact_linear_part(const ProjectiveModel& model) {
  const int n = model.n();
  auto sample = [n](int j, double spread) {
    CVector z(n);
    for (int i = 0; i < n; ++i)
      z[i] = (i == j ? 1.0 : spread) * std::polar(1.0, 0.37 * (i + 1) * (j + 2));
    return PointX::normalized(z);
  };
  CMatrix xs(n, n), vs(n, n);
  for (int j = 0; j < n; ++j) {
    const PointX x = sample(j, 0.3);
    xs.col(j) = x.z();
    vs.col(j) = geometry::contact_field(model, x);
  }
  const CMatrix b = vs * xs.inverse();
  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    const PointX x = sample(j, 0.8);
    residual = std::max(residual, (geometry::contact_field(model, x) - b * x.z()).norm());
  }
  if (residual > 1e-10)
    throw Error("contact field is not linear in z (residual " + std::to_string(residual) + ")");
  return b;
}

MatrixAssembly toeplitz_matrix_analytic(const ProjectiveModel& model, int k) {
  const SectionSpace space = section_space(model.d(), k);
  const CMatrix b = contact_linear_part(model);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t j = 0; j < space.dimension(); ++j) index[space.basis[j]] = j;
  const int n = model.n();
  CMatrix t = CMatrix::Zero(space.dimension(), space.dimension());
  for (std::size_t col = 0; col < space.dimension(); ++col) {
    const auto& beta = space.basis[col];
    for (int i = 0; i < n; ++i) {
      if (beta[i] == 0) continue;
      for (int l = 0; l < n; ++l) {
        if (b(i, l) == 0.0) continue;
        std::vector<int> alpha = beta;
        --alpha[i];
        ++alpha[l];
        const std::size_t row = basis_index(index, alpha);
        t(row, col) += kI * static_cast<double>(beta[i]) * b(i, l) *
                       std::exp(0.5 * (space.log_norm2[row] - space.log_norm2[col]));
      }
    }
  }
  MatrixAssembly out;
  out.hermitian_residual = hermitian_residual(t);
  out.matrix = std::move(t);
  return out;
}

namespace {

bool is_diagonal(const CMatrix& b, double tol) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      if (i != j && std::abs(b(i, j)) > tol) return false;
  return true;
}

Block diagonal_block(int k, const CMatrix& t) {
  Block blk;
  blk.k = k;
  blk.eigenvalues.resize(t.rows());
  for (int j = 0; j < t.rows(); ++j) {
    blk.eigenvalues[j] = t(j, j).real();
    blk.imaginary_residue = std::max(blk.imaginary_residue, std::abs(t(j, j).imag()));
  }
  return blk;
}

Block diagonalize(int k, const CMatrix& t, double herm_residual, bool keep_vectors) {
  if (herm_residual > 1e-9)
    throw Error("Toeplitz block " + std::to_string(k) + " is not Hermitian (residual " +
                std::to_string(herm_residual) + ")");
  if (is_diagonal(t, 1e-10)) {
    Block blk = diagonal_block(k, t);
    blk.imaginary_residue = std::max(blk.imaginary_residue, herm_residual);
    return blk;
  }
  const CMatrix sym = 0.5 * (t + t.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error("eigensolver failed at k = " + std::to_string(k));
  Block blk;
  blk.k = k;
  blk.dense = true;
  blk.imaginary_residue = herm_residual;
  blk.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  if (keep_vectors) blk.eigenvectors = solver.eigenvectors();
  return blk;
}

}  // namespace

AffineLaw affine_law_fit(const ProjectiveModel& model, const std::vector<Block>& blocks) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  std::vector<std::pair<Eigen::Vector3d, double>> rows;
  for (const Block& blk : blocks) {
    const SectionSpace space = section_space(model.d(), blk.k);
    for (std::size_t j = 0; j < blk.eigenvalues.size(); ++j) {
      // dense blocks pair each eigenvalue with its dominant monomial
      std::size_t a = j;
      if (blk.dense && blk.eigenvectors.size() > 0)
        blk.eigenvectors.col(j).cwiseAbs().maxCoeff(&a);
      double aw = 0.0;
      for (int i = 0; i < model.n(); ++i) aw += space.basis[a][i] * model.weights()[i];
      const Eigen::Vector3d row(aw, blk.k, 1.0);
      ata += row * row.transpose();
      atb += row * blk.eigenvalues[j];
      rows.emplace_back(row, blk.eigenvalues[j]);
    }
  }
  const Eigen::Vector3d c = ata.completeOrthogonalDecomposition().solve(atb);
  AffineLaw law{c[0], c[1], c[2], 0.0};
  for (const auto& [row, lambda] : rows)
    law.residual = std::max(law.residual, std::abs(row.dot(c) - lambda));
  return law;
}

SpectralPackage::SpectralPackage(ProjectiveModel model, int k_max, std::vector<Block> blocks,
                                 Route route)
    : model_(std::move(model)), k_max_(k_max), blocks_(std::move(blocks)), route_(route) {
  if (static_cast<int>(blocks_.size()) != k_max_ + 1)
    throw Error("SpectralPackage: expected one block per degree 0..k_max");
  spaces_.reserve(blocks_.size());
  std::vector<double> all;
  for (int k = 0; k <= k_max_; ++k) {
    spaces_.push_back(section_space(model_.d(), k));
    if (blocks_[k].eigenvalues.size() != spaces_.back().dimension())
      throw Error("SpectralPackage: block size mismatch at k = " + std::to_string(k));
    all.insert(all.end(), blocks_[k].eigenvalues.begin(), blocks_[k].eigenvalues.end());
  }
  std::sort(all.begin(), all.end());
  for (double l : all) {
    if (!levels_.empty() && std::abs(l - levels_.back().lambda) <= 1e-9 * std::max(1.0, std::abs(l)))
      ++levels_.back().multiplicity;
    else
      levels_.push_back({l, 1});
  }
  law_ = affine_law_fit(model_, blocks_);
  const double wmin = model_.min_weight(), wmax = model_.max_weight();
  lower_slope_ = (law_.slope_w >= 0 ? law_.slope_w * wmin : law_.slope_w * wmax) + law_.slope_k;
  lower_offset_ = law_.offset - law_.residual - 1e-9;
  if (k_max_ < 1) lower_slope_ = 0.0;
}

SpectralPackage SpectralPackage::toy(double lambda) {
  Block blk;
  blk.k = 0;
  blk.eigenvalues = {lambda};
  SpectralPackage pkg(ProjectiveModel(1, {1, 1}), 0, {blk}, Route::analytic);
  pkg.complete_ = true;
  return pkg;
}

std::vector<double> SpectralPackage::sorted_eigenvalues() const {
  std::vector<double> out;
  for (const Level& l : levels_) out.insert(out.end(), l.multiplicity, l.lambda);
  return out;
}

std::uint64_t SpectralPackage::eigenvalue_count() const {
  std::uint64_t s = 0;
  for (const Level& l : levels_) s += l.multiplicity;
  return s;
}

Complex SpectralPackage::eigensection(int k, std::size_t j, const PointX& x) const {
  const Block& blk = block(k);
  const CVector e = space(k).values(x);
  if (!blk.dense) return e[j];
  if (blk.eigenvectors.size() == 0) throw Error("eigenvectors were not kept for block " + std::to_string(k));
  return (blk.eigenvectors.col(j).transpose() * e)(0);
}

SpectralPackage eigendata(const ProjectiveModel& model, int k_max, const BuildOptions& options) {
  if (k_max < 0) throw Error("eigendata: k_max must be nonnegative");
  std::vector<Block> blocks(k_max + 1);
  if (options.route == Route::analytic) {
    const CMatrix b = contact_linear_part(model);
    if (is_diagonal(b, 1e-12)) {
      // each monomial is an eigensection: lambda = Re(i sum_i alpha_i B_ii)
      parallel_for(blocks.size(), [&](std::size_t k) {
        const SectionSpace space = section_space(model.d(), static_cast<int>(k));
        Block blk;
        blk.k = static_cast<int>(k);
        blk.eigenvalues.resize(space.dimension());
        for (std::size_t j = 0; j < space.dimension(); ++j) {
          Complex s = 0.0;
          for (int i = 0; i < model.n(); ++i) s += static_cast<double>(space.basis[j][i]) * b(i, i);
          const Complex lambda = kI * s;
          blk.eigenvalues[j] = lambda.real();
          blk.imaginary_residue = std::max(blk.imaginary_residue, std::abs(lambda.imag()));
        }
        if (blk.imaginary_residue > 1e-9) throw Error("non-Hermitian diagonal block");
        blocks[k] = std::move(blk);
      });
      return SpectralPackage(model, k_max, std::move(blocks), options.route);
    }
  }
  parallel_for(blocks.size(), [&](std::size_t k) {
    const MatrixAssembly m = options.route == Route::analytic
                                 ? toeplitz_matrix_analytic(model, static_cast<int>(k))
                                 : toeplitz_matrix_quadrature(model, static_cast<int>(k));
    blocks[k] = diagonalize(static_cast<int>(k), m.matrix, m.hermitian_residual,
                            options.keep_vectors);
  });
  return SpectralPackage(model, k_max, std::move(blocks), options.route);
}

Complex evaluate_section(const SpectralPackage& pkg, int k, const CVector& coeffs,
                         const PointX& x) {
  const CVector e = pkg.space(k).values(x);
  if (coeffs.size() != e.size()) throw Error("evaluate_section: coefficient dimension mismatch");
  return (coeffs.transpose() * e)(0);
}

double szego_diagonal(const SpectralPackage& pkg, int k, const PointX& x) {
  // the diagonal of the projector does not depend on the orthonormal basis
  return pkg.space(k).values(x).squaredNorm();
}

}  // namespace toeplab::spectral
