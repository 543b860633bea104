#include "toeplab/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "toeplab/fitting.hpp"

namespace toeplab::smoothing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dimension(int d, int k) { return static_cast<double>(spectral::section_dimension(d, k)); }

double package_tail(const SpectralPackage& pkg, const Multiplier& m, double lambda) {
  if (pkg.complete()) return 0.0;
  return trace_tail(m, pkg.model().d(), pkg.k_max(), pkg.lower_slope(), pkg.lower_offset(),
                    lambda);
}

void require_coverage(const SpectralPackage& pkg, double tail, double tol, double lambda,
                      const char* what) {
  if (tail <= tol) return;
  std::ostringstream msg;
  msg << "insufficient spectral coverage for " << what << " at lambda = " << lambda
      << ": tail bound " << tail << " exceeds " << tol << " (k_max = " << pkg.k_max()
      << ", eigenvalues covered below " << pkg.coverage_upper() << ")";
  throw InsufficientCoverage(msg.str());
}

CVector embed_normal(const HeisenbergChart& chart, const CVector& u) {
  if (u.size() != chart.normal_dim())
    throw Error("normal vector has dimension " + std::to_string(u.size()) + ", chart normal space " +
                std::to_string(chart.normal_dim()));
  CVector v = CVector::Zero(chart.frame.cols());
  v.tail(chart.normal_dim()) = u;
  return v;
}

nlohmann::json window_json(const window::Window& win) {
  return {{"shape", window::shape_name(win.shape())}, {"tau0", win.tau0()}, {"eps", win.eps()}};
}

nlohmann::json model_json(const geometry::ProjectiveModel& model) {
  return {{"d", model.d()}, {"weights", model.weights()}, {"tag", model.tag()}};
}

}  // namespace

double predicted_lower_slope(const geometry::ProjectiveModel& model) {
  // T z^alpha = -lift_sign * <alpha, w + lift_shift> z^alpha
  const auto& c = model.calibration();
  const double slope = c.lift_sign < 0 ? model.min_weight() + c.lift_shift
                                       : -(model.max_weight() + c.lift_shift);
  if (!(slope > 0.0)) throw Error("spectrum is not bounded below along degrees");
  return slope;
}

double trace_tail(const Multiplier& m, int d, int k_max, double slope, double offset,
                  double lambda) {
  if (!(slope > 0.0)) return kInf;
  double total = 0.0, previous = kInf;
  for (long k = k_max + 1; k < k_max + 10'000'000L; ++k) {
    const double s = slope * k + offset - lambda;
    if (s <= 0.0) return kInf;
    const double term = m.envelope(s) * dimension(d, static_cast<int>(k));
    const bool shrinking = term <= previous;
    previous = term;
    total += term;
    // the envelope decays faster than any power, so the terms end up
    // decreasing; stop once they are negligible against the running sum
    if (term < 1e-40 || (shrinking && term <= 1e-12 * total)) return total;
  }
  return kInf;
}

int required_kmax(const geometry::ProjectiveModel& model, const Multiplier& m, double lambda_max,
                  double tol) {
  const double slope = predicted_lower_slope(model);
  const double offset = -1e-9;
  auto ok = [&](int k) { return trace_tail(m, model.d(), k, slope, offset, lambda_max) <= tol; };
  int lo = std::max(0, static_cast<int>(std::floor(lambda_max / slope)));
  if (ok(lo)) return lo;
  int hi = std::max(lo + 1, 2 * lo + 8);
  while (!ok(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > 10'000'000) throw Error("required_kmax: no finite truncation reaches the tolerance");
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

Value smoothed_trace(const SpectralPackage& pkg, const Multiplier& m, double lambda, double tol) {
  double tail = package_tail(pkg, m, lambda);
  require_coverage(pkg, tail, tol, lambda, "the smoothed trace");
  const double cut = m.cutoff();
  CompensatedSum sum;
  for (const auto& level : pkg.levels()) {
    const double s = lambda - level.lambda, mult = static_cast<double>(level.multiplicity);
    if (std::abs(s) > cut)
      tail += mult * m.envelope(s);
    else
      sum.add(mult * m.transform(s));
  }
  require_coverage(pkg, tail, tol, lambda, "the smoothed trace");
  return {sum.value(), tail};
}

Value smoothed_kernel(const SpectralPackage& pkg, const Multiplier& m, double lambda,
                      const PointX& x, const PointX& y, double tol) {
  const int d = pkg.model().d();
  const double vol = spectral::volume_X(d);
  double tail = package_tail(pkg, m, lambda) / vol;
  require_coverage(pkg, tail, tol, lambda, "the smoothed kernel");
  const double cut = m.cutoff();
  const bool diagonal = x.z() == y.z();
  CompensatedSum total;
  for (int k = 0; k <= pkg.k_max(); ++k) {
    const auto& blk = pkg.block(k);
    const auto [lo, hi] = std::minmax_element(blk.eigenvalues.begin(), blk.eigenvalues.end());
    const double gap = std::max({0.0, *lo - lambda, lambda - *hi});
    if (gap > cut) {
      // |Phi_j(x) conj Phi_j(y)| summed over the block is at most dim / vol
      tail += m.envelope(gap) * static_cast<double>(blk.eigenvalues.size()) / vol;
      continue;
    }
    CompensatedSum part;
    if (diagonal && !blk.dense) {
      // |z^alpha|^2 / ||z^alpha||^2 without phases
      const CVector e = pkg.space(k).values(x);
      for (std::size_t j = 0; j < blk.eigenvalues.size(); ++j) {
        const double s = lambda - blk.eigenvalues[j], p = std::norm(e[j]);
        if (std::abs(s) > cut)
          tail += m.envelope(s) * p;
        else
          part.add(m.transform(s) * p);
      }
    } else {
      CVector fx = pkg.space(k).values(x);
      CVector fy = diagonal ? fx : pkg.space(k).values(y);
      if (blk.dense) {
        if (blk.eigenvectors.size() == 0)
          throw Error("kernel needs eigenvectors of block " + std::to_string(k));
        fx = blk.eigenvectors.transpose() * fx;
        fy = diagonal ? fx : CVector(blk.eigenvectors.transpose() * fy);
      }
      for (std::size_t j = 0; j < blk.eigenvalues.size(); ++j) {
        const double s = lambda - blk.eigenvalues[j];
        const Complex p = fx[j] * std::conj(fy[j]);
        if (std::abs(s) > cut)
          tail += m.envelope(s) * std::abs(p);
        else
          part.add(m.transform(s) * p);
      }
    }
    total.add(part.value());
  }
  require_coverage(pkg, tail, tol, lambda, "the smoothed kernel");
  return {total.value(), tail};
}

report::ScanReport scaled_diagonal_scan(const SpectralPackage& pkg, const window::Window& win,
                                        const HeisenbergChart& chart, const CVector& u,
                                        const std::vector<double>& lambda_grid,
                                        const Predictor& predict) {
  const CVector v = embed_normal(chart, u);
  std::vector<Complex> exact(lambda_grid.size()), pred(lambda_grid.size());
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    const PointX x = chart.point(CVector(v / std::sqrt(lambda)));
    exact[i] = smoothed_kernel(pkg, win, lambda, x, x).value;
    pred[i] = predict(lambda);
  });
  report::ScanReport r;
  r.kind = "local";
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) r.add(lambda_grid[i], exact[i], pred[i]);
  r.metadata = {{"model", model_json(pkg.model())},
                {"window", window_json(win)},
                {"u_norm", u.norm()},
                {"gauge_re", chart.gauge.real()},
                {"gauge_im", chart.gauge.imag()},
                {"k_max", pkg.k_max()}};
  r.validate();
  return r;
}

report::ScanReport offlocus_decay_scan(const SpectralPackage& pkg, const window::Window& win,
                                       const HeisenbergChart& chart, const CVector& direction,
                                       const OffLocus& mode,
                                       const std::vector<double>& lambda_grid) {
  const CVector dir = direction / direction.norm();
  const int d = pkg.model().d();
  std::vector<Complex> exact(lambda_grid.size()), ref(lambda_grid.size());
  std::vector<double> radius(lambda_grid.size());
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    radius[i] = mode.fixed_distance >= 0.0 ? mode.fixed_distance
                                           : 2.0 * mode.C * std::pow(lambda, -7.0 / 18.0);
    const PointX x = chart.normal_point(CVector(radius[i] * dir));
    const double scale = std::pow(lambda / kPi, d);
    // certify the tail well below the values being measured
    exact[i] = smoothed_kernel(pkg, win, lambda, x, x, 1e-14 * scale).value;
    ref[i] = scale;
  });
  report::ScanReport r;
  r.kind = "offlocus";
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) r.add(lambda_grid[i], exact[i], ref[i]);
  r.metadata = {{"model", model_json(pkg.model())},
                {"window", window_json(win)},
                {"reference", "(lambda/pi)^d"},
                {"C", mode.C},
                {"fixed_distance", mode.fixed_distance},
                {"radius", radius},
                {"k_max", pkg.k_max()}};
  r.validate();
  if (lambda_grid.size() >= 2) {
    const auto rel = r.ratio_abs();
    const auto all = fit::power_law(lambda_grid, rel);
    r.fits["exponent"] = all.exponent;
    r.fits["residual"] = all.residual;
    const double top = *std::max_element(lambda_grid.begin(), lambda_grid.end());
    std::size_t inside = 0;
    for (double l : lambda_grid) inside += l >= 0.5 * top;
    if (inside >= 2) {
      const auto oct = fit::power_law_window(lambda_grid, rel, 0.5 * top, top);
      r.fits["top_octave_exponent"] = oct.exponent;
    }
  }
  return r;
}

report::ScanReport negative_lambda_scan(const SpectralPackage& pkg, const Multiplier& m,
                                        const std::vector<double>& lambda_grid) {
  std::vector<Complex> exact(lambda_grid.size());
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    if (!(lambda_grid[i] < 0.0)) throw Error("negative_lambda_scan: grid must be negative");
    exact[i] = smoothed_trace(pkg, m, lambda_grid[i]).value;
  });
  report::ScanReport r;
  r.kind = "negative";
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) r.add(lambda_grid[i], exact[i], 1.0);
  r.metadata = {{"model", model_json(pkg.model())}, {"reference", "unit"}, {"k_max", pkg.k_max()}};
  r.validate();
  if (lambda_grid.size() >= 2) {
    std::vector<double> mag;
    for (double l : lambda_grid) mag.push_back(std::abs(l));
    const auto f = fit::power_law(mag, r.exact_abs());
    r.fits["exponent"] = f.exponent;
    r.fits["residual"] = f.residual;
  }
  return r;
}

Parity parity_split(const SpectralPackage& pkg, const window::Window& win,
                    const HeisenbergChart& chart, const CVector& u, double lambda) {
  const CVector v = embed_normal(chart, u) / std::sqrt(lambda);
  const PointX xp = chart.point(v);
  const PointX xm = chart.point(CVector(-v));
  Parity p;
  p.plus = smoothed_kernel(pkg, win, lambda, xp, xp).value;
  p.minus = smoothed_kernel(pkg, win, lambda, xm, xm).value;
  p.even = 0.5 * (p.plus + p.minus);
  p.odd = 0.5 * (p.plus - p.minus);
  return p;
}

std::vector<double> make_grid(double start, double stop, int count, bool geometric) {
  if (count < 1) throw Error("grid: count must be positive");
  if (count == 1) return {start};
  if (start == stop) throw Error("grid: start equals stop");
  if (geometric && (start <= 0.0) != (stop <= 0.0))
    throw Error("grid: geometric grid endpoints must share a sign");
  if (geometric && (start == 0.0 || stop == 0.0)) throw Error("grid: geometric grid cannot touch 0");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    g[i] = geometric ? start * std::pow(stop / start, t) : start + (stop - start) * t;
  }
  g.back() = stop;
  return g;
}

}  // namespace toeplab::smoothing
