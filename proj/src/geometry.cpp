#include "toeplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace toeplab::geometry {

namespace {

constexpr double kPhaseTol = 1e-9;

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);  // (-pi, pi]
  if (a <= -kPi) a += kTwoPi;
  return a;
}

// Columns 1..n-1 of a unitary whose first column is parallel to z.
CMatrix complement_basis(const CVector& z) {
  const CMatrix zm = z;
  Eigen::HouseholderQR<CMatrix> qr(zm);
  CMatrix q = qr.householderQ();
  return q.rightCols(z.size() - 1);
}

}  // namespace

ProjectiveModel::ProjectiveModel(int d, std::vector<int> weights,
                                 std::optional<Calibration> calibration)
    : d_(d), weights_(std::move(weights)), calibration_(std::move(calibration)) {
  if (d_ < 1) throw Error("model: dimension d must be a positive integer");
  if (static_cast<int>(weights_.size()) != d_ + 1) {
    std::ostringstream msg;
    msg << "model: expected " << d_ + 1 << " weights for d = " << d_ << ", got "
        << weights_.size();
    throw Error(msg.str());
  }
  for (int w : weights_)
    if (w <= 0) throw Error("model: weights must be strictly positive");
  if (calibration_ && std::abs(calibration_->lift_sign) != 1)
    throw Error("model: lift_sign must be +1 or -1");
}

int ProjectiveModel::min_weight() const {
  return *std::min_element(weights_.begin(), weights_.end());
}
int ProjectiveModel::max_weight() const {
  return *std::max_element(weights_.begin(), weights_.end());
}

const Calibration& ProjectiveModel::calibration() const {
  if (!calibration_) throw UncalibratedModel();
  return *calibration_;
}

ProjectiveModel ProjectiveModel::with_calibration(Calibration c) const {
  return ProjectiveModel(d_, weights_, c);
}

double ProjectiveModel::phase_rate(int i) const {
  const Calibration& c = calibration();
  return c.lift_sign * (weights_.at(i) + c.lift_shift);
}

std::string ProjectiveModel::tag() const {
  std::ostringstream out;
  out << "d" << d_ << "_w";
  for (std::size_t i = 0; i < weights_.size(); ++i) out << (i ? "-" : "") << weights_[i];
  return out.str();
}

PointX::PointX(CVector z) : z_(std::move(z)) {
  if (z_.size() < 2) throw Error("PointX: need at least two coordinates");
  if (std::abs(z_.norm() - 1.0) > 1e-12) throw Error("PointX: not a unit vector");
}

PointX PointX::normalized(const CVector& z) {
  const double nz = z.norm();
  if (!(nz > 0.0)) throw Error("PointX: zero vector");
  return PointX(z / nz);
}

PointX PointX::rotated(double theta) const {
  return PointX(CVector(z_ * std::polar(1.0, theta)));
}

double dist_M(const PointM& a, const PointM& b) {
  const CVector& z = a.representative().z();
  const CVector& w = b.representative().z();
  const Complex overlap = w.dot(z);
  const double perp = (z - overlap * w).norm();
  return std::atan2(perp, std::abs(overlap));
}

double dist_X(const PointX& a, const PointX& b) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (a.z() - b.z()).norm()));
}

double hamiltonian(const ProjectiveModel& model, const PointX& x) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < x.n(); ++i) {
    const double m = std::norm(x.z()[i]);
    num += model.weights()[i] * m;
    den += m;
  }
  return num / den;
}

double kahler_form(const CVector& u, const CVector& v) { return u.dot(v).imag(); }

double connection_form(const PointX& x, const CVector& v) {
  return x.z().dot(v).imag();
}

CVector hamiltonian_field_horizontal(const ProjectiveModel& model, const PointX& x) {
  const CVector& z = x.z();
  const int d = model.d();
  const CMatrix comp = complement_basis(z);
  // real basis {E_k, i E_k} of the horizontal space
  std::vector<CVector> basis;
  basis.reserve(2 * d);
  for (int k = 0; k < d; ++k) {
    basis.emplace_back(comp.col(k));
    basis.emplace_back(kI * comp.col(k));
  }
  // df(e) for f = sum w_i |z_i|^2 / |z|^2; |z|^2 is stationary along e.
  auto df = [&](const CVector& e) {
    double s = 0.0;
    for (int i = 0; i < x.n(); ++i)
      s += 2.0 * model.weights()[i] * (std::conj(z[i]) * e[i]).real();
    return s;
  };
  RMatrix omega(2 * d, 2 * d);
  RVector rhs(2 * d);
  for (int a = 0; a < 2 * d; ++a) {
    rhs[a] = df(basis[a]);
    for (int b = 0; b < 2 * d; ++b) omega(a, b) = 2.0 * kahler_form(basis[b], basis[a]);
  }
  const RVector c = omega.partialPivLu().solve(rhs);
  CVector field = CVector::Zero(x.n());
  for (int b = 0; b < 2 * d; ++b) field += c[b] * basis[b];
  return field;
}

CVector contact_field(const ProjectiveModel& model, const PointX& x) {
  return hamiltonian_field_horizontal(model, x) - hamiltonian(model, x) * kI * x.z();
}

PointX integrate_contact_field(const ProjectiveModel& model, const PointX& x,
                               double tau, int steps) {
  const double h = tau / steps;
  CVector z = x.z();
  auto field = [&](const CVector& y) { return contact_field(model, PointX::normalized(y)); };
  for (int s = 0; s < steps; ++s) {
    const CVector k1 = field(z);
    const CVector k2 = field(z + 0.5 * h * k1);
    const CVector k3 = field(z + 0.5 * h * k2);
    const CVector k4 = field(z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return PointX::normalized(z);
}

namespace {

struct RateSample {
  std::vector<double> rates;  // unwrapped phase rate per coordinate
};

// Phase rates of the integrated contact flow over tau in [0, 1], with the
// trajectory recorded at quarter steps for the residual check.
RateSample measure_rates(const ProjectiveModel& model, const PointX& x0, int steps,
                         std::vector<std::pair<double, PointX>>* trajectory) {
  const int n = x0.n();
  std::vector<double> phase(n, 0.0);
  PointX x = x0;
  const double h = 1.0 / steps;
  for (int s = 1; s <= steps; ++s) {
    PointX next = integrate_contact_field(model, x, h, 1);
    for (int i = 0; i < n; ++i) phase[i] += std::arg(next.z()[i] / x.z()[i]);
    x = next;
    if (trajectory && s % (steps / 4) == 0) trajectory->emplace_back(s * h, x);
  }
  return {phase};
}

std::vector<PointX> calibration_points(int n) {
  std::vector<PointX> pts;
  for (int p = 0; p < 3; ++p) {
    CVector z(n);
    for (int i = 0; i < n; ++i)
      z[i] = std::polar(1.0 - 0.15 * ((i + p) % n) / n, 0.7 * i + 1.3 * p);
    pts.push_back(PointX::normalized(z));
  }
  return pts;
}

int fit_sign(const ProjectiveModel& model, const std::vector<double>& rates) {
  const int n = model.n();
  double mw = 0.0, mr = 0.0;
  for (int i = 0; i < n; ++i) mw += model.weights()[i], mr += rates[i];
  mw /= n;
  mr /= n;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (model.weights()[i] - mw) * (rates[i] - mr);
    sxx += (model.weights()[i] - mw) * (model.weights()[i] - mw);
  }
  const double slope = sxy / sxx;
  const int sign = slope > 0 ? 1 : -1;
  if (std::abs(slope - sign) > 1e-6)
    throw Error("calibration: contact flow is not a torus lift (slope " +
                std::to_string(slope) + ")");
  return sign;
}

}  // namespace

Calibration calibrate(const ProjectiveModel& model) {
  const int n = model.n();
  constexpr int kSteps = 1000;
  const auto points = calibration_points(n);

  const bool distinct = model.min_weight() != model.max_weight();
  int sign = 0;
  if (distinct) {
    sign = fit_sign(model, measure_rates(model, points[0], kSteps, nullptr).rates);
  } else {
    // The sign convention does not depend on the weights; read it off a probe.
    std::vector<int> probe_w(n);
    std::iota(probe_w.begin(), probe_w.end(), 1);
    const ProjectiveModel probe(model.d(), probe_w);
    sign = fit_sign(probe, measure_rates(probe, points[0], kSteps, nullptr).rates);
  }

  Calibration cal;
  cal.lift_sign = sign;
  double shift = 0.0;
  int count = 0;
  std::vector<std::vector<std::pair<double, PointX>>> trajectories(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto rates = measure_rates(model, points[p], kSteps, &trajectories[p]).rates;
    for (int i = 0; i < n; ++i, ++count) shift += rates[i] / sign - model.weights()[i];
  }
  cal.lift_shift = shift / count;
  if (std::abs(cal.lift_shift) < 1e-12) cal.lift_shift = 0.0;

  const ProjectiveModel fitted = model.with_calibration(cal);
  double residual = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (const auto& [tau, x] : trajectories[p])
      residual = std::max(residual, (flow_X(fitted, tau, points[p]).z() - x.z()).norm());
  cal.residual = residual;
  if (residual > 1e-8)
    throw Error("calibration: closed-form flow misses the contact flow by " +
                std::to_string(residual));
  return cal;
}

ProjectiveModel calibrated(const ProjectiveModel& model) {
  return model.with_calibration(calibrate(model));
}

PointX flow_X(const ProjectiveModel& model, double tau, const PointX& x) {
  CVector z = x.z();
  for (int i = 0; i < x.n(); ++i) z[i] *= std::polar(1.0, model.phase_rate(i) * tau);
  return PointX(std::move(z));
}

PointM flow_M(const ProjectiveModel& model, double tau, const PointM& m) {
  return PointM(flow_X(model, tau, m.representative()));
}

namespace {

std::vector<double> all_periods(const ProjectiveModel& model, double tau_max) {
  std::vector<double> out;
  for (int i = 0; i < model.n(); ++i) {
    const double rate = std::abs(model.phase_rate(i));
    if (rate < 1e-12) throw Error("periods: coordinate with zero phase rate");
    const double base = kTwoPi / rate;
    for (int m = 1; m * base <= tau_max * (1.0 + 1e-12); ++m) out.push_back(m * base);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double t : out)
    if (merged.empty() || t - merged.back() > kPhaseTol * std::max(1.0, t))
      merged.push_back(t);
  return merged;
}

double slowest_period(const ProjectiveModel& model) {
  double longest = 0.0;
  for (int i = 0; i < model.n(); ++i)
    longest = std::max(longest, kTwoPi / std::abs(model.phase_rate(i)));
  return longest;
}

}  // namespace

std::vector<Period> periods(const ProjectiveModel& model, double tau_max) {
  if (!(tau_max > 0.0)) throw Error("periods: tau_max must be positive");
  const auto extended = all_periods(model, tau_max + slowest_period(model));
  std::vector<Period> out;
  for (std::size_t i = 0; i < extended.size(); ++i) {
    if (extended[i] > tau_max * (1.0 + 1e-12)) break;
    const double left = i == 0 ? extended[i] : extended[i] - extended[i - 1];
    const double right =
        i + 1 < extended.size() ? extended[i + 1] - extended[i] : slowest_period(model);
    Period p;
    p.tau0 = extended[i];
    p.gap = std::min(left, right);
    p.isolated = p.gap > kPhaseTol;
    out.push_back(p);
  }
  return out;
}

double period_gap(const ProjectiveModel& model, double tau0) {
  const double t = std::abs(tau0);
  const auto list = all_periods(model, t + slowest_period(model));
  double gap = t > kPhaseTol ? t : std::numeric_limits<double>::infinity();
  for (double p : list)
    if (std::abs(p - t) > kPhaseTol * std::max(1.0, t)) gap = std::min(gap, std::abs(p - t));
  return gap;
}

std::vector<FixedComponent> fixed_components(const ProjectiveModel& model, double tau0) {
  const int n = model.n();
  std::vector<double> phase(n);
  for (int i = 0; i < n; ++i) phase[i] = wrap_angle(model.phase_rate(i) * tau0);

  std::vector<std::vector<int>> groups;
  std::vector<double> group_phase;
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (std::abs(wrap_angle(phase[i] - group_phase[g])) < kPhaseTol) {
        groups[g].push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.push_back({i});
      group_phase.push_back(phase[i]);
    }
  }

  std::vector<FixedComponent> x_part, m_part;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    FixedComponent comp;
    comp.tau0 = tau0;
    comp.index_set = groups[g];
    comp.f_dim = static_cast<int>(groups[g].size()) - 1;
    comp.lifts_to_x = std::abs(group_phase[g]) < kPhaseTol;
    comp.f_min = comp.f_max = model.weights()[groups[g][0]];
    for (int i : groups[g]) {
      comp.f_min = std::min<double>(comp.f_min, model.weights()[i]);
      comp.f_max = std::max<double>(comp.f_max, model.weights()[i]);
    }
    for (int j = 0; j < n; ++j) {
      if (std::find(groups[g].begin(), groups[g].end(), j) != groups[g].end()) continue;
      // dphi^M_{-tau0} multiplies z_j / z_g by exp(-i (phase_j - phase_g)).
      const double angle = wrap_angle(group_phase[g] - phase[j]);
      const Complex factor = 1.0 - std::polar(1.0, angle);
      if (std::abs(factor) < 10.0 * std::numeric_limits<double>::epsilon())
        throw NotClean("fixed locus not clean at tau0 = " + std::to_string(tau0));
      comp.normal_angles.push_back(angle);
      comp.normal_indices.push_back(j);
      comp.c_value *= factor;
    }
    (comp.lifts_to_x ? x_part : m_part).push_back(std::move(comp));
  }
  if (x_part.empty()) throw Error("not a period: tau0 = " + std::to_string(tau0));
  x_part.insert(x_part.end(), m_part.begin(), m_part.end());
  return x_part;
}

std::vector<FixedComponent> x_components(const ProjectiveModel& model, double tau0) {
  auto all = fixed_components(model, tau0);
  std::erase_if(all, [](const FixedComponent& c) { return !c.lifts_to_x; });
  return all;
}

PointX component_point(const ProjectiveModel& model, const FixedComponent& comp,
                       const std::vector<double>& moments) {
  CVector z = CVector::Zero(model.n());
  for (std::size_t k = 0; k < comp.index_set.size(); ++k) {
    const double t = moments.empty() ? 1.0 : moments.at(k);
    z[comp.index_set[k]] = std::sqrt(t);
  }
  return PointX::normalized(z);
}

PointX HeisenbergChart::point(double theta, const CVector& v) const {
  if (v.size() != frame.cols()) throw Error("chart: coordinate dimension mismatch");
  CVector h = CVector::Zero(center.n());
  for (int k = 0; k < v.size(); ++k) h += (v[k] + gauge * v[k] * v[k]) * frame.col(k);
  const double r = h.norm();
  CVector z = center.z();
  if (r > 0.0) z = std::cos(r) * center.z() + (std::sin(r) / r) * h;
  return PointX::normalized(z).rotated(theta);
}

PointX HeisenbergChart::normal_point(const CVector& normal_v) const {
  if (normal_v.size() != normal_dim()) throw Error("chart: normal dimension mismatch");
  CVector v = CVector::Zero(frame.cols());
  v.tail(normal_dim()) = normal_v;
  return point(v);
}

CVector HeisenbergChart::coordinates(const PointM& m) const {
  const CVector& z = m.representative().z();
  const Complex a = center.z().dot(z);
  if (std::abs(a) < 1e-12) throw Error("chart: point outside the chart domain");
  const CVector aligned = z * (std::conj(a) / std::abs(a));
  const CVector h = aligned - center.z().dot(aligned) * center.z();
  const double hn = h.norm();
  const double dist = std::atan2(hn, center.z().dot(aligned).real());
  CVector v = frame.adjoint() * h;
  if (hn > 0.0) v *= dist / hn;
  return v;
}

HeisenbergChart heisenberg_chart(const ProjectiveModel& model, const PointX& x0, double tau0,
                                 Complex gauge) {
  if ((flow_X(model, tau0, x0).z() - x0.z()).norm() > 1e-9)
    throw Error("x0 not on fixed locus");
  const int n = model.n();
  // the component through x0 is the coordinate subspace of unit-phase indices
  std::vector<int> tangent_idx, normal_idx;
  for (int i = 0; i < n; ++i) {
    const double ph = wrap_angle(model.phase_rate(i) * tau0);
    (std::abs(ph) < kPhaseTol ? tangent_idx : normal_idx).push_back(i);
  }
  for (int j : normal_idx)
    if (std::abs(x0.z()[j]) > 1e-9) throw Error("x0 not on fixed locus");

  HeisenbergChart chart{x0, CMatrix::Zero(n, model.d()),
                        static_cast<int>(tangent_idx.size()) - 1, gauge};
  if (chart.tangent_dim > 0) {
    CVector restricted(tangent_idx.size());
    for (std::size_t k = 0; k < tangent_idx.size(); ++k) restricted[k] = x0.z()[tangent_idx[k]];
    const CMatrix comp = complement_basis(restricted);
    for (int c = 0; c < chart.tangent_dim; ++c)
      for (std::size_t k = 0; k < tangent_idx.size(); ++k)
        chart.frame(tangent_idx[k], c) = comp(k, c);
  }
  for (std::size_t k = 0; k < normal_idx.size(); ++k)
    chart.frame(normal_idx[k], chart.tangent_dim + static_cast<int>(k)) = 1.0;
  return chart;
}

CMatrix flow_differential_normal(const ProjectiveModel& model, const FixedComponent& comp,
                                 const PointX& x0) {
  const HeisenbergChart chart = heisenberg_chart(model, x0, comp.tau0);
  const int c = chart.normal_dim();
  const int t = chart.tangent_dim;
  constexpr double h = 1e-5;
  CMatrix out(c, c);
  auto image = [&](const CVector& v) -> CVector {
    const PointM moved = flow_M(model, -comp.tau0, project(chart.point(v)));
    return chart.coordinates(moved).tail(c);
  };
  for (int k = 0; k < c; ++k) {
    CVector e = CVector::Zero(model.d());
    e[t + k] = h;
    const CVector d_re = (image(e) - image(-e)) / (2.0 * h);
    const CVector d_im = (image(kI * e) - image(-kI * e)) / (2.0 * h);
    // complex-linear part of the real differential
    out.col(k) = 0.5 * (d_re - kI * d_im);
  }
  return out;
}

double fs_volume_density(int d, const CVector& zeta) {
  if (zeta.size() != d) throw Error("fs_volume_density: dimension mismatch");
  auto embed = [d](const CVector& w) {
    CVector z(d + 1);
    z[0] = 1.0;
    z.tail(d) = w;
    return CVector(z / z.norm());
  };
  const CVector base = embed(zeta);
  constexpr double h = 1e-5;
  std::vector<CVector> cols;
  for (int k = 0; k < d; ++k) {
    for (const Complex dir : {Complex(1.0, 0.0), kI}) {
      CVector step = CVector::Zero(d);
      step[k] = h * dir;
      CVector u = (embed(zeta + step) - embed(zeta - step)) / (2.0 * h);
      u -= base.dot(u) * base;  // horizontal part
      cols.push_back(u);
    }
  }
  RMatrix gram(2 * d, 2 * d);
  for (int a = 0; a < 2 * d; ++a)
    for (int b = 0; b < 2 * d; ++b) gram(a, b) = cols[a].dot(cols[b]).real();
  return std::sqrt(gram.determinant());
}

double fs_volume(int d) { return std::pow(kPi, d) / std::tgamma(d + 1.0); }

}  // namespace toeplab::geometry
