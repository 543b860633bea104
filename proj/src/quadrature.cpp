#include "toeplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace toeplab {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {  // exceptions propagate directly
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace toeplab

namespace toeplab::quad {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error("gauss_legendre: n must be positive");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  if (n == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = 2.0 * half;
    return rule;
  }
  // Legendre P_n and its derivative at x via the three-term recurrence.
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

SimplexRule simplex_rule(int dim, int degree) {
  if (dim < 0) throw Error("simplex_rule: negative dimension");
  SimplexRule rule;
  rule.dim = dim;
  if (dim == 0) {
    rule.points.push_back({1.0});
    rule.weights.push_back(1.0);
    return rule;
  }
  // The Jacobian adds up to dim - 1 powers of (1 - xi) per factor.
  const int n = std::max(1, (degree + dim) / 2 + 1);
  const Rule1D gl = gauss_legendre(n, 0.0, 1.0);
  std::vector<int> idx(dim, 0);
  while (true) {
    std::vector<double> t(dim + 1);
    double rest = 1.0, jac = 1.0, w = 1.0;
    for (int j = 0; j < dim; ++j) {
      const double xi = gl.nodes[idx[j]];
      w *= gl.weights[idx[j]];
      t[j] = rest * xi;
      if (j + 1 < dim) jac *= std::pow(1.0 - xi, dim - 1 - j);
      rest *= (1.0 - xi);
    }
    t[dim] = rest;
    rule.points.push_back(std::move(t));
    rule.weights.push_back(w * jac);
    int j = dim - 1;
    while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
    if (j < 0) break;
  }
  return rule;
}

double sphere_area(int n) { return 2.0 * std::pow(kPi, n) / std::tgamma(n); }

SphereRule sphere_rule(int n, const SphereRuleOptions& options) {
  if (n < 1) throw Error("sphere_rule: n must be positive");
  if (options.phases < 1) throw Error("sphere_rule: phases must be positive");
  const SimplexRule simplex = simplex_rule(n - 1, options.simplex_degree);
  const int free_phases = options.reduce_global_phase ? n - 1 : n;
  const int p = options.phases;
  const double dtheta = kTwoPi / p;
  // Euclidean measure = 2^{1-n} dt dtheta in moment-angle coordinates.
  double scale = std::pow(2.0, 1 - n) * std::pow(dtheta, free_phases);
  if (options.reduce_global_phase) scale *= kTwoPi;

  std::size_t phase_count = 1;
  for (int i = 0; i < free_phases; ++i) phase_count *= static_cast<std::size_t>(p);

  SphereRule rule;
  rule.n = n;
  rule.points.reserve(simplex.points.size() * phase_count);
  rule.weights.reserve(simplex.points.size() * phase_count);
  std::vector<int> idx(free_phases, 0);
  for (std::size_t s = 0; s < simplex.points.size(); ++s) {
    const auto& t = simplex.points[s];
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t c = 0; c < phase_count; ++c) {
      CVector z(n);
      for (int i = 0; i < n; ++i) {
        const double theta = (i < free_phases) ? dtheta * idx[i] : 0.0;
        z[i] = std::sqrt(std::max(0.0, t[i])) * std::polar(1.0, theta);
      }
      rule.points.push_back(std::move(z));
      rule.weights.push_back(simplex.weights[s] * scale);
      for (int j = free_phases - 1; j >= 0; --j) {
        if (++idx[j] < p) break;
        idx[j] = 0;
      }
    }
  }
  return rule;
}

}  // namespace toeplab::quad
