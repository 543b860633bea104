#include "toeplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "toeplab/acceptance.hpp"
#include "toeplab/asymptotics.hpp"
#include "toeplab/cache.hpp"
#include "toeplab/report.hpp"
#include "toeplab/smoothing.hpp"

namespace toeplab::experiments {

using config::ExperimentConfig;
using config::Kind;
using nlohmann::json;

namespace {

constexpr double kMaxEigenvalues = 5e7;

struct Context {
  const ExperimentConfig& cfg;
  std::ostream& log;
  RunResult& result;
  geometry::ProjectiveModel model;
  window::Window win;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void emit(Context& ctx, const report::ScanReport& r, const std::string& stem) {
  const auto dir = ctx.cfg.out_dir;
  if (ctx.cfg.plots) {
    report::write_all(r, dir, stem);
    ctx.result.artifacts.push_back(dir / (stem + ".gp"));
  } else {
    report::write_csv(r, dir / (stem + ".csv"));
    report::write_json(r, dir / (stem + ".json"));
  }
  ctx.result.artifacts.push_back(dir / (stem + ".csv"));
  ctx.result.artifacts.push_back(dir / (stem + ".json"));
  ctx.log << "wrote " << (dir / stem).string() << ".{csv,json" << (ctx.cfg.plots ? ",gp" : "") << "}\n";
}

spectral::SpectralPackage package(Context& ctx) {
  const int k = choose_kmax(ctx.cfg);
  // binomial(k + d + 1, d + 1) eigenvalues in degrees 0..k
  double count = 1.0;
  for (int i = 1; i <= ctx.model.d() + 1; ++i) count *= static_cast<double>(k + i) / i;
  if (count > kMaxEigenvalues)
    throw Error("k_max = " + std::to_string(k) + " would need " + std::to_string(count) +
                " eigenvalues; use a gaussian window, a wider eps, a lower grid, or a looser " +
                "tolerances.tail");
  spectral::BuildOptions opts;
  opts.route = ctx.cfg.route;
  const auto dir = cache::cache_dir(ctx.cfg.cache_dir);
  auto loaded = cache::load_or_build(ctx.model, k, opts, dir);
  ctx.log << "spectral package " << ctx.model.tag() << " k_max=" << k << " ("
          << (loaded.from_cache ? "cache" : loaded.rebuilt_corrupt ? "rebuilt, cache was corrupt" : "built")
          << ")\n";
  return std::move(loaded.package);
}

// First component of the fixed locus of the lifted flow at tau0 with a
// nontrivial normal space, else the first component.
geometry::FixedComponent local_component(const Context& ctx) {
  const auto comps = geometry::x_components(ctx.model, ctx.cfg.tau0);
  for (const auto& c : comps)
    if (c.f_dim < ctx.model.d()) return c;
  return comps.at(0);
}

CVector normal_vector(const geometry::HeisenbergChart& chart, double norm) {
  if (chart.normal_dim() == 0) throw Error("the fixed component has no normal directions");
  CVector u = CVector::Zero(chart.normal_dim());
  u[0] = norm;
  return u;
}

std::string u_stem(const std::string& base, double u) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_u%.3g", base.c_str(), u);
  return buf;
}

void run_spectrum(Context& ctx) {
  const auto pkg = package(ctx);
  std::filesystem::create_directories(ctx.cfg.out_dir);
  const auto csv = ctx.cfg.out_dir / "spectrum.csv";
  write_spectrum_csv(pkg, csv);
  const auto& law = pkg.affine_law();
  json j = {{"model", {{"d", ctx.model.d()}, {"weights", ctx.model.weights()}}},
            {"k_max", pkg.k_max()},
            {"eigenvalues", pkg.eigenvalue_count()},
            {"levels", pkg.levels().size()},
            {"affine_law",
             {{"slope_w", law.slope_w}, {"slope_k", law.slope_k}, {"offset", law.offset},
              {"residual", law.residual}}},
            {"calibration",
             {{"lift_sign", ctx.model.calibration().lift_sign},
              {"lift_shift", ctx.model.calibration().lift_shift}}}};
  const auto js = ctx.cfg.out_dir / "spectrum.json";
  write_text(js, j.dump(2) + "\n");
  ctx.result.artifacts.insert(ctx.result.artifacts.end(), {csv, js});
  ctx.log << "wrote " << csv.string() << " (" << pkg.eigenvalue_count() << " eigenvalues)\n";
}

void run_trace(Context& ctx) {
  const auto pkg = package(ctx);
  const auto grid = ctx.cfg.lambda_grid.values();
  // Sum of the leading component terms at tau0; a unit reference when tau0
  // is not a period
  std::vector<std::pair<geometry::FixedComponent, double>> comps;
  try {
    for (const auto& c : geometry::x_components(ctx.model, ctx.cfg.tau0))
      comps.emplace_back(c, asymptotics::component_f_integral(ctx.model, c).value);
  } catch (const NotClean&) {
    throw;
  } catch (const Error&) {
    comps.clear();
  }
  std::vector<Complex> exact(grid.size()), pred(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    exact[i] = smoothing::smoothed_trace(pkg, ctx.win, grid[i], ctx.cfg.tail_tolerance).value;
    Complex p = comps.empty() ? Complex(1.0) : Complex(0.0);
    for (const auto& [c, integral] : comps)
      p += asymptotics::predict_global_component(c, ctx.win.chi(ctx.cfg.tau0), grid[i], integral);
    pred[i] = p;
  });
  report::ScanReport r;
  r.kind = "trace";
  for (std::size_t i = 0; i < grid.size(); ++i) r.add(grid[i], exact[i], pred[i]);
  r.metadata = {{"model", ctx.model.tag()},
                {"window", {{"shape", window::shape_name(ctx.win.shape())}, {"tau0", ctx.win.tau0()},
                            {"eps", ctx.win.eps()}}},
                {"k_max", pkg.k_max()},
                {"reference", comps.empty() ? "unit" : "leading component terms"},
                {"components", comps.size()}};
  r.validate();
  if (!comps.empty() && grid.size() >= 4) {
    try {
      const auto fit = asymptotics::fit_expansion(r, false, 1);
      r.fits["c1_over_lambda"] = {fit.by_terms[0].coefficients[0].real(), fit.by_terms[0].coefficients[0].imag()};
      r.fits["residual"] = fit.by_terms[0].residual;
    } catch (const Error& e) {
      r.fits["error"] = e.what();
    }
  }
  emit(ctx, r, "trace");
}

void run_local(Context& ctx) {
  const auto pkg = package(ctx);
  const auto comp = local_component(ctx);
  const auto x0 = geometry::component_point(ctx.model, comp);
  const auto chart = geometry::heisenberg_chart(ctx.model, x0, ctx.cfg.tau0);
  const auto pred = asymptotics::make_local_prediction(ctx.model, ctx.win, x0);
  const auto grid = ctx.cfg.lambda_grid.values();
  for (double un : ctx.cfg.u_norms) {
    const CVector u = normal_vector(chart, un);
    auto r = smoothing::scaled_diagonal_scan(pkg, ctx.win, chart, u, grid, [&](double l) {
      return asymptotics::predict_local(pred, u, l);
    });
    if (grid.size() >= 4) {
      try {
        const auto fit = asymptotics::fit_expansion(r, true, 2);
        json terms = json::array();
        for (const auto& e : fit.by_terms) {
          json cs = json::array();
          for (auto c : e.coefficients) cs.push_back({c.real(), c.imag()});
          terms.push_back({{"coefficients", cs}, {"residual", e.residual}});
        }
        r.fits["half_power_expansion"] = terms;
      } catch (const Error& e) {
        r.fits["error"] = e.what();
      }
    }
    emit(ctx, r, u_stem("local", un));
  }
}

void run_offlocus(Context& ctx) {
  const auto pkg = package(ctx);
  const auto comp = local_component(ctx);
  const auto x0 = geometry::component_point(ctx.model, comp);
  const auto chart = geometry::heisenberg_chart(ctx.model, x0, ctx.cfg.tau0);
  const CVector dir = normal_vector(chart, 1.0);
  const auto grid = ctx.cfg.lambda_grid.values();
  smoothing::OffLocus fixed;
  fixed.fixed_distance = ctx.cfg.offlocus_distance;
  emit(ctx, smoothing::offlocus_decay_scan(pkg, ctx.win, chart, dir, fixed, grid), "offlocus_fixed");
  smoothing::OffLocus shrink;
  shrink.C = ctx.cfg.offlocus_C;
  emit(ctx, smoothing::offlocus_decay_scan(pkg, ctx.win, chart, dir, shrink, grid), "offlocus_shrinking");
}

void run_parity(Context& ctx) {
  const auto pkg = package(ctx);
  const auto comp = local_component(ctx);
  const auto x0 = geometry::component_point(ctx.model, comp);
  const auto chart =
      geometry::heisenberg_chart(ctx.model, x0, ctx.cfg.tau0, Complex(ctx.cfg.parity_gauge, 0.0));
  const auto grid = ctx.cfg.lambda_grid.values();
  for (double un : ctx.cfg.u_norms) {
    const CVector u = normal_vector(chart, un);
    std::vector<smoothing::Parity> parts(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      parts[i] = smoothing::parity_split(pkg, ctx.win, chart, u, grid[i]);
    });
    // exact column: odd part, predicted column: even part
    report::ScanReport r;
    r.kind = "parity";
    for (std::size_t i = 0; i < grid.size(); ++i) r.add(grid[i], parts[i].odd, parts[i].even);
    r.metadata = {{"model", ctx.model.tag()}, {"u_norm", un}, {"gauge", ctx.cfg.parity_gauge},
                  {"k_max", pkg.k_max()}, {"columns", "exact = odd part, pred = even part"}};
    r.validate();
    const auto ratio = r.ratio_abs();
    if (grid.size() >= 2 && std::all_of(ratio.begin(), ratio.end(), [](double v) { return v > 0.0; })) {
      const auto f = fit::power_law(grid, ratio);
      r.fits["odd_over_even_exponent"] = f.exponent;
      r.fits["residual"] = f.residual;
    }
    emit(ctx, r, u_stem("parity", un));
  }
}

int run_verify(Context& ctx) {
  if (ctx.cfg.k_max > 0)
    ctx.log << "note: spectrum.kmax is not used by verify; each check picks the degree its tail bound needs\n";
  acceptance::Options opts;
  opts.cache_dir = cache::cache_dir(ctx.cfg.cache_dir);
  opts.seed = ctx.cfg.seed;
  opts.log = &ctx.log;
  const auto suite = acceptance::run(opts);
  std::filesystem::create_directories(ctx.cfg.out_dir);
  json manifest = suite.to_json();
  manifest["config_hash"] = ctx.cfg.hash();
  manifest["config"] = ctx.cfg.to_json();
  const auto path = ctx.cfg.out_dir / "manifest.json";
  write_text(path, manifest.dump(2) + "\n");
  ctx.result.artifacts.push_back(path);
  ctx.log << (suite.all_pass() ? "all criteria pass" : "some criteria FAILED") << " ("
          << suite.seconds << " s); manifest " << path.string() << "\n";
  return suite.all_pass() ? 0 : 1;
}

}  // namespace

int choose_kmax(const ExperimentConfig& cfg) {
  if (cfg.k_max > 0) return cfg.k_max;
  const auto model = config::model_of(cfg);
  const auto win = config::window_of(cfg);
  const auto grid = cfg.lambda_grid.values();
  const double top = *std::max_element(grid.begin(), grid.end());
  double tol = cfg.tail_tolerance;
  if (cfg.kind == Kind::offlocus) {
    // kernels are compared against (lambda / pi)^d at the bottom of the grid
    const double bottom = std::max(1.0, *std::min_element(grid.begin(), grid.end()));
    tol = std::min(tol, 1e-14 * std::pow(bottom / kPi, cfg.d) * spectral::volume_X(cfg.d));
  }
  if (cfg.kind == Kind::spectrum) {
    // the spectrum listing is not tied to a grid: degrees up to 400, capped
    // at about two million eigenvalues
    int k = 0;
    std::uint64_t total = 1;
    while (k < 400 && total + spectral::section_dimension(cfg.d, k + 1) <= 2'000'000)
      total += spectral::section_dimension(cfg.d, ++k);
    return k;
  }
  return smoothing::required_kmax(model, win, top, tol);
}

void write_spectrum_csv(const spectral::SpectralPackage& pkg, const std::filesystem::path& path) {
  std::map<double, std::uint64_t> mult;
  for (const auto& l : pkg.levels()) mult[l.lambda] = l.multiplicity;
  // levels merge eigenvalues within their clustering tolerance; look up the
  // nearest level
  auto hint = [&](double v) {
    auto it = mult.lower_bound(v);
    std::uint64_t best = 0;
    double dist = 1e300;
    for (auto j : {it, it == mult.begin() ? it : std::prev(it)}) {
      if (j == mult.end()) continue;
      if (std::abs(j->first - v) < dist) {
        dist = std::abs(j->first - v);
        best = j->second;
      }
    }
    return best;
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "k,index,lambda,multiplicity_hint\n";
  for (const auto& b : pkg.blocks())
    for (std::size_t j = 0; j < b.eigenvalues.size(); ++j)
      out << b.k << ',' << j << ',' << report::format_double(b.eigenvalues[j]) << ','
          << hint(b.eigenvalues[j]) << '\n';
}

RunResult run(const ExperimentConfig& cfg, std::ostream& log) {
  config::validate(cfg);
  RunResult result;
  Context ctx{cfg, log, result, config::model_of(cfg), config::window_of(cfg)};
  std::filesystem::create_directories(cfg.out_dir);
  switch (cfg.kind) {
    case Kind::spectrum: run_spectrum(ctx); break;
    case Kind::trace: run_trace(ctx); break;
    case Kind::local: run_local(ctx); break;
    case Kind::offlocus: run_offlocus(ctx); break;
    case Kind::parity: run_parity(ctx); break;
    case Kind::verify: result.exit_code = run_verify(ctx); break;
  }
  return result;
}

}  // namespace toeplab::experiments
