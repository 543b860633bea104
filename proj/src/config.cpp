#include "toeplab/config.hpp"

#include <boost/crc.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "toeplab/geometry.hpp"
#include "toeplab/smoothing.hpp"

namespace toeplab::config {

using nlohmann::json;

namespace {

// Line of the last key of a dotted path, found by scanning for each key in
// turn after the previous one.
int locate(const std::string& text, const std::string& field) {
  if (text.empty()) return 0;
  std::size_t pos = 0;
  std::stringstream parts(field);
  std::string key;
  bool found = false;
  while (std::getline(parts, key, '.')) {
    const std::size_t at = text.find('"' + key + '"', pos);
    if (at == std::string::npos) break;
    pos = at + 1;
    found = true;
  }
  if (!found) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

struct Reader {
  const std::string& text;

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw ConfigError(field, locate(text, field), msg);
  }

  void allow(const json& obj, const std::string& prefix,
             std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(prefix, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail(prefix.empty() ? k : prefix + "." + k, "unknown key");
    }
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }
  int integer(const json& v, const std::string& field) const {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<int>();
  }
  std::string string(const json& v, const std::string& field) const {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }
};

double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw Error("bad " + what + ": '" + s + "'");
  return v;
}

}  // namespace

ConfigError::ConfigError(const std::string& field, int line, const std::string& message)
    : Error("config error at " + field + (line > 0 ? " (line " + std::to_string(line) + ")" : "") +
            ": " + message),
      field_(field),
      line_(line) {}

Kind parse_kind(const std::string& name) {
  if (name == "spectrum") return Kind::spectrum;
  if (name == "trace") return Kind::trace;
  if (name == "local") return Kind::local;
  if (name == "offlocus") return Kind::offlocus;
  if (name == "parity") return Kind::parity;
  if (name == "verify") return Kind::verify;
  throw Error("unknown experiment '" + name + "'");
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::spectrum: return "spectrum";
    case Kind::trace: return "trace";
    case Kind::local: return "local";
    case Kind::offlocus: return "offlocus";
    case Kind::parity: return "parity";
    case Kind::verify: return "verify";
  }
  return "?";
}

std::vector<double> GridSpec::values() const {
  return smoothing::make_grid(start, stop, count, geometric);
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3 && parts.size() != 4)
    throw Error("grid must be start:stop:count[:geometric], got '" + text + "'");
  GridSpec g;
  g.start = parse_number(parts[0], "grid start");
  g.stop = parse_number(parts[1], "grid stop");
  const double count = parse_number(parts[2], "grid count");
  if (count != std::floor(count)) throw Error("grid count must be an integer");
  g.count = static_cast<int>(count);
  g.geometric = false;
  if (parts.size() == 4) {
    if (parts[3] == "geometric")
      g.geometric = true;
    else if (parts[3] != "linear")
      throw Error("grid spacing must be 'geometric' or 'linear', got '" + parts[3] + "'");
  }
  return g;
}

std::string grid_text(const GridSpec& g) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g:%.17g:%d:%s", g.start, g.stop, g.count,
                g.geometric ? "geometric" : "linear");
  return buf;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = kind_name(kind);
  j["model"] = {{"d", d}, {"weights", weights}};
  j["window"] = {{"shape", window::shape_name(shape)}, {"tau0", tau0}, {"eps", eps}};
  j["grids"] = {{"lambda", grid_text(lambda_grid)}, {"u", u_norms}};
  j["spectrum"] = {{"kmax", k_max},
                   {"route", route == spectral::Route::analytic ? "analytic" : "quadrature"}};
  j["tolerances"] = {{"tail", tail_tolerance}};
  j["offlocus"] = {{"C", offlocus_C}, {"distance", offlocus_distance}};
  j["parity"] = {{"gauge", parity_gauge}};
  j["cache_dir"] = cache_dir ? json(*cache_dir) : json(nullptr);
  j["out"] = out_dir.string();
  j["seed"] = seed;
  j["plots"] = plots;
  return j;
}

std::string ExperimentConfig::hash() const {
  const std::string s = to_json().dump();
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
  return buf;
}

void apply_json(ExperimentConfig& cfg, const json& j, const std::string& text) {
  const Reader r{text};
  r.allow(j, "", {"experiment", "model", "window", "grids", "spectrum", "tolerances",
                  "offlocus", "parity", "cache_dir", "out", "seed", "plots"});
  try {
    if (j.contains("experiment")) cfg.kind = parse_kind(r.string(j["experiment"], "experiment"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.fail("experiment", e.what());
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    r.allow(m, "model", {"d", "weights"});
    if (m.contains("d")) cfg.d = r.integer(m["d"], "model.d");
    if (m.contains("weights")) {
      if (!m["weights"].is_array()) r.fail("model.weights", "expected an array of integers");
      cfg.weights.clear();
      for (const auto& w : m["weights"]) cfg.weights.push_back(r.integer(w, "model.weights"));
    }
  }
  if (j.contains("window")) {
    const json& w = j["window"];
    r.allow(w, "window", {"shape", "tau0", "eps"});
    if (w.contains("shape")) {
      try {
        cfg.shape = window::parse_shape(r.string(w["shape"], "window.shape"));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        r.fail("window.shape", e.what());
      }
    }
    if (w.contains("tau0")) cfg.tau0 = r.number(w["tau0"], "window.tau0");
    if (w.contains("eps")) cfg.eps = r.number(w["eps"], "window.eps");
  }
  if (j.contains("grids")) {
    const json& g = j["grids"];
    r.allow(g, "grids", {"lambda", "u"});
    if (g.contains("lambda")) {
      try {
        cfg.lambda_grid = parse_grid(r.string(g["lambda"], "grids.lambda"));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        r.fail("grids.lambda", e.what());
      }
    }
    if (g.contains("u")) {
      if (!g["u"].is_array()) r.fail("grids.u", "expected an array of numbers");
      cfg.u_norms.clear();
      for (const auto& u : g["u"]) cfg.u_norms.push_back(r.number(u, "grids.u"));
    }
  }
  if (j.contains("spectrum")) {
    const json& s = j["spectrum"];
    r.allow(s, "spectrum", {"kmax", "route"});
    if (s.contains("kmax")) cfg.k_max = r.integer(s["kmax"], "spectrum.kmax");
    if (s.contains("route")) {
      const std::string route = r.string(s["route"], "spectrum.route");
      if (route == "analytic")
        cfg.route = spectral::Route::analytic;
      else if (route == "quadrature")
        cfg.route = spectral::Route::quadrature;
      else
        r.fail("spectrum.route", "expected 'analytic' or 'quadrature'");
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    r.allow(t, "tolerances", {"tail"});
    if (t.contains("tail")) cfg.tail_tolerance = r.number(t["tail"], "tolerances.tail");
  }
  if (j.contains("offlocus")) {
    const json& o = j["offlocus"];
    r.allow(o, "offlocus", {"C", "distance"});
    if (o.contains("C")) cfg.offlocus_C = r.number(o["C"], "offlocus.C");
    if (o.contains("distance")) cfg.offlocus_distance = r.number(o["distance"], "offlocus.distance");
  }
  if (j.contains("parity")) {
    const json& p = j["parity"];
    r.allow(p, "parity", {"gauge"});
    if (p.contains("gauge")) cfg.parity_gauge = r.number(p["gauge"], "parity.gauge");
  }
  if (j.contains("cache_dir")) {
    if (j["cache_dir"].is_null())
      cfg.cache_dir.reset();
    else
      cfg.cache_dir = r.string(j["cache_dir"], "cache_dir");
  }
  if (j.contains("out")) cfg.out_dir = r.string(j["out"], "out");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("plots")) {
    if (!j["plots"].is_boolean()) r.fail("plots", "expected true or false");
    cfg.plots = j["plots"].get<bool>();
  }
}

ExperimentConfig load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", 0, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + at, '\n'));
    throw ConfigError("<syntax>", line, e.what());
  }
  ExperimentConfig cfg;
  apply_json(cfg, j, text);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& f, const std::string& m) { throw ConfigError(f, 0, m); };
  if (cfg.d < 1) fail("model.d", "dimension must be at least 1");
  if (static_cast<int>(cfg.weights.size()) != cfg.d + 1)
    fail("model.weights", "expected d + 1 = " + std::to_string(cfg.d + 1) + " weights");
  for (int w : cfg.weights)
    if (w <= 0) fail("model.weights", "weights must be positive");
  if (!(cfg.eps > 0.0)) fail("window.eps", "must be positive");
  if (!std::isfinite(cfg.tau0)) fail("window.tau0", "must be finite");
  const auto& g = cfg.lambda_grid;
  if (g.count < 1) fail("grids.lambda", "grid is empty");
  if (g.count > 1 && !(g.stop > g.start)) fail("grids.lambda", "grid must be increasing");
  if (g.geometric && g.start * g.stop <= 0.0)
    fail("grids.lambda", "geometric grid endpoints must share a sign and be nonzero");
  if (cfg.u_norms.empty()) fail("grids.u", "grid is empty");
  for (std::size_t i = 0; i < cfg.u_norms.size(); ++i) {
    if (cfg.u_norms[i] < 0.0) fail("grids.u", "norms must be non-negative");
    if (i > 0 && !(cfg.u_norms[i] > cfg.u_norms[i - 1])) fail("grids.u", "grid must be increasing");
  }
  if (!(cfg.tail_tolerance > 0.0)) fail("tolerances.tail", "must be positive");
  if (cfg.k_max < 0) fail("spectrum.kmax", "must be non-negative");
  if (!(cfg.offlocus_C > 0.0)) fail("offlocus.C", "must be positive");
  if (!(cfg.offlocus_distance > 0.0)) fail("offlocus.distance", "must be positive");
  const geometry::ProjectiveModel model = model_of(cfg);
  const double gap = geometry::period_gap(model, cfg.tau0);
  if (!(cfg.eps < 0.5 * gap))
    fail("window.eps", "eps = " + std::to_string(cfg.eps) + " is not below half the period gap " +
                           std::to_string(0.5 * gap) + " at tau0");
}

geometry::ProjectiveModel model_of(const ExperimentConfig& cfg) {
  return geometry::calibrated(geometry::ProjectiveModel(cfg.d, cfg.weights));
}

window::Window window_of(const ExperimentConfig& cfg) {
  return window::Window(cfg.shape, cfg.tau0, cfg.eps);
}

}  // namespace toeplab::config
