#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toeplab/geometry.hpp"
#include "toeplab/spectral.hpp"
#include "toeplab/window.hpp"

namespace toeplab::config {

enum class Kind { spectrum, trace, local, offlocus, parity, verify };

Kind parse_kind(const std::string& name);
std::string kind_name(Kind k);

// start:stop:count[:geometric]
struct GridSpec {
  double start = 100.0, stop = 800.0;
  int count = 8;
  bool geometric = true;

  std::vector<double> values() const;
};

GridSpec parse_grid(const std::string& text);
std::string grid_text(const GridSpec& g);

struct ExperimentConfig {
  Kind kind = Kind::spectrum;
  int d = 1;
  std::vector<int> weights{1, 2};
  window::Shape shape = window::Shape::bump;
  double tau0 = kPi;
  double eps = 1.4;
  GridSpec lambda_grid;
  std::vector<double> u_norms{0.0, 0.5, 1.0};
  int k_max = 0;  // 0 picks the smallest degree that covers the grid
  spectral::Route route = spectral::Route::analytic;
  double tail_tolerance = 1e-10;
  // offlocus: shrinking radius 2 C lambda^{-7/18} and the fixed distance
  double offlocus_C = 1.3;
  double offlocus_distance = 0.5;
  double parity_gauge = 0.5;  // quadratic gauge of the parity chart
  std::optional<std::string> cache_dir;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 20240607;
  bool plots = true;

  nlohmann::json to_json() const;
  // CRC-32 of the canonical JSON dump, as 8 hex digits.
  std::string hash() const;
};

// Raised for malformed or inconsistent configurations. field is the dotted path
// of the offending entry, line its line in the source file (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

// Applies the keys present in j over cfg. text, when given, is the source the
// JSON came from and is used to locate fields by line.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j, const std::string& text = "");

ExperimentConfig load_file(const std::filesystem::path& path);

// Grid monotonicity, positive tolerances, and eps below half the period gap at
// tau0. Throws ConfigError before any computation happens.
void validate(const ExperimentConfig& cfg);

geometry::ProjectiveModel model_of(const ExperimentConfig& cfg);
window::Window window_of(const ExperimentConfig& cfg);

}  // namespace toeplab::config
