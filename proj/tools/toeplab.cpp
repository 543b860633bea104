// Command-line front end: one subcommand per experiment kind.
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "toeplab/config.hpp"
#include "toeplab/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::string weights;
  std::optional<int> dim;
  std::optional<int> kmax;
  std::optional<double> tau0;
  std::optional<double> eps;
  std::string lambda_grid;
  std::string out;
  std::string cache;
  std::optional<std::uint64_t> seed;
};

std::vector<int> parse_weights(const std::string& text) {
  std::vector<int> w;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw toeplab::config::ConfigError("--weights", 0, "expected comma-separated integers, got '" + text + "'");
    w.push_back(v);
  }
  return w;
}

toeplab::config::ExperimentConfig assemble(toeplab::config::Kind kind, const Flags& f) {
  using namespace toeplab::config;
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_file(f.config);
  cfg.kind = kind;
  if (!f.weights.empty()) {
    cfg.weights = parse_weights(f.weights);
    if (!f.dim) cfg.d = static_cast<int>(cfg.weights.size()) - 1;
  }
  if (f.dim) cfg.d = *f.dim;
  if (f.kmax) cfg.k_max = *f.kmax;
  if (f.tau0) cfg.tau0 = *f.tau0;
  if (f.eps) cfg.eps = *f.eps;
  if (!f.lambda_grid.empty()) {
    try {
      cfg.lambda_grid = parse_grid(f.lambda_grid);
    } catch (const ConfigError&) {
      throw;
    } catch (const toeplab::Error& e) {
      throw ConfigError("--lambda-grid", 0, e.what());
    }
  }
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (!f.cache.empty()) cfg.cache_dir = f.cache;
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for Toeplitz trace asymptotics on CP^d with torus weights"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> kinds{
      {"spectrum", "list the Toeplitz spectrum by degree"},
      {"trace", "smoothed trace Gamma(lambda) against the leading component terms"},
      {"local", "scaled kernel diagonal near the fixed locus against the local prediction"},
      {"offlocus", "kernel decay away from the fixed locus"},
      {"parity", "even and odd parts of the scaled kernel in u"},
      {"verify", "run every acceptance check and write a manifest"}};
  for (const auto& [name, help] : kinds) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--weights", flags.weights, "torus weights, comma-separated integers");
    sub->add_option("--dim", flags.dim, "complex dimension d of CP^d");
    sub->add_option("--kmax", flags.kmax, "highest degree kept (0 chooses from the grid)");
    sub->add_option("--tau0", flags.tau0, "window centre");
    sub->add_option("--eps", flags.eps, "window half-width");
    sub->add_option("--lambda-grid", flags.lambda_grid, "start:stop:count[:geometric]");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--cache", flags.cache, "spectral cache directory (else $TOEPLAB_CACHE_DIR)");
    sub->add_option("--seed", flags.seed, "seed for the sampling checks");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const auto cfg = assemble(toeplab::config::parse_kind(sub->get_name()), flags);
    const auto result = toeplab::experiments::run(cfg, std::cout);
    return result.exit_code;
  } catch (const toeplab::config::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
