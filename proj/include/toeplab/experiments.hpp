#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "toeplab/config.hpp"
#include "toeplab/spectral.hpp"

// Orchestration of the CLI subcommands over a validated configuration.
namespace toeplab::experiments {

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
};

// Validates cfg, then runs its experiment, writing reports under cfg.out_dir.
// Progress goes to log. Throws ConfigError before any computation when the
// configuration is invalid.
RunResult run(const config::ExperimentConfig& cfg, std::ostream& log);

// Smallest k_max covering the configured grid at the configured tolerance,
// unless the configuration fixes one.
int choose_kmax(const config::ExperimentConfig& cfg);

// Columns k, index, lambda, multiplicity_hint; 17 significant digits.
void write_spectrum_csv(const spectral::SpectralPackage& pkg, const std::filesystem::path& path);

}  // namespace toeplab::experiments
