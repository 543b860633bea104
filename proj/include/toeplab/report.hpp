#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "toeplab/common.hpp"

namespace toeplab::report {

// Exact values against predictions on a strictly monotone grid. Scans with no
// asymptotic prediction store a reference scale instead (recorded in metadata).
struct ScanReport {
  std::string kind;
  std::vector<double> grid;
  std::vector<Complex> exact;
  std::vector<Complex> predicted;
  nlohmann::json metadata = nlohmann::json::object();
  nlohmann::json fits = nlohmann::json::object();

  void add(double g, Complex e, Complex p);
  Complex ratio(std::size_t i) const { return exact[i] / predicted[i]; }
  std::vector<double> ratio_abs() const;
  std::vector<double> exact_abs() const;
  // Throws unless the grid is strictly monotone and every ratio is finite.
  void validate() const;
};

// Fixed 17-significant-digit scientific notation.
std::string format_double(double v);

void write_csv(const ScanReport& r, const std::filesystem::path& path);
void write_json(const ScanReport& r, const std::filesystem::path& path);
// Companion gnuplot script plotting |ratio| (and |exact|) against the grid.
void write_gnuplot(const ScanReport& r, const std::filesystem::path& script,
                   const std::filesystem::path& csv);

// Writes <stem>.csv, <stem>.json and <stem>.gp under dir.
void write_all(const ScanReport& r, const std::filesystem::path& dir, const std::string& stem);

}  // namespace toeplab::report
