#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

// The end-to-end checks of the lab, each pairing an exact spectral-side or
// closed-form quantity with an independent oracle.
namespace toeplab::acceptance {

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values against thresholds
  nlohmann::json measured = nlohmann::json::object();
  double seconds = 0.0;
};

// Diagnostics outside the pass/fail set, such as alternative windows or charts.
struct Info {
  std::string name;
  std::string detail;
};

struct Options {
  std::filesystem::path cache_dir;
  std::uint64_t seed = 20240607;
  std::vector<int> only;   // empty runs every criterion
  std::ostream* log = nullptr;  // receives each line as it completes
};

struct Suite {
  std::vector<Criterion> criteria;
  std::vector<Info> info;
  double seconds = 0.0;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

inline constexpr int kCriterionCount = 11;

Suite run(const Options& options);

// "criterion  5 PASS  <title>: <detail>"
std::string format(const Criterion& c);
std::string format(const Info& i);

}  // namespace toeplab::acceptance
