#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "toeplab/spectral.hpp"

// Versioned binary persistence for spectral packages. Layout: magic, version,
// JSON header, per-degree blocks, CRC-32 of everything before the trailer.
namespace toeplab::cache {

inline constexpr const char* kCacheEnv = "TOEPLAB_CACHE_DIR";

// Explicit directory if given, else $TOEPLAB_CACHE_DIR, else ".toeplab-cache".
std::filesystem::path cache_dir(const std::optional<std::string>& explicit_dir = std::nullopt);

std::filesystem::path cache_file(const std::filesystem::path& dir,
                                 const geometry::ProjectiveModel& model, int k_max,
                                 spectral::Route route);

void save_package(const spectral::SpectralPackage& pkg, const std::filesystem::path& path);

// Throws CacheCorrupt on a bad checksum, truncated data, or a header that does
// not describe (model, k_max).
spectral::SpectralPackage load_package(const std::filesystem::path& path,
                                       const geometry::ProjectiveModel& model, int k_max);

struct LoadResult {
  spectral::SpectralPackage package;
  bool from_cache = false;
  bool rebuilt_corrupt = false;
};

// Loads the cached package, rebuilding (and rewriting) it when missing or corrupt.
LoadResult load_or_build(const geometry::ProjectiveModel& model, int k_max,
                         const spectral::BuildOptions& options,
                         const std::filesystem::path& dir);

}  // namespace toeplab::cache
