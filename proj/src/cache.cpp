#include "toeplab/cache.hpp"

#include <boost/crc.hpp>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace toeplab::cache {

namespace {

constexpr char kMagic[8] = {'T', 'O', 'E', 'P', 'L', 'A', 'B', '\0'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}
  template <class T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void raw(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw CacheCorrupt("cache corrupt: truncated record");
  }
  const std::string& data_;
  std::size_t pos_ = 0;
};

const char* route_name(spectral::Route r) {
  return r == spectral::Route::analytic ? "analytic" : "quadrature";
}

}  // namespace

std::filesystem::path cache_dir(const std::optional<std::string>& explicit_dir) {
  if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return ".toeplab-cache";
}

std::filesystem::path cache_file(const std::filesystem::path& dir,
                                 const geometry::ProjectiveModel& model, int k_max,
                                 spectral::Route route) {
  std::ostringstream name;
  name << model.tag() << "_k" << k_max << "_" << route_name(route) << ".bin";
  return dir / name.str();
}

void save_package(const spectral::SpectralPackage& pkg, const std::filesystem::path& path) {
  const auto& model = pkg.model();
  nlohmann::json header = {
      {"d", model.d()},
      {"weights", model.weights()},
      {"k_max", pkg.k_max()},
      {"route", route_name(pkg.route())},
      {"coverage_upper", pkg.coverage_upper()},
  };
  if (model.calibrated())
    header["calibration"] = {{"lift_sign", model.calibration().lift_sign},
                             {"lift_shift", model.calibration().lift_shift},
                             {"residual", model.calibration().residual}};
  const std::string hdr = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(hdr.size()));
  out += hdr;
  for (const auto& blk : pkg.blocks()) {
    put(out, static_cast<std::int32_t>(blk.k));
    put(out, static_cast<std::uint64_t>(blk.eigenvalues.size()));
    put(out, static_cast<std::uint8_t>(blk.dense));
    put(out, blk.imaginary_residue);
    out.append(reinterpret_cast<const char*>(blk.eigenvalues.data()),
               blk.eigenvalues.size() * sizeof(double));
    const bool vectors = blk.eigenvectors.size() > 0;
    put(out, static_cast<std::uint8_t>(vectors));
    if (vectors)
      out.append(reinterpret_cast<const char*>(blk.eigenvectors.data()),
                 blk.eigenvectors.size() * sizeof(Complex));
  }
  put(out, crc32(out));

  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write cache file " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

spectral::SpectralPackage load_package(const std::filesystem::path& path,
                                       const geometry::ProjectiveModel& model, int k_max) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open cache file " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kMagic) + 4 || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
    throw CacheCorrupt("cache corrupt: bad magic in " + path.string());
  std::uint32_t stored;
  std::memcpy(&stored, data.data() + data.size() - 4, 4);
  const std::string body = data.substr(0, data.size() - 4);
  if (crc32(body) != stored) throw CacheCorrupt("cache corrupt: checksum mismatch in " + path.string());

  Reader in(body);
  char magic[8];
  in.raw(magic, sizeof(magic));
  if (in.get<std::uint32_t>() != kVersion) throw CacheCorrupt("cache corrupt: unknown version");
  const auto hlen = in.get<std::uint64_t>();
  std::string hdr(hlen, '\0');
  in.raw(hdr.data(), hlen);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hdr);
  } catch (const nlohmann::json::exception& e) {
    throw CacheCorrupt(std::string("cache corrupt: header: ") + e.what());
  }
  if (header.value("d", -1) != model.d() ||
      header.value("weights", std::vector<int>{}) != model.weights() ||
      header.value("k_max", -1) != k_max)
    throw CacheCorrupt("cache corrupt: header does not match the requested model");
  const spectral::Route route = header.value("route", std::string()) == "quadrature"
                                    ? spectral::Route::quadrature
                                    : spectral::Route::analytic;
  std::vector<spectral::Block> blocks(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    spectral::Block& blk = blocks[k];
    blk.k = in.get<std::int32_t>();
    const auto dim = in.get<std::uint64_t>();
    if (blk.k != k || dim != spectral::section_dimension(model.d(), k))
      throw CacheCorrupt("cache corrupt: block layout");
    blk.dense = in.get<std::uint8_t>() != 0;
    blk.imaginary_residue = in.get<double>();
    blk.eigenvalues.resize(dim);
    in.raw(blk.eigenvalues.data(), dim * sizeof(double));
    if (in.get<std::uint8_t>() != 0) {
      blk.eigenvectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      in.raw(blk.eigenvectors.data(), dim * dim * sizeof(Complex));
    }
  }
  if (in.pos() != body.size()) throw CacheCorrupt("cache corrupt: trailing bytes");
  return spectral::SpectralPackage(model, k_max, std::move(blocks), route);
}

LoadResult load_or_build(const geometry::ProjectiveModel& model, int k_max,
                         const spectral::BuildOptions& options,
                         const std::filesystem::path& dir) {
  const auto path = cache_file(dir, model, k_max, options.route);
  bool corrupt = false;
  if (std::filesystem::exists(path)) {
    try {
      return {load_package(path, model, k_max), true, false};
    } catch (const CacheCorrupt&) {
      corrupt = true;
    }
  }
  auto pkg = spectral::eigendata(model, k_max, options);
  save_package(pkg, path);
  return {std::move(pkg), false, corrupt};
}

}  // namespace toeplab::cache
