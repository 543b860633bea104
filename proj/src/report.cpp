#include "toeplab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace toeplab::report {

void ScanReport::add(double g, Complex e, Complex p) {
  grid.push_back(g);
  exact.push_back(e);
  predicted.push_back(p);
}

std::vector<double> ScanReport::ratio_abs() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(std::abs(ratio(i)));
  return out;
}

std::vector<double> ScanReport::exact_abs() const {
  std::vector<double> out;
  for (const Complex& e : exact) out.push_back(std::abs(e));
  return out;
}

void ScanReport::validate() const {
  if (grid.size() != exact.size() || grid.size() != predicted.size())
    throw Error("scan report: column length mismatch");
  if (grid.size() >= 2) {
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
      if ((grid[i] > grid[i - 1]) != up || grid[i] == grid[i - 1])
        throw Error("scan report: grid is not strictly monotone");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex r = ratio(i);
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      throw Error("scan report: non-finite ratio at grid value " + format_double(grid[i]));
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

}  // namespace

void write_csv(const ScanReport& r, const std::filesystem::path& path) {
  r.validate();
  auto f = open_out(path);
  f << "grid,exact_re,exact_im,pred_re,pred_im,ratio_abs,ratio_arg\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const Complex q = r.ratio(i);
    f << format_double(r.grid[i]) << ',' << format_double(r.exact[i].real()) << ','
      << format_double(r.exact[i].imag()) << ',' << format_double(r.predicted[i].real()) << ','
      << format_double(r.predicted[i].imag()) << ',' << format_double(std::abs(q)) << ','
      << format_double(std::arg(q)) << '\n';
  }
}

void write_json(const ScanReport& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["metadata"] = r.metadata;
  j["fits"] = r.fits;
  j["points"] = r.grid.size();
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

void write_gnuplot(const ScanReport& r, const std::filesystem::path& script,
                   const std::filesystem::path& csv) {
  auto f = open_out(script);
  f << "# " << r.kind << "\n"
    << "set datafile separator ','\n"
    << "set logscale x\n"
    << "set xlabel 'grid'\n"
    << "set key top left\n"
    << "set multiplot layout 2,1\n"
    << "plot '" << csv.filename().string() << "' every ::1 using 1:6 with linespoints title '|exact/pred|'\n"
    << "set logscale y\n"
    << "plot '" << csv.filename().string()
    << "' every ::1 using 1:(sqrt($2**2+$3**2)) with linespoints title '|exact|', \\\n"
    << "     '' every ::1 using 1:(sqrt($4**2+$5**2)) with lines title '|pred|'\n"
    << "unset multiplot\n";
}

void write_all(const ScanReport& r, const std::filesystem::path& dir, const std::string& stem) {
  const auto csv = dir / (stem + ".csv");
  write_csv(r, csv);
  write_json(r, dir / (stem + ".json"));
  write_gnuplot(r, dir / (stem + ".gp"), csv);
}

}  // namespace toeplab::report
