#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fraclab/errors.hpp"
#include "fraclab/transition.hpp"
#include "format.hpp"
#include "json.hpp"

#ifndef FRACLAB_VERSION_STRING
#define FRACLAB_VERSION_STRING "0.0.0+unknown"
#endif

namespace fraclab {
namespace {

using detail::shortest;

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_row(std::ostream& out, const SweepRow& r, bool is_reference) {
  out << shortest(r.s) << ',' << shortest(r.energy) << ',' << shortest(r.l2_norm) << ',' << shortest(r.norm_s);
  for (double d : r.distances) out << ',' << shortest(d);
  out << ',' << shortest(r.fiber_t) << ',' << shortest(r.reference_upper) << ',' << shortest(r.el_residual) << ','
      << shortest(r.nehari_residual) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
      << shortest(r.rho_floor) << ',' << (is_reference ? 1 : 0) << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& text, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) throw IoError(path.string() + ": bad number '" + text + "'");
  return v;
}

}  // namespace

std::string version_string() { return FRACLAB_VERSION_STRING; }

void emit_report(const SweepResult& result, const std::filesystem::path& dir, const ReportMeta& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  {
    auto out = open_for_write(dir / "sweep.csv");
    out << "s,energy,l2_norm,norm_s";
    for (double nu : result.nu_list) out << ",dist_nu_" << shortest(nu);
    out << ",fiber_t,reference_upper,el_residual,nehari_residual,iterations,converged,rho_floor,is_reference\n";
    for (const auto& r : result.rows) write_row(out, r, false);
    if (result.has_reference) write_row(out, result.reference, true);
    if (!out) throw IoError("write failed for " + (dir / "sweep.csv").string());
  }

  {
    std::size_t l2_column = 0;
    for (std::size_t k = 0; k < result.nu_list.size(); ++k) {
      if (result.nu_list[k] == 2.0) l2_column = k;
    }
    auto out = open_for_write(dir / "plotdata.csv");
    out << "s,energy,dist_l2\n";
    for (const auto& r : result.rows) {
      out << shortest(r.s) << ',' << shortest(r.energy) << ','
          << (r.distances.empty() ? std::string("nan") : shortest(r.distances[l2_column])) << '\n';
    }
    if (result.has_reference) out << "1," << shortest(result.reference.energy) << ",0\n";
    if (!out) throw IoError("write failed for " + (dir / "plotdata.csv").string());
  }

  {
    nlohmann::ordered_json j;
    j["version"] = version_string();
    j["config_hash"] = meta.config_hash;
    j["config"] = nlohmann::ordered_json::parse(meta.config_json.empty() ? "{}" : meta.config_json);
    j["seeds"] = meta.seeds;
    j["all_converged"] = result.all_converged();
    j["rows"] = result.rows.size();
    auto& times = j["wall_time_seconds"] = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) times.push_back({{"s", r.s}, {"seconds", r.wall_time}});
    if (result.has_reference) times.push_back({{"s", 1.0}, {"seconds", result.reference.wall_time}});
    if (!result.rows.empty()) {
      const auto ub = uniform_bound_check(result);
      const auto lb = lower_bound_check(result);
      j["M_hat"] = ub.M_hat;
      j["rho_hat"] = lb.rho_hat;
      j["rho_floor"] = lb.floor;
    }
    auto out = open_for_write(dir / "meta.json");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + (dir / "meta.json").string());
  }
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split(line);
  SweepResult result;
  std::size_t n_dist = 0;
  for (const auto& h : header) {
    if (h.rfind("dist_nu_", 0) == 0) {
      result.nu_list.push_back(parse_double(h.substr(8), path));
      ++n_dist;
    }
  }
  const std::size_t expected = 4 + n_dist + 8;
  if (header.size() != expected) throw IoError(path.string() + ": unexpected header");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != expected) throw IoError(path.string() + ": row has " + std::to_string(c.size()) + " cells");
    SweepRow r;
    std::size_t k = 0;
    r.s = parse_double(c[k++], path);
    r.energy = parse_double(c[k++], path);
    r.l2_norm = parse_double(c[k++], path);
    r.norm_s = parse_double(c[k++], path);
    for (std::size_t d = 0; d < n_dist; ++d) r.distances.push_back(parse_double(c[k++], path));
    r.fiber_t = parse_double(c[k++], path);
    r.reference_upper = parse_double(c[k++], path);
    r.el_residual = parse_double(c[k++], path);
    r.nehari_residual = parse_double(c[k++], path);
    r.iterations = std::stoi(c[k++]);
    r.converged = c[k++] == "1";
    r.rho_floor = parse_double(c[k++], path);
    const bool is_reference = c[k++] == "1";
    if (is_reference) {
      result.has_reference = true;
      result.reference = r;
    } else {
      result.rows.push_back(r);
    }
  }
  return result;
}

}  // namespace fraclab
