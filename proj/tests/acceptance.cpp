// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/constants.hpp"
#include "fraclab/transition.hpp"
#include "oracles.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

Field random_field(const GridSpec& grid, std::uint64_t seed) {
  const auto v = oracle::random_vector(static_cast<std::size_t>(grid.size()), seed);
  return Field(grid, Eigen::Map<const Eigen::VectorXd>(v.data(), grid.size()));
}

bool nonincreasing(const std::vector<double>& v, double tol = 1e-10) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + tol) return false;
  }
  return true;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

SweepConfig default_sweep(int n) {
  SweepConfig cfg;
  cfg.s_grid = {0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  cfg.nu_list = {2.0, 2.2, 2.5};
  cfg.N = 3;
  cfg.grid = GridSpec::interval(-1.0, 1.0, n);
  cfg.threads = 1;
  return cfg;
}

std::vector<double> column(const SweepResult& r, const std::function<double(const SweepRow&)>& get) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(get(row));
  return out;
}

Outcome stencil_transition() {
  Outcome o;
  const auto g = stencil_weights(1.0, 64);
  bool exact = g[0] == 2.0 && g[1] == -1.0;
  for (std::size_t k = 2; k < g.size(); ++k) exact = exact && g[k] == 0.0;
  o.require(exact, "g(1) = (2,-1,0,...) exactly");

  const auto grid = GridSpec::interval(-1.0, 1.0, 128);
  bool spd = true;
  for (double s : {0.6, 0.8, 0.95}) {
    const auto op = assemble_operator(grid, s);
    spd = spd && (op.matrix() - op.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0;
    for (int probe = 0; probe < 100; ++probe) spd = spd && dirichlet_form(op, random_field(grid, 10 + probe)) > 0.0;
  }
  o.require(spd, "A_s symmetric and positive on 100 probes for s in {0.6,0.8,0.95}");

  const Field phi = smooth_bump(grid);
  std::vector<double> gaps;
  for (double s : {0.6, 0.8, 0.9, 0.99}) gaps.push_back(operator_convergence_gap(grid, s, phi));
  o.require(strictly_decreasing(gaps), "operator gap decreasing (" + num(gaps.front()) + " -> " + num(gaps.back()) + ")");
  return o;
}

Outcome constants_suite() {
  Outcome o;
  double worst = 0.0;
  for (int N : {3, 4, 5}) {
    for (double s = 0.5; s < 0.995; s += 0.01) {
      worst = std::max(worst, std::abs(constants::C_const(N, s) * constants::A_const(N, s) * constants::B_const(s) -
                                       s * (1.0 - s)));
    }
  }
  o.require(worst <= 1e-12, "C*A*B = s(1-s), max err " + num(worst));

  const double b_err = std::abs(constants::B_const(0.5) - 0.25 * oracle::pi);
  o.require(b_err <= 1e-8, "B(0.5) = pi/4, err " + num(b_err));

  const std::array<double, 2> s{0.99, 0.999};
  const std::array<double, 2> ratio{constants::C_const(3, 0.99) / 0.01, constants::C_const(3, 0.999) / 0.001};
  const double limit = constants::extrapolate_to_one(s, ratio);
  o.require(std::abs(limit - 3.0 / oracle::pi) <= 1e-3, "C(3,s)/(1-s) -> " + num(limit, "%.6f") + " vs 3/pi");

  double kmax = 0.0;
  bool finite = true;
  for (int k = 0; k <= 100; ++k) {
    const double v = constants::sobolev_constant(3, 0.5 + 0.005 * k);
    finite = finite && std::isfinite(v) && v > 0.0;
    kmax = std::max(kmax, v);
  }
  o.require(finite, "Sobolev constant bounded on [1/2,1], max " + num(kmax));
  return o;
}

Outcome nehari_machinery() {
  Outcome o;
  const auto grid = GridSpec::interval(-1.0, 1.0, 128);
  const EnergyContext ctx(assemble_operator(grid, 0.75), Potential::constant(1.0), Nonlinearity::power(4.0));
  double fiber_err = 0.0, grad_err = 0.0, ray_err = 0.0;
  for (int probe = 0; probe < 100; ++probe) {
    const auto u = random_field(grid, 500 + probe);
    const double q4 = u.values().array().pow(4).sum() * grid.cell_volume();
    const double t = std::sqrt(norm_s_squared(ctx, u) / q4);
    fiber_err = std::max(fiber_err, std::abs(fiber_project(ctx, u).t_u / t - 1.0));

    const auto v = random_field(grid, 700 + probe);
    const double eps = 1e-5 * u.values().cwiseAbs().maxCoeff();
    const double fd = (energy(ctx, Field(grid, u.values() + eps * v.values())) -
                       energy(ctx, Field(grid, u.values() - eps * v.values()))) /
                      (2.0 * eps);
    const double exact = energy_gradient(ctx, u).dot(v.values());
    grad_err = std::max(grad_err, std::abs(fd - exact) / std::abs(exact));

    const double e = nehari_energy(ctx, u);
    for (double c : {-2.0, 0.1, 30.0}) {
      ray_err = std::max(ray_err, std::abs(nehari_energy(ctx, Field(grid, c * u.values())) / e - 1.0));
    }
  }
  o.require(fiber_err <= 1e-10, "fiber closed form, max rel err " + num(fiber_err));
  o.require(grad_err <= 1e-6, "gradient vs finite differences, max rel err " + num(grad_err));
  o.require(ray_err <= 1e-10, "ray invariance, max rel err " + num(ray_err));
  return o;
}

Outcome local_reference() {
  Outcome o;
  const auto grid = GridSpec::interval(-1.0, 1.0, 256);
  const EnergyContext ctx(assemble_operator(grid, 1.0), Potential::constant(1.0), Nonlinearity::power(4.0));
  const auto gs = solve_ground_state(ctx, SolverConfig{});
  const auto ref = oracle::shoot_cubic_ground_state(4096);
  double err2 = 0.0;
  for (Eigen::Index i = 0; i < gs.u.size(); ++i) {
    const double d = gs.u[i] - ref(grid.node(i)[0]);
    err2 += d * d * grid.cell_volume();
  }
  const double l2 = std::sqrt(err2);
  const double rel = std::abs(gs.energy - ref.energy()) / ref.energy();
  o.require(gs.converged, "converged");
  o.require(l2 <= 1e-4, "L2 error " + num(l2) + " <= 1e-4");
  o.require(gs.el_residual <= 1e-8, "EL residual " + num(gs.el_residual) + " <= 1e-8");
  o.require(rel <= 1e-5, "energy rel err " + num(rel) + " <= 1e-5 (c=" + num(gs.energy, "%.8f") + ", ref " +
                             num(ref.energy(), "%.8f") + ")");
  return o;
}

struct TrendFlags {
  bool l2_decreasing = false;
  bool energy_gap_decreasing = false;
  bool energy_gap_final = false;
};

TrendFlags trends(const SweepResult& r) {
  TrendFlags t;
  const double c = r.reference.energy;
  const auto l2 = column(r, [](const SweepRow& row) { return row.distances[0]; });
  const auto gap = column(r, [c](const SweepRow& row) { return std::abs(row.energy - c) / c; });
  t.l2_decreasing = strictly_decreasing(l2);
  t.energy_gap_decreasing = nonincreasing(gap);
  t.energy_gap_final = gap.back() < 0.05;
  return t;
}

const SweepResult& sweep_256() {
  static const SweepResult r = run_sweep(default_sweep(256));
  return r;
}

Outcome transition_experiment() {
  Outcome o;
  const auto& r = sweep_256();
  const auto t = trends(r);
  const auto l2 = column(r, [](const SweepRow& row) { return row.distances[0]; });
  o.require(t.l2_decreasing, "(a) L2 distance strictly decreasing, final " + num(l2.back()));

  bool nu_ok = true;
  for (std::size_t k = 0; k < r.nu_list.size(); ++k) {
    nu_ok = nu_ok && nonincreasing(column(r, [k](const SweepRow& row) { return row.distances[k]; }));
  }
  o.require(nu_ok, "(b) L^nu distances decreasing for nu in {2,2.2,2.5}");

  const double c = r.reference.energy;
  o.require(t.energy_gap_decreasing && t.energy_gap_final,
            "(c) |c_s-c|/c decreasing, final " + num(std::abs(r.rows.back().energy - c) / c) + " < 0.05");

  double worst = -1e300;
  for (const auto& row : r.rows) worst = std::max(worst, row.energy - row.reference_upper);
  o.require(worst <= 1e-8, "(d) c_s <= J_s(m_s(u1)) + 1e-8, max excess " + num(worst));

  const auto d = fiber_scaling_diagnostic(r);
  std::vector<double> dev;
  for (double ts : d.t) dev.push_back(std::abs(ts - 1.0));
  o.require(nonincreasing(dev) && dev.back() < 0.02, "(e) |t_s-1| decreasing, |t_0.99-1| = " + num(dev.back()));

  const auto ub = uniform_bound_check(r);
  const auto lb = lower_bound_check(r);
  o.require(ub.finite && lb.floor > 0.0 && lb.rho_hat >= lb.floor,
            "(f) M_hat = " + num(ub.M_hat) + " finite, rho_hat = " + num(lb.rho_hat) + " >= floor " + num(lb.floor));
  o.require(r.all_converged(), "all rows converged");
  return o;
}

Outcome assumption_checkers() {
  Outcome o;
  const auto grid = GridSpec::interval(-1.0, 1.0, 256);
  CheckOptions options;
  options.samples = 10000;
  const auto good = check_assumptions(Potential::constant(1.0), Nonlinearity::power(4.0), grid, options);
  o.require(good.all_passed(), "default model passes (V), (F1)-(F4), the growth bound on 1e4 samples");
  const auto bad = check_assumptions(Potential::constant(1.0), Nonlinearity::power(2.0), grid, options);
  const auto* f4 = bad.find("F4");
  o.require(f4 && !f4->passed && !f4->witnesses.empty(), "p = 2 fails (F4) with a witness");
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto base = fs::temp_directory_path() / "fraclab_acceptance_determinism";
  fs::remove_all(base);
  const ReportMeta meta{"{}", "acceptance", "solver.seed=0"};
  emit_report(sweep_256(), base / "a", meta);
  emit_report(run_sweep(default_sweep(256)), base / "b", meta);
  o.require(slurp(base / "a" / "sweep.csv") == slurp(base / "b" / "sweep.csv"), "sweep.csv byte-identical");
  o.require(slurp(base / "a" / "plotdata.csv") == slurp(base / "b" / "plotdata.csv"), "plotdata.csv byte-identical");
  fs::remove_all(base);
  return o;
}

Outcome mesh_sanity() {
  Outcome o;
  const auto coarse = trends(sweep_256());
  const auto fine_result = run_sweep(default_sweep(512));
  const auto fine = trends(fine_result);
  o.require(coarse.l2_decreasing == fine.l2_decreasing,
            std::string("(a) outcome at n=512: ") + (fine.l2_decreasing ? "pass" : "fail"));
  o.require(coarse.energy_gap_decreasing == fine.energy_gap_decreasing && coarse.energy_gap_final == fine.energy_gap_final,
            std::string("(c) outcome at n=512: ") + (fine.energy_gap_decreasing && fine.energy_gap_final ? "pass" : "fail") +
                ", final gap " +
                num(std::abs(fine_result.rows.back().energy - fine_result.reference.energy) / fine_result.reference.energy));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "stencil transition", 5.0, stencil_transition},
      {2, "constants suite", 10.0, constants_suite},
      {3, "Nehari machinery", 10.0, nehari_machinery},
      {4, "local reference oracle", 60.0, local_reference},
      {5, "transition experiment", 600.0, transition_experiment},
      {6, "assumption checkers", 5.0, assumption_checkers},
      {7, "determinism", 600.0, determinism},
      {8, "mesh sanity", 600.0, mesh_sanity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) o.require(false, "runtime " + num(seconds) + " s over budget");
    if (!o.passed) ++failures;
    std::printf("[%s] criterion %d %s (%.2f s): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
