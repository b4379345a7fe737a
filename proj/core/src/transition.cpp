#include "fraclab/transition.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <thread>

#include "fraclab/errors.hpp"

namespace fraclab {

void validate(const SweepConfig& cfg) {
  for (std::size_t i = 0; i < cfg.s_grid.size(); ++i) {
    const double s = cfg.s_grid[i];
    if (!(s > 0.5 && s < 1.0)) {
      throw RangeError("sweep: s = " + std::to_string(s) + " outside (1/2, 1), the window 1/2 < s < 1");
    }
    if (i > 0 && !(s > cfg.s_grid[i - 1])) throw RangeError("sweep: s_grid must be strictly ascending");
  }
  if (cfg.N < 2) throw RangeError("sweep: N must be >= 2");
  const double nu_max = 2.0 * cfg.N / (cfg.N - 1.0);
  for (double nu : cfg.nu_list) {
    if (!(nu >= 2.0 && nu < nu_max)) {
      throw RangeError("sweep: nu = " + std::to_string(nu) + " outside [2, 2N/(N-1))");
    }
  }
}

bool SweepResult::all_converged() const {
  if (has_reference && !reference.converged) return false;
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.converged; });
}

int worker_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("FRAC_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  return hw;
}

namespace {

using Clock = std::chrono::steady_clock;

EnergyContext make_context(const SweepConfig& cfg, double s) {
  return EnergyContext(assemble_operator(cfg.grid, s), cfg.V, cfg.f);
}

SweepRow describe(const EnergyContext& ctx, const GroundState& gs, const std::optional<Field>& u1,
                  const std::vector<double>& nu_list, const FiberOptions& fiber) {
  SweepRow row;
  row.s = gs.s;
  row.energy = gs.energy;
  row.l2_norm = lebesgue_norm(gs.u, 2.0);
  row.norm_s = gs.norm_s;
  row.el_residual = gs.el_residual;
  row.nehari_residual = gs.nehari_residual;
  row.iterations = gs.iterations;
  row.converged = gs.converged;
  row.rho_floor = lower_bound_chain(ctx).rho;
  if (u1) {
    const Field diff(gs.u.grid(), gs.u.values() - u1->values());
    for (double nu : nu_list) row.distances.push_back(lebesgue_norm(diff, nu));
    const auto fs = fiber_project(ctx, *u1, fiber);
    row.fiber_t = fs.t_u;
    row.reference_upper = fs.energy_at_t;
  }
  return row;
}

void check_converged(const GroundState& gs, const SweepConfig& cfg) {
  if (!gs.converged && !cfg.allow_partial) {
    throw NonConvergence("sweep: solve at s = " + std::to_string(gs.s) + " did not converge (residual " +
                         std::to_string(gs.el_residual) + ")");
  }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  SweepResult result;
  result.nu_list = cfg.nu_list;

  std::optional<Field> u1;
  if (cfg.include_local) {
    const auto start = Clock::now();
    const EnergyContext ctx = make_context(cfg, 1.0);
    const GroundState gs = solve_ground_state(ctx, cfg.solver);
    check_converged(gs, cfg);
    u1 = gs.u;
    result.has_reference = true;
    result.reference = describe(ctx, gs, u1, cfg.nu_list, cfg.solver.fiber);
    result.reference.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    result.reference_u = gs.u;
  }

  const std::size_t count = cfg.s_grid.size();
  result.rows.resize(count);
  result.fields.resize(count);

  auto solve_row = [&](std::size_t i, const std::optional<Field>& init) {
    const auto start = Clock::now();
    const EnergyContext ctx = make_context(cfg, cfg.s_grid[i]);
    std::optional<Field> guess;
    if (init) guess = nehari_point(ctx, *init, cfg.solver.fiber);
    GroundState gs = solve_ground_state(ctx, cfg.solver, guess);
    SweepRow row = describe(ctx, gs, u1, cfg.nu_list, cfg.solver.fiber);
    row.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return std::make_pair(std::move(row), std::move(gs));
  };

  if (cfg.warm_start) {
    std::optional<Field> previous;
    for (std::size_t i = 0; i < count; ++i) {
      auto [row, gs] = solve_row(i, previous);
      check_converged(gs, cfg);
      if (gs.converged) previous = gs.u;
      result.rows[i] = std::move(row);
      result.fields[i] = std::move(gs.u);
    }
  } else {
    const int cap = cfg.threads > 0 ? cfg.threads : worker_threads();
    const int workers = std::max(1, std::min<int>(cap, static_cast<int>(count)));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto work = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          auto [row, gs] = solve_row(i, std::nullopt);
          check_converged(gs, cfg);
          result.rows[i] = std::move(row);
          result.fields[i] = std::move(gs.u);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  return result;
}

UniformBound uniform_bound_check(const SweepResult& result) {
  UniformBound out;
  const auto& rows = result.rows;
  if (rows.empty()) return out;
  std::vector<double> sums;
  for (const auto& r : rows) sums.push_back(r.l2_norm + r.norm_s);
  out.M_hat = *std::max_element(sums.begin(), sums.end());
  out.finite = std::isfinite(out.M_hat);
  if (sums.size() >= 2) {
    const std::size_t tail = std::max<std::size_t>(1, sums.size() / 4);
    const std::size_t split = sums.size() - tail;
    const double early = *std::max_element(sums.begin(), sums.begin() + split);
    const double late = *std::max_element(sums.begin() + split, sums.end());
    out.non_drifting = late <= 1.1 * early;
  }
  return out;
}

LowerBound lower_bound_check(const SweepResult& result) {
  LowerBound out;
  if (result.rows.empty()) return out;
  out.rho_hat = std::numeric_limits<double>::infinity();
  out.floor = std::numeric_limits<double>::infinity();
  for (const auto& r : result.rows) {
    out.rho_hat = std::min(out.rho_hat, r.norm_s);
    out.floor = std::min(out.floor, r.rho_floor);
  }
  out.passed = out.floor > 0.0 && out.rho_hat >= out.floor;
  return out;
}

FiberDiagnostic fiber_scaling_diagnostic(const SweepResult& result) {
  if (!result.has_reference) throw RangeError("fiber_scaling_diagnostic: sweep has no s = 1 reference");
  FiberDiagnostic d;
  d.monotone = true;
  for (const auto& r : result.rows) {
    if (!d.t.empty() && std::abs(r.fiber_t - 1.0) > std::abs(d.t.back() - 1.0)) d.monotone = false;
    d.s.push_back(r.s);
    d.t.push_back(r.fiber_t);
  }
  return d;
}

}  // namespace fraclab
