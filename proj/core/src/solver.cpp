#include "fraclab/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fraclab/errors.hpp"

namespace fraclab {
namespace {

struct Diagnostics {
  double el = 0.0;
  double nehari = 0.0;
  double norm_s = 0.0;
};

Diagnostics diagnose(const EnergyContext& ctx, const Eigen::MatrixXd& m, const Field& u) {
  Diagnostics d;
  const double norm2 = u.values().dot(m * u.values());
  d.norm_s = std::sqrt(norm2);
  const Field r = euler_lagrange_residual(ctx, u);
  d.el = std::sqrt(r.values().squaredNorm() * ctx.grid().cell_volume()) / d.norm_s;
  // J'(u)(u) = h^d <r, u>.
  d.nehari = r.values().dot(u.values()) * ctx.grid().cell_volume() / norm2;
  return d;
}

void normalize_sign(Field& u) {
  Eigen::Index imax = 0;
  u.values().cwiseAbs().maxCoeff(&imax);
  if (u[imax] < 0.0) u.values() = -u.values();
}

}  // namespace

Field initial_guess(const EnergyContext& ctx, const SolverConfig& cfg) {
  const auto& grid = ctx.grid();
  if (cfg.init == InitialGuess::random) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(grid.size());
    for (auto& x : v) x = normal(rng);
    return Field(grid, std::move(v));
  }
  return Field::sample(grid, [&](const Point& x) {
    double value = 1.0;
    for (int k = 0; k < grid.dim(); ++k) {
      const auto& b = grid.bounds()[k];
      value *= std::sin(std::numbers::pi * (x[k] - b.lo) / b.length());
    }
    return value;
  });
}

GroundState solve_ground_state(const EnergyContext& ctx, const SolverConfig& cfg,
                               const std::optional<Field>& init) {
  if (!(cfg.tol_residual > 0.0 && cfg.tol_nehari > 0.0)) throw RangeError("solver: tolerances must be positive");
  if (cfg.max_iters < 1) throw RangeError("solver: max_iters must be >= 1");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) throw RangeError("solver: shrink must lie in (0,1)");

  const Eigen::MatrixXd m = ctx.energy_matrix();
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw RangeError("solver: energy matrix is not positive definite");
  auto m_norm = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(m * v)); };

  Field start = init ? *init : initial_guess(ctx, cfg);
  if (!(start.grid() == ctx.grid())) throw ShapeError("solver: initial guess on a different grid");
  const double start_norm = m_norm(start.values());
  if (!(start_norm > 0.0)) throw RangeError("solver: initial guess must be nonzero");

  GroundState gs;
  gs.s = ctx.s();

  Field v(ctx.grid(), start.values() / start_norm);
  FiberSolution fiber = fiber_project(ctx, v, cfg.fiber);
  double t = fiber.t_u;
  double psi = fiber.energy_at_t;
  gs.energy_history.push_back(psi);

  double beta = 1.0;
  double newton_threshold = cfg.newton_threshold;
  Field u(ctx.grid(), v.values() * t);
  Diagnostics diag = diagnose(ctx, m, u);

  while (gs.iterations < cfg.max_iters) {
    if (diag.el <= cfg.tol_residual && std::abs(diag.nehari) <= cfg.tol_nehari) {
      gs.converged = true;
      break;
    }
    ++gs.iterations;

    if (diag.el <= newton_threshold) {
      // Newton step on the nodal Euler-Lagrange equation.
      Eigen::MatrixXd jac = ctx.op().matrix();
      const Field fu = apply_df(ctx.nonlinearity(), u);
      jac.diagonal() += ctx.V_nodes().values() - fu.values();
      const Field r = euler_lagrange_residual(ctx, u);
      const Eigen::VectorXd delta = jac.partialPivLu().solve(r.values());
      Field trial(ctx.grid(), u.values() - delta);
      const double trial_norm = m_norm(trial.values());
      bool accepted = false;
      if (trial_norm > 0.0 && delta.allFinite()) {
        Field trial_dir(ctx.grid(), trial.values() / trial_norm);
        try {
          const FiberSolution fs = fiber_project(ctx, trial_dir, cfg.fiber);
          Field projected(ctx.grid(), trial_dir.values() * fs.t_u);
          const Diagnostics trial_diag = diagnose(ctx, m, projected);
          if (trial_diag.el < diag.el) {
            v = std::move(trial_dir);
            t = fs.t_u;
            psi = fs.energy_at_t;
            u = std::move(projected);
            diag = trial_diag;
            accepted = true;
          }
        } catch (const NoBracket&) {
        }
      }
      if (accepted) {
        ++gs.newton_iterations;
        continue;
      }
      // Newton stalled: tighten the switch and fall through to a descent step.
      newton_threshold = 0.1 * diag.el;
    }

    // Riemannian gradient in the energy metric, projected on the tangent space.
    Eigen::VectorXd g = t * llt.solve(energy_gradient(ctx, u));
    g -= v.values().dot(m * g) * v.values();
    const double g_norm2 = g.dot(m * g);

    double step = beta;
    bool accepted = false;
    while (step > 1e-14) {
      const double alpha = step / (t * t);
      Eigen::VectorXd w = v.values() - alpha * g;
      const double w_norm = m_norm(w);
      if (w_norm > 0.0) {
        Field candidate(ctx.grid(), w / w_norm);
        try {
          const FiberSolution fs = fiber_project(ctx, candidate, cfg.fiber);
          if (fs.energy_at_t <= psi - cfg.sufficient_decrease * alpha * g_norm2) {
            v = std::move(candidate);
            t = fs.t_u;
            psi = fs.energy_at_t;
            accepted = true;
            break;
          }
        } catch (const NoBracket&) {
        }
      }
      step *= cfg.shrink;
    }
    if (!accepted) {
      // Stagnation: the line search cannot decrease the reduced energy any
      // further at double precision. Let Newton take over if it can.
      if (newton_threshold < diag.el) {
        newton_threshold = 2.0 * diag.el;
        continue;
      }
      break;
    }
    ++gs.descent_iterations;
    gs.energy_history.push_back(psi);
    beta = std::min(1.0, 2.0 * step);
    u = Field(ctx.grid(), v.values() * t);
    diag = diagnose(ctx, m, u);
  }
  if (!gs.converged && diag.el <= cfg.tol_residual && std::abs(diag.nehari) <= cfg.tol_nehari) {
    gs.converged = true;
  }

  normalize_sign(u);
  gs.energy = energy(ctx, u);
  gs.nehari_residual = diag.nehari;
  gs.el_residual = diag.el;
  gs.norm_s = diag.norm_s;
  gs.u = std::move(u);
  return gs;
}

Field continuation_sweep_init(const EnergyContext& next, const GroundState& prev, const FiberOptions& options) {
  if (!prev.converged) throw RangeError("continuation_sweep_init: previous solve did not converge");
  return nehari_point(next, prev.u, options);
}

}  // namespace fraclab
