#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fraclab/nehari.hpp"

namespace fraclab {

enum class InitialGuess { bump, random };

struct SolverConfig {
  /// Relative Euler-Lagrange residual ||A u + V u - f(u)||_2 / ||u||_s.
  double tol_residual = 1e-8;
  /// Relative Nehari residual |J'(u)(u)| / ||u||_s^2.
  double tol_nehari = 1e-10;
  int max_iters = 2000;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  /// Switch from descent to Newton once the relative residual drops below this.
  double newton_threshold = 1e-4;
  InitialGuess init = InitialGuess::bump;
  /// Warm-start consecutive solves of a sweep.
  bool continuation = true;
  std::uint64_t seed = 0;
  FiberOptions fiber;
};

struct GroundState {
  double s = 1.0;
  Field u;
  /// J_s(u), the estimate of the ground-state level c_s.
  double energy = 0.0;
  /// J_s'(u)(u) / ||u||_s^2.
  double nehari_residual = 0.0;
  /// ||A u + V u - f(u)||_2 / ||u||_s.
  double el_residual = 0.0;
  double norm_s = 0.0;
  int iterations = 0;
  int descent_iterations = 0;
  int newton_iterations = 0;
  bool converged = false;
  /// Reduced energy after every accepted descent step.
  std::vector<double> energy_history;
};

/// Positive sine bump (product over axes), or a seeded Gaussian field.
Field initial_guess(const EnergyContext& ctx, const SolverConfig& cfg);

/// Minimizes J_s over the Nehari set.
///
/// Riemannian gradient descent for v -> J_s(m_s(v)) on the unit sphere of
/// ||.||_s, with the gradient taken in the energy inner product (one solve
/// with h^d (A_s + V) per step), Armijo backtracking and normalization as
/// the retraction. Once the relative residual falls below
/// `newton_threshold`, Newton steps on A u + V u - f(u) = 0 finish the
/// solve, each followed by a Nehari reprojection. The result is signed so
/// that its entry of largest modulus is positive. A solve that runs out of
/// iterations returns the last iterate with converged = false.
GroundState solve_ground_state(const EnergyContext& ctx, const SolverConfig& cfg,
                               const std::optional<Field>& init = std::nullopt);

/// Warm start for the next order of a sweep: the previous minimizer
/// reprojected onto the Nehari set of `next`.
Field continuation_sweep_init(const EnergyContext& next, const GroundState& prev,
                              const FiberOptions& options = {});

}  // namespace fraclab
