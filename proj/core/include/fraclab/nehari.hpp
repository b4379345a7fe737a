#pragma once

#include <memory>
#include <vector>

#include "fraclab/discretization.hpp"
#include "fraclab/model.hpp"

namespace fraclab {

/// Operator, potential and nonlinearity sharing one grid. J_s and its
/// Nehari set are defined relative to this context; s = 1 gives J.
class EnergyContext {
 public:
  EnergyContext(FracOperator op, Potential V, Nonlinearity f);
  EnergyContext(std::shared_ptr<const FracOperator> op, Potential V, Nonlinearity f);

  const FracOperator& op() const { return *op_; }
  std::shared_ptr<const FracOperator> op_ptr() const { return op_; }
  const Potential& potential() const { return V_; }
  const Nonlinearity& nonlinearity() const { return f_; }
  const GridSpec& grid() const { return op_->grid(); }
  double s() const { return op_->s(); }
  /// V sampled at the interior nodes.
  const Field& V_nodes() const { return V_nodes_; }
  const std::vector<Point>& nodes() const { return nodes_; }

  /// Matrix of the energy inner product, h^d (A_s + diag V).
  Eigen::MatrixXd energy_matrix() const;

  Field zero_field() const { return Field(grid()); }

 private:
  std::shared_ptr<const FracOperator> op_;
  Potential V_;
  Nonlinearity f_;
  Field V_nodes_;
  std::vector<Point> nodes_;
};

/// ||u||_s^2 in the context's norm (s = 1: the H^1_0 norm with V).
double norm_s_squared(const EnergyContext& ctx, const Field& u);

/// J_s(u) = ||u||_s^2 / 2 - sum F(x,u) h^d.
double energy(const EnergyContext& ctx, const Field& u);

/// J_s'(u)(v) = <A u, v> h^d + sum V u v h^d - sum f(x,u) v h^d.
double energy_derivative(const EnergyContext& ctx, const Field& u, const Field& v);

/// Gradient of J_s with respect to the nodal values: h^d (A u + V u - f(u)).
Eigen::VectorXd energy_gradient(const EnergyContext& ctx, const Field& u);

/// Nodal Euler-Lagrange residual A u + V u - f(x,u).
Field euler_lagrange_residual(const EnergyContext& ctx, const Field& u);

/// J_s'(u)(u) = ||u||_s^2 - sum f(x,u) u h^d.
double nehari_functional(const EnergyContext& ctx, const Field& u);

struct FiberOptions {
  /// Bracket limit on tau = t ||u||_s; the search stays in [1/t_max, t_max].
  double t_max = 1e6;
  /// Stop when |phi'(t)| <= tol * t * ||u||_s^2.
  double tol = 1e-12;
  int max_iters = 200;
  /// Count sign changes of phi' on a log grid around the root.
  bool verify_uniqueness = true;
};

/// Maximizer t_u of phi(t) = J_s(t u) on (0, infinity).
struct FiberSolution {
  double t_u = 0.0;
  double energy_at_t = 0.0;
  int newton_iters = 0;
  /// |phi'(t_u)| / (t_u ||u||_s^2).
  double residual = 0.0;
  /// Sign changes of phi' seen on the verification grid; 1 when verified,
  /// -1 when verification was skipped.
  int sign_changes = -1;
};

/// Nehari projection t_u u of a nonzero field.
///
/// Brackets the root of phi'(t) = t ||u||_s^2 - sum f(x, t u) u h^d by
/// doubling from t = 1 (halving when phi'(1) <= 0) and refines it with
/// Newton steps on phi'(t)/t, falling back to bisection whenever a step
/// leaves the bracket. Throws NoBracket if phi' stays positive up to tau = t_max
/// or is not positive at tau = 1/t_max, and NonConvergence after max_iters.
FiberSolution fiber_project(const EnergyContext& ctx, const Field& u, const FiberOptions& options = {});

/// m_s(u) = t_u u.
Field nehari_point(const EnergyContext& ctx, const Field& u, const FiberOptions& options = {});

/// J_s(m_s(v)) = max_{t > 0} J_s(t v).
double nehari_energy(const EnergyContext& ctx, const Field& v, const FiberOptions& options = {});

/// Computable constants of the lower-bound argument on the Nehari set:
/// ||u||_s^2 <= eps ||u||_2^2 + C_eps ||u||_p^p <= eps c2 ||u||_s^2 + C_eps K_p^p ||u||_s^p.
struct LowerBoundChain {
  double p = 0.0;
  /// ||u||_2^2 <= c2 ||u||_s^2, c2 = 1 / lambda_min(A + V).
  double l2_constant = 0.0;
  /// max_i |u_i|^2 <= linf2 ||u||_s^2, linf2 = max diag((h^d (A + V))^{-1}).
  double linf_constant = 0.0;
  /// Upper bound of K_p^p = sup ||u||_p^p / ||u||_s^p, namely linf2^{(p-2)/2} c2.
  double embedding_bound = 0.0;
  double epsilon = 0.0;
  double C_epsilon = 0.0;
  /// rho with ||u||_s >= rho on the Nehari set.
  double rho = 0.0;
  /// (1 - eps c2)(1/2 - 1/p) rho^2, a floor of J_s on the Nehari set.
  double energy_floor = 0.0;
};

/// |f(x,u)| <= eps |u| + C_eps |u|^{p-1}: exact for power sums (Young's
/// inequality on the intermediate exponents), fitted on samples up to
/// `u_range` for custom nonlinearities.
double growth_C_epsilon(const Nonlinearity& f, const GridSpec& grid, double eps, double u_range = 1e3);

/// Builds the chain with eps = 0 for single powers and eps = 1 / (2 c2)
/// otherwise.
LowerBoundChain lower_bound_chain(const EnergyContext& ctx);

/// Lower estimate of the discrete embedding constant sup ||u||_p / ||u||_s
/// by the normalized power iteration u <- M^{-1}(|u|^{p-2} u), started from
/// the smooth bump and `random_probes` seeded random fields.
double measure_embedding_constant(const EnergyContext& ctx, double p, int random_probes = 3,
                                  unsigned seed = 7, int max_iters = 5000);

}  // namespace fraclab
