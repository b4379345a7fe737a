#include "fraclab/nehari.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "fraclab/errors.hpp"

namespace fraclab {

EnergyContext::EnergyContext(FracOperator op, Potential V, Nonlinearity f)
    : EnergyContext(std::make_shared<const FracOperator>(std::move(op)), std::move(V), std::move(f)) {}

EnergyContext::EnergyContext(std::shared_ptr<const FracOperator> op, Potential V, Nonlinearity f)
    : op_(std::move(op)), V_(std::move(V)), f_(std::move(f)) {
  if (!op_) throw RangeError("energy context: null operator");
  V_nodes_ = V_.sample(op_->grid());
  nodes_.reserve(static_cast<std::size_t>(op_->grid().size()));
  for (Eigen::Index i = 0; i < op_->grid().size(); ++i) nodes_.push_back(op_->grid().node(i));
}

Eigen::MatrixXd EnergyContext::energy_matrix() const {
  Eigen::MatrixXd m = op_->matrix();
  m.diagonal() += V_nodes_.values();
  return m * grid().cell_volume();
}

namespace {

void require_on_grid(const EnergyContext& ctx, const Field& u) {
  if (!(u.grid() == ctx.grid())) throw ShapeError("field does not live on the context grid");
}

}  // namespace

double norm_s_squared(const EnergyContext& ctx, const Field& u) {
  require_on_grid(ctx, u);
  return norm_s_squared(ctx.op(), ctx.V_nodes(), u);
}

double energy(const EnergyContext& ctx, const Field& u) {
  return 0.5 * norm_s_squared(ctx, u) - F_integral(u, ctx.nonlinearity());
}

double energy_derivative(const EnergyContext& ctx, const Field& u, const Field& v) {
  require_on_grid(ctx, u);
  require_same_grid(u, v);
  const Eigen::VectorXd au = ctx.op().matrix() * u.values();
  const double linear =
      (au.dot(v.values()) + (ctx.V_nodes().values().array() * u.values().array() * v.values().array()).sum()) *
      ctx.grid().cell_volume();
  return linear - f_pairing(u, v, ctx.nonlinearity());
}

Field euler_lagrange_residual(const EnergyContext& ctx, const Field& u) {
  require_on_grid(ctx, u);
  Eigen::VectorXd r = ctx.op().matrix() * u.values();
  r.array() += ctx.V_nodes().values().array() * u.values().array();
  const auto& f = ctx.nonlinearity();
  for (Eigen::Index i = 0; i < r.size(); ++i) r[i] -= f.f(ctx.nodes()[i], u[i]);
  return Field(ctx.grid(), std::move(r));
}

Eigen::VectorXd energy_gradient(const EnergyContext& ctx, const Field& u) {
  return euler_lagrange_residual(ctx, u).values() * ctx.grid().cell_volume();
}

double nehari_functional(const EnergyContext& ctx, const Field& u) {
  return energy_derivative(ctx, u, u);
}

namespace {

// psi(t) = phi'(t)/t for the unit-norm direction w: 1 - (h/t) sum f(x, t w) w.
struct ReducedFiber {
  const EnergyContext& ctx;
  const Eigen::VectorXd& w;
  double cell;

  double psi(double t) const {
    const auto& f = ctx.nonlinearity();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) sum += f.f(ctx.nodes()[i], t * w[i]) * w[i];
    return 1.0 - cell * sum / t;
  }

  double dpsi(double t) const {
    const auto& f = ctx.nonlinearity();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double z = t * w[i];
      sum += f.df(ctx.nodes()[i], z) * w[i] * w[i] - f.f(ctx.nodes()[i], z) * w[i] / t;
    }
    return -cell * sum / t;
  }
};

}  // namespace

FiberSolution fiber_project(const EnergyContext& ctx, const Field& u, const FiberOptions& options) {
  require_on_grid(ctx, u);
  const double norm2 = norm_s_squared(ctx, u);
  if (!(norm2 > 0.0)) throw RangeError("fiber_project: the direction must be nonzero");
  const double norm = std::sqrt(norm2);
  const Eigen::VectorXd w = u.values() / norm;
  const ReducedFiber fiber{ctx, w, ctx.grid().cell_volume()};

  // Bracket the root of the decreasing function psi in the normalized variable.
  double lo = 0.0;
  double hi = 0.0;
  double psi_lo = 0.0;
  double psi_hi = 0.0;
  const double psi_one = fiber.psi(1.0);
  if (psi_one > 0.0) {
    lo = 1.0;
    psi_lo = psi_one;
    hi = 2.0;
    psi_hi = fiber.psi(hi);
    while (psi_hi > 0.0) {
      lo = hi;
      psi_lo = psi_hi;
      hi *= 2.0;
      if (hi > options.t_max) {
        throw NoBracket("fiber_project: phi'(t) stays positive up to t_max = " +
                        std::to_string(options.t_max) + " (superquadratic growth not seen)");
      }
      psi_hi = fiber.psi(hi);
    }
  } else {
    hi = 1.0;
    psi_hi = psi_one;
    lo = 0.5;
    psi_lo = fiber.psi(lo);
    while (!(psi_lo > 0.0)) {
      hi = lo;
      psi_hi = psi_lo;
      lo *= 0.5;
      if (lo < 1.0 / options.t_max) {
        throw NoBracket("fiber_project: phi'(t) is not positive near t = 0 (f(x,u) = o(u) violated)");
      }
      psi_lo = fiber.psi(lo);
    }
  }

  // Safeguarded Newton on psi.
  double t = (psi_lo / (psi_lo - psi_hi)) * (hi - lo) + lo;  // regula falsi start
  double value = fiber.psi(t);
  int iters = 0;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  while (std::abs(value) > options.tol) {
    if (value > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (hi - lo <= 4.0 * kEps * hi) break;
    if (++iters > options.max_iters) {
      throw NonConvergence("fiber_project: no convergence after " + std::to_string(options.max_iters) +
                           " iterations");
    }
    const double slope = fiber.dpsi(t);
    double next = (slope < 0.0) ? t - value / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
    value = fiber.psi(t);
  }

  FiberSolution sol;
  sol.t_u = t / norm;
  sol.newton_iters = iters;
  sol.residual = std::abs(value);
  Field projected(u.grid(), u.values() * sol.t_u);
  sol.energy_at_t = energy(ctx, projected);

  if (options.verify_uniqueness) {
    constexpr int kSamples = 41;
    const double a = std::log(t / 100.0);
    const double b = std::log(std::min(100.0 * t, options.t_max));
    int changes = 0;
    double prev = fiber.psi(std::exp(a));
    for (int k = 1; k < kSamples; ++k) {
      const double cur = fiber.psi(std::exp(a + (b - a) * k / (kSamples - 1)));
      if ((prev > 0.0) != (cur > 0.0)) ++changes;
      prev = cur;
    }
    sol.sign_changes = changes;
  }
  return sol;
}

Field nehari_point(const EnergyContext& ctx, const Field& u, const FiberOptions& options) {
  const auto sol = fiber_project(ctx, u, options);
  return Field(u.grid(), u.values() * sol.t_u);
}

double nehari_energy(const EnergyContext& ctx, const Field& v, const FiberOptions& options) {
  return fiber_project(ctx, v, options).energy_at_t;
}

double growth_C_epsilon(const Nonlinearity& f, const GridSpec& grid, double eps, double u_range) {
  const double p = f.p();
  if (f.kind() == Nonlinearity::Kind::power) {
    std::vector<std::pair<double, double>> terms;  // (q, sup lambda)
    for (const auto& term : f.terms()) {
      double lam = 0.0;
      for (Eigen::Index i = 0; i < grid.size(); ++i) lam = std::max(lam, std::abs(term.coeff(grid.node(i))));
      terms.emplace_back(term.p, lam);
    }
    double eps_left = eps;
    int middle = 0;
    for (auto [q, lam] : terms) {
      if (q == 2.0) eps_left -= lam;
      if (q > 2.0 && q < p) ++middle;
    }
    if (eps_left < 0.0 || (middle > 0 && eps_left == 0.0)) return std::numeric_limits<double>::infinity();
    double c_eps = 0.0;
    for (auto [q, lam] : terms) {
      if (q == p) {
        c_eps += lam;
      } else if (q > 2.0 && lam > 0.0) {
        // |u|^{q-1} <= theta c |u| + (1-theta) c^{-theta/(1-theta)} |u|^{p-1}.
        const double theta = (p - q) / (p - 2.0);
        const double c = (eps_left / middle) / (lam * theta);
        c_eps += lam * (1.0 - theta) * std::pow(c, -theta / (1.0 - theta));
      }
    }
    return c_eps;
  }
  double c_eps = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Point x = grid.node(i);
    for (int k = -60; k <= 60; ++k) {
      const double u = u_range * std::pow(2.0, k / 4.0 - 15.0);
      if (u > u_range) break;
      for (double su : {u, -u}) {
        c_eps = std::max(c_eps, (std::abs(f.f(x, su)) - eps * u) / std::pow(u, p - 1.0));
      }
    }
  }
  return c_eps;
}

LowerBoundChain lower_bound_chain(const EnergyContext& ctx) {
  LowerBoundChain chain;
  const double p = ctx.nonlinearity().p();
  chain.p = p;

  Eigen::MatrixXd a = ctx.op().matrix();
  a.diagonal() += ctx.V_nodes().values();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (!(lambda_min > 0.0)) throw RangeError("lower_bound_chain: A + V is not positive definite");
  chain.l2_constant = 1.0 / lambda_min;

  const Eigen::MatrixXd m = a * ctx.grid().cell_volume();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  chain.linf_constant = inv.diagonal().maxCoeff();
  chain.embedding_bound = std::pow(chain.linf_constant, (p - 2.0) / 2.0) * chain.l2_constant;

  chain.epsilon = ctx.nonlinearity().is_single_power() ? 0.0 : 0.5 / chain.l2_constant;
  chain.C_epsilon = growth_C_epsilon(ctx.nonlinearity(), ctx.grid(), chain.epsilon);
  const double slack = 1.0 - chain.epsilon * chain.l2_constant;
  chain.rho = std::pow(slack / (chain.C_epsilon * chain.embedding_bound), 1.0 / (p - 2.0));
  chain.energy_floor = slack * (0.5 - 1.0 / p) * chain.rho * chain.rho;
  return chain;
}

double measure_embedding_constant(const EnergyContext& ctx, double p, int random_probes, unsigned seed,
                                  int max_iters) {
  const Eigen::MatrixXd m = ctx.energy_matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  const double cell = ctx.grid().cell_volume();
  auto m_norm = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(m * v)); };
  auto ratio = [&](const Eigen::VectorXd& v) {
    return std::pow(v.array().abs().pow(p).sum() * cell, 1.0 / p) / m_norm(v);
  };

  std::vector<Eigen::VectorXd> probes;
  probes.push_back(smooth_bump(ctx.grid(), 0.9).values());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < random_probes; ++k) {
    Eigen::VectorXd v(ctx.grid().size());
    for (auto& x : v) x = normal(rng);
    probes.push_back(v);
  }

  double best = 0.0;
  for (auto v : probes) {
    v /= m_norm(v);
    double r = ratio(v);
    for (int it = 0; it < max_iters; ++it) {
      Eigen::VectorXd w = v.array().abs().pow(p - 2.0) * v.array();
      v = llt.solve(w * cell);
      v /= m_norm(v);
      const double r_new = ratio(v);
      const bool done = std::abs(r_new - r) <= 1e-15 * r_new;
      r = r_new;
      if (done) break;
    }
    best = std::max(best, r);
  }
  return best;
}

}  // namespace fraclab
