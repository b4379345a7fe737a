#include "fraclab/discretization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fraclab/errors.hpp"

namespace fraclab {
namespace {

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == 1.5) return -1.0;
  return std::sin(std::numbers::pi * r);
}

}  // namespace

GridSpec::GridSpec(int dim, std::vector<Interval> bounds, int n)
    : dim_(dim), bounds_(std::move(bounds)), n_(n) {
  if (dim_ != 1 && dim_ != 2) throw RangeError("grid: dim must be 1 or 2");
  if (static_cast<int>(bounds_.size()) != dim_) {
    throw RangeError("grid: expected one interval per axis");
  }
  if (n_ < 3) throw RangeError("grid: need at least 3 interior points per axis");
  for (const auto& b : bounds_) {
    if (!(b.hi > b.lo) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw RangeError("grid: each axis needs finite bounds with a < b");
    }
  }
}

GridSpec GridSpec::interval(double a, double b, int n) { return GridSpec(1, {Interval{a, b}}, n); }

GridSpec GridSpec::square(double a, double b, int n) {
  return GridSpec(2, {Interval{a, b}, Interval{a, b}}, n);
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim_; ++k) v *= h(k);
  return v;
}

double GridSpec::measure() const {
  double m = 1.0;
  for (const auto& b : bounds_) m *= b.length();
  return m;
}

Eigen::Index GridSpec::size() const {
  Eigen::Index total = 1;
  for (int k = 0; k < dim_; ++k) total *= n_;
  return total;
}

Point GridSpec::node(Eigen::Index index) const {
  Point p{0.0, 0.0};
  p[0] = coordinate(0, static_cast<int>(index % n_));
  if (dim_ == 2) p[1] = coordinate(1, static_cast<int>(index / n_));
  return p;
}

Field::Field(GridSpec grid) : grid_(std::move(grid)), values_(Eigen::VectorXd::Zero(grid_.size())) {}

Field::Field(GridSpec grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ShapeError("field: " + std::to_string(values_.size()) + " values for a grid of " +
                     std::to_string(grid_.size()) + " nodes");
  }
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()) || a.size() != b.size()) {
    throw ShapeError("fields live on different grids");
  }
}

std::vector<double> stencil_weights(double s, int K) {
  if (!(s > 0.0 && s <= 1.0)) throw RangeError("stencil_weights: s must lie in (0, 1]");
  if (K < 1) throw RangeError("stencil_weights: cutoff K must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(K) + 1);
  // Small arguments: direct Gamma keeps g_0 = 2 and g_1 = -1 exact at s = 1.
  const double num = std::tgamma(2.0 * s + 1.0);
  g[0] = num / (std::tgamma(s + 1.0) * std::tgamma(s + 1.0));
  g[1] = -num / (std::tgamma(s + 2.0) * std::tgamma(s));
  const double lg_num = std::lgamma(2.0 * s + 1.0);
  // k >= 2: 1/Gamma(s-k+1) = Gamma(k-s) sin(pi(s-k+1)) / pi, and
  // (-1)^k sin(pi(s-k+1)) = -sin(pi s).
  const double sin_ps = sin_pi(s);
  for (int k = 2; k <= K; ++k) {
    if (sin_ps == 0.0) {
      g[k] = 0.0;
      continue;
    }
    const double mag = std::exp(lg_num + std::lgamma(k - s) - std::lgamma(s + k + 1.0));
    g[k] = -mag * sin_ps / std::numbers::pi;
  }
  return g;
}

Eigen::VectorXd FracOperator::apply(const Eigen::VectorXd& u) const {
  if (u.size() != matrix_.cols()) throw ShapeError("operator apply: size mismatch");
  return matrix_ * u;
}

Field FracOperator::apply(const Field& u) const {
  if (!(u.grid() == grid_)) throw ShapeError("operator apply: field on a different grid");
  return Field(grid_, matrix_ * u.values());
}

FracOperator assemble_operator(const GridSpec& grid, double s) {
  if (!(s > 0.5 && s <= 1.0)) {
    throw RangeError("assemble_operator: s must lie in (1/2, 1], got " + std::to_string(s));
  }
  const int n = grid.n();
  FracOperator op;
  op.s_ = s;
  op.grid_ = grid;
  op.weights_ = stencil_weights(s, std::max(1, n - 1));

  auto axis_matrix = [&](int axis) {
    const double scale = std::pow(grid.h(axis), -2.0 * s);
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) a(i, j) = scale * op.weights_[std::abs(i - j)];
    }
    return a;
  };

  if (grid.dim() == 1) {
    op.matrix_ = axis_matrix(0);
  } else {
    const Eigen::MatrixXd ax = axis_matrix(0);
    const Eigen::MatrixXd ay = axis_matrix(1);
    const Eigen::Index total = grid.size();
    op.matrix_ = Eigen::MatrixXd::Zero(total, total);
    // index = i + n j; x-coupling within a row j, y-coupling across rows.
    for (int j = 0; j < n; ++j) {
      op.matrix_.block(static_cast<Eigen::Index>(j) * n, static_cast<Eigen::Index>(j) * n, n, n) += ax;
      for (int jj = 0; jj < n; ++jj) {
        const double c = ay(j, jj);
        for (int i = 0; i < n; ++i) {
          op.matrix_(i + static_cast<Eigen::Index>(n) * j, i + static_cast<Eigen::Index>(n) * jj) += c;
        }
      }
    }
  }
  return op;
}

double l2_inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  return u.values().dot(v.values()) * u.grid().cell_volume();
}

double dirichlet_form(const FracOperator& op, const Field& u) {
  if (!(u.grid() == op.grid())) throw ShapeError("dirichlet_form: field on a different grid");
  return u.values().dot(op.matrix() * u.values()) * u.grid().cell_volume();
}

double norm_s_squared(const FracOperator& op, const Field& V, const Field& u) {
  require_same_grid(V, u);
  const double potential =
      (V.values().array() * u.values().array().square()).sum() * u.grid().cell_volume();
  return dirichlet_form(op, u) + potential;
}

double lebesgue_norm(const Field& u, double nu) {
  if (!(nu >= 1.0)) throw RangeError("lebesgue_norm: exponent must be >= 1");
  if (nu == 2.0) return std::sqrt(u.values().squaredNorm() * u.grid().cell_volume());
  const double sum = u.values().array().abs().pow(nu).sum();
  return std::pow(sum * u.grid().cell_volume(), 1.0 / nu);
}

double operator_convergence_gap(const GridSpec& grid, double s, const Field& phi) {
  if (!(phi.grid() == grid)) throw ShapeError("operator_convergence_gap: field on a different grid");
  if (s == 1.0) return 0.0;
  const auto as = assemble_operator(grid, s);
  const auto a1 = assemble_operator(grid, 1.0);
  const Eigen::VectorXd diff = as.matrix() * phi.values() - a1.matrix() * phi.values();
  return std::sqrt(diff.squaredNorm() * grid.cell_volume());
}

Field smooth_bump(const GridSpec& grid, double relative_radius) {
  Point center{0.0, 0.0};
  Point half{1.0, 1.0};
  for (int k = 0; k < grid.dim(); ++k) {
    center[k] = 0.5 * (grid.bounds()[k].lo + grid.bounds()[k].hi);
    half[k] = 0.5 * grid.bounds()[k].length() * relative_radius;
  }
  return Field::sample(grid, [&](const Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < grid.dim(); ++k) {
      const double d = (x[k] - center[k]) / half[k];
      r2 += d * d;
    }
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  });
}

}  // namespace fraclab
