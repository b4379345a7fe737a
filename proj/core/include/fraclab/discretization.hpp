#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

namespace fraclab {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// A point of R^dim; unused trailing coordinates are zero.
using Point = std::array<double, 2>;

/// Uniform grid of n interior points per axis on a box. Values outside the
/// box are identically zero, so only interior nodes are stored.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int dim, std::vector<Interval> bounds, int n);

  /// 1-D grid on [a, b] with n interior points.
  static GridSpec interval(double a, double b, int n);
  /// 2-D grid on [a, b]^2 with n interior points per axis.
  static GridSpec square(double a, double b, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  const std::vector<Interval>& bounds() const { return bounds_; }
  double h(int axis = 0) const { return bounds_[axis].length() / (n_ + 1); }
  /// Quadrature weight of one node, the product of per-axis mesh widths.
  double cell_volume() const;
  /// |Omega|.
  double measure() const;
  Eigen::Index size() const;

  /// Node coordinates; axis 0 varies fastest.
  Point node(Eigen::Index index) const;
  double coordinate(int axis, int i) const { return bounds_[axis].lo + (i + 1) * h(axis); }

  bool operator==(const GridSpec&) const = default;

 private:
  int dim_ = 1;
  std::vector<Interval> bounds_{Interval{}};
  int n_ = 3;
};

/// Nodal values over the interior of a grid, extended by zero outside.
class Field {
 public:
  Field() = default;
  explicit Field(GridSpec grid);
  Field(GridSpec grid, Eigen::VectorXd values);

  template <class F>
  static Field sample(const GridSpec& grid, F&& fn) {
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
    return Field(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double& operator[](Eigen::Index i) { return values_[i]; }

 private:
  GridSpec grid_;
  Eigen::VectorXd values_;
};

/// Throws ShapeError unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b);

/// Fractional centered-difference weights g_0..g_K of the Riesz operator
/// with symbol |2 sin(xi/2)|^{2s}; g_{-k} = g_k.
///
/// g_k = (-1)^k Gamma(2s+1) / (Gamma(s+k+1) Gamma(s-k+1)). The pole-bearing
/// factor 1/Gamma(s-k+1) goes through the reflection formula with an exact
/// sin(pi x), so at s = 1 the weights are exactly (2, -1, 0, 0, ...).
/// Accepts 0 < s <= 1.
std::vector<double> stencil_weights(double s, int K);

/// Dense symmetric matrix realizing (-Delta)^s with zero exterior values.
/// Immutable after assembly.
class FracOperator {
 public:
  double s() const { return s_; }
  const GridSpec& grid() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::vector<double>& weights() const { return weights_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Field apply(const Field& u) const;

  friend FracOperator assemble_operator(const GridSpec& grid, double s);

 private:
  double s_ = 1.0;
  GridSpec grid_;
  Eigen::MatrixXd matrix_;
  std::vector<double> weights_;
};

/// Assembles h^{-2s} g_{|i-j|} in 1-D and A_x (x) I + I (x) A_y in 2-D.
/// Requires 1/2 < s <= 1.
FracOperator assemble_operator(const GridSpec& grid, double s);

/// Discrete inner product sum u_i v_i * cell_volume.
double l2_inner(const Field& u, const Field& v);

/// <A u, u> h^d: the discrete ||(-Delta)^{s/2} u||^2.
double dirichlet_form(const FracOperator& op, const Field& u);

/// <A u, u> h^d + sum V u^2 h^d.
double norm_s_squared(const FracOperator& op, const Field& V, const Field& u);

/// (sum |u_i|^nu h^d)^{1/nu}; nu >= 1.
double lebesgue_norm(const Field& u, double nu);

/// Discrete L^2 norm of A_s phi - A_1 phi.
double operator_convergence_gap(const GridSpec& grid, double s, const Field& phi);

/// Smooth bump exp(1 - 1/(1 - r^2)) supported in the ball of the given
/// relative radius around the center of the box; vanishes near the boundary.
Field smooth_bump(const GridSpec& grid, double relative_radius = 0.5);

/// Matrix-free 1-D apply of a symmetric Toeplitz operator by circulant
/// embedding and FFT. O(n log n) per product after an O(n log n) setup.
class ToeplitzApplier {
 public:
  /// `first_column` holds the n entries of the first column.
  explicit ToeplitzApplier(std::vector<double> first_column);
  ~ToeplitzApplier();
  ToeplitzApplier(ToeplitzApplier&&) noexcept;
  ToeplitzApplier& operator=(ToeplitzApplier&&) noexcept;
  ToeplitzApplier(const ToeplitzApplier&) = delete;
  ToeplitzApplier& operator=(const ToeplitzApplier&) = delete;

  /// Builds the applier for a 1-D fractional operator.
  static ToeplitzApplier for_operator(const FracOperator& op);

  Eigen::Index size() const { return n_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

 private:
  struct Plan;
  Eigen::Index n_ = 0;
  std::unique_ptr<Plan> plan_;
};

}  // namespace fraclab
