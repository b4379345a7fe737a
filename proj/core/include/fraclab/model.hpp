#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fraclab/discretization.hpp"

namespace fraclab {

/// Bounded potential V with declared essential bounds [v_min, v_max].
class Potential {
 public:
  using Rule = std::function<double(const Point&)>;

  Potential(Rule rule, double v_min, double v_max, std::string description = "custom");

  static Potential constant(double value);
  /// V(x) = base + curvature |x - center|^2, bounds taken over the grid box.
  static Potential quadratic(double base, double curvature, const GridSpec& grid);

  double operator()(const Point& x) const { return rule_(x); }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  const std::string& description() const { return description_; }

  Field sample(const GridSpec& grid) const;

 private:
  Rule rule_;
  double v_min_;
  double v_max_;
  std::string description_;
};

/// One term lambda(x) |u|^{p-2} u of a power-type nonlinearity.
struct PowerTerm {
  double p = 4.0;
  double lambda = 1.0;
  /// Optional x-dependent coefficient; overrides `lambda` when set.
  std::function<double(const Point&)> coefficient;

  double coeff(const Point& x) const { return coefficient ? coefficient(x) : lambda; }
};

/// f(x,u), its primitive F(x,u) = int_0^u f(x,t) dt and f_u(x,u).
class Nonlinearity {
 public:
  enum class Kind { power, custom };
  using Eval = std::function<double(const Point&, double)>;

  /// f(x,u) = lambda |u|^{p-2} u.
  static Nonlinearity power(double p, double lambda = 1.0);
  /// Sum of power terms; p() reports the largest exponent.
  static Nonlinearity power_sum(std::vector<PowerTerm> terms);
  /// Arbitrary evaluators; `df` may be empty, in which case f_u is
  /// approximated by central differences.
  static Nonlinearity custom(Eval f, Eval F, double p, Eval df = {});

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::vector<PowerTerm>& terms() const { return terms_; }
  bool is_single_power() const { return kind_ == Kind::power && terms_.size() == 1; }

  double f(const Point& x, double u) const;
  double F(const Point& x, double u) const;
  double df(const Point& x, double u) const;

 private:
  Kind kind_ = Kind::power;
  double p_ = 4.0;
  std::vector<PowerTerm> terms_;
  Eval f_;
  Eval F_;
  Eval df_;
};

/// Pointwise evaluation at the grid nodes.
Field apply_f(const Nonlinearity& model, const Field& u);
Field apply_df(const Nonlinearity& model, const Field& u);

/// sum F(x_i, u_i) h^d.
double F_integral(const Field& u, const Nonlinearity& model);
/// sum f(x_i, u_i) v_i h^d.
double f_pairing(const Field& u, const Field& v, const Nonlinearity& model);

/// Upper end of the growth window (2, 2d/(d-1)) in dimension d; infinite for d = 1.
double growth_window_upper(int dimension);

struct Witness {
  Point x{0.0, 0.0};
  double u = 0.0;
  double value = 0.0;
  std::string note;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
  std::vector<Witness> witnesses;
};

struct AssumptionReport {
  std::vector<CheckResult> checks;
  /// Fitted constant of |f| <= C (1 + |u|^{p-1}) over the samples.
  double growth_constant = 0.0;
  /// eps and the fitted C_eps of |f| <= eps |u| + C_eps |u|^{p-1}.
  double growth_epsilon = 0.0;
  double growth_C_eps = 0.0;
  std::size_t samples = 0;

  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
};

struct CheckOptions {
  std::size_t samples = 10000;
  double u_range = 10.0;
  std::uint64_t seed = 0;
  /// Dimension used for the growth window of (F1).
  int dimension = 1;
  double growth_epsilon = 0.1;
};

/// Sampled falsification checks of (V), (F1)-(F4) and the consequences
/// |f| <= eps|u| + C_eps|u|^{p-1} and f(x,u)u >= 2F(x,u).
///
/// x is drawn uniformly from the grid box with the given seed; u runs over
/// uniform grids of [-u_range, u_range] and dyadic sequences toward 0 and
/// toward u_range. Never throws on a failed assumption; failures carry
/// witnesses.
AssumptionReport check_assumptions(const Potential& V, const Nonlinearity& f, const GridSpec& grid,
                                   const CheckOptions& options = {});

std::string to_json(const AssumptionReport& report, int indent = 2);

}  // namespace fraclab
