#include "fraclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclab/errors.hpp"
#include "json.hpp"

namespace fraclab {

Potential::Potential(Rule rule, double v_min, double v_max, std::string description)
    : rule_(std::move(rule)), v_min_(v_min), v_max_(v_max), description_(std::move(description)) {
  if (!rule_) throw RangeError("potential: empty evaluation rule");
  if (!(v_min_ <= v_max_)) throw RangeError("potential: declared bounds need v_min <= v_max");
}

Potential Potential::constant(double value) {
  return Potential([value](const Point&) { return value; }, value, value,
                   "constant " + std::to_string(value));
}

Potential Potential::quadratic(double base, double curvature, const GridSpec& grid) {
  Point center{0.0, 0.0};
  double far2 = 0.0;
  for (int k = 0; k < grid.dim(); ++k) {
    center[k] = 0.5 * (grid.bounds()[k].lo + grid.bounds()[k].hi);
    far2 += 0.25 * grid.bounds()[k].length() * grid.bounds()[k].length();
  }
  const int dim = grid.dim();
  auto rule = [=](const Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += (x[k] - center[k]) * (x[k] - center[k]);
    return base + curvature * r2;
  };
  const double lo = std::min(base, base + curvature * far2);
  const double hi = std::max(base, base + curvature * far2);
  return Potential(rule, lo, hi, "quadratic");
}

Field Potential::sample(const GridSpec& grid) const {
  return Field::sample(grid, rule_);
}

Nonlinearity Nonlinearity::power(double p, double lambda) {
  return power_sum({PowerTerm{p, lambda, {}}});
}

Nonlinearity Nonlinearity::power_sum(std::vector<PowerTerm> terms) {
  if (terms.empty()) throw RangeError("nonlinearity: at least one power term is required");
  for (const auto& t : terms) {
    if (!(t.p >= 2.0) || !std::isfinite(t.p)) throw RangeError("nonlinearity: exponents must be >= 2");
  }
  Nonlinearity n;
  n.kind_ = Kind::power;
  n.p_ = std::max_element(terms.begin(), terms.end(), [](auto& a, auto& b) { return a.p < b.p; })->p;
  n.terms_ = std::move(terms);
  return n;
}

Nonlinearity Nonlinearity::custom(Eval f, Eval F, double p, Eval df) {
  if (!f || !F) throw RangeError("nonlinearity: custom kind needs f and F evaluators");
  Nonlinearity n;
  n.kind_ = Kind::custom;
  n.p_ = p;
  n.f_ = std::move(f);
  n.F_ = std::move(F);
  n.df_ = std::move(df);
  return n;
}

double Nonlinearity::f(const Point& x, double u) const {
  if (kind_ == Kind::custom) return f_(x, u);
  const double au = std::abs(u);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coeff(x) * std::pow(au, t.p - 2.0) * u;
  return sum;
}

double Nonlinearity::F(const Point& x, double u) const {
  if (kind_ == Kind::custom) return F_(x, u);
  const double au = std::abs(u);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coeff(x) * std::pow(au, t.p) / t.p;
  return sum;
}

double Nonlinearity::df(const Point& x, double u) const {
  if (kind_ == Kind::custom) {
    if (df_) return df_(x, u);
    const double step = 1e-6 * std::max(1.0, std::abs(u));
    return (f_(x, u + step) - f_(x, u - step)) / (2.0 * step);
  }
  const double au = std::abs(u);
  double sum = 0.0;
  for (const auto& t : terms_) sum += (t.p - 1.0) * t.coeff(x) * std::pow(au, t.p - 2.0);
  return sum;
}

Field apply_f(const Nonlinearity& model, const Field& u) {
  Field out(u.grid());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = model.f(u.grid().node(i), u[i]);
  return out;
}

Field apply_df(const Nonlinearity& model, const Field& u) {
  Field out(u.grid());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = model.df(u.grid().node(i), u[i]);
  return out;
}

double F_integral(const Field& u, const Nonlinearity& model) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += model.F(u.grid().node(i), u[i]);
  return sum * u.grid().cell_volume();
}

double f_pairing(const Field& u, const Field& v, const Nonlinearity& model) {
  require_same_grid(u, v);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += model.f(u.grid().node(i), u[i]) * v[i];
  return sum * u.grid().cell_volume();
}

double growth_window_upper(int dimension) {
  if (dimension <= 1) return std::numeric_limits<double>::infinity();
  return 2.0 * dimension / (dimension - 1.0);
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const CheckResult* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

constexpr std::size_t kMaxWitnesses = 5;

void fail(CheckResult& check, Witness w) {
  check.passed = false;
  if (check.witnesses.size() < kMaxWitnesses) check.witnesses.push_back(std::move(w));
}

}  // namespace

AssumptionReport check_assumptions(const Potential& V, const Nonlinearity& f, const GridSpec& grid,
                                   const CheckOptions& options) {
  if (options.samples < 100) throw RangeError("check_assumptions: need at least 100 samples");
  if (!(options.u_range > 0.0)) throw RangeError("check_assumptions: u_range must be positive");

  const std::size_t n_x = static_cast<std::size_t>(std::ceil(std::sqrt(double(options.samples))));
  const std::size_t n_u = (options.samples + 2 * n_x - 1) / (2 * n_x);

  std::mt19937_64 rng(options.seed);
  std::vector<Point> xs(n_x);
  for (auto& x : xs) {
    for (int k = 0; k < grid.dim(); ++k) {
      const auto& b = grid.bounds()[k];
      x[k] = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
    }
  }

  AssumptionReport report;
  report.samples = n_x * n_u * 2;
  const double p = f.p();

  CheckResult cv{"V", true, "", {}};
  CheckResult cf1{"F1", true, "", {}};
  CheckResult cf2{"F2", true, "", {}};
  CheckResult cf3{"F3", true, "", {}};
  CheckResult cf4{"F4", true, "", {}};
  CheckResult cgb{"growth_bound", true, "", {}};

  if (!(V.v_min() > 0.0)) fail(cv, {{0, 0}, 0.0, V.v_min(), "declared inf V <= 0"});
  if (!std::isfinite(V.v_max())) fail(cv, {{0, 0}, 0.0, V.v_max(), "declared sup V not finite"});

  const double upper = growth_window_upper(options.dimension);
  if (!(p > 2.0 && p < upper)) {
    fail(cf1, {{0, 0}, 0.0, p, "exponent p outside (2, 2d/(d-1))"});
  }

  const double eps = options.growth_epsilon;
  double growth_c = 0.0;
  double c_eps = 0.0;
  const double f3_bound = 0.5 * V.v_max();

  for (const auto& x : xs) {
    const double vx = V(x);
    if (!(vx > 0.0) || !std::isfinite(vx)) fail(cv, {x, 0.0, vx, "V(x) not positive and finite"});
    if (vx < V.v_min() - 1e-12 * std::abs(V.v_min()) || vx > V.v_max() + 1e-12 * std::abs(V.v_max())) {
      fail(cv, {x, 0.0, vx, "V(x) outside declared bounds"});
    }

    for (int sign : {1, -1}) {
      // Uniform grid on (0, u_range] (or its mirror).
      double prev_ratio = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 1; j <= n_u; ++j) {
        const double u = sign * options.u_range * double(j) / double(n_u);
        const double fu = f.f(x, u);
        const double Fu = f.F(x, u);
        const double au = std::abs(u);
        if (!std::isfinite(fu) || !std::isfinite(Fu)) {
          fail(cf1, {x, u, fu, "f or F not finite"});
          continue;
        }
        growth_c = std::max(growth_c, std::abs(fu) / (1.0 + std::pow(au, p - 1.0)));
        c_eps = std::max(c_eps, (std::abs(fu) - eps * au) / std::pow(au, p - 1.0));

        // (F4): f(x,u)/|u| strictly increasing in u on each half-line, i.e.
        // f(x,u)/u strictly increasing in |u|.
        const double ratio = fu / u;
        if (!(ratio > prev_ratio)) fail(cf4, {x, u, ratio, "f(x,u)/u not strictly increasing in |u|"});
        prev_ratio = ratio;

        const double ar_gap = fu * u - 2.0 * Fu;
        if (ar_gap < -1e-12 * std::max(1.0, std::abs(fu * u))) {
          fail(cgb, {x, u, ar_gap, "f(x,u)u < 2F(x,u)"});
        }
      }

      // (F2): |f(x,u)/u| decreasing to 0 along u = 2^{-k}.
      double first = 0.0;
      double last = 0.0;
      double prev = std::numeric_limits<double>::infinity();
      constexpr int kDyadic = 50;
      for (int k = 1; k <= kDyadic; ++k) {
        const double u = sign * std::ldexp(1.0, -k);
        const double fu = f.f(x, u);
        const double q = std::abs(fu / u);
        c_eps = std::max(c_eps, (std::abs(fu) - eps * std::abs(u)) / std::pow(std::abs(u), p - 1.0));
        if (k == 1) first = q;
        if (k > kDyadic - 10 && !(q < prev)) {
          fail(cf2, {x, u, q, "f(x,u)/u not decreasing toward 0"});
        }
        prev = q;
        last = q;
      }
      if (!(last <= 0.5 * first)) fail(cf2, {x, sign * std::ldexp(1.0, -kDyadic), last, "f(x,u)/u does not decay"});

      // (F3): F(x,u)/u^2 increasing along u_range 2^{-k}, k = 10..0, and
      // above sup V / 2 at u_range.
      double prev_q = -std::numeric_limits<double>::infinity();
      for (int k = 10; k >= 0; --k) {
        const double u = sign * options.u_range * std::ldexp(1.0, -k);
        const double q = f.F(x, u) / (u * u);
        if (!(q > prev_q)) fail(cf3, {x, u, q, "F(x,u)/u^2 not increasing"});
        prev_q = q;
      }
      if (!(prev_q > f3_bound)) {
        fail(cf3, {x, sign * options.u_range, prev_q, "F(x,u)/u^2 below sup V / 2 at u_range"});
      }
    }
  }

  if (!std::isfinite(growth_c)) fail(cf1, {{0, 0}, 0.0, growth_c, "growth constant not finite"});
  if (!std::isfinite(c_eps)) fail(cgb, {{0, 0}, 0.0, c_eps, "C_eps not finite"});

  cv.detail = "inf V = " + std::to_string(V.v_min()) + ", sup V = " + std::to_string(V.v_max());
  cf1.detail = "fitted C = " + std::to_string(growth_c) + ", p = " + std::to_string(p) +
               "; measurability of f(., u) is assumed for the provided evaluators";
  cf2.detail = "dyadic decay of f(x,u)/u over 50 halvings";
  cf3.detail = "F(x,u)/u^2 on a dyadic sequence up to u_range";
  cf4.detail = "strict increase of f(x,u)/u in |u| on both half-lines";
  cgb.detail = "eps = " + std::to_string(eps) + ", C_eps = " + std::to_string(c_eps) +
                "; f(x,u)u >= 2F(x,u) on all samples";

  report.growth_constant = growth_c;
  report.growth_epsilon = eps;
  report.growth_C_eps = std::max(0.0, c_eps);
  report.checks = {cv, cf1, cf2, cf3, cf4, cgb};
  return report;
}

std::string to_json(const AssumptionReport& report, int indent) {
  nlohmann::ordered_json j;
  j["all_passed"] = report.all_passed();
  j["samples"] = report.samples;
  j["growth_constant"] = report.growth_constant;
  j["growth_epsilon"] = report.growth_epsilon;
  j["growth_C_eps"] = report.growth_C_eps;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["detail"] = c.detail;
    auto& w = jc["witnesses"] = nlohmann::ordered_json::array();
    for (const auto& wi : c.witnesses) {
      w.push_back({{"x", {wi.x[0], wi.x[1]}}, {"u", wi.u}, {"value", wi.value}, {"note", wi.note}});
    }
    checks.push_back(std::move(jc));
  }
  return j.dump(indent);
}

}  // namespace fraclab
