#include "fraclab/constants.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "fraclab/errors.hpp"
#include "json.hpp"

namespace fraclab::constants {
namespace {

using std::numbers::pi;

void require_dimension(int N) {
  if (N < 3) {
    throw RangeError("constants: dimension N must be >= 3, got " + std::to_string(N));
  }
}

void require_open_order(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw RangeError("constants: order s must lie in (0,1), got " + std::to_string(s));
  }
}

constexpr int kOscillationPeriods = 64;

// Adaptive Gauss-Kronrod, accumulating the error estimate.
template <class F>
double integrate(F&& f, double a, double b, double& err_acc) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, 1e-14, &err);
  err_acc += std::abs(err) * std::max(1.0, std::abs(v));
  return v;
}

double neville_at(std::span<const double> x, std::span<const double> y, double x0) {
  if (x.size() != y.size() || x.empty()) {
    throw RangeError("extrapolation needs matching, non-empty sample vectors");
  }
  std::vector<double> p(y.begin(), y.end());
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      p[i] = ((x0 - x[i + m]) * p[i] + (x[i] - x0) * p[i + 1]) / (x[i] - x[i + m]);
    }
  }
  return p[0];
}

}  // namespace

double unit_sphere_area(int k) {
  if (k < 0) throw RangeError("unit_sphere_area: negative sphere dimension");
  const double m = static_cast<double>(k + 1);
  return 2.0 * std::pow(pi, m / 2.0) / std::tgamma(m / 2.0);
}

Quadrature A_integral(int N, double s) {
  require_dimension(N);
  require_open_order(s);
  const double exponent = -(N + 2.0 * s) / 2.0;
  const double radial_power = N - 2.0;
  auto integrand = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double one_minus = 1.0 - t;
    const double r = t / one_minus;
    return std::pow(r, radial_power) * std::pow(1.0 + r * r, exponent) /
           (one_minus * one_minus);
  };
  double err = 0.0;
  // The integrand peaks near r = 1 (t = 1/2); splitting there helps the
  // refinement near the slowly decaying t -> 1 end.
  const double radial = integrate(integrand, 0.0, 0.5, err) + integrate(integrand, 0.5, 1.0, err);
  const double area = unit_sphere_area(N - 2);
  return {area * radial, area * err};
}

double A_const(int N, double s) { return A_integral(N, s).value; }

Quadrature B_integral(double s) {
  if (s == 0.0 || s == 1.0) {
    throw RangeError("B_const: the integral diverges at s in {0,1}; use the extrapolation helpers");
  }
  require_open_order(s);
  const double a = 1.0 + 2.0 * s;

  // |t| < 1: 1 - cos t = sum_{k>=1} (-1)^{k+1} t^{2k}/(2k)!, integrated termwise.
  double near = 0.0;
  double factorial = 1.0;
  double series_err = 0.0;
  for (int k = 1; k < 40; ++k) {
    factorial *= (2.0 * k - 1.0) * (2.0 * k);
    const double term = 1.0 / (factorial * (2.0 * k - 2.0 * s));
    near += (k % 2 == 1) ? term : -term;
    if (term < 1e-18 * std::abs(near)) {
      series_err = term;
      break;
    }
  }

  // |t| > 1: int t^{-a} = 1/(2s) exactly, minus the oscillatory cosine part.
  double err = 0.0;
  auto osc = [a](double t) { return std::cos(t) * std::pow(t, -a); };
  double cosine_part = integrate(osc, 1.0, 2.0 * pi, err);
  for (int k = 1; k < kOscillationPeriods; ++k) {
    cosine_part += integrate(osc, 2.0 * pi * k, 2.0 * pi * (k + 1), err);
  }
  // Tail from T = 2 pi K with sin T = 0, cos T = 1, by repeated integration
  // by parts: a T^{-a-1} - a(a+1)(a+2) T^{-a-3} + O(a(a+1)(a+2)(a+3)(a+4) T^{-a-5}).
  const double T = 2.0 * pi * kOscillationPeriods;
  const double tail = a * std::pow(T, -a - 1.0) -
                      a * (a + 1.0) * (a + 2.0) * std::pow(T, -a - 3.0);
  const double tail_bound = a * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) *
                            std::pow(T, -a - 5.0);
  cosine_part += tail;

  const double far = 1.0 / (2.0 * s) - cosine_part;
  const double prefactor = 2.0 * s * (1.0 - s);  // two half-lines
  return {prefactor * (near + far), prefactor * (err + tail_bound + series_err)};
}

double B_const(double s) { return B_integral(s).value; }

double C_const(int N, double s) { return s * (1.0 - s) / (A_const(N, s) * B_const(s)); }

double critical_exponent(int N, double s) {
  if (!(N > 2.0 * s)) throw RangeError("critical exponent requires N > 2s");
  return 2.0 * N / (N - 2.0 * s);
}

double sobolev_constant(int N, double s) {
  if (!(N > 2.0 * s)) {
    throw RangeError("sobolev_constant: requires N > 2s");
  }
  if (!(s > 0.0)) throw RangeError("sobolev_constant: requires s > 0");
  const double ratio = std::tgamma((N - 2.0 * s) / 2.0) / std::tgamma((N + 2.0 * s) / 2.0);
  return ratio * std::pow(unit_sphere_area(N), -2.0 * s / N);
}

double interpolation_theta(int N, double q, double s) {
  require_dimension(N);
  const double q_max = 2.0 * N / (N - 1.0);
  if (!(q >= 2.0 && q <= q_max)) {
    throw RangeError("interpolation_theta: q must lie in [2, 2N/(N-1)]");
  }
  if (!(s >= 0.5 && s <= 1.0)) {
    throw RangeError("interpolation_theta: s must lie in [1/2, 1]");
  }
  return (2.0 * N - q * (N - 2.0 * s)) / (2.0 * s * q);
}

double C_limit_ratio(int N) {
  require_dimension(N);
  return 4.0 * N / unit_sphere_area(N - 1);
}

double extrapolate_to_one(std::span<const double> s_samples, std::span<const double> values) {
  std::vector<double> eps;
  eps.reserve(s_samples.size());
  for (double s : s_samples) eps.push_back(1.0 - s);
  return neville_at(eps, values, 0.0);
}

double extrapolate_to_zero(std::span<const double> s_samples, std::span<const double> values) {
  return neville_at(s_samples, values, 0.0);
}

ConstantsReport make_report(const DimensionParams& params) {
  ConstantsReport r;
  r.N = params.N;
  r.s = params.s;
  r.q = params.q;
  const auto a = A_integral(params.N, params.s);
  const auto b = B_integral(params.s);
  r.A = a.value;
  r.B = b.value;
  r.C = params.s * (1.0 - params.s) / (r.A * r.B);
  r.sobolev_K = sobolev_constant(params.N, params.s);
  if (params.q) r.theta = interpolation_theta(params.N, *params.q, params.s);
  r.omega = unit_sphere_area(params.N - 1);
  r.sphere_area = unit_sphere_area(params.N);
  r.quadrature_error_estimate = a.error / a.value + b.error / b.value;
  return r;
}

std::string to_json(const ConstantsReport& r, int indent) {
  nlohmann::ordered_json j;
  j["N"] = r.N;
  j["s"] = r.s;
  j["q"] = r.q ? nlohmann::ordered_json(*r.q) : nlohmann::ordered_json(nullptr);
  j["A"] = r.A;
  j["B"] = r.B;
  j["C"] = r.C;
  j["sobolev_K"] = r.sobolev_K;
  j["theta"] = r.theta ? nlohmann::ordered_json(*r.theta) : nlohmann::ordered_json(nullptr);
  j["omega"] = r.omega;
  j["sphere_area"] = r.sphere_area;
  j["quadrature_error_estimate"] = r.quadrature_error_estimate;
  return j.dump(indent);
}

}  // namespace fraclab::constants
