#pragma once

#include <optional>
#include <span>
#include <string>

namespace fraclab::constants {

/// Value of an integral together with an absolute error estimate.
struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

/// Dimension and order parameters used by the closed-form constants.
/// N >= 3 and 0 < s <= 1; q is only needed for interpolation exponents.
struct DimensionParams {
  int N = 3;
  double s = 0.75;
  std::optional<double> q;
};

struct ConstantsReport {
  int N = 0;
  double s = 0.0;
  std::optional<double> q;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double sobolev_K = 0.0;
  std::optional<double> theta;
  double omega = 0.0;        // |S^{N-1}|
  double sphere_area = 0.0;  // |S^N|
  double quadrature_error_estimate = 0.0;
};

/// Surface area of the unit k-sphere S^k in R^{k+1}.
double unit_sphere_area(int k);

/// A(N,s): integral over R^{N-1} of (1+|eta|^2)^{-(N+2s)/2}.
///
/// Reduced to a radial integral times |S^{N-2}| and evaluated by adaptive
/// Gauss-Kronrod on the compactified variable r = t/(1-t).
Quadrature A_integral(int N, double s);
double A_const(int N, double s);

/// B(s) = s(1-s) * integral over R of (1-cos t)/|t|^{1+2s}.
///
/// The part |t| < 1 is summed from the cosine series term by term; the part
/// |t| > 1 splits into the exact power integral and an oscillatory cosine
/// integral, which is integrated period by period up to T = 2 pi K and
/// closed with an asymptotic tail expansion.
Quadrature B_integral(double s);
double B_const(double s);

/// C(N,s) = s(1-s) / (A(N,s) B(s)).
double C_const(int N, double s);

/// Gamma((N-2s)/2) / Gamma((N+2s)/2) * |S^N|^{-2s/N}, the sharp constant of
/// the fractional Sobolev inequality in L^{2N/(N-2s)}.
double sobolev_constant(int N, double s);

/// 2N/(N-2s).
double critical_exponent(int N, double s);

/// theta with 1/q = theta/2 + (1-theta)/2_s^*, for q in [2, 2N/(N-1)] and
/// s in [1/2, 1].
double interpolation_theta(int N, double q, double s);

/// 4N / |S^{N-1}|, the value of lim_{s->1-} C(N,s)/(1-s).
double C_limit_ratio(int N);

/// Polynomial (Neville) extrapolation of g(s) to s = 1 from samples at the
/// given orders, treating g as smooth in 1-s.
double extrapolate_to_one(std::span<const double> s_samples,
                          std::span<const double> values);

/// Same as above but extrapolating to s = 0.
double extrapolate_to_zero(std::span<const double> s_samples,
                           std::span<const double> values);

ConstantsReport make_report(const DimensionParams& params);
std::string to_json(const ConstantsReport& report, int indent = 2);

}  // namespace fraclab::constants
