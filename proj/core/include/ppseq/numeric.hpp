#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

namespace ppseq {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double mx = *std::max_element(xs.begin(), xs.end());
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(-std::abs(a - b)));
}

/// log of the Gaussian normaliser Z(J, h) = sqrt(2 pi / J) exp(h^2 / (2 J)),
/// i.e. the integral of exp(-J x^2 / 2 + h x). No argument checks.
inline double log_z_unchecked(double precision, double linear) {
  return kHalfLog2Pi - 0.5 * std::log(precision) + 0.5 * linear * linear / precision;
}

inline double log_z(double precision, double linear) {
  if (!(precision > 0.0)) throw std::domain_error("log_z: precision must be positive");
  return log_z_unchecked(precision, linear);
}

inline double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace ppseq
