// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/stats.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fairdiv/errors.hpp"

namespace fairdiv {

namespace {

// Continued fraction for the regularized incomplete beta function
// (Lentz's method, as in Numerical Recipes' betacf).
double incomplete_beta_cf(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incomplete_beta_cf(a, b, x) / a;
  }
  return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw InputError("mean of an empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) {
    throw InputError("sample stddev needs at least two values");
  }
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double standard_error(std::span<const double> values) {
  return sample_stddev(values) / std::sqrt(static_cast<double>(values.size()));
}

double student_t_upper_tail(double t, double dof) {
  if (dof <= 0.0) throw InputError("degrees of freedom must be positive");
  // P(T >= t) = I_{dof/(dof+t^2)}(dof/2, 1/2) / 2 for t >= 0.
  const double x = dof / (dof + t * t);
  const double half_tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

double paired_one_sided_t_test(std::span<const double> a,
                               std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("paired test needs equal-length samples (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) {
    throw InputError("paired test needs at least two pairs");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double m = mean(diff);
  const double sd = sample_stddev(diff);
  if (sd == 0.0) {
    if (m > 0.0) return 0.0;
    if (m < 0.0) return 1.0;
    return 0.5;
  }
  const double t = m / (sd / std::sqrt(static_cast<double>(diff.size())));
  return student_t_upper_tail(t, static_cast<double>(diff.size() - 1));
}

}  // namespace fairdiv
