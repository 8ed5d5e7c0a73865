// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_STATS_HPP
#define FAIRDIV_STATS_HPP

#include <span>

namespace fairdiv {

double mean(std::span<const double> values);

// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> values);

// Standard error of the mean: sample stddev / sqrt(n).
double standard_error(std::span<const double> values);

// Upper-tail probability P(T >= t) for Student's t with `dof` degrees of
// freedom, via the regularized incomplete beta function.
double student_t_upper_tail(double t, double dof);

// Paired one-sided test of mean(a - b) > 0; pairs share an index. With
// zero-variance differences the p-value degenerates to 0 (mean positive),
// 1 (mean negative) or 0.5 (all zero).
double paired_one_sided_t_test(std::span<const double> a,
                               std::span<const double> b);

}  // namespace fairdiv

#endif  // FAIRDIV_STATS_HPP
