#ifndef DIVPRUNE_STATS_HPP
#define DIVPRUNE_STATS_HPP

#include <cstddef>
#include <span>

namespace divprune {

double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);  // n-1 denominator

// Regularized incomplete beta I_x(a, b) via the standard continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Two-tailed p-value of Student's t with dof degrees of freedom.
double student_t_two_tailed_p(double t, int dof);

// Two-tailed critical value at the given significance level (bisection on the
// CDF; no hard-coded tables).
double student_t_critical(double level, int dof);

}  // namespace divprune

#endif
