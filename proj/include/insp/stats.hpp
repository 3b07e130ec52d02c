// Small statistics helpers for the benchmark reports.

#pragma once

#include <cstddef>
#include <vector>

namespace insp::stats {

double mean(const std::vector<double>& xs);
// Sample standard deviation (n-1); zero for fewer than two samples.
double stddev(const std::vector<double>& xs);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// One-sided p-value for rho < 0 under the t approximation,
// t = rho*sqrt((n-2)/(1-rho^2)).
double spearman_p_negative(double rho, std::size_t n);

// Student-t CDF via the regularized incomplete beta function.
double student_t_cdf(double t, double dof);

}  // namespace insp::stats
