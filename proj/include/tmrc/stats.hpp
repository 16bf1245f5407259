#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tmrc::stats {

double mean(std::span<const double> v);
/// Unbiased sample variance; zero for fewer than two values.
double variance(std::span<const double> v);

/// Average ranks (ties share the mean of their positions), 1-based.
std::vector<double> ranks(std::span<const double> v);

double pearson(std::span<const double> a, std::span<const double> b);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

/// Rotation-invariant circular correlation of two angle samples (radians):
/// the larger of |mean exp(i(alpha - beta))| and |mean exp(i(alpha + beta))|.
/// Equals 1 exactly when beta = +-alpha + const, and stays well defined for
/// angles spread uniformly around the circle, where a mean direction is not.
double circular_correlation(std::span<const double> alpha, std::span<const double> beta);

/// Jammalamadaka-SenGupta correlation centred on the circular means.
double circular_correlation_js(std::span<const double> alpha, std::span<const double> beta);

}  // namespace tmrc::stats
