/// @file ks.hpp
/// @brief Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

#pragma once

#include <cstddef>
#include <span>

namespace subshift::stats {

/// sup_v |ECDF_a(v) - ECDF_b(v)| evaluated after each block of tied values.
/// Throws on empty or non-finite input.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1}
/// exp(-2 k^2 lambda^2), truncated when terms drop below 1e-12. Below
/// lambda = 0.2 the survival is 1 within that truncation error.
double kolmogorov_survival(double lambda);

/// Asymptotic two-sample p-value: Q(d * sqrt(nm/(n+m))), clamped to (0, 1].
double ks_pvalue(double d, std::size_t n, std::size_t m);

}  // namespace subshift::stats
