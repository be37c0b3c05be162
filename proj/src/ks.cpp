#include "subshift/ks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "subshift/errors.hpp"

namespace subshift::stats {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("ks_statistic: empty input");
  for (double v : a) {
    if (!std::isfinite(v)) throw DataError("ks_statistic: non-finite value");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw DataError("ks_statistic: non-finite value");
  }

  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const auto n = static_cast<double>(sa.size());
  const auto m = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d_max = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double v;
    if (i < sa.size() && j < sb.size()) {
      v = std::min(sa[i], sb[j]);
    } else if (i < sa.size()) {
      v = sa[i];
    } else {
      v = sb[j];
    }
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d_max = std::max(d_max, std::abs(double(i) / n - double(j) / m));
  }
  return d_max;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 100000; ++k) {
    const double term = std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n, std::size_t m) {
  if (!(d >= 0.0 && d <= 1.0)) throw DataError("ks_pvalue: d must lie in [0,1]");
  if (n < 1 || m < 1) throw DataError("ks_pvalue: sample sizes must be >= 1");
  if (d == 0.0) return 1.0;
  const double effective = double(n) * double(m) / double(n + m);
  const double p = kolmogorov_survival(d * std::sqrt(effective));
  return std::max(p, std::numeric_limits<double>::min());
}

}  // namespace subshift::stats
