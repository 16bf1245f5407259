#include "tmrc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tmrc/errors.hpp"

namespace tmrc::stats {

double mean(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) r[order[q]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ArgumentError("correlation needs two samples of equal length >= 2");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  return pearson(ra, rb);
}

namespace {
double circular_mean(std::span<const double> t) {
  double s = 0.0, c = 0.0;
  for (double x : t) {
    s += std::sin(x);
    c += std::cos(x);
  }
  return std::atan2(s, c);
}
}  // namespace

double circular_correlation(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.size() != beta.size() || alpha.empty()) throw ArgumentError("circular correlation needs equal nonempty samples");
  double cd = 0.0, sd = 0.0, cs = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    cd += std::cos(alpha[i] - beta[i]);
    sd += std::sin(alpha[i] - beta[i]);
    cs += std::cos(alpha[i] + beta[i]);
    ss += std::sin(alpha[i] + beta[i]);
  }
  const double n = static_cast<double>(alpha.size());
  return std::max(std::hypot(cd, sd), std::hypot(cs, ss)) / n;
}

double circular_correlation_js(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.size() != beta.size() || alpha.empty()) throw ArgumentError("circular correlation needs equal nonempty samples");
  const double ma = circular_mean(alpha);
  const double mb = circular_mean(beta);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double sa = std::sin(alpha[i] - ma);
    const double sb = std::sin(beta[i] - mb);
    num += sa * sb;
    da += sa * sa;
    db += sb * sb;
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

}  // namespace tmrc::stats
