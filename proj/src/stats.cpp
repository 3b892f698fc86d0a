#include "hypsearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "hypsearch/error.hpp"

namespace hypsearch {
namespace {

void require_pair(const std::vector<double>& a, const std::vector<double>& b, size_t min_len) {
  if (a.size() != b.size() || a.size() < min_len) {
    throw Error(Errc::LengthMismatch, "need two sequences of equal length >= " +
                                          std::to_string(min_len) + ", got " +
                                          std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()));
  }
}

// Tie sums over a sorted copy: Σ t(t-1)/2, Σ t(t-1)(t-2), Σ t(t-1)(2t+5).
struct TieSums {
  uint64_t pairs = 0;
  double triples = 0.0;
  double weighted = 0.0;
};

TieSums tie_sums(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  TieSums out;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    double t = static_cast<double>(j - i);
    out.pairs += static_cast<uint64_t>(j - i) * (j - i - 1) / 2;
    out.triples += t * (t - 1.0) * (t - 2.0);
    out.weighted += t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  return out;
}

// Strictly-decreasing pair count by merge sort; equal neighbors are not
// inversions.
uint64_t count_inversions(std::vector<double>& v) {
  size_t n = v.size();
  std::vector<double> buf(n);
  uint64_t inversions = 0;
  for (size_t width = 1; width < n; width *= 2) {
    for (size_t lo = 0; lo + width < n; lo += 2 * width) {
      size_t mid = lo + width;
      size_t hi = std::min(lo + 2 * width, n);
      size_t i = lo;
      size_t j = mid;
      size_t k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
                v.begin() + static_cast<long>(lo));
    }
  }
  return inversions;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Pearson core without the p-value; throws ZeroVariance.
double pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = mean_of(a);
  double mb = mean_of(b);
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma;
    double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw Error(Errc::ZeroVariance, "correlation undefined for a constant sequence");
  }
  // single sqrt of the product keeps perfectly correlated small-integer
  // inputs at exactly +/-1 (sqrt(sab*sab) == |sab| when the square is exact)
  double r = sab / std::sqrt(saa * sbb);
  // guard rounding excursions outside [-1, 1]
  return r > 1.0 ? 1.0 : (r < -1.0 ? -1.0 : r);
}

double t_approx_p(double r, size_t n) {
  double dof = static_cast<double>(n - 2);
  double denom = (1.0 - r) * (1.0 + r);
  if (denom <= 0.0) return 0.0;
  double t = r * std::sqrt(dof / denom);
  return student_t_two_sided_p(t, dof);
}

// Lentz's method for the continued fraction of the incomplete beta.
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-16;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

std::vector<double> mid_ranks(const std::vector<double>& v) {
  size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    // positions i..j-1 share the average of ranks i+1..j
    double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

Corr kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  require_pair(a, b, 2);
  size_t n = a.size();

  // sort by (a, b); discordant pairs are then exactly the strict
  // inversions of the b sequence
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    if (a[i] != a[j]) return a[i] < a[j];
    return b[i] < b[j];
  });
  std::vector<double> b_sorted(n);
  for (size_t i = 0; i < n; ++i) b_sorted[i] = b[order[i]];

  // joint ties: runs with equal (a, b)
  uint64_t joint_ties = 0;
  {
    size_t i = 0;
    while (i < n) {
      size_t j = i + 1;
      while (j < n && a[order[j]] == a[order[i]] && b[order[j]] == b[order[i]]) ++j;
      joint_ties += static_cast<uint64_t>(j - i) * (j - i - 1) / 2;
      i = j;
    }
  }

  uint64_t discordant = count_inversions(b_sorted);
  uint64_t total = static_cast<uint64_t>(n) * (n - 1) / 2;
  TieSums ta = tie_sums(a);
  TieSums tb = tie_sums(b);
  if (total == ta.pairs || total == tb.pairs) {
    throw Error(Errc::ZeroVariance, "kendall tau undefined for a fully tied sequence");
  }

  // cast each count separately: total - ta.pairs - tb.pairs can dip below
  // zero before joint_ties is added back
  double s = static_cast<double>(total) - static_cast<double>(ta.pairs) -
             static_cast<double>(tb.pairs) + static_cast<double>(joint_ties) -
             2.0 * static_cast<double>(discordant);
  double tau = s / std::sqrt(static_cast<double>(total - ta.pairs) *
                             static_cast<double>(total - tb.pairs));
  tau = tau > 1.0 ? 1.0 : (tau < -1.0 ? -1.0 : tau);

  // tie-corrected variance of s, then a two-sided normal p-value
  double size = static_cast<double>(n);
  double m = size * (size - 1.0);
  double var = (m * (2.0 * size + 5.0) - ta.weighted - tb.weighted) / 18.0 +
               (2.0 * static_cast<double>(ta.pairs) * static_cast<double>(tb.pairs)) / m;
  if (n > 2) var += ta.triples * tb.triples / (9.0 * m * (size - 2.0));
  double p = var > 0.0 ? normal_two_sided_p(s / std::sqrt(var)) : 1.0;
  return {tau, p};
}

Corr spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require_pair(a, b, 3);
  double r = pearson_r(mid_ranks(a), mid_ranks(b));
  return {r, t_approx_p(r, a.size())};
}

Corr pearson(const std::vector<double>& a, const std::vector<double>& b) {
  require_pair(a, b, 3);
  double r = pearson_r(a, b);
  return {r, t_approx_p(r, a.size())};
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = a * std::log(x) + b * std::log1p(-x) -
                    (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  double x = dof / (dof + t * t);
  return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / 1.4142135623730951); }

}  // namespace hypsearch
