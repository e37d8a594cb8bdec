#include "dfcv/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "dfcv/math.hpp"

namespace dfcv {

namespace {

constexpr std::size_t kBlock = 256;

// exp(-d^2/(2 s^2)) flushes to exactly 0 once d > 37.63 s (exponent below
// -708).  The sqrt-derived factor at scale s*sqrt2 flushes at the same point;
// its true magnitude there is < 1e-153, far below summation noise, so a
// single cutoff serves both terms.
constexpr double kCutSigmas = 37.63;

double reduce_block(const double* buf, std::size_t len) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    l0 += buf[k];
    l1 += buf[k + 1];
    l2 += buf[k + 2];
    l3 += buf[k + 3];
  }
  for (; k < len; ++k) l0 += buf[k];
  return (l0 + l1) + (l2 + l3);
}

void check_scale(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("pair sum: scale must be > 0");
}

// Walk the contributing pairs in blocks and hand each block's difference
// pointer/length to `fn`.  Cached route: one sorted prefix.  Streaming route:
// per-i sliding windows over the sorted sample, differences materialized into
// `scratch`.  Term order differs between routes but the route is a function
// of n alone, so any given sample is deterministic.
template <class Fn>
void for_each_diff_block(const Sample& s, double cut, Fn&& fn) {
  if (s.has_pair_cache()) {
    const auto& d = s.pair_diffs();
    const std::size_t m =
        static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), cut) - d.begin());
    for (std::size_t base = 0; base < m; base += kBlock) {
      fn(d.data() + base, std::min(kBlock, m - base));
    }
    return;
  }
  const auto& x = s.sorted();
  const std::size_t n = x.size();
  alignas(64) double scratch[kBlock];
  std::size_t hi = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (hi <= i) hi = i + 1;
    const double lim = x[i] + cut;
    while (hi < n && x[hi] <= lim) ++hi;
    const double xi = x[i];
    for (std::size_t j = i + 1; j < hi; j += kBlock) {
      const std::size_t len = std::min(kBlock, hi - j);
      const double* xs = x.data() + j;
      for (std::size_t k = 0; k < len; ++k) scratch[k] = xs[k] - xi;
      fn(scratch, len);
    }
  }
}

}  // namespace

Sample::Sample(std::vector<double> values, SampleMeta meta)
    : x_(std::move(values)), meta_(std::move(meta)) {
  if (x_.size() < 2) {
    throw std::invalid_argument("Sample: need at least 2 observations");
  }
  for (double v : x_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Sample: non-finite observation");
    }
  }
  std::sort(x_.begin(), x_.end());
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double gap = x_[i + 1] - x_[i];
    if (gap > 0.0 && (min_gap_ == 0.0 || gap < min_gap_)) min_gap_ = gap;
  }
  if (n() <= kMaxCachedN) {
    diffs_.reserve(x_.size() * (x_.size() - 1) / 2);
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      for (std::size_t j = i + 1; j < x_.size(); ++j) {
        diffs_.push_back(x_[j] - x_[i]);
      }
    }
    std::sort(diffs_.begin(), diffs_.end());
  }
}

double Sample::mean() const {
  Kahan acc;
  for (double v : x_) acc.add(v);
  return acc.value() / static_cast<double>(n());
}

double Sample::sd() const {
  const double m = mean();
  Kahan acc;
  for (double v : x_) acc.add((v - m) * (v - m));
  return std::sqrt(acc.value() / static_cast<double>(n() - 1));
}

double Sample::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile: p outside [0,1]");
  }
  const double pos = p * static_cast<double>(n() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= x_.size()) return x_.back();
  const double frac = pos - static_cast<double>(lo);
  return x_[lo] + frac * (x_[lo + 1] - x_[lo]);
}

double Sample::robust_sigma() const { return std::min(sd(), iqr() / 1.349); }

KernelPairSums gauss_pair_sums(const Sample& s, double g) {
  check_scale(g);
  const double inv = 1.0 / g;
  alignas(64) double e[kBlock], q[kBlock];
  Kahan tl, tll;
  for_each_diff_block(s, kCutSigmas * g, [&](const double* d, std::size_t len) {
    for (std::size_t k = 0; k < len; ++k) {
      const double u = d[k] * inv;
      e[k] = exp_neg(-0.5 * u * u);
      q[k] = std::sqrt(e[k]);
    }
    tl.add(reduce_block(e, len));
    tll.add(reduce_block(q, len));
  });
  return {tl.value(), tll.value()};
}

double exp_pair_sum(const Sample& s, double scale) {
  check_scale(scale);
  const double inv = 1.0 / scale;
  alignas(64) double e[kBlock];
  Kahan total;
  for_each_diff_block(s, kCutSigmas * scale,
                      [&](const double* d, std::size_t len) {
                        for (std::size_t k = 0; k < len; ++k) {
                          const double u = d[k] * inv;
                          e[k] = exp_neg(-0.5 * u * u);
                        }
                        total.add(reduce_block(e, len));
                      });
  return total.value();
}

double hermite_pair_sum(const Sample& s, double scale, int order) {
  check_scale(scale);
  if (order < 0 || order % 2 != 0) {
    throw std::invalid_argument("hermite_pair_sum: order must be even and >= 0");
  }
  if (order == 0) return exp_pair_sum(s, scale);
  const double inv = 1.0 / scale;
  alignas(64) double u[kBlock], w[kBlock], h0[kBlock], h1[kBlock];
  Kahan total;
  for_each_diff_block(s, kCutSigmas * scale, [&](const double* d, std::size_t len) {
    for (std::size_t k = 0; k < len; ++k) {
      u[k] = d[k] * inv;
      w[k] = exp_neg(-0.5 * u[k] * u[k]);
      h0[k] = 1.0;
      h1[k] = u[k];
    }
    double* prev = h0;
    double* cur = h1;
    for (int t = 2; t <= order; ++t) {
      const double tm1 = static_cast<double>(t - 1);
      for (std::size_t k = 0; k < len; ++k) {
        const double next = u[k] * cur[k] - tm1 * prev[k];
        prev[k] = next;
      }
      std::swap(prev, cur);
    }
    for (std::size_t k = 0; k < len; ++k) w[k] *= cur[k];
    total.add(reduce_block(w, len));
  });
  return total.value();
}

std::vector<double> loo_exp_sums(const Sample& s, double g) {
  check_scale(g);
  const auto& x = s.sorted();
  const std::size_t n = x.size();
  const double cut = kCutSigmas * g;
  const double inv = 1.0 / g;
  std::vector<double> out(n);
  alignas(64) double e[kBlock];
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (x[lo] < x[i] - cut) ++lo;
    if (hi < i + 1) hi = i + 1;
    while (hi < n && x[hi] <= x[i] + cut) ++hi;
    const double xi = x[i];
    Kahan acc;
    for (std::size_t j = lo; j < hi; j += kBlock) {
      const std::size_t len = std::min(kBlock, hi - j);
      const double* xs = x.data() + j;
      for (std::size_t k = 0; k < len; ++k) {
        const double u = (xs[k] - xi) * inv;
        e[k] = exp_neg(-0.5 * u * u);
      }
      acc.add(reduce_block(e, len));
    }
    // The window always contains i itself contributing exactly 1; clamp
    // guards the subtraction against compensation rounding.
    out[i] = std::max(0.0, acc.value() - 1.0);
  }
  return out;
}

}  // namespace dfcv
