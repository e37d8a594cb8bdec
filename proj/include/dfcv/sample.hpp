#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dfcv {

struct SampleMeta {
  std::string source = "external";  // catalog id as text, or "external"
  std::uint64_t seed = 0;
  int replicate = -1;
};

// Observations held sorted ascending.  For moderate n the n(n-1)/2 sorted
// pairwise differences are cached up front and reused across every bandwidth
// on a criterion grid; past kMaxCachedN the quadratic cache would dominate
// memory (and its sort the runtime), so pair sums instead stream over the
// sorted sample with a sliding window.  Both routes visit exactly the same
// nonzero terms, so results differ only in summation order.
class Sample {
 public:
  static constexpr int kMaxCachedN = 2048;

  explicit Sample(std::vector<double> values, SampleMeta meta = {});

  int n() const { return static_cast<int>(x_.size()); }
  const std::vector<double>& sorted() const { return x_; }
  const SampleMeta& meta() const { return meta_; }

  double range() const { return x_.back() - x_.front(); }
  // Smallest nonzero gap between consecutive order statistics; 0 when all
  // observations coincide.
  double min_gap() const { return min_gap_; }
  bool degenerate() const { return min_gap_ == 0.0; }

  double mean() const;
  double sd() const;  // n-1 denominator
  double quantile(double p) const;
  double iqr() const { return quantile(0.75) - quantile(0.25); }
  // min(sd, iqr/1.349); 1.349 = 2 Phi^{-1}(3/4) makes iqr/1.349 consistent
  // for the normal scale.
  double robust_sigma() const;

  bool has_pair_cache() const { return !diffs_.empty(); }
  const std::vector<double>& pair_diffs() const { return diffs_; }

 private:
  std::vector<double> x_;
  std::vector<double> diffs_;
  double min_gap_ = 0.0;
  SampleMeta meta_;
};

struct KernelPairSums {
  double l;   // sum over i<j of exp(-d^2/(2 g^2))
  double ll;  // sum over i<j of exp(-d^2/(4 g^2))
};

// Both Gaussian scales (g and g*sqrt2) in one pass; the second factor is the
// square root of the first.
KernelPairSums gauss_pair_sums(const Sample& s, double g);

// Sum over i<j of exp(-d^2/(2 scale^2)).
double exp_pair_sum(const Sample& s, double scale);

// Sum over i<j of He_order(d/scale) * exp(-d^2/(2 scale^2)), probabilists'
// Hermite polynomial.  Only even orders are meaningful on unsigned
// differences; odd orders are rejected.
double hermite_pair_sum(const Sample& s, double scale, int order);

// Per-observation leave-one-out sums, indexed in sorted order:
// out[i] = sum over j != i of exp(-(x_i - x_j)^2/(2 g^2)).
std::vector<double> loo_exp_sums(const Sample& s, double g);

}  // namespace dfcv
