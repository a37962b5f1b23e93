#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace fourthkind {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series expansion below x < a + 1, Lentz continued fraction above.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Chi-square CDF with k degrees of freedom, P(k/2, x/2).
double chi2_cdf(int k, double x);

/// Upper tail 1 - chi2_cdf(k, x), computed without cancellation.
double chi2_sf(int k, double x);

/// Returns x with |chi2_cdf(k, x) - p| <= 1e-10. Requires 0 <= p < 1.
double chi2_quantile(int k, double p);

/// Counter-based random stream.
///
/// Each draw hashes (key, counter) through the SplitMix64 finalizer, so a
/// stream is fully described by two integers and the sequence is identical
/// on every platform. `split` derives an independent child key from a label
/// without consuming draws from the parent.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double standard_normal();
  int bernoulli(double p);
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  RandomStream split(std::uint64_t label) const;
  RandomStream split(std::string_view label) const;

 private:
  RandomStream(std::uint64_t seed, std::uint64_t key);

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Worker count from FOURTHKIND_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Calls body(i) for i in [0, n) across up to thread_count() threads. Bodies
/// must only write to per-index state; the result is then independent of the
/// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fourthkind
