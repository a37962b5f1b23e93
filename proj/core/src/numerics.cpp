#include "fourthkind/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

constexpr int kMaxGammaIterations = 10000;
constexpr double kGammaEps = 1e-16;

// P(a, x) by the power series, valid for x < a + 1.
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxGammaIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the modified Lentz continued fraction, valid for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kGammaEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxGammaIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw DomainError("incomplete gamma: shape must be positive");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: argument must be nonnegative");
}

void check_chi2_args(int k, double x) {
  if (k < 1) throw DomainError("chi-square: degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw DomainError("chi-square: argument must be nonnegative");
}

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi2_cdf(int k, double x) {
  check_chi2_args(k, x);
  if (k == 2) return -std::expm1(-0.5 * x);
  return regularized_gamma_p(0.5 * k, 0.5 * x);
}

double chi2_sf(int k, double x) {
  check_chi2_args(k, x);
  if (k == 2) return std::exp(-0.5 * x);
  return regularized_gamma_q(0.5 * k, 0.5 * x);
}

double chi2_quantile(int k, double p) {
  if (k < 1) throw DomainError("chi-square quantile: degrees of freedom must be >= 1");
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("chi-square quantile: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  if (k == 2) return -2.0 * std::log1p(-p);

  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(k));
  while (chi2_cdf(k, hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (chi2_cdf(k, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double cdf_lo = chi2_cdf(k, lo);
  const double cdf_hi = chi2_cdf(k, hi);
  return std::abs(cdf_lo - p) <= std::abs(cdf_hi - p) ? lo : hi;
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), key_(splitmix64(seed)) {}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t counter = counter_++;
  return splitmix64(key_ ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::standard_normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

int RandomStream::bernoulli(double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return 1;
  return uniform() < p ? 1 : 0;
}

std::size_t RandomStream::below(std::size_t n) {
  if (n == 0) throw DomainError("RandomStream::below: empty range");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

RandomStream RandomStream::split(std::uint64_t label) const {
  return RandomStream(seed_, splitmix64(key_ + splitmix64(label ^ 0xD1B54A32D192ED03ULL)));
}

RandomStream RandomStream::split(std::string_view label) const {
  // FNV-1a
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const char c : label) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  return split(hash);
}

std::size_t thread_count() {
  std::size_t requested = 0;
  if (const char* env = std::getenv("FOURTHKIND_THREADS")) {
    try {
      requested = static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      requested = 0;
    }
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fourthkind
