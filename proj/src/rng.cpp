#include "ueb/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ueb/special.hpp"

namespace ueb {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t mixed = splitmix64(s) ^ (stream * 0xD6E8FEB86659FD93ULL);
  std::uint64_t s2 = mixed;
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t w = splitmix64(s2);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words, words + 8);
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

RngStream RngStream::child(std::uint64_t tag) const {
  std::uint64_t s = stream_ ^ (tag + 0x9E3779B97F4A7C15ULL);
  const std::uint64_t id = splitmix64(s);
  return RngStream(seed_, id);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit span
  const std::uint64_t scaling = std::numeric_limits<std::uint64_t>::max() / range;
  const std::uint64_t limit = range * scaling;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v / scaling);
}

bool RngStream::bernoulli(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) throw std::invalid_argument("bernoulli: p outside [0, 1]");
  return uniform() < p;
}

double RngStream::std_normal() {
  // Marsaglia polar; the spare variate is discarded to keep the sequence a
  // simple function of draw order.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RngStream::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal: sd must be > 0");
  return mean + sd * std_normal();
}

double RngStream::std_gamma(double shape) {
  if (shape < 1.0) {
    // boost: G(a) = G(a+1) * U^{1/a}
    const double u = 1.0 - uniform();  // (0, 1]
    return std_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia–Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = std_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();  // (0, 1], safe to log
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("gamma: shape, rate must be > 0");
  return std_gamma(shape) / rate;
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta: a, b must be > 0");
  const double x = std_gamma(a);
  const double y = std_gamma(b);
  const double s = x + y;
  if (s <= 0.0) return a / (a + b);  // both underflowed; return the mean
  return x / s;
}

std::int64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // inversion by sequential search
    const double u = uniform();
    double t = std::exp(-mean);
    double s = t;
    std::int64_t k = 0;
    while (u > s) {
      ++k;
      t *= mean / static_cast<double>(k);
      s += t;
      if (k > 2000) break;  // cumulative roundoff guard; unreachable for mean < 10
    }
    return k;
  }
  // PTRS transformed rejection (Hormann)
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - log_gamma(kf + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

std::int64_t RngStream::binomial(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("binomial: n must be >= 0");
  if (!(p >= 0.0) || !(p <= 1.0)) throw std::invalid_argument("binomial: p outside [0, 1]");
  std::int64_t count = 0;
  // Recursive split on a beta order statistic keeps the draw count O(log n);
  // the remainder is summed directly.
  while (n > 32) {
    const std::int64_t i = (n + 1) / 2;
    const double v = beta(static_cast<double>(i), static_cast<double>(n - i + 1));
    if (v <= p) {
      count += i;
      n -= i;
      p = (p - v) / (1.0 - v);
    } else {
      n = i - 1;
      p = p / v;
    }
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
  }
  for (std::int64_t j = 0; j < n; ++j) count += bernoulli(p) ? 1 : 0;
  return count;
}

}  // namespace ueb
