#pragma once

#include <cstdint>
#include <random>

namespace ueb {

// Seeded random stream. The same (seed, stream) pair always produces the
// same draw sequence; distinct stream ids give statistically independent
// sequences off one seed. All distribution samplers are implemented on top
// of the raw engine so sequences are stable across platforms and library
// versions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Fresh stream whose id mixes (stream, tag); used to hand independent
  // randomness to sub-tasks (per area, per replicate, ...).
  RngStream child(std::uint64_t tag) const;

  double uniform();  // [0, 1), 53-bit
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive, unbiased
  bool bernoulli(double p);
  double normal(double mean, double sd);
  double gamma(double shape, double rate);
  double beta(double a, double b);
  std::int64_t poisson(double mean);
  std::int64_t binomial(std::int64_t n, double p);

 private:
  double std_normal();
  double std_gamma(double shape);  // unit rate

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace ueb
