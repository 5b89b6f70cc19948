#include "ueb/special.hpp"

#include <cmath>
#include <stdexcept>

namespace ueb {

namespace {

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,      -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6,  1.5056327351493116e-7};

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln(2 pi)/2

double lanczos_log_gamma(double x) {  // requires x >= 0.5
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + i);
  const double base = z + 7.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(base) - base + std::log(sum);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: x must be > 0");
  if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);  // Gamma(x) = Gamma(x+1)/x
  return lanczos_log_gamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
  double acc = 0.0;
  while (x < 10.0) {  // psi(x) = psi(x+1) - 1/x
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double i2 = inv * inv;
  // ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k}), through k = 7
  const double series =
      i2 * (1.0 / 12 -
            i2 * (1.0 / 120 -
                  i2 * (1.0 / 252 -
                        i2 * (1.0 / 240 -
                              i2 * (1.0 / 132 -
                                    i2 * (691.0 / 32760 - i2 * (1.0 / 12)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("log_beta: a, b must be > 0");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

}  // namespace ueb
