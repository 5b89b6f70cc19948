#pragma once

namespace ueb {

// ln Gamma(x), x > 0.
double log_gamma(double x);

// psi(x) = d/dx ln Gamma(x), x > 0.
double digamma(double x);

// ln B(a, b), a > 0, b > 0.
double log_beta(double a, double b);

}  // namespace ueb
