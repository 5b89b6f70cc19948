#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ueb/rng.hpp"

namespace ueb {

// Three exponential-family area models with quadratic variance Q(x) =
// v0 + v1 x + v2 x^2:
//   fh : Gaussian direct estimates, y | mu ~ N(mu, 1/n)  (n = 1/D)
//   pg : rates, n y | mu ~ Poisson(n mu)
//   bb : proportions, n y | mu ~ Binomial(n, mu)
enum class Family { FayHerriot, PoissonGamma, BinomialBeta };

const char* family_name(Family f);                 // "fh" | "pg" | "bb"
Family family_from_name(const std::string& name);  // throws std::invalid_argument

struct QuadVar { double v0, v1, v2; };
QuadVar quad_var(Family f);
double quad_var_at(Family f, double x);  // Q(x)

struct AreaRecord {
  double y;               // observed mean (FH: direct estimate; PG/BB: count / n)
  double n;               // precision / exposure / trials
  std::vector<double> x;  // design row, including any intercept column
};

// The area mean mu carries a two-component prior: with probability p it is
// drawn from the conjugate prior centred at m = psi'(x^t beta) with mass nu
// (variance Q(m)/(nu - v2)), otherwise it equals m exactly.
struct ModelParams {
  std::vector<double> beta;
  double nu = 1.0;
  double p = 1.0;
  double fh_variance() const { return 1.0 / nu; }  // A, the Gaussian prior variance
};

void validate_params(const ModelParams& params, Family f);  // throws std::invalid_argument
void validate_record(const AreaRecord& rec, Family f, std::size_t q);

// m = psi'(x^t beta), overflow-safe.
double synthetic_mean(std::span<const double> x, std::span<const double> beta, Family f);

// Log marginal density of y under the informative component (mu integrated
// out against the conjugate prior) and under the degenerate component
// (mu = m). PG/BB densities are counting-measure masses of the count n*y.
double log_f1(const AreaRecord& rec, const ModelParams& params, Family f);
double log_f2(const AreaRecord& rec, const ModelParams& params, Family f);

// Conjugate posterior of the natural parameter theta given membership in the
// informative component:
//   FH: theta ~ N(a, b);  PG: exp(theta) ~ Gamma(shape a, rate b);
//   BB: logistic(theta) ~ Beta(a, b).
struct PosteriorSpec { double a, b; };
PosteriorSpec posterior_params(const AreaRecord& rec, const ModelParams& params, Family f);

struct PosteriorMoments {
  double e_theta;  // E[theta | s = 1, y]
  double e_psi;    // E[psi(theta) | s = 1, y]
};
PosteriorMoments posterior_moments(const AreaRecord& rec, const ModelParams& params, Family f);

double sample_posterior_theta(const AreaRecord& rec, const ModelParams& params, Family f,
                              RngStream& rng);

// One mu from the informative prior component centred at m.
double sample_prior_mu(double m, double nu, Family f, RngStream& rng);

// One observation y for an area with true mean mu.
double sample_observation(double mu, double n, Family f, RngStream& rng);

// Log normalizing constant C(nu, m) of the conjugate prior, defined by
// pi(theta) = exp{nu(m theta - psi(theta)) + C(nu, m)}.
double log_prior_const(double nu, double m, Family f);

}  // namespace ueb
