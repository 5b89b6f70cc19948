#include "ueb/family.hpp"

#include <cmath>
#include <stdexcept>

#include "ueb/special.hpp"

namespace ueb {

namespace {

constexpr double kMeanEps = 1e-12;  // guard for proportion-scale means
constexpr double kTwoPi = 6.2831853071795864769;

double dot(std::span<const double> x, std::span<const double> beta) {
  if (x.size() != beta.size())
    throw std::invalid_argument("synthetic_mean: covariate/coefficient length mismatch");
  double t = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) t += x[j] * beta[j];
  return t;
}

double count_of(const AreaRecord& rec) { return std::round(rec.n * rec.y); }

double log_choose(double n, double z) {
  return log_gamma(n + 1.0) - log_gamma(z + 1.0) - log_gamma(n - z + 1.0);
}

void require_integral(double v, const char* what) {
  if (std::fabs(v - std::round(v)) > 1e-8 * std::max(1.0, std::fabs(v)))
    throw std::invalid_argument(std::string(what) + " must be integral (within 1e-8)");
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::FayHerriot: return "fh";
    case Family::PoissonGamma: return "pg";
    case Family::BinomialBeta: return "bb";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "fh") return Family::FayHerriot;
  if (name == "pg") return Family::PoissonGamma;
  if (name == "bb") return Family::BinomialBeta;
  throw std::invalid_argument("unknown family '" + name + "' (expected fh, pg or bb)");
}

QuadVar quad_var(Family f) {
  switch (f) {
    case Family::FayHerriot: return {1.0, 0.0, 0.0};
    case Family::PoissonGamma: return {0.0, 1.0, 0.0};
    case Family::BinomialBeta: return {0.0, 1.0, -1.0};
  }
  return {0.0, 0.0, 0.0};
}

double quad_var_at(Family f, double x) {
  const QuadVar v = quad_var(f);
  return v.v0 + v.v1 * x + v.v2 * x * x;
}

void validate_params(const ModelParams& params, Family f) {
  if (params.beta.empty()) throw std::invalid_argument("params: beta must be non-empty");
  for (double b : params.beta)
    if (!std::isfinite(b)) throw std::invalid_argument("params: beta must be finite");
  const double floor = std::max(0.0, quad_var(f).v2);
  if (!std::isfinite(params.nu) || !(params.nu > floor))
    throw std::invalid_argument("params: nu must be finite and > max(0, v2)");
  if (!std::isfinite(params.p) || params.p < 0.0 || params.p > 1.0)
    throw std::invalid_argument("params: p must lie in [0, 1]");
}

void validate_record(const AreaRecord& rec, Family f, std::size_t q) {
  if (!std::isfinite(rec.y)) throw std::invalid_argument("record: y must be finite");
  if (!std::isfinite(rec.n) || !(rec.n > 0.0))
    throw std::invalid_argument("record: n must be finite and > 0");
  if (rec.x.size() != q) throw std::invalid_argument("record: covariate arity mismatch");
  for (double v : rec.x)
    if (!std::isfinite(v)) throw std::invalid_argument("record: covariates must be finite");
  if (f == Family::PoissonGamma) {
    if (rec.y < 0.0) throw std::invalid_argument("record: y must be >= 0 for pg");
    require_integral(rec.n * rec.y, "record: n*y");
  } else if (f == Family::BinomialBeta) {
    if (rec.y < 0.0 || rec.y > 1.0)
      throw std::invalid_argument("record: y must lie in [0, 1] for bb");
    require_integral(rec.n, "record: n");
    require_integral(rec.n * rec.y, "record: n*y");
  }
}

double synthetic_mean(std::span<const double> x, std::span<const double> beta, Family f) {
  const double t = dot(x, beta);
  switch (f) {
    case Family::FayHerriot:
      return t;
    case Family::PoissonGamma:
      return std::max(std::exp(std::min(t, 690.0)), 1e-300);
    case Family::BinomialBeta: {
      const double m = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
      return std::min(std::max(m, kMeanEps), 1.0 - kMeanEps);
    }
  }
  return t;
}

double log_f1(const AreaRecord& rec, const ModelParams& params, Family f) {
  const double n = rec.n, y = rec.y, nu = params.nu;
  const double m = synthetic_mean(rec.x, params.beta, f);
  switch (f) {
    case Family::FayHerriot: {
      const double v = 1.0 / nu + 1.0 / n;  // A + D
      const double d = y - m;
      return -0.5 * std::log(kTwoPi * v) - d * d / (2.0 * v);
    }
    case Family::PoissonGamma: {
      const double z = count_of(rec);
      const double a0 = nu * m;
      return log_gamma(z + a0) - log_gamma(z + 1.0) - log_gamma(a0) +
             z * std::log(n / (n + nu)) + a0 * std::log(nu / (n + nu));
    }
    case Family::BinomialBeta: {
      const double z = count_of(rec);
      const double w = n - z;
      const double a0 = nu * m, b0 = nu * (1.0 - m);
      return log_choose(n, z) + log_beta(a0 + z, b0 + w) - log_beta(a0, b0);
    }
  }
  throw std::logic_error("log_f1: unreachable");
}

double log_f2(const AreaRecord& rec, const ModelParams& params, Family f) {
  const double n = rec.n, y = rec.y;
  const double m = synthetic_mean(rec.x, params.beta, f);
  switch (f) {
    case Family::FayHerriot: {
      const double d = y - m;
      return -0.5 * std::log(kTwoPi / n) - 0.5 * n * d * d;
    }
    case Family::PoissonGamma: {
      const double z = count_of(rec);
      const double lam = n * m;
      return (z > 0.0 ? z * std::log(lam) : 0.0) - lam - log_gamma(z + 1.0);
    }
    case Family::BinomialBeta: {
      const double z = count_of(rec);
      const double w = n - z;
      return log_choose(n, z) + (z > 0.0 ? z * std::log(m) : 0.0) +
             (w > 0.0 ? w * std::log(1.0 - m) : 0.0);
    }
  }
  throw std::logic_error("log_f2: unreachable");
}

PosteriorSpec posterior_params(const AreaRecord& rec, const ModelParams& params, Family f) {
  const double n = rec.n, y = rec.y, nu = params.nu;
  const double m = synthetic_mean(rec.x, params.beta, f);
  switch (f) {
    case Family::FayHerriot:
      return {(n * y + nu * m) / (n + nu), 1.0 / (n + nu)};
    case Family::PoissonGamma:
      return {n * y + nu * m, n + nu};
    case Family::BinomialBeta:
      return {nu * m + n * y, n * (1.0 - y) + nu * (1.0 - m)};
  }
  throw std::logic_error("posterior_params: unreachable");
}

PosteriorMoments posterior_moments(const AreaRecord& rec, const ModelParams& params, Family f) {
  const PosteriorSpec ps = posterior_params(rec, params, f);
  switch (f) {
    case Family::FayHerriot:
      // psi(theta) = theta^2 / 2
      return {ps.a, 0.5 * (ps.a * ps.a + ps.b)};
    case Family::PoissonGamma:
      // theta = ln lambda, psi(theta) = lambda
      return {digamma(ps.a) - std::log(ps.b), ps.a / ps.b};
    case Family::BinomialBeta:
      // theta = logit(pi), psi(theta) = -ln(1 - pi)
      return {digamma(ps.a) - digamma(ps.b), digamma(ps.a + ps.b) - digamma(ps.b)};
  }
  throw std::logic_error("posterior_moments: unreachable");
}

double sample_posterior_theta(const AreaRecord& rec, const ModelParams& params, Family f,
                              RngStream& rng) {
  const PosteriorSpec ps = posterior_params(rec, params, f);
  switch (f) {
    case Family::FayHerriot:
      return rng.normal(ps.a, std::sqrt(ps.b));
    case Family::PoissonGamma:
      return std::log(std::max(rng.gamma(ps.a, ps.b), 1e-300));
    case Family::BinomialBeta: {
      double pi = rng.beta(ps.a, ps.b);
      pi = std::min(std::max(pi, 1e-15), 1.0 - 1e-15);
      return std::log(pi / (1.0 - pi));
    }
  }
  throw std::logic_error("sample_posterior_theta: unreachable");
}

double sample_prior_mu(double m, double nu, Family f, RngStream& rng) {
  switch (f) {
    case Family::FayHerriot:
      return rng.normal(m, std::sqrt(1.0 / nu));
    case Family::PoissonGamma:
      return rng.gamma(nu * m, nu);
    case Family::BinomialBeta:
      return rng.beta(nu * m, nu * (1.0 - m));
  }
  throw std::logic_error("sample_prior_mu: unreachable");
}

double sample_observation(double mu, double n, Family f, RngStream& rng) {
  switch (f) {
    case Family::FayHerriot:
      return rng.normal(mu, std::sqrt(1.0 / n));
    case Family::PoissonGamma:
      return static_cast<double>(rng.poisson(n * mu)) / n;
    case Family::BinomialBeta: {
      const auto trials = static_cast<std::int64_t>(std::llround(n));
      const double pi = std::min(std::max(mu, 0.0), 1.0);
      return static_cast<double>(rng.binomial(trials, pi)) / n;
    }
  }
  throw std::logic_error("sample_observation: unreachable");
}

double log_prior_const(double nu, double m, Family f) {
  switch (f) {
    case Family::FayHerriot:
      return -0.5 * nu * m * m + 0.5 * std::log(nu / kTwoPi);
    case Family::PoissonGamma:
      return nu * m * std::log(nu) - log_gamma(nu * m);
    case Family::BinomialBeta:
      return -log_beta(nu * m, nu * (1.0 - m));
  }
  throw std::logic_error("log_prior_const: unreachable");
}

}  // namespace ueb
