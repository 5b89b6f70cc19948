#pragma once

// Reference implementations the tests trust instead of the library. Each
// one takes a different computational path from the code under test:
// std::lgamma identities, quadrature, std:: distribution samplers, or
// closed-form calculus for the Gaussian family.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ueb/family.hpp"
#include "ueb/special.hpp"

namespace orc {

inline constexpr double kPi = 3.14159265358979323846;

// Fourth-order central difference of the library's log_gamma; reference for
// digamma (stencil error ~h^4 << the 1e-10 tolerance under test).
inline double diff4_log_gamma(double x, double h = 1e-3) {
  h = std::min(h, x / 8.0);
  return (-ueb::log_gamma(x + 2 * h) + 8 * ueb::log_gamma(x + h) - 8 * ueb::log_gamma(x - h) +
          ueb::log_gamma(x - 2 * h)) /
         (12 * h);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double normal_pdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * kPi * var);
}

// log of \int N(y; th, D) N(th; m, A) dth by quadrature (truth: N(y; m, A+D))
inline double fh_logf1_quadrature(double y, double m, double A, double D) {
  const double c = (A * y + D * m) / (A + D);            // posterior center
  const double s = std::sqrt(A * D / (A + D));           // posterior sd
  const double lo = c - 12 * s - 1.0, hi = c + 12 * s + 1.0;
  const double v = simpson(
      [&](double th) { return normal_pdf(y, th, D) * normal_pdf(th, m, A); }, lo, hi, 4000);
  return std::log(v);
}

// Conjugacy identity f1(y) = f(y|th0) pi(th0) / pi(th0|y), evaluated with
// std::lgamma only. z is the observed count n*y.
inline double pg_logf1_identity(double z, double n, double nu, double m) {
  const double lam0 = m;  // any interior point works
  const double like = z * std::log(n * lam0) - n * lam0 - std::lgamma(z + 1.0);
  const double prior =
      nu * m * std::log(nu) - std::lgamma(nu * m) + (nu * m - 1.0) * std::log(lam0) - nu * lam0;
  const double a = z + nu * m, b = n + nu;
  const double post = a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(lam0) - b * lam0;
  return like + prior - post;
}

inline double bb_logf1_identity(double z, double n, double nu, double m) {
  const double q0 = m;
  const double a = nu * m, b = nu * (1.0 - m);
  const auto lbeta = [](double u, double v) {
    return std::lgamma(u) + std::lgamma(v) - std::lgamma(u + v);
  };
  const double lchoose = std::lgamma(n + 1.0) - std::lgamma(z + 1.0) - std::lgamma(n - z + 1.0);
  const double like = lchoose + z * std::log(q0) + (n - z) * std::log1p(-q0);
  const double prior = (a - 1.0) * std::log(q0) + (b - 1.0) * std::log1p(-q0) - lbeta(a, b);
  const double post = (a + z - 1.0) * std::log(q0) + (b + n - z - 1.0) * std::log1p(-q0) -
                      lbeta(a + z, b + n - z);
  return like + prior - post;
}

inline double dot(std::span<const double> x, std::span<const double> beta) {
  double t = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) t += x[j] * beta[j];
  return t;
}

inline double own_mean(std::span<const double> x, std::span<const double> beta, ueb::Family f) {
  const double t = dot(x, beta);
  switch (f) {
    case ueb::Family::FayHerriot: return t;
    case ueb::Family::PoissonGamma: return std::exp(t);
    case ueb::Family::BinomialBeta: return 1.0 / (1.0 + std::exp(-t));
  }
  throw std::logic_error("own_mean");
}

// Responsibility from scratch: plain-scale densities via std::lgamma/std::exp.
inline double own_responsibility(const ueb::AreaRecord& rec, const ueb::ModelParams& P,
                                 ueb::Family f) {
  const double m = own_mean(rec.x, P.beta, f);
  double lf1 = 0.0, lf2 = 0.0;
  switch (f) {
    case ueb::Family::FayHerriot: {
      const double A = 1.0 / P.nu, D = 1.0 / rec.n;
      lf1 = std::log(normal_pdf(rec.y, m, A + D));
      lf2 = std::log(normal_pdf(rec.y, m, D));
      break;
    }
    case ueb::Family::PoissonGamma: {
      const double z = rec.n * rec.y;
      lf1 = pg_logf1_identity(z, rec.n, P.nu, m);
      lf2 = z * std::log(rec.n * m) - rec.n * m - std::lgamma(z + 1.0);
      break;
    }
    case ueb::Family::BinomialBeta: {
      const double z = rec.n * rec.y;
      lf1 = bb_logf1_identity(z, rec.n, P.nu, m);
      lf2 = std::lgamma(rec.n + 1.0) - std::lgamma(z + 1.0) - std::lgamma(rec.n - z + 1.0) +
            z * std::log(m) + (rec.n - z) * std::log1p(-m);
      break;
    }
  }
  if (P.p >= 1.0) return 1.0;
  if (P.p <= 0.0) return 0.0;
  return P.p / (P.p + (1.0 - P.p) * std::exp(lf2 - lf1));
}

struct McMoments {
  double mean, var;
  double se_mean, se_var;
};

// Two-stage posterior sampler for mu given y: s ~ Bernoulli(r), then the
// conjugate posterior when s = 1 and the point mass at m when s = 0. Built
// entirely on std:: distributions.
inline McMoments two_stage_posterior_mu(const ueb::AreaRecord& rec, const ueb::ModelParams& P,
                                        ueb::Family f, int draws, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  const double m = own_mean(rec.x, P.beta, f);
  const double r = own_responsibility(rec, P, f);
  std::bernoulli_distribution pick(r);

  std::vector<double> mu(static_cast<std::size_t>(draws));
  for (auto& v : mu) {
    if (!pick(eng)) {
      v = m;
      continue;
    }
    switch (f) {
      case ueb::Family::FayHerriot: {
        const double A = 1.0 / P.nu, D = 1.0 / rec.n;
        const double c = (A * rec.y + D * m) / (A + D);
        std::normal_distribution<double> g(c, std::sqrt(A * D / (A + D)));
        v = g(eng);
        break;
      }
      case ueb::Family::PoissonGamma: {
        std::gamma_distribution<double> g(rec.n * rec.y + P.nu * m, 1.0 / (rec.n + P.nu));
        v = g(eng);
        break;
      }
      case ueb::Family::BinomialBeta: {
        std::gamma_distribution<double> g1(P.nu * m + rec.n * rec.y, 1.0);
        std::gamma_distribution<double> g2(rec.n * (1.0 - rec.y) + P.nu * (1.0 - m), 1.0);
        const double u1 = g1(eng), u2 = g2(eng);
        v = u1 / (u1 + u2);
        break;
      }
    }
  }

  double mean = 0.0;
  for (const double v : mu) mean += v;
  mean /= draws;
  double m2 = 0.0, m4 = 0.0;
  for (const double v : mu) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= draws;
  m4 /= draws;
  McMoments out;
  out.mean = mean;
  out.var = m2;
  out.se_mean = std::sqrt(m2 / draws);
  out.se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / draws);
  return out;
}

// Closed-form gradient of the Gaussian-family shrinkage estimate mu_tilde
// with respect to (beta, nu [, p]).
inline Eigen::VectorXd fh_mu_tilde_grad(const ueb::AreaRecord& rec, const ueb::ModelParams& P,
                                        bool p_free) {
  const double D = 1.0 / rec.n, A = 1.0 / P.nu;
  const double m = dot(rec.x, P.beta);
  const double u = rec.y - m;
  const double w = A / (A + D);
  const double rho = std::sqrt((A + D) / D) * std::exp(-u * u * A / (2 * D * (A + D)));
  const double g = P.p + (1.0 - P.p) * rho;
  const double r = P.p / g;
  const double rho_u = -rho * u * A / (D * (A + D));
  const double rho_A = rho * (0.5 / (A + D) - u * u / (2 * (A + D) * (A + D)));
  const double r_u = -P.p * (1.0 - P.p) * rho_u / (g * g);
  const double r_A = -P.p * (1.0 - P.p) * rho_A / (g * g);
  const double w_A = D / ((A + D) * (A + D));

  const auto q = static_cast<Eigen::Index>(P.beta.size());
  Eigen::VectorXd grad(q + 1 + (p_free ? 1 : 0));
  for (Eigen::Index j = 0; j < q; ++j)
    grad[j] = rec.x[static_cast<std::size_t>(j)] * (1.0 - w * (r + u * r_u));
  const double d_dA = u * (w_A * r + w * r_A);
  grad[q] = -A * A * d_dA;  // dA/dnu = -1/nu^2
  if (p_free) grad[q + 1] = w * u * rho / (g * g);
  return grad;
}

// High-accuracy Hessian of mu_tilde for the Gaussian family: fourth-order
// central differences of the analytic gradient above (error ~h^4, far below
// the stencil errors it is used to measure).
inline Eigen::MatrixXd fh_mu_tilde_hess(const ueb::AreaRecord& rec, const ueb::ModelParams& P,
                                        bool p_free) {
  const auto q = static_cast<Eigen::Index>(P.beta.size());
  const Eigen::Index k = q + 1 + (p_free ? 1 : 0);
  Eigen::MatrixXd hess(k, k);
  const auto grad_at = [&](Eigen::Index j, double step) {
    ueb::ModelParams Q = P;
    if (j < q)
      Q.beta[static_cast<std::size_t>(j)] += step;
    else if (j == q)
      Q.nu += step;
    else
      Q.p += step;
    return fh_mu_tilde_grad(rec, Q, p_free);
  };
  for (Eigen::Index j = 0; j < k; ++j) {
    double base = 1e-4;
    if (j == q) base = 1e-4 * std::max(1.0, P.nu);
    if (j == q + 1) base = std::min(1e-4, 0.25 * std::min(P.p, 1.0 - P.p) + 1e-12);
    const Eigen::VectorXd col = (8.0 * (grad_at(j, base) - grad_at(j, -base)) -
                                 (grad_at(j, 2 * base) - grad_at(j, -2 * base))) /
                                (12.0 * base);
    hess.col(j) = col;
  }
  return 0.5 * (hess + hess.transpose());
}

}  // namespace orc
