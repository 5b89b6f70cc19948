#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ueb/em.hpp"

namespace ueb {

// Parameter vector phi = (beta_0..beta_{q-1}, nu[, p]); the p coordinate is
// present only for fits where p was free (a fixed p is not an estimated
// coordinate, so it carries no sampling variability).
Eigen::VectorXd pack_params(const ModelParams& params, bool p_free);
ModelParams unpack_params(const Eigen::VectorXd& v, bool p_free, const ModelParams& like);

struct DerivativeConfig {
  double z = 1e-2;      // base stencil step
  bool p_free = true;
  int max_shrink = 60;  // per-coordinate halvings before giving up

  // default step m^(-5/4) from the number of areas behind the fit
  static DerivativeConfig for_area_count(std::size_t m_areas, bool p_free = true);
};

using ParamFn = std::function<double(const ModelParams&)>;

// Central-difference gradient and Hessian (diagonal stencil plus the
// paired-direction cross stencil). Steps shrink per coordinate while a probe
// would leave the valid region; exhausting max_shrink throws
// std::domain_error.
Eigen::VectorXd numeric_grad(const ParamFn& fn, const ModelParams& at, Family f,
                             const DerivativeConfig& cfg);
Eigen::MatrixXd numeric_hess(const ParamFn& fn, const ModelParams& at, Family f,
                             const DerivativeConfig& cfg);

// Leading conditional MSE term
//   R1 = (n/(nu+n))^2 (y-m)^2 r(1-r) + r Q(eta)/(n + nu - v2).
double r1_term(const AreaRecord& rec, const ModelParams& params, Family f);

struct UncertaintyEstimates {
  Eigen::MatrixXd omega;  // k x k dispersion of the parameter estimator
  Eigen::VectorXd bias;   // k, mean deviation of the parameter estimator
  int used = 0;           // refits that entered the averages
  int dropped = 0;
  bool p_free = true;
};

// Parametric bootstrap at the fitted parameters: regenerate s/mu/y per area,
// refit with the same config (warm-started at the fit), and accumulate
// deviations on the working scale (beta, ln nu, logit p) before mapping back
// to the natural scale by the chain rule. A refit that fails is retried once
// on a fresh stream, then dropped; more than 20% dropped is an error.
UncertaintyEstimates bootstrap_uncertainty(std::span<const AreaRecord> data,
                                           const ModelParams& fitted, Family f, int b_reps,
                                           const FitConfig& fit_cfg, RngStream& rng);

double r2_term(const AreaRecord& rec, const ModelParams& params, const Eigen::MatrixXd& omega,
               Family f, const DerivativeConfig& cfg);

// Second-order bias b_i of R1 under parameter estimation:
//   b = (dR1)^t (B - Omega L_i) + tr(d2R1 Omega) / 2,
// with L_i the per-area score of the log mixture density.
double bias_term(const AreaRecord& rec, const ModelParams& params,
                 const UncertaintyEstimates& unc, Family f, const DerivativeConfig& cfg);

struct CmseComponents {
  double mu_hat = 0.0;
  double r = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double b = 0.0;
  double cm_hat = 0.0;    // (r1 - b) + r2
  double cm_naive = 0.0;  // r1 evaluated at the fitted parameters
  bool negative = false;  // cm_hat < 0 (reported, never truncated)
};

CmseComponents cmse_estimate(const AreaRecord& rec, const ModelParams& fitted,
                             const UncertaintyEstimates& unc, Family f,
                             const DerivativeConfig& cfg);

// CSV: area_id,mu_hat,r,r1,r2,b,cm_hat,cm_naive,negative_flag
void write_cmse_csv(std::ostream& os, std::span<const std::string> ids,
                    std::span<const CmseComponents> rows);

}  // namespace ueb
