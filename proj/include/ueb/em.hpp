#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ueb/family.hpp"
#include "ueb/optimize.hpp"

namespace ueb {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EStepMode { Analytic, MonteCarlo };
enum class PMode { Free, Fixed };
enum class FhMStep {
  Exact,        // conditional-maximization update of the expected complete
                // log-likelihood: beta at the current variance (blending the
                // informative and degenerate blocks), then the variance at
                // the new beta including the conditional variance term; every
                // step is an ascent
  PaperLiteral  // membership-weighted regression and unweighted residual
                // variance; kept for comparison, ascent is not guaranteed
};

struct FitConfig {
  double tol = 1e-6;    // on max-abs change of (beta, ln nu, logit p)
  int max_iter = 1000;
  EStepMode e_step_mode = EStepMode::Analytic;
  int mc_samples = 5000;       // per area, Monte Carlo mode
  PMode p_mode = PMode::Free;
  double p_fixed = 1.0;        // used when p_mode == Fixed
  FhMStep fh_m_step = FhMStep::Exact;
  OptimizerConfig optimizer{};
  std::uint64_t seed = 0;      // drives the Monte Carlo E-step streams
};

struct EStepArea {
  double r;        // P(s = 1 | y)
  double e_theta;  // E[theta | s = 1, y]
  double e_psi;    // E[psi(theta) | s = 1, y]
};

struct FitResult {
  Family family = Family::PoissonGamma;
  ModelParams params;
  double loglik = 0.0, aic = 0.0, bic = 0.0;
  int iterations = 0;
  // true when the parameter-change criterion was met, or when the fit ended
  // on a non-identified flat (likelihood exhausted while parameters drift
  // along a prediction-equivalent direction)
  bool converged = false;
  std::vector<double> loglik_trace;  // marginal log-likelihood per iteration, entry 0 = initial
  PMode p_mode = PMode::Free;
  std::size_t n_areas = 0;
};

double marginal_loglik(std::span<const AreaRecord> data, const ModelParams& params, Family f);

// Per-area responsibilities and conditional moments at the current
// parameters. Monte Carlo mode redraws with the same per-area streams on
// every call (common random numbers across EM iterations).
std::vector<EStepArea> e_step(std::span<const AreaRecord> data, const ModelParams& params,
                              Family f, EStepMode mode = EStepMode::Analytic,
                              int mc_samples = 5000, std::uint64_t seed = 0);

// One M-step from the given E-step quantities. FH uses closed forms; PG/BB
// maximize the expected complete log-likelihood over (beta, ln nu)
// derivative-free.
ModelParams m_step(std::span<const AreaRecord> data, std::span<const EStepArea> es,
                   const ModelParams& current, Family f, const FitConfig& cfg);

// Moment/GLM starting point: beta from a ridge-stabilized canonical-link GLM,
// nu from residual overdispersion (floored), p = 0.5 (or the fixed value).
ModelParams default_initial_params(std::span<const AreaRecord> data, Family f,
                                   const FitConfig& cfg = {});

// Alternates e_step/m_step until the parameter-change criterion, a detected
// likelihood flat, or max_iter. The trace is monotone in analytic mode: lazy
// interim iterations update only p (its exact conditional argmax), and an
// M-step whose inner search dies on a ridge falls back to the best point the
// search found, which never trails the start.
FitResult fit_em(std::span<const AreaRecord> data, Family f, const FitConfig& cfg = {},
                 const std::optional<ModelParams>& initial = std::nullopt);

std::string fit_result_to_json(const FitResult& fit);
FitResult fit_result_from_json(const std::string& text);

}  // namespace ueb
