#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ueb/em.hpp"

namespace ueb {

// Law of the informative component used when generating data; Lognormal and
// TwoPoint are moment-matched to the conjugate prior (same mean m and
// variance m/nu) to probe robustness against prior misspecification.
enum class LatentLaw { Conjugate, Lognormal, TwoPoint };

// One latent mean from the informative component under the given law,
// moment-matched to mean m and variance m/nu for the non-conjugate laws.
double sample_latent_mu(double m, double nu, LatentLaw law, Family f, RngStream& rng);

struct SimDesign {
  Family family = Family::PoissonGamma;
  int areas = 50;
  ModelParams truth;
  int replicates = 500;
  int n_min = 5, n_max = 30;  // per-area size, uniform integer draw
  LatentLaw latent_law = LatentLaw::Conjugate;
  std::uint64_t seed = 1;
  bool redraw_design = false;  // fresh (x, n) per replicate instead of once per run
  FitConfig fit;               // shared fitting configuration (p handling is overridden)
};

struct QuantRow { double q05, q25, q50, q75, q95; };

// Mixture fit (p free) against the classical fit (p fixed at 1) on identical
// data; per-area MSE and absolute-bias ratios summarized across areas.
struct ComparisonTable {
  QuantRow mse_ratio;
  QuantRow bias_ratio;
  int replicates_used = 0;
  int dropped = 0;
};
ComparisonTable run_comparison(const SimDesign& design);

// Mixture fit under a possibly misspecified latent law; per-area MSE and
// absolute bias (both x100) summarized across areas.
struct SensitivityTable {
  QuantRow mse_x100;
  QuantRow bias_x100;
  int replicates_used = 0;
  int dropped = 0;
};
SensitivityTable run_sensitivity(const SimDesign& design);

// Conditional-MSE evaluation for an intercept-only rate model: condition
// area 1 on marginal quantiles y_alpha, simulate the true conditional MSE,
// then measure relative bias / variability of the corrected and naive
// estimators.
struct CmseEvalDesign {
  int areas = 50;
  ModelParams truth;        // single-coefficient rate model
  double n_value = 10.0;
  std::vector<double> alpha{0.1, 0.5};
  int marginal_draws = 10000;
  int truth_replicates = 10000;
  int outer_replicates = 500;
  int bootstrap_reps = 100;
  std::uint64_t seed = 1;
  FitConfig fit;
};

struct CmseEvalRow {
  double alpha, y_alpha, cm_true;
  double rb, cv;    // corrected estimator: percent relative bias, relative RMS
  double rbn, cvn;  // naive plug-in estimator
  int outer_used, outer_dropped, truth_used, truth_dropped;
};
std::vector<CmseEvalRow> run_cmse_eval(const CmseEvalDesign& design);

// Quantiles on a copy of the values: linear interpolation between order
// statistics (type 7), and the left-continuous inverse CDF (type 1).
double quantile_type7(std::vector<double> values, double prob);
double quantile_type1(std::vector<double> values, double prob);

void write_comparison_csv(std::ostream& os, const ComparisonTable& table);
void write_sensitivity_csv(std::ostream& os, const SensitivityTable& table);
void write_cmse_eval_csv(std::ostream& os, std::span<const CmseEvalRow> rows);

}  // namespace ueb
