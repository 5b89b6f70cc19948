#include "ueb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "ueb/cmse.hpp"
#include "ueb/csv.hpp"
#include "ueb/parallel.hpp"
#include "ueb/shrinkage.hpp"

namespace ueb {

namespace {

// stream tags for the independent sub-experiments
constexpr std::uint64_t kTagDesign = 0xD51;
constexpr std::uint64_t kTagReplicate = 0x4E6;
constexpr std::uint64_t kTagMarginal = 0x3A9;
constexpr std::uint64_t kTagTruth = 0x7C2;
constexpr std::uint64_t kTagOuter = 0x9F4;
constexpr std::uint64_t kTagBoot = 0xB07;

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t y_checksum(std::span<const AreaRecord> data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& rec : data) {
    std::uint64_t bits;
    std::memcpy(&bits, &rec.y, sizeof bits);
    h ^= fnv1a(&bits, sizeof bits);
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<AreaRecord> draw_design(const SimDesign& d, RngStream stream) {
  const std::size_t q = d.truth.beta.size();
  std::vector<AreaRecord> recs(d.areas);
  for (auto& rec : recs) {
    rec.n = static_cast<double>(stream.uniform_int(d.n_min, d.n_max));
    for (;;) {
      rec.x.assign(q, 1.0);  // leading intercept column
      for (std::size_t j = 1; j < q; ++j) rec.x[j] = stream.normal(0.0, 1.0);
      if (d.latent_law != LatentLaw::TwoPoint) break;
      // the two-point support m +- sqrt(m/nu) must stay positive
      const double m = synthetic_mean(rec.x, d.truth.beta, d.family);
      if (d.truth.nu * m > 1.0 + 1e-9) break;
    }
  }
  return recs;
}

double draw_latent_mu(double m, const SimDesign& d, RngStream& stream) {
  return sample_latent_mu(m, d.truth.nu, d.latent_law, d.family, stream);
}

// fills y in place, returns the true per-area means
std::vector<double> draw_observations(std::vector<AreaRecord>& recs, const SimDesign& d,
                                      RngStream& stream) {
  std::vector<double> mu(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double m = synthetic_mean(recs[i].x, d.truth.beta, d.family);
    mu[i] = stream.bernoulli(d.truth.p) ? draw_latent_mu(m, d, stream) : m;
    recs[i].y = sample_observation(mu[i], recs[i].n, d.family, stream);
  }
  return mu;
}

QuantRow quantiles_of(std::vector<double> v) {
  return {quantile_type7(v, 0.05), quantile_type7(v, 0.25), quantile_type7(v, 0.50),
          quantile_type7(v, 0.75), quantile_type7(v, 0.95)};
}

void check_drop_rate(int dropped, int total, const char* what) {
  if (dropped * 20 > total)
    throw ConvergenceError(std::string(what) + ": more than 5% of replicates dropped (" +
                           std::to_string(dropped) + "/" + std::to_string(total) + ")");
}

FitConfig with_p_mode(FitConfig cfg, PMode mode, double fixed = 1.0) {
  cfg.p_mode = mode;
  cfg.p_fixed = fixed;
  return cfg;
}

}  // namespace

double sample_latent_mu(double m, double nu, LatentLaw law, Family f, RngStream& rng) {
  switch (law) {
    case LatentLaw::Conjugate:
      return sample_prior_mu(m, nu, f, rng);
    case LatentLaw::Lognormal: {
      const double s2 = std::log1p(1.0 / (nu * m));
      return std::exp(rng.normal(std::log(m) - 0.5 * s2, std::sqrt(s2)));
    }
    case LatentLaw::TwoPoint: {
      const double h = std::sqrt(m / nu);
      return rng.bernoulli(0.5) ? m + h : m - h;
    }
  }
  throw std::logic_error("sample_latent_mu: unreachable");
}

double quantile_type7(std::vector<double> values, double prob) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double h = prob * (static_cast<double>(values.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double w = h - std::floor(h);
  return (1.0 - w) * values[lo] + w * values[hi];
}

double quantile_type1(std::vector<double> values, double prob) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(values.begin(), values.end());
  if (prob <= 0.0) return values.front();
  const auto rank = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(values.size())));
  return values[std::min(std::max<std::size_t>(rank, 1), values.size()) - 1];
}

ComparisonTable run_comparison(const SimDesign& d) {
  validate_params(d.truth, d.family);
  const auto m = static_cast<std::size_t>(d.areas);
  const RngStream root(d.seed, 0);
  const std::vector<AreaRecord> fixed_design = draw_design(d, root.child(kTagDesign));

  const FitConfig cfg_mix = with_p_mode(d.fit, PMode::Free);
  const FitConfig cfg_classic = with_p_mode(d.fit, PMode::Fixed, 1.0);

  const auto reps = static_cast<std::size_t>(d.replicates);
  std::vector<double> err_mix(reps * m), err_cls(reps * m);
  std::vector<char> kept(reps, 0);

  parallel_for(reps, [&](std::size_t rep) {
    RngStream stream = root.child(kTagReplicate).child(rep);
    std::vector<AreaRecord> data =
        d.redraw_design ? draw_design(d, stream.child(kTagDesign)) : fixed_design;
    const std::vector<double> mu = draw_observations(data, d, stream);

    const std::uint64_t sum_before = y_checksum(data);
    FitResult mix, cls;
    try {
      mix = fit_em(data, d.family, cfg_mix);
      if (y_checksum(data) != sum_before)
        throw std::logic_error("run_comparison: dataset changed between fits");
      cls = fit_em(data, d.family, cfg_classic);
    } catch (const std::exception&) {
      return;  // slot stays dropped
    }
    if (!mix.converged || !cls.converged) return;
    for (std::size_t i = 0; i < m; ++i) {
      err_mix[rep * m + i] = eub_estimate(data[i], mix.params, d.family).mu_tilde - mu[i];
      err_cls[rep * m + i] = eub_estimate(data[i], cls.params, d.family).mu_tilde - mu[i];
    }
    kept[rep] = 1;
  });

  std::vector<double> se_mix(m, 0.0), se_cls(m, 0.0), b_mix(m, 0.0), b_cls(m, 0.0);
  int used = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    if (!kept[rep]) continue;
    ++used;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = err_mix[rep * m + i], b = err_cls[rep * m + i];
      se_mix[i] += a * a;
      se_cls[i] += b * b;
      b_mix[i] += a;
      b_cls[i] += b;
    }
  }
  const int dropped = d.replicates - used;
  check_drop_rate(dropped, d.replicates, "run_comparison");

  std::vector<double> mse_ratio(m), bias_ratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    mse_ratio[i] = se_mix[i] / se_cls[i];
    bias_ratio[i] = std::fabs(b_mix[i]) / std::fabs(b_cls[i]);
  }
  ComparisonTable out;
  out.mse_ratio = quantiles_of(std::move(mse_ratio));
  out.bias_ratio = quantiles_of(std::move(bias_ratio));
  out.replicates_used = used;
  out.dropped = dropped;
  return out;
}

SensitivityTable run_sensitivity(const SimDesign& d) {
  validate_params(d.truth, d.family);
  if (d.latent_law != LatentLaw::Conjugate && d.family != Family::PoissonGamma)
    throw std::invalid_argument("run_sensitivity: matched latent laws are defined for rates");
  const auto m = static_cast<std::size_t>(d.areas);
  const RngStream root(d.seed, 0);
  const std::vector<AreaRecord> fixed_design = draw_design(d, root.child(kTagDesign));
  const FitConfig cfg_mix = with_p_mode(d.fit, PMode::Free);

  const auto reps = static_cast<std::size_t>(d.replicates);
  std::vector<double> err(reps * m);
  std::vector<char> kept(reps, 0);

  parallel_for(reps, [&](std::size_t rep) {
    RngStream stream = root.child(kTagReplicate).child(rep);
    std::vector<AreaRecord> data =
        d.redraw_design ? draw_design(d, stream.child(kTagDesign)) : fixed_design;
    const std::vector<double> mu = draw_observations(data, d, stream);
    FitResult fit;
    try {
      fit = fit_em(data, d.family, cfg_mix);
    } catch (const std::exception&) {
      return;
    }
    if (!fit.converged) return;
    for (std::size_t i = 0; i < m; ++i)
      err[rep * m + i] = eub_estimate(data[i], fit.params, d.family).mu_tilde - mu[i];
    kept[rep] = 1;
  });

  std::vector<double> se(m, 0.0), bias(m, 0.0);
  int used = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    if (!kept[rep]) continue;
    ++used;
    for (std::size_t i = 0; i < m; ++i) {
      se[i] += err[rep * m + i] * err[rep * m + i];
      bias[i] += err[rep * m + i];
    }
  }
  const int dropped = d.replicates - used;
  check_drop_rate(dropped, d.replicates, "run_sensitivity");

  std::vector<double> mse(m), abias(m);
  for (std::size_t i = 0; i < m; ++i) {
    mse[i] = 100.0 * se[i] / used;
    abias[i] = 100.0 * std::fabs(bias[i]) / used;
  }
  SensitivityTable out;
  out.mse_x100 = quantiles_of(std::move(mse));
  out.bias_x100 = quantiles_of(std::move(abias));
  out.replicates_used = used;
  out.dropped = dropped;
  return out;
}

std::vector<CmseEvalRow> run_cmse_eval(const CmseEvalDesign& d) {
  if (d.truth.beta.size() != 1)
    throw std::invalid_argument("run_cmse_eval: the design is a single-coefficient rate model");
  const Family fam = Family::PoissonGamma;
  validate_params(d.truth, fam);
  const auto m = static_cast<std::size_t>(d.areas);
  const double m_truth = std::exp(d.truth.beta[0]);
  const RngStream root(d.seed, 0);

  SimDesign gen;  // reuse the observation generator: conjugate latent law
  gen.family = fam;
  gen.areas = d.areas;
  gen.truth = d.truth;
  gen.latent_law = LatentLaw::Conjugate;

  std::vector<AreaRecord> design_recs(m);
  for (auto& rec : design_recs) {
    rec.n = d.n_value;
    rec.x = {1.0};
  }

  // marginal quantiles of y for one area
  std::vector<double> marginal(static_cast<std::size_t>(d.marginal_draws));
  {
    RngStream stream = root.child(kTagMarginal);
    for (auto& v : marginal) {
      const double mu = stream.bernoulli(d.truth.p)
                            ? sample_prior_mu(m_truth, d.truth.nu, fam, stream)
                            : m_truth;
      v = sample_observation(mu, d.n_value, fam, stream);
    }
  }

  const FitConfig cfg_mix = with_p_mode(d.fit, PMode::Free);
  std::vector<CmseEvalRow> rows;

  for (std::size_t ai = 0; ai < d.alpha.size(); ++ai) {
    const double alpha = d.alpha[ai];
    const double y_alpha = quantile_type1(marginal, alpha);

    AreaRecord cond_rec = design_recs[0];
    cond_rec.y = y_alpha;

    // simulated truth: refit on fresh data with y_1 pinned at y_alpha, draw
    // the latent rate from its conditional law at the true parameters
    const auto t_reps = static_cast<std::size_t>(d.truth_replicates);
    std::vector<double> sq(t_reps, 0.0);
    std::vector<char> t_kept(t_reps, 0);
    parallel_for(t_reps, [&](std::size_t rep) {
      RngStream stream = root.child(kTagTruth).child(ai).child(rep);
      std::vector<AreaRecord> data = design_recs;
      draw_observations(data, gen, stream);
      data[0].y = y_alpha;
      FitResult fit;
      try {
        fit = fit_em(data, fam, cfg_mix);
      } catch (const std::exception&) {
        return;
      }
      if (!fit.converged) return;
      const double lam_hat = eub_estimate(data[0], fit.params, fam).mu_tilde;
      const double r1 = responsibility(data[0], d.truth, fam);
      const double lam = stream.bernoulli(r1)
                             ? std::exp(sample_posterior_theta(data[0], d.truth, fam, stream))
                             : m_truth;
      sq[rep] = (lam_hat - lam) * (lam_hat - lam);
      t_kept[rep] = 1;
    });
    double cm_true = 0.0;
    int t_used = 0;
    for (std::size_t rep = 0; rep < t_reps; ++rep)
      if (t_kept[rep]) {
        cm_true += sq[rep];
        ++t_used;
      }
    check_drop_rate(d.truth_replicates - t_used, d.truth_replicates, "run_cmse_eval truth");
    cm_true /= t_used;

    // estimator study
    const auto s_reps = static_cast<std::size_t>(d.outer_replicates);
    std::vector<double> dev(s_reps, 0.0), dev_n(s_reps, 0.0);
    std::vector<char> s_kept(s_reps, 0);
    const DerivativeConfig dcfg = DerivativeConfig::for_area_count(m, true);
    parallel_for(s_reps, [&](std::size_t rep) {
      RngStream stream = root.child(kTagOuter).child(ai).child(rep);
      std::vector<AreaRecord> data = design_recs;
      draw_observations(data, gen, stream);
      data[0].y = y_alpha;
      try {
        const FitResult fit = fit_em(data, fam, cfg_mix);
        if (!fit.converged) return;
        RngStream boot_stream = stream.child(kTagBoot);
        const UncertaintyEstimates unc =
            bootstrap_uncertainty(data, fit.params, fam, d.bootstrap_reps, cfg_mix, boot_stream);
        const CmseComponents cm = cmse_estimate(data[0], fit.params, unc, fam, dcfg);
        dev[rep] = (cm.cm_hat - cm_true) / cm_true;
        dev_n[rep] = (cm.cm_naive - cm_true) / cm_true;
        s_kept[rep] = 1;
      } catch (const std::exception&) {
      }
    });
    double rb = 0.0, cv = 0.0, rbn = 0.0, cvn = 0.0;
    int s_used = 0;
    for (std::size_t rep = 0; rep < s_reps; ++rep) {
      if (!s_kept[rep]) continue;
      ++s_used;
      rb += dev[rep];
      cv += dev[rep] * dev[rep];
      rbn += dev_n[rep];
      cvn += dev_n[rep] * dev_n[rep];
    }
    check_drop_rate(d.outer_replicates - s_used, d.outer_replicates, "run_cmse_eval outer");

    CmseEvalRow row;
    row.alpha = alpha;
    row.y_alpha = y_alpha;
    row.cm_true = cm_true;
    row.rb = 100.0 * rb / s_used;
    row.cv = std::sqrt(cv / s_used);
    row.rbn = 100.0 * rbn / s_used;
    row.cvn = std::sqrt(cvn / s_used);
    row.outer_used = s_used;
    row.outer_dropped = d.outer_replicates - s_used;
    row.truth_used = t_used;
    row.truth_dropped = d.truth_replicates - t_used;
    rows.push_back(row);
  }
  return rows;
}

void write_comparison_csv(std::ostream& os, const ComparisonTable& t) {
  os << "statistic,q05,q25,q50,q75,q95\n";
  const auto line = [&](const char* name, const QuantRow& q) {
    os << name << ',' << csv_real(q.q05) << ',' << csv_real(q.q25) << ',' << csv_real(q.q50)
       << ',' << csv_real(q.q75) << ',' << csv_real(q.q95) << '\n';
  };
  line("mse_ratio", t.mse_ratio);
  line("bias_ratio", t.bias_ratio);
}

void write_sensitivity_csv(std::ostream& os, const SensitivityTable& t) {
  os << "statistic,q05,q25,q50,q75,q95\n";
  const auto line = [&](const char* name, const QuantRow& q) {
    os << name << ',' << csv_real(q.q05) << ',' << csv_real(q.q25) << ',' << csv_real(q.q50)
       << ',' << csv_real(q.q75) << ',' << csv_real(q.q95) << '\n';
  };
  line("mse_x100", t.mse_x100);
  line("bias_x100", t.bias_x100);
}

void write_cmse_eval_csv(std::ostream& os, std::span<const CmseEvalRow> rows) {
  os << "alpha,y_alpha,cm_true,rb,cv,rbn,cvn\n";
  for (const auto& r : rows) {
    os << csv_real(r.alpha) << ',' << csv_real(r.y_alpha) << ',' << csv_real(r.cm_true) << ','
       << csv_real(r.rb) << ',' << csv_real(r.cv) << ',' << csv_real(r.rbn) << ','
       << csv_real(r.cvn) << '\n';
  }
}

}  // namespace ueb
