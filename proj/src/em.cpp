#include "ueb/em.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "json.hpp"
#include "ueb/shrinkage.hpp"
#include "ueb/special.hpp"

namespace ueb {

namespace {

constexpr double kPClip = 1e-6;     // convergence metric clip for logit p
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp2(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

double clipped_logit(double p) {
  const double q = std::min(std::max(p, kPClip), 1.0 - kPClip);
  return std::log(q / (1.0 - q));
}

double psi_of_theta(Family f, double theta) {
  switch (f) {
    case Family::FayHerriot: return 0.5 * theta * theta;
    case Family::PoissonGamma: return std::exp(theta);
    case Family::BinomialBeta:
      return theta > 30.0 ? theta : std::log1p(std::exp(theta));  // softplus
  }
  return 0.0;
}

std::size_t dim_of(std::span<const AreaRecord> data) {
  return data.empty() ? 0 : data[0].x.size();
}

// ---- generic M-step objective -------------------------------------------
//
// Expected complete log-likelihood in (beta, nu), up to constants:
//   Q = sum_i r_i { nu m_i T1_i - nu T2_i + C(nu, m_i) }
//     + sum_i (1 - r_i) log f2(y_i; m_i),
// with m_i = psi'(x_i^t beta). The second sum is the degenerate component's
// observation density; dropping it breaks the EM ascent guarantee. Areas
// sharing a design row collapse into one group, which turns intercept-only
// designs into O(1) evaluations.
struct MStepGroups {
  std::vector<std::vector<double>> x;  // one design row per group
  std::vector<double> s0;              // sum of r_i within the group
  std::vector<double> s1;              // sum of r_i * T1_i
  std::vector<double> d1;              // sum of (1 - r_i) * n_i y_i
  std::vector<double> d2;              // sum of (1 - r_i) * n_i
  double s2 = 0.0;                     // sum over all areas of r_i * T2_i
};

MStepGroups make_groups(std::span<const AreaRecord> data, std::span<const EStepArea> es) {
  MStepGroups g;
  std::map<std::vector<double>, std::size_t> index;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, inserted] = index.try_emplace(data[i].x, g.x.size());
    if (inserted) {
      g.x.push_back(data[i].x);
      g.s0.push_back(0.0);
      g.s1.push_back(0.0);
      g.d1.push_back(0.0);
      g.d2.push_back(0.0);
    }
    g.s0[it->second] += es[i].r;
    g.s1[it->second] += es[i].r * es[i].e_theta;
    g.d1[it->second] += (1.0 - es[i].r) * data[i].n * data[i].y;
    g.d2[it->second] += (1.0 - es[i].r) * data[i].n;
    g.s2 += es[i].r * es[i].e_psi;
  }
  return g;
}

double m_step_objective(const MStepGroups& g, std::span<const double> beta, double nu,
                        Family f) {
  double q = -nu * g.s2;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    const double m = synthetic_mean(g.x[k], beta, f);
    q += nu * m * g.s1[k] + g.s0[k] * log_prior_const(nu, m, f);
    // degenerate component, y-dependent constants dropped:
    //   pg: z log m - n m;   bb: z log m + (n - z) log(1 - m)
    if (f == Family::PoissonGamma)
      q += g.d1[k] * std::log(m) - g.d2[k] * m;
    else
      q += g.d1[k] * std::log(m) + (g.d2[k] - g.d1[k]) * std::log1p(-m);
  }
  return q;
}

ModelParams m_step_generic(std::span<const AreaRecord> data, std::span<const EStepArea> es,
                           const ModelParams& current, Family f, const FitConfig& cfg,
                           double p_new) {
  const std::size_t q = current.beta.size();
  const MStepGroups groups = make_groups(data, es);

  std::vector<double> x0(current.beta.begin(), current.beta.end());
  x0.push_back(std::log(current.nu));

  auto objective = [&](const std::vector<double>& v) -> double {
    const double log_nu = v[q];
    if (std::fabs(log_nu) > 400.0) return kNegInf;
    try {
      const double val =
          m_step_objective(groups, std::span<const double>(v.data(), q), std::exp(log_nu), f);
      return std::isfinite(val) ? val : kNegInf;
    } catch (const std::exception&) {
      return kNegInf;
    }
  };

  const MaximizeResult opt = maximize(objective, x0, cfg.optimizer);
  ModelParams next;
  next.beta.assign(opt.x.begin(), opt.x.begin() + static_cast<std::ptrdiff_t>(q));
  next.nu = std::exp(opt.x[q]);
  next.p = p_new;
  return next;
}

ModelParams m_step_fh(std::span<const AreaRecord> data, std::span<const EStepArea> es,
                      const ModelParams& current, const FitConfig& cfg, double p_new) {
  const std::size_t q = current.beta.size();
  const std::size_t m = data.size();

  double r_sum = 0.0;
  for (const auto& e : es) r_sum += e.r;
  ModelParams next = current;
  next.p = p_new;
  const bool exact = cfg.fh_m_step == FhMStep::Exact;
  if (!exact && r_sum < 1e-12) return next;  // no informative mass; nothing to update

  const double a_cur = 1.0 / current.nu;
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(q);
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::Map<const Eigen::VectorXd> xi(data[i].x.data(), q);
    if (exact) {
      // conditional-maximization step for beta at the current variance: the
      // informative block targets E[theta | s=1, y] with weight r/A, the
      // degenerate block targets y with weight (1-r)/D = (1-r) n. Updating
      // beta at the current A and then A at the new beta keeps every step an
      // ascent of the expected complete log-likelihood.
      const double w1 = es[i].r / a_cur;
      const double w0 = (1.0 - es[i].r) * data[i].n;
      xtx.noalias() += (w1 + w0) * xi * xi.transpose();
      xty.noalias() += (w1 * es[i].e_theta + w0 * data[i].y) * xi;
    } else {
      xtx.noalias() += es[i].r * xi * xi.transpose();
      xty.noalias() += es[i].r * es[i].e_theta * xi;
    }
  }
  xtx.diagonal().array() += 1e-10 * (1.0 + xtx.diagonal().maxCoeff());
  const Eigen::VectorXd beta = xtx.ldlt().solve(xty);

  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::Map<const Eigen::VectorXd> xi(data[i].x.data(), q);
    const double resid = es[i].e_theta - xi.dot(beta);
    if (exact) {
      // E[(theta - x^t beta)^2 | s=1, y] = resid^2 + Var(theta | s=1, y);
      // the conditional variance is recovered from the E-step moments.
      const double cond_var =
          2.0 * es[i].e_psi - es[i].e_theta * es[i].e_theta;
      acc += es[i].r * (resid * resid + std::max(cond_var, 0.0));
    } else {
      acc += resid * resid;
    }
  }
  // A appears only in the informative block, so with no informative mass the
  // variance has no update and the current value is kept.
  double a_new;
  if (exact)
    a_new = r_sum < 1e-12 ? a_cur : acc / r_sum;
  else
    a_new = acc / static_cast<double>(m);
  a_new = std::max(a_new, 1e-300);

  next.beta.assign(beta.data(), beta.data() + q);
  next.nu = 1.0 / a_new;
  return next;
}

// ---- GLM starting point ---------------------------------------------------

std::vector<double> glm_beta(std::span<const AreaRecord> data, Family f) {
  const std::size_t q = dim_of(data);
  const std::size_t m = data.size();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);

  if (f == Family::FayHerriot) {
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(q, q);
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(q);
    for (const auto& rec : data) {
      Eigen::Map<const Eigen::VectorXd> xi(rec.x.data(), q);
      xtx.noalias() += xi * xi.transpose();
      xty.noalias() += rec.y * xi;
    }
    xtx.diagonal().array() += 1e-8 * (1.0 + xtx.diagonal().maxCoeff());
    beta = xtx.ldlt().solve(xty);
    return {beta.data(), beta.data() + q};
  }

  // canonical-link Newton iterations with a ridge and clamped linear predictor
  for (int it = 0; it < 60; ++it) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(q, q);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(q);
    for (std::size_t i = 0; i < m; ++i) {
      Eigen::Map<const Eigen::VectorXd> xi(data[i].x.data(), q);
      double eta = std::min(std::max(xi.dot(beta), -30.0), 30.0);
      double mu, w;
      if (f == Family::PoissonGamma) {
        mu = std::exp(eta);
        w = data[i].n * mu;
      } else {
        mu = 1.0 / (1.0 + std::exp(-eta));
        w = data[i].n * mu * (1.0 - mu);
      }
      g.noalias() += (data[i].n * data[i].y - data[i].n * mu) * xi;
      h.noalias() += w * xi * xi.transpose();
    }
    h.diagonal().array() += 1e-6 * (1.0 + h.diagonal().maxCoeff());
    const Eigen::VectorXd step = h.ldlt().solve(g);
    beta += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return {beta.data(), beta.data() + q};
}

}  // namespace

double marginal_loglik(std::span<const AreaRecord> data, const ModelParams& params, Family f) {
  validate_params(params, f);
  const double p = params.p;
  double ll = 0.0;
  for (const auto& rec : data) {
    if (p >= 1.0) {
      ll += log_f1(rec, params, f);
    } else if (p <= 0.0) {
      ll += log_f2(rec, params, f);
    } else {
      ll += logsumexp2(std::log(p) + log_f1(rec, params, f),
                       std::log1p(-p) + log_f2(rec, params, f));
    }
  }
  return ll;
}

std::vector<EStepArea> e_step(std::span<const AreaRecord> data, const ModelParams& params,
                              Family f, EStepMode mode, int mc_samples, std::uint64_t seed) {
  validate_params(params, f);
  std::vector<EStepArea> out(data.size());
  const RngStream base(seed, 0xE57E9ULL);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = responsibility(data[i], params, f);
    if (mode == EStepMode::Analytic) {
      const PosteriorMoments pm = posterior_moments(data[i], params, f);
      out[i] = {r, pm.e_theta, pm.e_psi};
    } else {
      // fixed per-area stream: every call redraws the same variates, so EM
      // iterations share common random numbers
      RngStream rng = base.child(i);
      double st = 0.0, sp = 0.0;
      for (int k = 0; k < mc_samples; ++k) {
        const double theta = sample_posterior_theta(data[i], params, f, rng);
        st += theta;
        sp += psi_of_theta(f, theta);
      }
      out[i] = {r, st / mc_samples, sp / mc_samples};
    }
  }
  return out;
}

ModelParams m_step(std::span<const AreaRecord> data, std::span<const EStepArea> es,
                   const ModelParams& current, Family f, const FitConfig& cfg) {
  if (data.size() != es.size()) throw std::invalid_argument("m_step: size mismatch");
  double p_new;
  if (cfg.p_mode == PMode::Fixed) {
    p_new = cfg.p_fixed;
  } else {
    double s = 0.0;
    for (const auto& e : es) s += e.r;
    p_new = s / static_cast<double>(es.size());
  }
  ModelParams next = f == Family::FayHerriot
                         ? m_step_fh(data, es, current, cfg, p_new)
                         : m_step_generic(data, es, current, f, cfg, p_new);
  validate_params(next, f);
  return next;
}

ModelParams default_initial_params(std::span<const AreaRecord> data, Family f,
                                   const FitConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("default_initial_params: empty data");
  ModelParams init;
  init.beta = glm_beta(data, f);

  double sq = 0.0, qn = 0.0, qm = 0.0;
  for (const auto& rec : data) {
    const double m = synthetic_mean(rec.x, init.beta, f);
    const double d = rec.y - m;
    sq += d * d;
    qn += quad_var_at(f, m) / rec.n;
    qm += quad_var_at(f, m);
  }
  const auto count = static_cast<double>(data.size());
  const double excess = sq / count - qn / count;
  const double v2 = quad_var(f).v2;
  // underdispersed data caps the start at 1e3: large enough to mean "nearly
  // degenerate", small enough that the first maximization starts on workable
  // terrain instead of the flat where the two components have merged
  double nu = excess > 1e-12 ? v2 + (qm / count) / excess : 1e3;
  nu = std::min(std::max(nu, std::max(v2, 0.0) + 0.5), 1e3);
  init.nu = nu;
  init.p = cfg.p_mode == PMode::Fixed ? cfg.p_fixed : 0.5;
  return init;
}

FitResult fit_em(std::span<const AreaRecord> data, Family f, const FitConfig& cfg,
                 const std::optional<ModelParams>& initial) {
  if (data.empty()) throw std::invalid_argument("fit_em: empty data");
  const std::size_t q = dim_of(data);
  for (std::size_t i = 0; i < data.size(); ++i) validate_record(data[i], f, q);
  const bool constant_y =
      std::all_of(data.begin(), data.end(), [&](const AreaRecord& r) { return r.y == data[0].y; });
  if (constant_y) throw std::invalid_argument("fit_em: degenerate data (all y identical)");

  ModelParams params = initial ? *initial : default_initial_params(data, f, cfg);
  if (cfg.p_mode == PMode::Fixed) params.p = cfg.p_fixed;
  validate_params(params, f);
  if (params.beta.size() != q) throw std::invalid_argument("fit_em: initial beta arity mismatch");

  FitResult fit;
  fit.family = f;
  fit.p_mode = cfg.p_mode;
  fit.n_areas = data.size();

  // The component log-densities and conditional moments depend on (beta, nu)
  // only, yet boundary crawls re-evaluate them thousands of times while only
  // p moves. Cache them per area, rebuild only when (beta, nu) change, and
  // recombine responsibilities and the likelihood trace from the cache with
  // the exact formulas the direct paths use, so results are bit-identical.
  struct AreaCache {
    double lf1, lf2, e_theta, e_psi;
  };
  const bool analytic = cfg.e_step_mode == EStepMode::Analytic;
  std::vector<AreaCache> cache(analytic ? data.size() : 0);
  const auto fill_cache = [&]() {
    validate_params(params, f);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const PosteriorMoments pm = posterior_moments(data[i], params, f);
      cache[i] = {log_f1(data[i], params, f), log_f2(data[i], params, f), pm.e_theta, pm.e_psi};
    }
  };
  const auto cached_es = [&]() {
    std::vector<EStepArea> es(data.size());
    const double p = params.p;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double r;
      if (p >= 1.0) {
        r = 1.0;
      } else if (p <= 0.0) {
        r = 0.0;
      } else {
        double diff = cache[i].lf2 - cache[i].lf1;
        if (diff > 700.0) diff = 700.0;
        if (diff < -700.0) diff = -700.0;
        r = p / (p + (1.0 - p) * std::exp(diff));
      }
      es[i] = {r, cache[i].e_theta, cache[i].e_psi};
    }
    return es;
  };
  const auto cached_ll = [&]() {
    const double p = params.p;
    double ll = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (p >= 1.0)
        ll += cache[i].lf1;
      else if (p <= 0.0)
        ll += cache[i].lf2;
      else
        ll += logsumexp2(std::log(p) + cache[i].lf1, std::log1p(-p) + cache[i].lf2);
    }
    return ll;
  };

  if (analytic) {
    fill_cache();
    fit.loglik_trace.push_back(cached_ll());
  } else {
    fit.loglik_trace.push_back(marginal_loglik(data, params, f));
  }

  const auto param_delta = [&](const ModelParams& a, const ModelParams& b) {
    double d = std::fabs(std::log(b.nu) - std::log(a.nu));
    for (std::size_t j = 0; j < q; ++j) d = std::max(d, std::fabs(b.beta[j] - a.beta[j]));
    return std::max(d, std::fabs(clipped_logit(b.p) - clipped_logit(a.p)));
  };
  const auto bm_move = [&](const ModelParams& a, const ModelParams& b) {
    double d = std::fabs(std::log(b.nu) - std::log(a.nu));
    for (std::size_t j = 0; j < q; ++j) d = std::max(d, std::fabs(b.beta[j] - a.beta[j]));
    return d;
  };

  // Boundary crawls move p for thousands of iterations while (beta, nu) sit
  // still; once a full M-step leaves (beta, nu) below tol, interim iterations
  // update only p (the exact argmax of the expected complete log-likelihood
  // in p, so every step still ascends) and the expensive (beta, nu)
  // maximization runs periodically and always before convergence is declared.
  const bool lazy_allowed = f != Family::FayHerriot && cfg.p_mode == PMode::Free;
  bool lazy_ok = false;
  int lazy_streak = 0;

  // The likelihood has nearly-flat directions where the components merge (nu
  // to its limits, or p to a boundary): parameters march there indefinitely
  // while the remaining likelihood gain is immaterial, and every point on the
  // flat yields practically the same shrinkage predictions. Treat a window
  // whose every iteration moved the parameters substantially while the
  // likelihood gained next to nothing as converged-on-a-flat; genuine slow
  // convergence and saddle stalls move parameters little per iteration, so
  // the movement floor exempts them. A run that exhausts max_iter with a
  // final window of negligible gain gets the same verdict.
  constexpr int kFlatWindow = 100;
  constexpr double kFlatMoveFloor = 1e-4;
  std::vector<double> recent_delta;
  bool flat_window = false;

  // On a long tilted ridge the simplex marches without ever contracting to
  // x_tol and the evaluation budget dies. Its best vertex never trails the
  // start point, so adopting it keeps the ascent property and the fit moving;
  // if the search found nothing at all, the step degenerates to a stand-still
  // and the parameter criterion ends the fit honestly. The best vertex stops
  // improving within a few hundred evaluations on such ridges, so once one
  // step has died this way the remaining steps get a trimmed budget.
  FitConfig run_cfg = cfg;
  const auto m_step_safe = [&](std::span<const EStepArea> esv,
                               const ModelParams& cur) -> ModelParams {
    try {
      return m_step(data, esv, cur, f, run_cfg);
    } catch (const MaximizeError& err) {
      if (f == Family::FayHerriot || err.best.x.size() != q + 1) throw;
      run_cfg.optimizer.max_evals = std::min(run_cfg.optimizer.max_evals, 1000);
      ModelParams rec;
      rec.beta.assign(err.best.x.begin(), err.best.x.end() - 1);
      rec.nu = std::exp(err.best.x.back());
      if (cfg.p_mode == PMode::Fixed) {
        rec.p = cfg.p_fixed;
      } else {
        double s = 0.0;
        for (const auto& e : esv) s += e.r;
        rec.p = s / static_cast<double>(esv.size());
      }
      return rec;
    }
  };

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto es = analytic ? cached_es()
                             : e_step(data, params, f, cfg.e_step_mode, cfg.mc_samples, cfg.seed);
    ModelParams next;
    bool full = !(lazy_allowed && lazy_ok && lazy_streak < 50);
    try {
      if (full) {
        next = m_step_safe(es, params);
      } else {
        next = params;
        double s = 0.0;
        for (const auto& e : es) s += e.r;
        next.p = s / static_cast<double>(es.size());
      }
      double delta = param_delta(params, next);
      if (!full && delta < cfg.tol) {  // confirm with a full step before declaring
        next = m_step_safe(es, params);
        full = true;
        delta = param_delta(params, next);
      }
      if (full) {
        // crawl drift of (beta, nu) is orders below the p movement; the
        // confirming full step above keeps the convergence claim honest, so
        // the gate only has to separate crawls from genuine joint movement
        lazy_ok = bm_move(params, next) < 100.0 * cfg.tol;
        lazy_streak = 0;
      } else {
        ++lazy_streak;
      }
      const bool bm_same = next.nu == params.nu && next.beta == params.beta;
      params = next;
      if (analytic) {
        if (!bm_same) {
          cache_ok = false;
          fill_cache();
        }
        fit.loglik_trace.push_back(cached_ll());
      } else {
        fit.loglik_trace.push_back(marginal_loglik(data, params, f));
      }
      fit.iterations = it;
      if (delta < cfg.tol) {
        fit.converged = true;
        break;
      }
      recent_delta.push_back(delta);
      if (static_cast<int>(recent_delta.size()) > kFlatWindow)
        recent_delta.erase(recent_delta.begin());
      const std::size_t tl = fit.loglik_trace.size();
      if (tl > static_cast<std::size_t>(kFlatWindow)) {
        const double gain = fit.loglik_trace[tl - 1] - fit.loglik_trace[tl - 1 - kFlatWindow];
        const double eps = kFlatWindow * 1e-9 * (1.0 + std::fabs(fit.loglik_trace[tl - 1]));
        flat_window = gain < eps;
        // a flat keeps taking sizeable, non-decaying steps; a healthy tail
        // decays through the movement floor long before its gain dries up
        const double smallest = *std::min_element(recent_delta.begin(), recent_delta.end());
        double head = 0.0, tail = 0.0;
        for (int j = 0; j < 10; ++j) {
          head = std::max(head, recent_delta[static_cast<std::size_t>(j)]);
          tail = std::max(tail, recent_delta[recent_delta.size() - 1 - static_cast<std::size_t>(j)]);
        }
        if (flat_window && smallest >= kFlatMoveFloor && tail >= 0.3 * head) {
          fit.converged = true;
          break;
        }
      }
    } catch (const MaximizeError&) {
      fit.iterations = it - 1;  // this iteration produced no accepted update
      fit.converged = false;
      break;
    }
  }

  // out of budget with the last window flat: parameters are drifting along a
  // prediction-equivalent direction, not approaching anything better
  if (!fit.converged && fit.iterations == cfg.max_iter && flat_window)
    fit.converged = true;

  fit.params = params;
  fit.loglik = fit.loglik_trace.back();
  const double k = static_cast<double>(q) + (cfg.p_mode == PMode::Free ? 2.0 : 1.0);
  fit.aic = -2.0 * fit.loglik + 2.0 * k;
  fit.bic = -2.0 * fit.loglik + k * std::log(static_cast<double>(data.size()));
  return fit;
}

std::string fit_result_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["family"] = family_name(fit.family);
  j["beta"] = fit.params.beta;
  j["nu"] = fit.params.nu;
  j["p"] = fit.params.p;
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["p_mode"] = fit.p_mode == PMode::Free ? "free" : "fixed";
  j["n_areas"] = fit.n_areas;
  return j.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("fit JSON: ") + e.what());
  }
  FitResult fit;
  try {
    fit.family = family_from_name(j.at("family").get<std::string>());
    fit.params.beta = j.at("beta").get<std::vector<double>>();
    fit.params.nu = j.at("nu").get<double>();
    fit.params.p = j.at("p").get<double>();
    fit.loglik = j.at("loglik").get<double>();
    fit.aic = j.at("aic").get<double>();
    fit.bic = j.at("bic").get<double>();
    fit.iterations = j.at("iterations").get<int>();
    fit.converged = j.at("converged").get<bool>();
    fit.p_mode = j.at("p_mode").get<std::string>() == "fixed" ? PMode::Fixed : PMode::Free;
    fit.n_areas = j.at("n_areas").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("fit JSON: ") + e.what());
  }
  validate_params(fit.params, fit.family);
  return fit;
}

}  // namespace ueb
