#include "ueb/cmse.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ueb/csv.hpp"
#include "ueb/shrinkage.hpp"

namespace ueb {

namespace {

constexpr double kLogitClip = 1e-9;

double safe_logit(double p) {
  const double q = std::min(std::max(p, kLogitClip), 1.0 - kLogitClip);
  return std::log(q / (1.0 - q));
}

bool probe_valid(const ModelParams& params, Family f) {
  if (!(params.nu > std::max(0.0, quad_var(f).v2))) return false;
  if (params.p < 0.0 || params.p > 1.0) return false;
  return std::isfinite(params.nu) && std::isfinite(params.p);
}

struct Coords {
  std::size_t q;
  bool p_free;
  std::size_t k() const { return q + 1 + (p_free ? 1 : 0); }
};

ModelParams shifted(const ModelParams& at, const Coords& c, std::size_t j, double dz) {
  ModelParams out = at;
  if (j < c.q) out.beta[j] += dz;
  else if (j == c.q) out.nu += dz;
  else out.p += dz;
  return out;
}

ModelParams shifted2(const ModelParams& at, const Coords& c, std::size_t j, std::size_t l,
                     double dz) {
  return shifted(shifted(at, c, j, dz), c, l, dz);
}

double coord_of(const ModelParams& params, const Coords& c, std::size_t j) {
  if (j < c.q) return params.beta[j];
  if (j == c.q) return params.nu;
  return params.p;
}

// largest per-coordinate step <= cfg.z that keeps both probes valid; a probe
// that rounds back onto the base value (step below the coordinate's ulp)
// counts as invalid, so boundary points cannot fake a valid stencil
double coord_step(const ModelParams& at, Family f, const Coords& c, std::size_t j,
                  const DerivativeConfig& cfg) {
  const double base = coord_of(at, c, j);
  double z = cfg.z;
  for (int s = 0; s <= cfg.max_shrink; ++s) {
    const ModelParams up = shifted(at, c, j, z);
    const ModelParams dn = shifted(at, c, j, -z);
    if (probe_valid(up, f) && probe_valid(dn, f) && coord_of(up, c, j) != base &&
        coord_of(dn, c, j) != base)
      return z;
    z *= 0.5;
  }
  throw std::domain_error("numeric derivative: probe leaves the valid region "
                          "after maximal step shrinkage");
}

}  // namespace

DerivativeConfig DerivativeConfig::for_area_count(std::size_t m_areas, bool p_free) {
  DerivativeConfig cfg;
  cfg.z = std::pow(static_cast<double>(std::max<std::size_t>(m_areas, 1)), -1.25);
  cfg.p_free = p_free;
  return cfg;
}

Eigen::VectorXd pack_params(const ModelParams& params, bool p_free) {
  const std::size_t q = params.beta.size();
  Eigen::VectorXd v(q + 1 + (p_free ? 1 : 0));
  for (std::size_t j = 0; j < q; ++j) v[j] = params.beta[j];
  v[q] = params.nu;
  if (p_free) v[q + 1] = params.p;
  return v;
}

ModelParams unpack_params(const Eigen::VectorXd& v, bool p_free, const ModelParams& like) {
  const std::size_t q = like.beta.size();
  if (static_cast<std::size_t>(v.size()) != q + 1 + (p_free ? 1 : 0))
    throw std::invalid_argument("unpack_params: dimension mismatch");
  ModelParams out = like;
  for (std::size_t j = 0; j < q; ++j) out.beta[j] = v[j];
  out.nu = v[q];
  if (p_free) out.p = v[q + 1];
  return out;
}

Eigen::VectorXd numeric_grad(const ParamFn& fn, const ModelParams& at, Family f,
                             const DerivativeConfig& cfg) {
  const Coords c{at.beta.size(), cfg.p_free};
  Eigen::VectorXd g(c.k());
  for (std::size_t j = 0; j < c.k(); ++j) {
    const double z = coord_step(at, f, c, j, cfg);
    g[j] = (fn(shifted(at, c, j, z)) - fn(shifted(at, c, j, -z))) / (2.0 * z);
  }
  return g;
}

Eigen::MatrixXd numeric_hess(const ParamFn& fn, const ModelParams& at, Family f,
                             const DerivativeConfig& cfg) {
  const Coords c{at.beta.size(), cfg.p_free};
  const std::size_t k = c.k();
  const double f0 = fn(at);

  std::vector<double> step(k);
  for (std::size_t j = 0; j < k; ++j) step[j] = coord_step(at, f, c, j, cfg);

  auto diag_at = [&](std::size_t j, double z) {
    return (fn(shifted(at, c, j, z)) + fn(shifted(at, c, j, -z)) - 2.0 * f0) / (z * z);
  };

  Eigen::MatrixXd h(k, k);
  for (std::size_t j = 0; j < k; ++j) h(j, j) = diag_at(j, step[j]);

  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      const double z = std::min(step[j], step[l]);
      // the correction uses diagonal stencils at the same step as the paired
      // direction, which keeps the formula exact on quadratics
      const double dj = z == step[j] ? h(j, j) : diag_at(j, z);
      const double dl = z == step[l] ? h(l, l) : diag_at(l, z);
      const double paired =
          fn(shifted2(at, c, j, l, z)) + fn(shifted2(at, c, j, l, -z)) - 2.0 * f0;
      h(j, l) = h(l, j) = (paired - z * z * (dj + dl)) / (2.0 * z * z);
    }
  }
  return h;
}

double r1_term(const AreaRecord& rec, const ModelParams& params, Family f) {
  const AreaPosterior ap = ub_estimate(rec, params, f);
  const double w = rec.n / (params.nu + rec.n);
  const double d = rec.y - ap.m;
  const double denom = rec.n + params.nu - quad_var(f).v2;
  return w * w * d * d * ap.r * (1.0 - ap.r) + ap.r * quad_var_at(f, ap.eta) / denom;
}

UncertaintyEstimates bootstrap_uncertainty(std::span<const AreaRecord> data,
                                           const ModelParams& fitted, Family f, int b_reps,
                                           const FitConfig& fit_cfg, RngStream& rng) {
  if (b_reps < 1) throw std::invalid_argument("bootstrap_uncertainty: b_reps must be >= 1");
  validate_params(fitted, f);
  const std::size_t q = fitted.beta.size();
  const bool p_free = fit_cfg.p_mode == PMode::Free;
  const std::size_t k = q + 1 + (p_free ? 1 : 0);

  std::vector<double> m_hat(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    m_hat[i] = synthetic_mean(data[i].x, fitted.beta, f);

  auto working = [&](const ModelParams& pp) {
    Eigen::VectorXd w(k);
    for (std::size_t j = 0; j < q; ++j) w[j] = pp.beta[j];
    w[q] = std::log(pp.nu);
    if (p_free) w[q + 1] = safe_logit(pp.p);
    return w;
  };
  const Eigen::VectorXd w_hat = working(fitted);

  auto one_draw = [&](RngStream stream) -> std::vector<AreaRecord> {
    std::vector<AreaRecord> boot(data.begin(), data.end());
    for (std::size_t i = 0; i < boot.size(); ++i) {
      const bool informative = stream.bernoulli(fitted.p);
      const double mu =
          informative ? sample_prior_mu(m_hat[i], fitted.nu, f, stream) : m_hat[i];
      boot[i].y = sample_observation(mu, boot[i].n, f, stream);
    }
    return boot;
  };

  auto refit = [&](const std::vector<AreaRecord>& boot) -> std::optional<ModelParams> {
    try {
      const FitResult res = fit_em(boot, f, fit_cfg, fitted);
      if (!res.converged) return std::nullopt;
      return res.params;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  Eigen::MatrixXd omega_w = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd bias_w = Eigen::VectorXd::Zero(k);
  int used = 0, dropped = 0;
  for (int b = 0; b < b_reps; ++b) {
    auto params = refit(one_draw(rng.child(2 * static_cast<std::uint64_t>(b))));
    if (!params)  // one retry on a fresh stream, then drop
      params = refit(one_draw(rng.child(2 * static_cast<std::uint64_t>(b) + 1)));
    if (!params) {
      ++dropped;
      continue;
    }
    const Eigen::VectorXd d = working(*params) - w_hat;
    omega_w.noalias() += d * d.transpose();
    bias_w += d;
    ++used;
  }
  if (dropped * 5 > b_reps)
    throw ConvergenceError("bootstrap_uncertainty: more than 20% of refits dropped");
  omega_w /= static_cast<double>(used);
  bias_w /= static_cast<double>(used);

  // chain rule back to the natural scale at the fitted point
  Eigen::VectorXd jac = Eigen::VectorXd::Ones(k);
  jac[q] = fitted.nu;
  if (p_free) jac[q + 1] = fitted.p * (1.0 - fitted.p);

  UncertaintyEstimates out;
  out.omega = jac.asDiagonal() * omega_w * jac.asDiagonal();
  out.bias = jac.asDiagonal() * bias_w;
  out.used = used;
  out.dropped = dropped;
  out.p_free = p_free;
  return out;
}

double r2_term(const AreaRecord& rec, const ModelParams& params, const Eigen::MatrixXd& omega,
               Family f, const DerivativeConfig& cfg) {
  const Eigen::VectorXd g = numeric_grad(
      [&](const ModelParams& pp) { return ub_estimate(rec, pp, f).mu_tilde; }, params, f, cfg);
  return g.dot(omega * g);
}

double bias_term(const AreaRecord& rec, const ModelParams& params,
                 const UncertaintyEstimates& unc, Family f, const DerivativeConfig& cfg) {
  const auto r1_fn = [&](const ModelParams& pp) { return r1_term(rec, pp, f); };
  const auto score_fn = [&](const ModelParams& pp) {
    std::span<const AreaRecord> one(&rec, 1);
    return marginal_loglik(one, pp, f);
  };
  const Eigen::VectorXd g1 = numeric_grad(r1_fn, params, f, cfg);
  const Eigen::MatrixXd h1 = numeric_hess(r1_fn, params, f, cfg);
  const Eigen::VectorXd score = numeric_grad(score_fn, params, f, cfg);
  return g1.dot(unc.bias - unc.omega * score) + 0.5 * h1.cwiseProduct(unc.omega).sum();
}

CmseComponents cmse_estimate(const AreaRecord& rec, const ModelParams& fitted,
                             const UncertaintyEstimates& unc, Family f,
                             const DerivativeConfig& cfg) {
  if (unc.p_free != cfg.p_free)
    throw std::invalid_argument("cmse_estimate: p_free mismatch between bootstrap and stencil");
  CmseComponents out;
  const AreaPosterior ap = ub_estimate(rec, fitted, f);
  out.mu_hat = ap.mu_tilde;
  out.r = ap.r;
  out.r1 = r1_term(rec, fitted, f);
  out.r2 = r2_term(rec, fitted, unc.omega, f, cfg);
  out.b = bias_term(rec, fitted, unc, f, cfg);
  out.cm_naive = out.r1;
  out.cm_hat = (out.r1 - out.b) + out.r2;
  out.negative = out.cm_hat < 0.0;
  return out;
}

void write_cmse_csv(std::ostream& os, std::span<const std::string> ids,
                    std::span<const CmseComponents> rows) {
  if (ids.size() != rows.size())
    throw std::invalid_argument("write_cmse_csv: id/row count mismatch");
  os << "area_id,mu_hat,r,r1,r2,b,cm_hat,cm_naive,negative_flag\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& c = rows[i];
    os << ids[i] << ',' << csv_real(c.mu_hat) << ',' << csv_real(c.r) << ',' << csv_real(c.r1)
       << ',' << csv_real(c.r2) << ',' << csv_real(c.b) << ',' << csv_real(c.cm_hat) << ','
       << csv_real(c.cm_naive) << ',' << (c.negative ? 1 : 0) << '\n';
  }
}

}  // namespace ueb
