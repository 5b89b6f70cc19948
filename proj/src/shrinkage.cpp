#include "ueb/shrinkage.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ueb/csv.hpp"

namespace ueb {

std::string csv_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double responsibility(const AreaRecord& rec, const ModelParams& params, Family f) {
  const double p = params.p;
  if (p >= 1.0) return 1.0;
  if (p <= 0.0) return 0.0;
  double diff = log_f2(rec, params, f) - log_f1(rec, params, f);
  if (diff > 700.0) diff = 700.0;
  if (diff < -700.0) diff = -700.0;
  return p / (p + (1.0 - p) * std::exp(diff));
}

AreaPosterior ub_estimate(const AreaRecord& rec, const ModelParams& params, Family f) {
  const double m = synthetic_mean(rec.x, params.beta, f);
  const double eta = m + rec.n / (params.nu + rec.n) * (rec.y - m);
  const double r = responsibility(rec, params, f);
  return {m, eta, r, m + r * (eta - m)};
}

std::vector<ProfileRow> shrinkage_profile(std::span<const double> y_grid,
                                          const AreaRecord& templ, const ModelParams& params,
                                          Family f) {
  validate_params(params, f);
  std::vector<ProfileRow> rows;
  rows.reserve(y_grid.size());
  AreaRecord rec = templ;
  for (double y : y_grid) {
    rec.y = y;
    validate_record(rec, f, templ.x.size());
    const AreaPosterior ap = ub_estimate(rec, params, f);
    rows.push_back({y, ap.r, ap.mu_tilde});
  }
  return rows;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows) {
  os << "y,r,mu_tilde\n";
  for (const auto& row : rows)
    os << csv_real(row.y) << ',' << csv_real(row.r) << ',' << csv_real(row.mu_tilde) << '\n';
}

}  // namespace ueb
