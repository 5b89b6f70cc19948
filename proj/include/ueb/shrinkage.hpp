#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ueb/family.hpp"

namespace ueb {

struct AreaPosterior {
  double m;         // synthetic mean psi'(x^t beta)
  double eta;       // conjugate-posterior mean of mu given s = 1
  double r;         // P(s = 1 | y)
  double mu_tilde;  // shrinkage estimate m + r * (eta - m)
};

// P(s = 1 | y) = p f1 / (p f1 + (1 - p) f2), computed in log space with the
// density-ratio exponent clipped to +-700.
double responsibility(const AreaRecord& rec, const ModelParams& params, Family f);

AreaPosterior ub_estimate(const AreaRecord& rec, const ModelParams& params, Family f);

// Plug-in version evaluated at fitted parameters; identical formula.
inline AreaPosterior eub_estimate(const AreaRecord& rec, const ModelParams& fitted, Family f) {
  return ub_estimate(rec, fitted, f);
}

struct ProfileRow { double y, r, mu_tilde; };

// Evaluates (r, mu_tilde) along a y grid holding (n, x) fixed at the template
// record. Grid values must be valid observations for the family.
std::vector<ProfileRow> shrinkage_profile(std::span<const double> y_grid,
                                          const AreaRecord& templ, const ModelParams& params,
                                          Family f);

// CSV with header "y,r,mu_tilde", reals at 17 significant digits.
void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows);

}  // namespace ueb
