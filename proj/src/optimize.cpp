#include "ueb/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ueb {

namespace {

constexpr double kVeryBad = 1e308;

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;  // negated objective (we minimize)
};

double spread_x(const Simplex& s) {
  const std::size_t d = s.x[0].size();
  double worst = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double lo = s.x[0][j], hi = s.x[0][j];
    for (const auto& v : s.x) {
      lo = std::min(lo, v[j]);
      hi = std::max(hi, v[j]);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

}  // namespace

MaximizeResult maximize(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& x0, const OptimizerConfig& cfg) {
  if (x0.empty()) throw std::invalid_argument("maximize: empty start point");
  const std::size_t d = x0.size();
  int evals = 0;

  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? -v : kVeryBad;  // minimize the negation
  };

  auto run = [&](const std::vector<double>& start, double step_scale, int eval_limit,
                 Simplex& s) -> bool {
    s.x.assign(d + 1, start);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = step_scale * std::max(1.0, std::fabs(start[j]));
      s.x[j + 1][j] += h;
    }
    s.f.resize(d + 1);
    for (std::size_t i = 0; i <= d; ++i) s.f[i] = eval(s.x[i]);

    std::vector<std::size_t> ord(d + 1);
    for (;;) {
      std::iota(ord.begin(), ord.end(), 0);
      std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return s.f[a] < s.f[b]; });
      {
        Simplex t;
        for (auto i : ord) {
          t.x.push_back(std::move(s.x[i]));
          t.f.push_back(s.f[i]);
        }
        s = std::move(t);
      }
      const double fb = s.f[0], fw = s.f[d];
      if (fw - fb <= cfg.f_tol * (1.0 + std::fabs(fb)) && spread_x(s) <= cfg.x_tol) return true;
      if (evals >= eval_limit) return false;

      std::vector<double> centroid(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) centroid[j] += s.x[i][j] / static_cast<double>(d);

      auto blend = [&](double coef) {
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j)
          p[j] = centroid[j] + coef * (s.x[d][j] - centroid[j]);
        return p;
      };

      const auto xr = blend(-1.0);
      const double fr = eval(xr);
      if (fr < fb) {
        const auto xe = blend(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          s.x[d] = xe;
          s.f[d] = fe;
        } else {
          s.x[d] = xr;
          s.f[d] = fr;
        }
      } else if (fr < s.f[d - 1]) {
        s.x[d] = xr;
        s.f[d] = fr;
      } else {
        const bool outside = fr < s.f[d];
        const auto xc = blend(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : s.f[d])) {
          s.x[d] = xc;
          s.f[d] = fc;
        } else {
          for (std::size_t i = 1; i <= d; ++i) {  // shrink toward the best vertex
            for (std::size_t j = 0; j < d; ++j)
              s.x[i][j] = s.x[0][j] + 0.5 * (s.x[i][j] - s.x[0][j]);
            s.f[i] = eval(s.x[i]);
          }
        }
      }
    }
  };

  Simplex s;
  const bool ok = run(x0, 0.10, cfg.max_evals, s);
  MaximizeResult best{s.x[0], -s.f[0], evals, ok};
  if (!ok) throw MaximizeError("maximize: evaluation budget exhausted", best);

  // restart from the found point with a smaller simplex, inside what is left
  // of the budget; a failed restart keeps the converged first-pass result
  if (cfg.max_evals - evals > static_cast<int>(2 * d)) {
    Simplex s2;
    const bool ok2 = run(best.x, 0.005, cfg.max_evals, s2);
    if (ok2 && -s2.f[0] >= best.value) {
      best.x = s2.x[0];
      best.value = -s2.f[0];
    }
  }
  best.evals = evals;
  return best;
}

}  // namespace ueb
