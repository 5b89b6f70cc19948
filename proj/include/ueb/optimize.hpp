#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ueb {

struct OptimizerConfig {
  int max_evals = 4000;
  double x_tol = 1e-8;
  double f_tol = 1e-12;
};

struct MaximizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

// Thrown when the evaluation budget runs out before the simplex settles;
// carries the best point found so the caller can still inspect it.
struct MaximizeError : std::runtime_error {
  MaximizeError(const std::string& what, MaximizeResult best_so_far)
      : std::runtime_error(what), best(std::move(best_so_far)) {}
  MaximizeResult best;
};

// Derivative-free maximization: Nelder–Mead, then one restart from the found
// point with a tightened simplex. Non-finite objective values are treated as
// very bad rather than fatal.
MaximizeResult maximize(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& x0,
                        const OptimizerConfig& cfg = {});

}  // namespace ueb
