#pragma once

// Derivative-free simplex minimizer with dimension-adaptive coefficients
// (Gao & Han). Failed evaluations should return +inf.

#include <functional>
#include <vector>

namespace qgp::opt {

struct NelderMeadOptions {
  int max_evals = 2000;
  double xatol = 1e-6;
  double fatol = 1e-8;
  bool adaptive = true;
  double initial_step = 1.0;  // simplex edge along each axis
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace qgp::opt
