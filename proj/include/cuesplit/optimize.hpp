#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cuesplit {

// Returns f(x) and writes the gradient into `grad` (same size as x).
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

struct LbfgsOptions {
  std::size_t max_iterations = 200;
  double gradient_tol = 1e-4;  // stop when max |grad| falls below
  std::size_t memory = 10;
  std::size_t max_line_search = 40;
};

struct LbfgsResult {
  double initial_value = 0;
  double final_value = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_max_norm = 0;
  std::vector<double> trace;  // accepted objective values, starting point first
};

// Deterministic L-BFGS minimiser with a backtracking Armijo line search.
// Every accepted step strictly lowers f. Throws NonFiniteError when f or
// its gradient stops being finite.
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double>& x,
                           const LbfgsOptions& options);

}  // namespace cuesplit
