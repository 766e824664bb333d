#include "cuesplit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cuesplit/errors.hpp"

namespace cuesplit {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_finite(double value, const std::vector<double>& grad) {
  if (!std::isfinite(value)) throw NonFiniteError("objective is not finite");
  for (double g : grad) {
    if (!std::isfinite(g)) throw NonFiniteError("gradient is not finite");
  }
}

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double>& x,
                           const LbfgsOptions& options) {
  const std::size_t n = x.size();
  std::vector<double> grad(n);
  double value = f(x, grad);
  check_finite(value, grad);

  LbfgsResult result;
  result.initial_value = value;
  result.trace.push_back(value);
  result.gradient_max_norm = max_abs(grad);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  std::vector<double> direction(n), x_new(n), grad_new(n), alpha(options.memory);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    if (result.gradient_max_norm < options.gradient_tol) {
      result.converged = true;
      break;
    }
    // Two-loop recursion.
    for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * dot(history[k].s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * history[k].y[i];
    }
    double gamma = 1.0;
    if (!history.empty()) {
      const Pair& last = history.back();
      gamma = dot(last.s, last.y) / dot(last.y, last.y);
    } else {
      const double gn = std::sqrt(dot(grad, grad));
      gamma = gn > 0 ? 1.0 / gn : 1.0;
    }
    for (double& d : direction) d *= gamma;
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * dot(history[k].y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha[k] - beta) * history[k].s[i];
    }
    double slope = dot(grad, direction);
    if (!(slope < 0)) {
      // Not a descent direction: restart from steepest descent.
      history.clear();
      const double gn = std::sqrt(dot(grad, grad));
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i] / (gn > 0 ? gn : 1.0);
      slope = dot(grad, direction);
    }

    double step = 1.0;
    bool accepted = false;
    double new_value = value;
    for (std::size_t ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * direction[i];
      new_value = f(x_new, grad_new);
      if (std::isfinite(new_value) && new_value <= value + 1e-4 * step * slope &&
          new_value < value) {
        check_finite(new_value, grad_new);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = x_new[i] - x[i];
      p.y[i] = grad_new[i] - grad[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > options.memory) history.pop_front();
    }
    x.swap(x_new);
    grad.swap(grad_new);
    value = new_value;
    result.trace.push_back(value);
    result.iterations = iter + 1;
    result.gradient_max_norm = max_abs(grad);
  }
  if (result.gradient_max_norm < options.gradient_tol) result.converged = true;
  result.final_value = value;
  return result;
}

}  // namespace cuesplit
