#include <doctest.h>

#include <cmath>

#include "cuesplit/errors.hpp"
#include "cuesplit/optimize.hpp"

using namespace cuesplit;

TEST_CASE("L-BFGS finds the minimum of a quadratic") {
  const std::vector<double> centre = {1.0, -2.0, 3.5};
  Objective f = [&](const std::vector<double>& x, std::vector<double>& g) {
    double v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - centre[i];
      v += (i + 1.0) * d * d;
      g[i] = 2 * (i + 1.0) * d;
    }
    return v;
  };
  std::vector<double> x(3, 0.0);
  const LbfgsResult r = minimize_lbfgs(f, x, LbfgsOptions{});
  CHECK(r.converged);
  for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(centre[i]).epsilon(1e-4));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] < r.trace[i - 1]);
}

TEST_CASE("L-BFGS handles the Rosenbrock valley") {
  Objective f = [](const std::vector<double>& x, std::vector<double>& g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  std::vector<double> x = {-1.2, 1.0};
  LbfgsOptions o;
  o.max_iterations = 500;
  o.gradient_tol = 1e-8;
  minimize_lbfgs(f, x, o);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("non-finite objectives are reported") {
  Objective f = [](const std::vector<double>&, std::vector<double>& g) {
    g[0] = 1;
    return std::nan("");
  };
  std::vector<double> x = {0.0};
  CHECK_THROWS_AS(minimize_lbfgs(f, x, LbfgsOptions{}), NonFiniteError);
}
