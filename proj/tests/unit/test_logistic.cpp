#include <doctest.h>

#include <cmath>

#include "cuesplit/errors.hpp"
#include "cuesplit/logistic.hpp"
#include "cuesplit/rng.hpp"

using namespace cuesplit;

namespace {

FeatureVector fv(std::initializer_list<std::pair<const char*, double>> items) {
  FeatureVector v;
  for (const auto& [n, w] : items) v.add(n, w);
  v.finalize();
  return v;
}

}  // namespace

TEST_CASE("sigmoid is stable at the extremes") {
  CHECK(sigmoid(0) == doctest::Approx(0.5));
  CHECK(sigmoid(800) == doctest::Approx(1.0));
  CHECK(sigmoid(-800) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800)));
  CHECK(sigmoid(2) + sigmoid(-2) == doctest::Approx(1.0));
}

TEST_CASE("objective gradient matches central differences") {
  Rng rng(3);
  std::vector<SparseRow> rows;
  std::vector<bool> y;
  const std::size_t dims = 5;
  for (int n = 0; n < 25; ++n) {
    SparseRow r;
    for (std::uint32_t j = 0; j < dims; ++j) {
      if (rng.chance(0.5)) {
        r.index.push_back(j);
        r.value.push_back(rng.uniform(-2, 2));
      }
    }
    rows.push_back(r);
    y.push_back(rng.chance(0.4));
  }
  std::vector<double> p(dims + 1);
  for (double& v : p) v = rng.uniform(-1, 1);
  std::vector<double> g;
  logistic_objective(p, rows, y, 0.7, &g);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto up = p, down = p;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    const double num = (logistic_objective(up, rows, y, 0.7, nullptr) -
                        logistic_objective(down, rows, y, 0.7, nullptr)) / 2e-6;
    CHECK(g[i] == doctest::Approx(num).epsilon(1e-6));
  }
}

TEST_CASE("separable data is fit perfectly") {
  std::vector<FeatureVector> x;
  std::vector<bool> y;
  for (int i = 0; i < 20; ++i) {
    const bool pos = i % 3 == 0;
    x.push_back(fv({{pos ? "yes" : "no", 1.0}, {"shared", 1.0}}));
    y.push_back(pos);
  }
  LogisticConfig c;
  c.l2_lambda = 0.1;
  const LogisticModel m = train_logistic(x, y, c);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK((m.probability(x[i]) >= 0.5) == y[i]);
  CHECK(m.weight("yes") > 0);
  CHECK(m.weight("no") < 0);
  CHECK(m.weight("absent") == 0);
}

TEST_CASE("a huge penalty leaves only the base rate") {
  std::vector<FeatureVector> x;
  std::vector<bool> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(fv({{i % 4 == 0 ? "a" : "b", 1.0}}));
    y.push_back(i % 4 == 0);
  }
  LogisticConfig c;
  c.l2_lambda = 1e6;
  const LogisticModel m = train_logistic(x, y, c);
  for (double w : m.weights()) CHECK(std::abs(w) < 1e-3);
  CHECK(m.probability(x[0]) == doctest::Approx(0.25).epsilon(1e-2));
  CHECK(m.probability(x[1]) == doctest::Approx(0.25).epsilon(1e-2));
}

TEST_CASE("logistic models round-trip through JSON") {
  std::vector<FeatureVector> x = {fv({{"a", 1}}), fv({{"b", 1}}), fv({{"a", 1}, {"c", 2}})};
  const LogisticModel m = train_logistic(x, {true, false, true}, LogisticConfig{});
  const LogisticModel back = LogisticModel::from_json(m.to_json());
  for (const auto& v : x) CHECK(back.probability(v) == doctest::Approx(m.probability(v)).epsilon(1e-12));
  CHECK_THROWS_AS(LogisticModel::from_json("[]"), FormatError);
}

TEST_CASE("logistic input checks") {
  CHECK_THROWS_AS(train_logistic({}, {}, LogisticConfig{}), DataError);
  CHECK_THROWS_AS(train_logistic({fv({{"a", 1}})}, {true, false}, LogisticConfig{}), DataError);
  LogisticConfig bad;
  bad.l2_lambda = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
