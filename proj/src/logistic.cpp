#include "cuesplit/logistic.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/optimize.hpp"

namespace cuesplit {

using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

void LogisticConfig::validate() const {
  if (!(l2_lambda >= 0) || !std::isfinite(l2_lambda)) throw ConfigError("l2_lambda must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (!(gradient_tol > 0)) throw ConfigError("gradient_tol must be positive");
}

double LogisticModel::weight(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? 0.0 : weights_[it->second];
}

double LogisticModel::margin(const FeatureVector& x) const {
  double z = bias_;
  for (const auto& [name, value] : x.entries()) {
    auto it = index_.find(name);
    if (it != index_.end()) z += value * weights_[it->second];
  }
  return z;
}

double LogisticModel::probability(const FeatureVector& x) const { return sigmoid(margin(x)); }

std::string LogisticModel::to_json() const {
  json j;
  j["bias"] = bias_;
  json w = json::object();
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (weights_[i] != 0.0) w[names_[i]] = weights_[i];
  }
  j["weights"] = std::move(w);
  return j.dump();
}

LogisticModel LogisticModel::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("logistic model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("bias") || !j["bias"].is_number() || !j.contains("weights") ||
      !j["weights"].is_object()) {
    throw FormatError("logistic model needs 'bias' and 'weights'");
  }
  LogisticModel m;
  m.bias_ = j["bias"].get<double>();
  for (auto it = j["weights"].begin(); it != j["weights"].end(); ++it) {
    if (!it.value().is_number() || !std::isfinite(it.value().get<double>())) {
      throw FormatError("weight '" + it.key() + "' must be a finite number");
    }
    m.index_.emplace(it.key(), static_cast<std::uint32_t>(m.names_.size()));
    m.names_.push_back(it.key());
    m.weights_.push_back(it.value().get<double>());
  }
  return m;
}

double logistic_objective(const std::vector<double>& params, const std::vector<SparseRow>& rows,
                          const std::vector<bool>& y, double l2_lambda,
                          std::vector<double>* grad) {
  const std::size_t d = params.size() - 1;
  const double bias = params[d];
  if (grad) grad->assign(params.size(), 0.0);
  double loss = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double z = bias;
    for (std::size_t k = 0; k < rows[r].index.size(); ++k) {
      z += rows[r].value[k] * params[rows[r].index[k]];
    }
    // Cross-entropy: softplus(z) - y z.
    loss += softplus(z) - (y[r] ? z : 0.0);
    if (grad) {
      const double g = sigmoid(z) - (y[r] ? 1.0 : 0.0);
      for (std::size_t k = 0; k < rows[r].index.size(); ++k) {
        (*grad)[rows[r].index[k]] += g * rows[r].value[k];
      }
      (*grad)[d] += g;
    }
  }
  double sq = 0;
  for (std::size_t i = 0; i < d; ++i) {
    sq += params[i] * params[i];
    if (grad) (*grad)[i] += l2_lambda * params[i];
  }
  return loss + 0.5 * l2_lambda * sq;
}

LogisticModel train_logistic(const std::vector<FeatureVector>& x, const std::vector<bool>& y,
                             const LogisticConfig& config) {
  config.validate();
  if (x.empty()) throw DataError("no training examples");
  if (x.size() != y.size()) throw DataError("examples and labels differ in length");
  LogisticModel m;
  std::vector<SparseRow> rows(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (const auto& [name, value] : x[r].entries()) {
      if (!std::isfinite(value)) throw DataError("feature '" + name + "' has a non-finite value");
      auto [it, inserted] = m.index_.try_emplace(name, static_cast<std::uint32_t>(m.names_.size()));
      if (inserted) m.names_.push_back(name);
      rows[r].index.push_back(it->second);
      rows[r].value.push_back(value);
    }
  }
  std::vector<double> params(m.names_.size() + 1, 0.0);
  LbfgsOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tol = config.gradient_tol;
  minimize_lbfgs(
      [&](const std::vector<double>& p, std::vector<double>& g) {
        return logistic_objective(p, rows, y, config.l2_lambda, &g);
      },
      params, opts);
  m.bias_ = params.back();
  params.pop_back();
  m.weights_ = std::move(params);
  return m;
}

}  // namespace cuesplit
