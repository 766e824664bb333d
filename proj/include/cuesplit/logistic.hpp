#pragma once

// Binary logistic regression over sparse named features, trained on summed
// cross-entropy plus (lambda/2)|w|^2. The bias is not regularised.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cuesplit/features.hpp"

namespace cuesplit {

struct LogisticConfig {
  double l2_lambda = 1.0;
  std::size_t max_iterations = 500;
  double gradient_tol = 1e-5;

  void validate() const;  // throws ConfigError
};

struct SparseRow {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

class LogisticModel {
 public:
  std::size_t feature_count() const { return names_.size(); }
  double bias() const { return bias_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::string_view name) const;

  double margin(const FeatureVector& x) const;
  double probability(const FeatureVector& x) const;

  std::string to_json() const;
  static LogisticModel from_json(std::string_view text);  // FormatError
  bool operator==(const LogisticModel&) const = default;

 private:
  friend LogisticModel train_logistic(const std::vector<FeatureVector>&, const std::vector<bool>&,
                                      const LogisticConfig&);
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> weights_;
  double bias_ = 0;
};

// DataError for empty or misaligned data; NonFiniteError on divergence.
LogisticModel train_logistic(const std::vector<FeatureVector>& x, const std::vector<bool>& y,
                             const LogisticConfig& config);

// Objective and gradient over params = [w..., bias] for rows already
// mapped to dense indices. Exposed for gradient checks.
double logistic_objective(const std::vector<double>& params, const std::vector<SparseRow>& rows,
                          const std::vector<bool>& y, double l2_lambda,
                          std::vector<double>* grad);

double sigmoid(double z);

}  // namespace cuesplit
