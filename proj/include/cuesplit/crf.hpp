#pragma once

// First-order linear-chain CRF: log-space forward-backward, Viterbi and
// L2-regularised maximum-likelihood training.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cuesplit/features.hpp"

namespace cuesplit {

class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> labels);  // throws DataError

  std::size_t size() const { return labels_.size(); }
  const std::string& name(std::size_t i) const { return labels_[i]; }
  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return labels_; }
  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

// A sequence with feature names resolved to model rows. Features unknown
// to the model are dropped.
struct CompiledSequence {
  std::vector<std::uint32_t> offsets;  // size length+1
  std::vector<std::uint32_t> features;
  std::vector<double> values;

  std::size_t length() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

struct TrainConfig {
  double l2_lambda = 0.1;
  std::size_t max_iterations = 200;
  double convergence_tol = 1e-4;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void validate() const;  // throws ConfigError
};

class CrfModel {
 public:
  static constexpr int kVersion = 1;

  CrfModel() = default;
  CrfModel(LabelSet labels, double l2_lambda, std::string feature_fingerprint = {});

  const LabelSet& labels() const { return labels_; }
  std::size_t label_count() const { return labels_.size(); }
  double l2_lambda() const { return l2_lambda_; }
  const std::string& feature_fingerprint() const { return fingerprint_; }
  std::size_t feature_count() const { return names_.size(); }
  const std::string& feature_name(std::size_t f) const { return names_[f]; }

  std::uint32_t add_feature(const std::string& name);
  std::optional<std::uint32_t> find_feature(std::string_view name) const;

  double& emission(std::size_t feature, std::size_t label) {
    return emissions_[feature * label_count() + label];
  }
  double emission(std::size_t feature, std::size_t label) const {
    return emissions_[feature * label_count() + label];
  }
  double& transition(std::size_t from, std::size_t to) {
    return transitions_[from * label_count() + to];
  }
  double transition(std::size_t from, std::size_t to) const {
    return transitions_[from * label_count() + to];
  }

  // Flat weight vector: emissions (feature-major) then transitions.
  std::size_t weight_count() const { return emissions_.size() + transitions_.size(); }
  std::vector<double> weights() const;
  void set_weights(const std::vector<double>& w);

  CompiledSequence compile(const std::vector<FeatureVector>& sequence) const;

  std::string to_json() const;
  static CrfModel from_json(std::string_view text);  // FormatError

  bool operator==(const CrfModel& other) const;

 private:
  LabelSet labels_;
  double l2_lambda_ = 0;
  std::string fingerprint_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> emissions_;
  std::vector<double> transitions_;
};

// Per-position emission scores, row-major [length x labels].
std::vector<double> emission_scores(const CrfModel& model, const CompiledSequence& seq);

double path_score(const CrfModel& model, const CompiledSequence& seq,
                  const std::vector<std::uint32_t>& labels);
double log_partition(const CrfModel& model, const CompiledSequence& seq);
// Per-position label distributions, row-major [length x labels].
std::vector<double> marginals(const CrfModel& model, const CompiledSequence& seq);
std::vector<std::uint32_t> viterbi_decode(const CrfModel& model, const CompiledSequence& seq);

std::vector<std::uint32_t> viterbi_decode(const CrfModel& model,
                                          const std::vector<FeatureVector>& sequence);
std::vector<double> marginals(const CrfModel& model, const std::vector<FeatureVector>& sequence);

// Log-likelihood of one sequence minus half the L2 penalty, with the
// gradient over weights() added into `grad` when non-null. The penalty is
// applied once per call; training applies it once overall.
double log_likelihood_and_gradient(const CrfModel& model, const CompiledSequence& seq,
                                   const std::vector<std::uint32_t>& labels,
                                   std::vector<double>* grad, bool regularize = true);

struct TrainResult {
  double initial_objective = 0;
  double final_objective = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // maximised objective per accepted step
};

// Accumulates training sequences, interning features as they arrive so the
// string feature vectors can be discarded.
class CrfTrainer {
 public:
  CrfTrainer(LabelSet labels, std::string feature_fingerprint = {});

  // throws ShapeMismatch (label outside set, length mismatch), DataError
  void add(const std::vector<FeatureVector>& sequence, const std::vector<std::uint32_t>& labels);
  std::size_t size() const { return sequences_.size(); }

  // DataError when empty; NonFiniteError on divergence.
  CrfModel train(const TrainConfig& config, TrainResult* result = nullptr);

 private:
  CrfModel model_;
  std::vector<CompiledSequence> sequences_;
  std::vector<std::vector<std::uint32_t>> labels_;
};

struct LabeledSequence {
  std::vector<FeatureVector> features;
  std::vector<std::uint32_t> labels;
};

CrfModel train_crf(const std::vector<LabeledSequence>& data, const LabelSet& labels,
                   const TrainConfig& config, const std::string& feature_fingerprint = {},
                   TrainResult* result = nullptr);

}  // namespace cuesplit
