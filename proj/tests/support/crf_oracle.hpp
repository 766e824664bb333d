#pragma once

// Random CRF instances and exhaustive-enumeration reference answers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cuesplit/crf.hpp"
#include "cuesplit/rng.hpp"

namespace oracle {

struct Instance {
  cuesplit::CrfModel model;
  std::vector<cuesplit::FeatureVector> sequence;
  std::vector<std::uint32_t> labels;
};

inline Instance random_instance(std::uint64_t seed, std::size_t labels, std::size_t length,
                                std::size_t features = 6, double l2 = 0.3) {
  cuesplit::Rng rng(seed);
  std::vector<std::string> names;
  for (std::size_t l = 0; l < labels; ++l) names.push_back("L" + std::to_string(l));
  Instance inst{cuesplit::CrfModel(cuesplit::LabelSet(names), l2, "test"), {}, {}};
  for (std::size_t f = 0; f < features; ++f) inst.model.add_feature("f" + std::to_string(f));
  std::vector<double> w(inst.model.weight_count());
  for (double& x : w) x = rng.uniform(-1.5, 1.5);
  inst.model.set_weights(w);
  for (std::size_t t = 0; t < length; ++t) {
    cuesplit::FeatureVector fv;
    const std::size_t k = 1 + rng.below(3);
    for (std::size_t j = 0; j < k; ++j) {
      fv.add("f" + std::to_string(rng.below(features)), rng.uniform(0.2, 2.0));
    }
    fv.finalize();
    inst.sequence.push_back(std::move(fv));
    inst.labels.push_back(static_cast<std::uint32_t>(rng.below(labels)));
  }
  return inst;
}

// Score of a label path computed straight from the model's accessors.
inline double score(const cuesplit::CrfModel& m, const std::vector<cuesplit::FeatureVector>& seq,
                    const std::vector<std::uint32_t>& path) {
  double s = 0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (const auto& [name, v] : seq[t].entries()) {
      if (auto f = m.find_feature(name)) s += v * m.emission(*f, path[t]);
    }
    if (t > 0) s += m.transition(path[t - 1], path[t]);
  }
  return s;
}

struct Enumeration {
  double log_z = 0;
  std::vector<std::uint32_t> best;
  std::vector<double> marginals;  // [length x labels]
};

inline Enumeration enumerate(const cuesplit::CrfModel& m,
                             const std::vector<cuesplit::FeatureVector>& seq) {
  const std::size_t L = m.label_count();
  const std::size_t n = seq.size();
  std::vector<std::uint32_t> path(n, 0);
  std::vector<double> scores;
  std::vector<std::vector<std::uint32_t>> paths;
  double best = -std::numeric_limits<double>::infinity();
  Enumeration out;
  while (true) {
    const double s = score(m, seq, path);
    scores.push_back(s);
    paths.push_back(path);
    if (s > best) {
      best = s;
      out.best = path;
    }
    std::size_t t = 0;
    while (t < n && ++path[t] == L) path[t++] = 0;
    if (t == n) break;
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += std::exp(s - mx);
  out.log_z = mx + std::log(sum);
  out.marginals.assign(n * L, 0.0);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const double prob = std::exp(scores[p] - out.log_z);
    for (std::size_t t = 0; t < n; ++t) out.marginals[t * L + paths[p][t]] += prob;
  }
  return out;
}

// Largest relative error between the analytic gradient of the regularised
// log-likelihood and central differences.
inline double gradient_error(const Instance& inst, double h = 1e-5) {
  cuesplit::CrfModel m = inst.model;
  const auto seq = m.compile(inst.sequence);
  std::vector<double> grad;
  cuesplit::log_likelihood_and_gradient(m, seq, inst.labels, &grad);
  const std::vector<double> w0 = m.weights();
  double worst = 0;
  for (std::size_t i = 0; i < w0.size(); ++i) {
    auto w = w0;
    w[i] = w0[i] + h;
    m.set_weights(w);
    const double up = cuesplit::log_likelihood_and_gradient(m, seq, inst.labels, nullptr);
    w[i] = w0[i] - h;
    m.set_weights(w);
    const double down = cuesplit::log_likelihood_and_gradient(m, seq, inst.labels, nullptr);
    const double numeric = (up - down) / (2 * h);
    const double rel = std::abs(numeric - grad[i]) / std::max(1.0, std::abs(numeric) + std::abs(grad[i]));
    worst = std::max(worst, rel);
  }
  m.set_weights(w0);
  return worst;
}

}  // namespace oracle
