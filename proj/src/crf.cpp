#include "cuesplit/crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/optimize.hpp"

namespace cuesplit {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Above this the factored exp(T) products could overflow.
constexpr double kFactoredLimit = 300.0;

double logsumexp(const double* v, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

struct Lattice {
  std::size_t n = 0;
  std::size_t L = 0;
  std::vector<double> e;      // emission scores
  std::vector<double> alpha;  // log forward
  std::vector<double> beta;   // log backward
  std::vector<double> exp_t;  // exp(transitions) when factored
  bool factored = false;
  double log_z = 0;
};

void forward_backward(const CrfModel& model, const CompiledSequence& seq, Lattice& lat) {
  const std::size_t n = seq.length();
  const std::size_t L = model.label_count();
  lat.n = n;
  lat.L = L;
  lat.e = emission_scores(model, seq);
  lat.alpha.assign(n * L, 0.0);
  lat.beta.assign(n * L, 0.0);

  double tmax = 0;
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = 0; b < L; ++b) tmax = std::max(tmax, std::abs(model.transition(a, b)));
  }
  lat.factored = tmax < kFactoredLimit;
  std::vector<double> buf(L), scaled(L);

  if (lat.factored) {
    lat.exp_t.resize(L * L);
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t b = 0; b < L; ++b) lat.exp_t[a * L + b] = std::exp(model.transition(a, b));
    }
  }

  for (std::size_t y = 0; y < L; ++y) lat.alpha[y] = lat.e[y];
  for (std::size_t t = 1; t < n; ++t) {
    const double* prev = &lat.alpha[(t - 1) * L];
    double* cur = &lat.alpha[t * L];
    if (lat.factored) {
      const double m = *std::max_element(prev, prev + L);
      for (std::size_t a = 0; a < L; ++a) scaled[a] = std::exp(prev[a] - m);
      for (std::size_t b = 0; b < L; ++b) {
        double s = 0;
        for (std::size_t a = 0; a < L; ++a) s += scaled[a] * lat.exp_t[a * L + b];
        cur[b] = lat.e[t * L + b] + m + std::log(s);
      }
    } else {
      for (std::size_t b = 0; b < L; ++b) {
        for (std::size_t a = 0; a < L; ++a) buf[a] = prev[a] + model.transition(a, b);
        cur[b] = lat.e[t * L + b] + logsumexp(buf.data(), L);
      }
    }
  }
  for (std::size_t t = n - 1; t-- > 0;) {
    const double* next = &lat.beta[(t + 1) * L];
    double* cur = &lat.beta[t * L];
    for (std::size_t b = 0; b < L; ++b) buf[b] = lat.e[(t + 1) * L + b] + next[b];
    if (lat.factored) {
      const double m = *std::max_element(buf.begin(), buf.end());
      for (std::size_t b = 0; b < L; ++b) scaled[b] = std::exp(buf[b] - m);
      for (std::size_t a = 0; a < L; ++a) {
        double s = 0;
        for (std::size_t b = 0; b < L; ++b) s += lat.exp_t[a * L + b] * scaled[b];
        cur[a] = m + std::log(s);
      }
    } else {
      std::vector<double> tmp(L);
      for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = 0; b < L; ++b) tmp[b] = model.transition(a, b) + buf[b];
        cur[a] = logsumexp(tmp.data(), L);
      }
    }
  }
  lat.log_z = logsumexp(&lat.alpha[(n - 1) * L], L);
}

void check_sequence(const CrfModel& model, const CompiledSequence& seq,
                    const std::vector<std::uint32_t>* labels) {
  if (seq.length() == 0) throw DataError("sequence must have at least one position");
  if (labels) {
    if (labels->size() != seq.length()) {
      throw ShapeMismatch(std::to_string(labels->size()) + " labels for " +
                          std::to_string(seq.length()) + " positions");
    }
    for (std::uint32_t y : *labels) {
      if (y >= model.label_count()) {
        throw ShapeMismatch("label index " + std::to_string(y) + " outside label set of size " +
                            std::to_string(model.label_count()));
      }
    }
  }
}

// Adds d(log p(labels | seq)) / dw into grad and returns log p.
double accumulate(const CrfModel& model, const CompiledSequence& seq,
                  const std::vector<std::uint32_t>& labels, double* grad, Lattice& lat) {
  forward_backward(model, seq, lat);
  const std::size_t n = lat.n;
  const std::size_t L = lat.L;
  const std::size_t emit_size = model.feature_count() * L;
  double gold = 0;
  std::vector<double> marg(L);
  for (std::size_t t = 0; t < n; ++t) {
    gold += lat.e[t * L + labels[t]];
    for (std::size_t y = 0; y < L; ++y) {
      marg[y] = std::exp(lat.alpha[t * L + y] + lat.beta[t * L + y] - lat.log_z);
    }
    if (grad) {
      for (std::uint32_t k = seq.offsets[t]; k < seq.offsets[t + 1]; ++k) {
        const double v = seq.values[k];
        double* row = grad + static_cast<std::size_t>(seq.features[k]) * L;
        for (std::size_t y = 0; y < L; ++y) row[y] -= v * marg[y];
        row[labels[t]] += v;
      }
    }
  }
  std::vector<double> left(L), right(L);
  for (std::size_t t = 1; t < n; ++t) {
    gold += model.transition(labels[t - 1], labels[t]);
    if (!grad) continue;
    double* tg = grad + emit_size;
    tg[labels[t - 1] * L + labels[t]] += 1.0;
    const double* a = &lat.alpha[(t - 1) * L];
    if (lat.factored) {
      const double ma = *std::max_element(a, a + L);
      double mb = kNegInf;
      for (std::size_t y = 0; y < L; ++y) {
        right[y] = lat.e[t * L + y] + lat.beta[t * L + y];
        mb = std::max(mb, right[y]);
      }
      for (std::size_t y = 0; y < L; ++y) {
        left[y] = std::exp(a[y] - ma);
        right[y] = std::exp(right[y] - mb);
      }
      const double scale = std::exp(ma + mb - lat.log_z);
      for (std::size_t p = 0; p < L; ++p) {
        const double lp = left[p] * scale;
        for (std::size_t q = 0; q < L; ++q) {
          tg[p * L + q] -= lp * lat.exp_t[p * L + q] * right[q];
        }
      }
    } else {
      for (std::size_t p = 0; p < L; ++p) {
        for (std::size_t q = 0; q < L; ++q) {
          tg[p * L + q] -= std::exp(a[p] + model.transition(p, q) + lat.e[t * L + q] +
                                    lat.beta[t * L + q] - lat.log_z);
        }
      }
    }
  }
  return gold - lat.log_z;
}

}  // namespace

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("label set must not be empty");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (labels_[i] == labels_[j]) throw DataError("duplicate label '" + labels_[i] + "'");
    }
  }
}

std::optional<std::size_t> LabelSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == name) return i;
  }
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(l2_lambda >= 0) || !std::isfinite(l2_lambda)) throw ConfigError("l2_lambda must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (!(convergence_tol > 0)) throw ConfigError("convergence_tol must be positive");
  if (jobs < 1) throw ConfigError("jobs must be positive");
}

CrfModel::CrfModel(LabelSet labels, double l2_lambda, std::string feature_fingerprint)
    : labels_(std::move(labels)),
      l2_lambda_(l2_lambda),
      fingerprint_(std::move(feature_fingerprint)),
      transitions_(labels_.size() * labels_.size(), 0.0) {}

std::uint32_t CrfModel::add_feature(const std::string& name) {
  auto [it, inserted] = index_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
  if (inserted) {
    names_.push_back(name);
    emissions_.resize(emissions_.size() + label_count(), 0.0);
  }
  return it->second;
}

std::optional<std::uint32_t> CrfModel::find_feature(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> CrfModel::weights() const {
  std::vector<double> w = emissions_;
  w.insert(w.end(), transitions_.begin(), transitions_.end());
  return w;
}

void CrfModel::set_weights(const std::vector<double>& w) {
  if (w.size() != weight_count()) throw ShapeMismatch("weight vector has wrong size");
  std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(emissions_.size()), emissions_.begin());
  std::copy(w.begin() + static_cast<std::ptrdiff_t>(emissions_.size()), w.end(), transitions_.begin());
}

CompiledSequence CrfModel::compile(const std::vector<FeatureVector>& sequence) const {
  CompiledSequence seq;
  seq.offsets.reserve(sequence.size() + 1);
  seq.offsets.push_back(0);
  for (const auto& fv : sequence) {
    for (const auto& [name, value] : fv.entries()) {
      if (auto id = find_feature(name)) {
        seq.features.push_back(*id);
        seq.values.push_back(value);
      }
    }
    seq.offsets.push_back(static_cast<std::uint32_t>(seq.features.size()));
  }
  return seq;
}

std::string CrfModel::to_json() const {
  json j;
  j["version"] = kVersion;
  j["labels"] = labels_.names();
  j["l2_lambda"] = l2_lambda_;
  j["feature_fingerprint"] = fingerprint_;
  json trans = json::array();
  for (std::size_t a = 0; a < label_count(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < label_count(); ++b) row.push_back(transition(a, b));
    trans.push_back(std::move(row));
  }
  j["transitions"] = std::move(trans);
  json emis = json::object();
  for (std::size_t f = 0; f < names_.size(); ++f) {
    bool any = false;
    json row = json::array();
    for (std::size_t y = 0; y < label_count(); ++y) {
      any = any || emission(f, y) != 0.0;
      row.push_back(emission(f, y));
    }
    if (any) emis[names_[f]] = std::move(row);
  }
  j["emissions"] = std::move(emis);
  return j.dump();
}

CrfModel CrfModel::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model is not valid JSON: ") + e.what());
  }
  auto need = [&](const char* key) -> const json& {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("model lacks '") + key + "'");
    return j[key];
  };
  const json& version = need("version");
  if (!version.is_number_integer() || version.get<int>() != kVersion) {
    throw FormatError("unsupported model version " + version.dump());
  }
  const json& labels = need("labels");
  if (!labels.is_array()) throw FormatError("labels must be an array");
  std::vector<std::string> names;
  for (const auto& l : labels) {
    if (!l.is_string()) throw FormatError("labels must be strings");
    names.push_back(l.get<std::string>());
  }
  LabelSet set;
  try {
    set = LabelSet(std::move(names));
  } catch (const DataError& e) {
    throw FormatError(e.what());
  }
  const json& lambda = need("l2_lambda");
  if (!lambda.is_number()) throw FormatError("l2_lambda must be a number");
  std::string fp;
  if (j.contains("feature_fingerprint")) {
    if (!j["feature_fingerprint"].is_string()) throw FormatError("feature_fingerprint must be a string");
    fp = j["feature_fingerprint"].get<std::string>();
  }
  CrfModel model(set, lambda.get<double>(), fp);
  const std::size_t L = model.label_count();
  auto finite_number = [](const json& v) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw FormatError("weights must be finite numbers");
    return v.get<double>();
  };
  const json& trans = need("transitions");
  if (!trans.is_array() || trans.size() != L) throw FormatError("transitions must be a square matrix");
  for (std::size_t a = 0; a < L; ++a) {
    if (!trans[a].is_array() || trans[a].size() != L) throw FormatError("transitions must be a square matrix");
    for (std::size_t b = 0; b < L; ++b) model.transition(a, b) = finite_number(trans[a][b]);
  }
  const json& emis = need("emissions");
  if (!emis.is_object()) throw FormatError("emissions must be an object");
  for (auto it = emis.begin(); it != emis.end(); ++it) {
    if (!it.value().is_array() || it.value().size() != L) {
      throw FormatError("emission row '" + it.key() + "' must have one weight per label");
    }
    const std::uint32_t f = model.add_feature(it.key());
    for (std::size_t y = 0; y < L; ++y) model.emission(f, y) = finite_number(it.value()[y]);
  }
  return model;
}

bool CrfModel::operator==(const CrfModel& other) const {
  if (!(labels_ == other.labels_) || l2_lambda_ != other.l2_lambda_ ||
      fingerprint_ != other.fingerprint_ || transitions_ != other.transitions_) {
    return false;
  }
  auto rows = [](const CrfModel& m) {
    std::map<std::string, std::vector<double>> out;
    for (std::size_t f = 0; f < m.names_.size(); ++f) {
      std::vector<double> row(m.label_count());
      bool any = false;
      for (std::size_t y = 0; y < m.label_count(); ++y) {
        row[y] = m.emission(f, y);
        any = any || row[y] != 0.0;
      }
      if (any) out.emplace(m.names_[f], std::move(row));
    }
    return out;
  };
  return rows(*this) == rows(other);
}

std::vector<double> emission_scores(const CrfModel& model, const CompiledSequence& seq) {
  const std::size_t L = model.label_count();
  const std::size_t n = seq.length();
  std::vector<double> e(n * L, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double* row = &e[t * L];
    for (std::uint32_t k = seq.offsets[t]; k < seq.offsets[t + 1]; ++k) {
      const double v = seq.values[k];
      const std::size_t f = seq.features[k];
      for (std::size_t y = 0; y < L; ++y) row[y] += v * model.emission(f, y);
    }
  }
  return e;
}

double path_score(const CrfModel& model, const CompiledSequence& seq,
                  const std::vector<std::uint32_t>& labels) {
  check_sequence(model, seq, &labels);
  const auto e = emission_scores(model, seq);
  const std::size_t L = model.label_count();
  double s = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    s += e[t * L + labels[t]];
    if (t > 0) s += model.transition(labels[t - 1], labels[t]);
  }
  return s;
}

double log_partition(const CrfModel& model, const CompiledSequence& seq) {
  check_sequence(model, seq, nullptr);
  Lattice lat;
  forward_backward(model, seq, lat);
  return lat.log_z;
}

std::vector<double> marginals(const CrfModel& model, const CompiledSequence& seq) {
  check_sequence(model, seq, nullptr);
  Lattice lat;
  forward_backward(model, seq, lat);
  std::vector<double> out(lat.n * lat.L);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(lat.alpha[i] + lat.beta[i] - lat.log_z);
  }
  return out;
}

std::vector<std::uint32_t> viterbi_decode(const CrfModel& model, const CompiledSequence& seq) {
  check_sequence(model, seq, nullptr);
  const std::size_t n = seq.length();
  const std::size_t L = model.label_count();
  const auto e = emission_scores(model, seq);
  std::vector<double> delta(n * L);
  std::vector<std::uint32_t> back(n * L, 0);
  for (std::size_t y = 0; y < L; ++y) delta[y] = e[y];
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t b = 0; b < L; ++b) {
      double best = kNegInf;
      std::uint32_t arg = 0;
      for (std::size_t a = 0; a < L; ++a) {
        const double s = delta[(t - 1) * L + a] + model.transition(a, b);
        if (s > best) {
          best = s;
          arg = static_cast<std::uint32_t>(a);
        }
      }
      delta[t * L + b] = best + e[t * L + b];
      back[t * L + b] = arg;
    }
  }
  std::vector<std::uint32_t> path(n);
  double best = kNegInf;
  for (std::size_t y = 0; y < L; ++y) {
    if (delta[(n - 1) * L + y] > best) {
      best = delta[(n - 1) * L + y];
      path[n - 1] = static_cast<std::uint32_t>(y);
    }
  }
  for (std::size_t t = n - 1; t > 0; --t) path[t - 1] = back[t * L + path[t]];
  return path;
}

std::vector<std::uint32_t> viterbi_decode(const CrfModel& model,
                                          const std::vector<FeatureVector>& sequence) {
  return viterbi_decode(model, model.compile(sequence));
}

std::vector<double> marginals(const CrfModel& model, const std::vector<FeatureVector>& sequence) {
  return marginals(model, model.compile(sequence));
}

double log_likelihood_and_gradient(const CrfModel& model, const CompiledSequence& seq,
                                   const std::vector<std::uint32_t>& labels,
                                   std::vector<double>* grad, bool regularize) {
  check_sequence(model, seq, &labels);
  if (grad) grad->assign(model.weight_count(), 0.0);
  Lattice lat;
  double ll = accumulate(model, seq, labels, grad ? grad->data() : nullptr, lat);
  if (regularize) {
    const auto w = model.weights();
    double sq = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sq += w[i] * w[i];
      if (grad) (*grad)[i] -= model.l2_lambda() * w[i];
    }
    ll -= 0.5 * model.l2_lambda() * sq;
  }
  return ll;
}

CrfTrainer::CrfTrainer(LabelSet labels, std::string feature_fingerprint)
    : model_(std::move(labels), 0.0, std::move(feature_fingerprint)) {}

void CrfTrainer::add(const std::vector<FeatureVector>& sequence,
                     const std::vector<std::uint32_t>& labels) {
  if (sequence.empty()) throw DataError("training sequence must not be empty");
  if (sequence.size() != labels.size()) {
    throw ShapeMismatch(std::to_string(labels.size()) + " labels for " +
                        std::to_string(sequence.size()) + " positions");
  }
  for (std::uint32_t y : labels) {
    if (y >= model_.label_count()) {
      throw ShapeMismatch("label index " + std::to_string(y) + " outside label set");
    }
  }
  CompiledSequence seq;
  seq.offsets.push_back(0);
  for (const auto& fv : sequence) {
    for (const auto& [name, value] : fv.entries()) {
      if (!std::isfinite(value)) throw DataError("feature '" + name + "' has a non-finite value");
      seq.features.push_back(model_.add_feature(name));
      seq.values.push_back(value);
    }
    seq.offsets.push_back(static_cast<std::uint32_t>(seq.features.size()));
  }
  sequences_.push_back(std::move(seq));
  labels_.push_back(labels);
}

CrfModel CrfTrainer::train(const TrainConfig& config, TrainResult* result) {
  config.validate();
  if (sequences_.empty()) throw DataError("no training sequences");
  CrfModel model(model_.labels(), config.l2_lambda, model_.feature_fingerprint());
  for (std::size_t f = 0; f < model_.feature_count(); ++f) model.add_feature(model_.feature_name(f));

  // Fixed chunking keeps the floating-point summation order independent
  // of the number of worker threads.
  constexpr std::size_t kChunks = 8;
  const std::size_t n = sequences_.size();
  const std::size_t W = model.weight_count();
  const std::size_t chunks = std::min(kChunks, n);
  const std::size_t workers = std::min(config.jobs, chunks);

  auto chunk_range = [&](std::size_t c) {
    return std::pair<std::size_t, std::size_t>{c * n / chunks, (c + 1) * n / chunks};
  };

  Objective objective = [&](const std::vector<double>& w, std::vector<double>& grad) {
    model.set_weights(w);
    std::vector<std::vector<double>> bufs(workers, std::vector<double>(W));
    std::vector<double> chunk_ll(chunks, 0.0);
    grad.assign(W, 0.0);
    for (std::size_t base = 0; base < chunks; base += workers) {
      const std::size_t batch = std::min(workers, chunks - base);
      auto run = [&](std::size_t slot) {
        const std::size_t c = base + slot;
        std::vector<double>& buf = bufs[slot];
        std::fill(buf.begin(), buf.end(), 0.0);
        Lattice lat;
        double ll = 0;
        const auto [lo, hi] = chunk_range(c);
        for (std::size_t i = lo; i < hi; ++i) {
          ll += accumulate(model, sequences_[i], labels_[i], buf.data(), lat);
        }
        chunk_ll[c] = ll;
      };
      if (batch == 1) {
        run(0);
      } else {
        std::vector<std::thread> threads;
        for (std::size_t s = 0; s < batch; ++s) threads.emplace_back(run, s);
        for (auto& t : threads) t.join();
      }
      for (std::size_t s = 0; s < batch; ++s) {
        for (std::size_t i = 0; i < W; ++i) grad[i] += bufs[s][i];
      }
    }
    double ll = 0;
    for (double v : chunk_ll) ll += v;
    double sq = 0;
    for (std::size_t i = 0; i < W; ++i) {
      sq += w[i] * w[i];
      // Minimise the negated regularised log-likelihood.
      grad[i] = -grad[i] + config.l2_lambda * w[i];
    }
    return -(ll - 0.5 * config.l2_lambda * sq);
  };

  std::vector<double> w(W, 0.0);
  LbfgsOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tol = config.convergence_tol;
  const LbfgsResult r = minimize_lbfgs(objective, w, opts);
  model.set_weights(w);
  if (result) {
    result->initial_objective = -r.initial_value;
    result->final_objective = -r.final_value;
    result->iterations = r.iterations;
    result->converged = r.converged;
    result->objective_trace.clear();
    for (double v : r.trace) result->objective_trace.push_back(-v);
  }
  return model;
}

CrfModel train_crf(const std::vector<LabeledSequence>& data, const LabelSet& labels,
                   const TrainConfig& config, const std::string& feature_fingerprint,
                   TrainResult* result) {
  CrfTrainer trainer(labels, feature_fingerprint);
  for (const auto& s : data) trainer.add(s.features, s.labels);
  return trainer.train(config, result);
}

}  // namespace cuesplit
