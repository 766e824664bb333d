#include <doctest.h>

#include <cmath>

#include "../support/crf_oracle.hpp"
#include "cuesplit/crf.hpp"
#include "cuesplit/errors.hpp"

using namespace cuesplit;

TEST_CASE("gradient matches central differences") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = oracle::random_instance(100 + s, 2 + s % 3, 1 + s % 6);
    CHECK(oracle::gradient_error(inst) < 1e-4);
  }
}

TEST_CASE("inference matches exhaustive enumeration") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const std::size_t labels = 2 + s % 4;
    const std::size_t length = 1 + s % 5;
    const auto inst = oracle::random_instance(500 + s, labels, length);
    const auto seq = inst.model.compile(inst.sequence);
    const auto ref = oracle::enumerate(inst.model, inst.sequence);
    CHECK(std::abs(log_partition(inst.model, seq) - ref.log_z) < 1e-8);
    CHECK(viterbi_decode(inst.model, seq) == ref.best);
    const auto m = marginals(inst.model, seq);
    REQUIRE(m.size() == ref.marginals.size());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m[i] - ref.marginals[i]) < 1e-8);
    CHECK(std::abs(path_score(inst.model, seq, inst.labels) -
                   oracle::score(inst.model, inst.sequence, inst.labels)) < 1e-10);
  }
}

TEST_CASE("marginals sum to one per position") {
  const auto inst = oracle::random_instance(9, 5, 40);
  const auto m = marginals(inst.model, inst.sequence);
  for (std::size_t t = 0; t < 40; ++t) {
    double s = 0;
    for (std::size_t l = 0; l < 5; ++l) s += m[t * 5 + l];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("unknown features are dropped at compile time") {
  auto inst = oracle::random_instance(3, 3, 2);
  FeatureVector extra = inst.sequence[0];
  extra.add("never_seen", 4.0);
  extra.finalize();
  auto seqs = inst.sequence;
  seqs[0] = extra;
  CHECK(viterbi_decode(inst.model, seqs) == viterbi_decode(inst.model, inst.sequence));
}

TEST_CASE("serialisation preserves decoding") {
  const auto inst = oracle::random_instance(77, 4, 12);
  const CrfModel back = CrfModel::from_json(inst.model.to_json());
  CHECK(back == inst.model);
  CHECK(back.to_json() == inst.model.to_json());
  CHECK(viterbi_decode(back, inst.sequence) == viterbi_decode(inst.model, inst.sequence));
  CHECK_THROWS_AS(CrfModel::from_json("{\"version\": 99}"), FormatError);
  CHECK_THROWS_AS(CrfModel::from_json("nope"), FormatError);
}

TEST_CASE("training raises the likelihood and fits a learnable pattern") {
  LabelSet labels({"A", "B"});
  std::vector<LabeledSequence> data;
  Rng rng(5);
  for (int n = 0; n < 30; ++n) {
    LabeledSequence s;
    for (int t = 0; t < 8; ++t) {
      const bool b = rng.chance(0.5);
      FeatureVector fv;
      fv.add(b ? "cue_b" : "cue_a");
      fv.add("noise" + std::to_string(rng.below(4)));
      fv.finalize();
      s.features.push_back(fv);
      s.labels.push_back(b ? 1 : 0);
    }
    data.push_back(std::move(s));
  }
  TrainConfig cfg;
  cfg.l2_lambda = 0.01;
  TrainResult r;
  const CrfModel m = train_crf(data, labels, cfg, "fp", &r);
  CHECK(r.final_objective > r.initial_objective);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    CHECK(r.objective_trace[i] >= r.objective_trace[i - 1]);
  }
  for (const auto& s : data) CHECK(viterbi_decode(m, s.features) == s.labels);
  CHECK(m.feature_fingerprint() == "fp");
}

TEST_CASE("training is independent of the worker count") {
  LabelSet labels({"A", "B", "C"});
  std::vector<LabeledSequence> data;
  for (std::uint64_t s = 0; s < 12; ++s) {
    const auto inst = oracle::random_instance(900 + s, 3, 6);
    data.push_back({inst.sequence, inst.labels});
  }
  TrainConfig one;
  one.max_iterations = 30;
  TrainConfig four = one;
  four.jobs = 4;
  CHECK(train_crf(data, labels, one) == train_crf(data, labels, four));
}

TEST_CASE("bad inputs are rejected") {
  LabelSet labels({"A", "B"});
  CHECK_THROWS_AS(LabelSet({"A", "A"}), DataError);
  CrfTrainer trainer(labels);
  FeatureVector fv;
  fv.add("x");
  fv.finalize();
  CHECK_THROWS_AS(trainer.add({fv}, {0, 1}), ShapeMismatch);
  CHECK_THROWS_AS(trainer.add({fv}, {2}), ShapeMismatch);
  CHECK_THROWS_AS(trainer.train(TrainConfig{}), DataError);
  TrainConfig bad;
  bad.l2_lambda = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
