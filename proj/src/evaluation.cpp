#include "cuesplit/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cuesplit/errors.hpp"
#include "cuesplit/rng.hpp"
#include "cuesplit/splitter.hpp"

namespace cuesplit {

namespace {

constexpr std::uint32_t kO = 0;
constexpr std::uint32_t kB = 1;
constexpr std::uint32_t kI = 2;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void metrics_cells(std::ostringstream& out, const Metrics& m) {
  out << fixed(m.precision) << ',' << fixed(m.recall) << ',' << fixed(m.f1) << ',' << m.tp << ','
      << m.fp << ',' << m.fn;
}

// Maximal B/I runs of a decoded path; an I after O opens a run.
std::vector<std::pair<std::size_t, std::size_t>> decoded_spans(const std::vector<std::uint32_t>& path) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t t = 0;
  while (t < path.size()) {
    if (path[t] == kO) {
      ++t;
      continue;
    }
    const std::size_t start = t++;
    while (t < path.size() && path[t] == kI) ++t;
    out.emplace_back(start, t - 1);
  }
  return out;
}

FeatureConfig window_features() { return FeatureConfig::baseline_only(); }

std::vector<FeatureVector> window_sequence(const TokenWindow& w) {
  std::vector<TokenView> views;
  views.reserve(w.tokens.size());
  for (const auto& t : w.tokens) views.push_back({t, false, false});
  return token_sequence_features(views, window_features());
}

}  // namespace

Metrics Metrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  m.support = tp + fn;
  if (tp + fp == 0) {
    m.precision = fn == 0 ? 1.0 : 0.0;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.recall = fp == 0 ? 1.0 : 0.0;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  const double s = m.precision + m.recall;
  m.f1 = s > 0 ? 2 * m.precision * m.recall / s : 0.0;
  return m;
}

double Metrics::accuracy() const {
  const std::size_t n = tp + fp + fn + tn;
  return n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
}

double relative_delta(double value, double baseline) { return value / baseline - 1.0; }

std::string format_delta(double value, double baseline) {
  if (baseline == 0) return "n/a";
  const double pct = relative_delta(value, baseline) * 100.0;
  // Round half away from zero at one decimal; guard against -0.0.
  double r = std::round(pct * 10.0) / 10.0;
  if (r == 0) r = 0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", r);
  return buf;
}

double line_jaccard(const SectionSpan& a, const SectionSpan& b) {
  const std::size_t lo = std::max(a.first_line, b.first_line);
  const std::size_t hi = std::min(a.last_line, b.last_line);
  if (lo > hi) return 0.0;
  const double inter = static_cast<double>(hi - lo + 1);
  const double uni = static_cast<double>(std::max(a.last_line, b.last_line) -
                                         std::min(a.first_line, b.first_line) + 1);
  return inter / uni;
}

std::size_t overlap_match_count(const std::vector<SectionSpan>& predicted,
                                const std::vector<SectionSpan>& gold) {
  struct Pair {
    double j;
    std::size_t p;
    std::size_t g;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (predicted[p].type != gold[g].type) continue;
      const double j = line_jaccard(predicted[p], gold[g]);
      if (j >= 0.5) pairs.push_back({j, p, g});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.j > b.j; });
  std::vector<bool> used_p(predicted.size()), used_g(gold.size());
  std::size_t n = 0;
  for (const Pair& pr : pairs) {
    if (used_p[pr.p] || used_g[pr.g]) continue;
    used_p[pr.p] = used_g[pr.g] = true;
    ++n;
  }
  return n;
}

std::array<Metrics, 4> section_prf(const std::vector<std::vector<SectionSpan>>& predicted,
                                   const std::vector<std::vector<SectionSpan>>& gold,
                                   MatchMode mode) {
  if (predicted.size() != gold.size()) {
    throw AlignmentError(std::to_string(predicted.size()) + " predicted documents for " +
                         std::to_string(gold.size()) + " gold documents");
  }
  std::array<std::size_t, 4> tp{}, np{}, ng{};
  for (std::size_t d = 0; d < gold.size(); ++d) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto type = static_cast<SectionType>(k);
      std::vector<SectionSpan> p, g;
      for (const auto& s : predicted[d]) {
        if (s.type == type) p.push_back(s);
      }
      for (const auto& s : gold[d]) {
        if (s.type == type) g.push_back(s);
      }
      np[k] += p.size();
      ng[k] += g.size();
      if (mode == MatchMode::overlap) {
        tp[k] += overlap_match_count(p, g);
      } else {
        std::sort(p.begin(), p.end());
        std::sort(g.begin(), g.end());
        std::vector<SectionSpan> common;
        std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
        tp[k] += common.size();
      }
    }
  }
  std::array<Metrics, 4> out;
  for (std::size_t k = 0; k < 4; ++k) out[k] = Metrics::from_counts(tp[k], np[k] - tp[k], ng[k] - tp[k]);
  return out;
}

GoldAttribute gold_attribute(const LabeledDocument& ld, Attribute attribute) {
  GoldAttribute g;
  g.doc_id = ld.doc.doc_id;
  if (kind_of(attribute) == AttributeKind::entity) {
    const auto& span = ld.labels.entity_span(attribute);
    if (span) g.span_text = gold_span_text(ld.doc, ld.labels, *span);
  } else {
    g.answer = ld.labels.boolean_value(attribute);
  }
  return g;
}

Metrics attribute_prf(const std::vector<DocPrediction>& predictions,
                      const std::vector<GoldAttribute>& golds, Attribute attribute) {
  std::map<std::string, const AttributePrediction*> by_doc;
  for (const auto& p : predictions) {
    if (p.prediction.attribute != attribute) continue;
    if (!by_doc.emplace(p.doc_id, &p.prediction).second) {
      throw AlignmentError("two " + std::string(to_string(attribute)) + " predictions for " + p.doc_id);
    }
  }
  if (by_doc.size() != golds.size()) {
    throw AlignmentError(std::to_string(by_doc.size()) + " predictions for " +
                         std::to_string(golds.size()) + " gold documents");
  }
  std::map<std::string, bool> seen;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  const bool entity = kind_of(attribute) == AttributeKind::entity;
  for (const auto& g : golds) {
    if (!seen.emplace(g.doc_id, true).second) throw AlignmentError("gold document " + g.doc_id + " repeats");
    auto it = by_doc.find(g.doc_id);
    if (it == by_doc.end()) throw AlignmentError("no prediction for " + g.doc_id);
    const AttributePrediction& p = *it->second;
    if (entity) {
      const bool has_pred = p.span.has_value();
      const bool has_gold = g.span_text.has_value();
      if (has_pred && has_gold && normalize_answer(p.span->text) == normalize_answer(*g.span_text)) {
        ++tp;
      } else {
        if (has_pred) ++fp;
        if (has_gold) ++fn;
        if (!has_pred && !has_gold) ++tn;
      }
    } else {
      const bool y = p.answer.value_or(false);
      const bool gy = g.answer.value_or(false);
      if (y && gy) {
        ++tp;
      } else if (y) {
        ++fp;
      } else if (gy) {
        ++fn;
      } else {
        ++tn;
      }
    }
  }
  return Metrics::from_counts(tp, fp, fn, tn);
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          // Report the lowest failing index so errors do not depend on timing.
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::vector<Section>> split_documents(const CrfModel& model, const Corpus& corpus,
                                                  const std::vector<std::size_t>& indices,
                                                  const FeatureConfig& features, std::size_t jobs) {
  std::vector<std::vector<Section>> out(indices.size());
  parallel_for(indices.size(), jobs, [&](std::size_t k) {
    out[k] = split_document(model, corpus.at(indices[k]).doc, features);
  });
  return out;
}

std::vector<AblationRun> ablation_runs() {
  const FeatureConfig base = FeatureConfig::baseline_only();
  return {{"baseline", base},
          {"+page_layout", base.with(FeatureGroup::page_layout)},
          {"+text_placement", base.with(FeatureGroup::text_placement)},
          {"+visual_grouping", base.with(FeatureGroup::visual_grouping)},
          {"+style", base.with(FeatureGroup::style)},
          {"+all_groups", FeatureConfig::all_groups()}};
}

AblationReport run_ablation(const Corpus& corpus, const CorpusSplit& split,
                            const TrainConfig& train, std::size_t jobs) {
  if (split.train.empty() || split.test.empty()) throw DataError("ablation needs train and test documents");
  const auto runs = ablation_runs();
  AblationReport report;
  report.exact.resize(runs.size());
  report.overlap.resize(runs.size());
  std::vector<std::vector<SectionSpan>> gold;
  for (std::size_t i : split.test) gold.push_back(corpus.at(i).labels.sections);
  // One thread per training run; runs are spread over the jobs.
  TrainConfig one = train;
  one.jobs = 1;
  parallel_for(runs.size(), jobs, [&](std::size_t r) {
    const CrfModel model = train_splitter(corpus, split.train, runs[r].features, one);
    std::vector<std::vector<SectionSpan>> predicted;
    for (std::size_t i : split.test) {
      predicted.push_back(section_spans(split_document(model, corpus[i].doc, runs[r].features)));
    }
    report.exact[r] = section_prf(predicted, gold, MatchMode::exact);
    report.overlap[r] = section_prf(predicted, gold, MatchMode::overlap);
  });
  for (const auto& r : runs) report.names.push_back(r.name);
  return report;
}

std::string ablation_csv(const AblationReport& report) {
  std::ostringstream out;
  out << "config,section_type,P,R,F1,tp,fp,fn,delta_P,delta_R,delta_F1,overlap_F1\n";
  for (std::size_t k = 0; k < 4; ++k) {
    const Metrics& base = report.exact.front()[k];
    for (std::size_t r = 0; r < report.names.size(); ++r) {
      const Metrics& m = report.exact[r][k];
      out << report.names[r] << ',' << to_string(static_cast<SectionType>(k)) << ',';
      metrics_cells(out, m);
      out << ',' << format_delta(m.precision, base.precision) << ','
          << format_delta(m.recall, base.recall) << ',' << format_delta(m.f1, base.f1) << ','
          << fixed(report.overlap[r][k].f1) << '\n';
    }
  }
  out << "# reference (published, not asserted): clause baseline P 0.904 R 0.897 F1 0.900\n";
  out << "# reference (published, not asserted): footer all_groups F1 0.872\n";
  out << "# delta = value / baseline - 1\n";
  return out.str();
}

std::optional<TokenWindow> governing_law_window(const LabeledDocument& ld, std::size_t window,
                                                std::uint64_t seed) {
  const auto& gold = ld.labels.governing_law;
  if (!gold || window == 0) return std::nullopt;
  const ReadingOrder order(ld.doc);
  std::vector<std::string> stream;
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto type = tag_type(ld.labels.line_labels[i]);
    if (type && !is_content(*type)) continue;
    const Line& line = *order[i].line;
    for (std::size_t k = 0; k < line.tokens.size(); ++k) {
      const std::size_t t = order.first_token(i) + k;
      if (t >= gold->first_token && t <= gold->last_token) {
        if (!first) first = stream.size();
        last = stream.size();
      }
      stream.push_back(line.tokens[k].text);
    }
  }
  if (!first) return std::nullopt;
  const std::size_t n = stream.size();
  if (n < window || *last - *first + 1 > window) return std::nullopt;
  const std::size_t lo = *last + 1 >= window ? *last + 1 - window : 0;
  const std::size_t hi = std::min(*first, n - window);
  Rng rng(seed);
  const std::size_t start = rng.between(lo, hi);
  TokenWindow w;
  w.tokens.assign(stream.begin() + static_cast<std::ptrdiff_t>(start),
                  stream.begin() + static_cast<std::ptrdiff_t>(start + window));
  w.labels.assign(window, kO);
  w.span_first = *first - start;
  w.span_last = *last - start;
  w.labels[w.span_first] = kB;
  for (std::size_t t = w.span_first + 1; t <= w.span_last; ++t) w.labels[t] = kI;
  return w;
}

LengthCurve run_length_experiment(const Corpus& corpus, const CorpusSplit& split,
                                  const std::vector<std::size_t>& windows, std::uint64_t seed,
                                  const TrainConfig& train, std::size_t jobs) {
  if (windows.empty()) throw ConfigError("no window sizes given");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i] == 0) throw ConfigError("window sizes must be positive");
    if (i > 0 && windows[i] <= windows[i - 1]) throw ConfigError("window sizes must be strictly increasing");
  }
  LengthCurve curve;
  curve.seed = seed;
  curve.points.resize(windows.size());
  TrainConfig one = train;
  one.jobs = 1;
  parallel_for(windows.size(), jobs, [&](std::size_t wi) {
    const std::size_t w = windows[wi];
    const std::uint64_t wseed = derive_seed(seed, w);
    LengthPoint& point = curve.points[wi];
    point.window_tokens = w;
    auto window_of = [&](std::size_t doc) {
      auto win = governing_law_window(corpus.at(doc), w, derive_seed(wseed, doc));
      if (!win) ++point.skipped;
      return win;
    };
    CrfTrainer trainer(entity_label_set(), "window/v1");
    for (std::size_t d : split.train) {
      if (auto win = window_of(d)) trainer.add(window_sequence(*win), win->labels);
    }
    if (trainer.size() == 0) {
      throw ConfigError("window of " + std::to_string(w) + " tokens fits no training document");
    }
    const CrfModel model = trainer.train(one);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t d : split.test) {
      auto win = window_of(d);
      if (!win) continue;
      const auto spans = decoded_spans(viterbi_decode(model, window_sequence(*win)));
      const bool hit = std::find(spans.begin(), spans.end(),
                                 std::make_pair(win->span_first, win->span_last)) != spans.end();
      tp += hit ? 1 : 0;
      fp += spans.size() - (hit ? 1 : 0);
      fn += hit ? 0 : 1;
    }
    point.metrics = Metrics::from_counts(tp, fp, fn);
  });
  return curve;
}

std::string length_csv(const LengthCurve& curve) {
  std::ostringstream out;
  out << "window_tokens,P,R,F1,tp,fp,fn,skipped,seed\n";
  for (const auto& p : curve.points) {
    out << p.window_tokens << ',';
    metrics_cells(out, p.metrics);
    out << ',' << p.skipped << ',' << curve.seed << '\n';
  }
  return out.str();
}

std::string length_plot_data(const LengthCurve& curve) {
  std::ostringstream out;
  out << "window_tokens f1\n";
  for (const auto& p : curve.points) out << p.window_tokens << ' ' << fixed(p.metrics.f1) << '\n';
  return out.str();
}

const Metrics& ComparisonReport::get(const std::string& pipeline, Attribute attribute) const {
  for (const auto& r : rows) {
    if (r.pipeline == pipeline && r.attribute == attribute) return r.metrics;
  }
  throw DataError("no comparison row for " + pipeline + "/" + std::string(to_string(attribute)));
}

ComparisonReport run_endtoend_comparison(const Corpus& corpus, const CorpusSplit& split,
                                         const RuleSet& rules, const EndToEndConfig& config,
                                         std::size_t jobs) {
  if (split.train.empty() || split.test.empty()) throw DataError("comparison needs train and test documents");
  struct Pipeline {
    std::string name;
    FeatureConfig features;
    CrfModel splitter;
    ExtractorBundle bundle;
    std::vector<std::vector<Section>> sections;
  };
  std::vector<Pipeline> pipelines(2);
  pipelines[0].name = "model";
  pipelines[0].features = FeatureConfig::baseline_only();
  pipelines[1].name = "model+visual";
  pipelines[1].features = FeatureConfig::all_groups();
  TrainConfig one = config.splitter;
  one.jobs = 1;
  parallel_for(pipelines.size(), jobs, [&](std::size_t k) {
    Pipeline& p = pipelines[k];
    p.splitter = train_splitter(corpus, split.train, p.features, one);
    ExtractorConfig ec = config.extractors;
    ec.features = p.features;
    ec.entity.jobs = 1;
    p.bundle = train_extractors(corpus, split.train, ec);
  });
  for (auto& p : pipelines) p.sections = split_documents(p.splitter, corpus, split.test, p.features, jobs);

  std::vector<GoldAttribute> gold[4];
  for (std::size_t i : split.test) {
    for (Attribute a : kAttributes) gold[index_of(a)].push_back(gold_attribute(corpus[i], a));
  }

  std::vector<std::vector<DocPrediction>> by_pipeline(3);  // rules, model, model+visual
  std::vector<std::vector<AttributePrediction>> rule_preds(split.test.size());
  std::vector<std::vector<AttributePrediction>> model_preds[2];
  for (auto& v : model_preds) v.resize(split.test.size());
  parallel_for(split.test.size(), jobs, [&](std::size_t k) {
    const Document& doc = corpus[split.test[k]].doc;
    for (Attribute a : kAttributes) {
      rule_preds[k].push_back(apply_rules(rules, doc, pipelines[0].sections[k], a, config.rule_options));
    }
    for (std::size_t p = 0; p < 2; ++p) {
      model_preds[p][k] = predict_document(pipelines[p].bundle, pipelines[p].sections[k]);
    }
  });
  for (std::size_t k = 0; k < split.test.size(); ++k) {
    const std::string& id = corpus[split.test[k]].doc.doc_id;
    for (const auto& pr : rule_preds[k]) by_pipeline[0].push_back({id, pr});
    for (std::size_t p = 0; p < 2; ++p) {
      for (const auto& pr : model_preds[p][k]) by_pipeline[p + 1].push_back({id, pr});
    }
  }
  const std::array<std::string, 3> names = {"rules", pipelines[0].name, pipelines[1].name};
  ComparisonReport report;
  for (std::size_t p = 0; p < 3; ++p) {
    for (Attribute a : kAttributes) {
      report.rows.push_back({names[p], a, attribute_prf(by_pipeline[p], gold[index_of(a)], a)});
    }
  }
  return report;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "pipeline,attribute,P,R,F1,tp,fp,fn\n";
  for (const auto& r : report.rows) {
    out << r.pipeline << ',' << to_string(r.attribute) << ',';
    metrics_cells(out, r.metrics);
    out << '\n';
  }
  out << "# reference (published, not asserted): model governing_law P 0.98 R 0.98 F1 0.98\n";
  out << "# reference (published, not asserted): model expiration_date P 0.87 R 0.87 F1 0.87\n";
  out << "# reference (published, not asserted): model termination_for_convenience P 0.77 R 0.75 F1 0.76\n";
  out << "# reference (published, not asserted): model anti_assignment P 0.89 R 0.88 F1 0.89\n";
  out << "# reference (published, not asserted): anti_assignment model+visual P 0.93 R 0.81 F1 0.85\n";
  out << "# reference (published, not asserted): anti_assignment model P 0.89 R 0.69 F1 0.71\n";
  return out.str();
}

}  // namespace cuesplit
