// cuesplit: command-line entry point for corpus generation, section
// splitting, attribute extraction and the experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "cuesplit/errors.hpp"
#include "cuesplit/evaluation.hpp"
#include "cuesplit/extractors.hpp"
#include "cuesplit/features.hpp"
#include "cuesplit/io.hpp"
#include "cuesplit/rules.hpp"
#include "cuesplit/splitter.hpp"
#include "cuesplit/synth.hpp"
#include "cuesplit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cuesplit;

namespace {

// Config files are TOML (CLI11's reader) or, when the text starts with '{',
// JSON with the same layout: top-level keys for global flags, one table per
// subcommand.
class ConfigReader : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream again(text);
      return CLI::ConfigTOML::from_config(again);
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  static void flatten(const json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        flatten(*it, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(*it));
      }
      out.push_back(std::move(item));
    }
  }
};

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Files of one run, written together at the end; on failure the ones
// already in place are removed again.
class Outputs {
 public:
  void add(fs::path path, std::string data) { files_.emplace_back(std::move(path), std::move(data)); }

  void commit() {
    std::vector<fs::path> done;
    try {
      for (const auto& [path, data] : files_) {
        write_file_atomic(path, data);
        done.push_back(path);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : done) fs::remove(p, ec);
      throw;
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

struct Globals {
  std::size_t jobs = 1;
  std::string manifest;  // overrides the default manifest location
};

// What every command records in its RunManifest.
struct Run {
  std::string command;
  json settings = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::string started = utc_now();

  std::string manifest_json(std::size_t jobs) const {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m;
    m["command"] = command;
    m["settings"] = settings;
    m["config_fingerprint"] = fnv1a_hex(settings.dump());
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["toolkit_version"] = kToolkitVersion;
    m["started_utc"] = started;
    m["wall_clock_seconds"] = secs;
    m["jobs"] = jobs;
    return m.dump(2) + "\n";
  }
};

fs::path manifest_path_for(const fs::path& out) {
  return fs::path(out.string() + ".manifest.json");
}

// Writes payload files plus the manifest. With no file outputs (stdout
// mode) the manifest goes to stderr unless --manifest names a path.
void finish(const Globals& g, Run& run, Outputs& outputs, const std::optional<fs::path>& primary) {
  std::optional<fs::path> manifest;
  if (!g.manifest.empty()) {
    manifest = g.manifest;
  } else if (primary) {
    manifest = manifest_path_for(*primary);
  }
  if (manifest) {
    outputs.add(*manifest, run.manifest_json(g.jobs));
    outputs.commit();
  } else {
    outputs.commit();
    std::cerr << run.manifest_json(g.jobs);
  }
}

std::vector<std::size_t> select_split(const LoadedCorpus& lc, const std::string& name) {
  if (name == "train") return lc.split.train;
  if (name == "dev") return lc.split.dev;
  if (name == "test") return lc.split.test;
  std::vector<std::size_t> all(lc.docs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

LoadedCorpus load_corpus(const std::string& dir) {
  LoadedCorpus lc = read_corpus(dir);
  if (lc.docs.empty()) throw EmptyCorpus("no documents in " + dir);
  return lc;
}

void require_labels(const LoadedCorpus& lc, const std::vector<std::size_t>& idx) {
  for (std::size_t i : idx) {
    if (!lc.docs[i].has_labels) throw DataError(lc.docs[i].doc.doc_id + " has no labels");
  }
}

Document load_document(const std::string& path) { return parse_document(read_file(path)); }

std::string attribute_metrics_csv(const std::vector<std::pair<Attribute, Metrics>>& rows) {
  std::string out = "attribute,P,R,F1,tp,fp,fn,tn\n";
  for (const auto& [a, m] : rows) {
    out += std::string(to_string(a)) + "," + fmt4(m.precision) + "," + fmt4(m.recall) + "," +
           fmt4(m.f1) + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
           std::to_string(m.fn) + "," + std::to_string(m.tn) + "\n";
  }
  return out;
}

// Scores per-document predictions (kAttributes order) against gold labels.
std::string score_predictions(const Corpus& docs, const std::vector<std::size_t>& idx,
                              const std::vector<std::vector<AttributePrediction>>& preds) {
  std::vector<std::pair<Attribute, Metrics>> rows;
  for (std::size_t a = 0; a < kAttributes.size(); ++a) {
    std::vector<DocPrediction> p;
    std::vector<GoldAttribute> gold;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& ld = docs[idx[k]];
      p.push_back({ld.doc.doc_id, preds[k][a]});
      gold.push_back(gold_attribute(ld, kAttributes[a]));
    }
    rows.emplace_back(kAttributes[a], attribute_prf(p, gold, kAttributes[a]));
  }
  return attribute_metrics_csv(rows);
}

void add_train_options(CLI::App* sub, TrainConfig& t) {
  sub->add_option("--l2", t.l2_lambda, "L2 regularisation strength")->capture_default_str();
  sub->add_option("--iterations", t.max_iterations, "Maximum optimiser iterations")
      ->capture_default_str();
  sub->add_option("--tol", t.convergence_tol, "Stop when the largest gradient component falls below this")->capture_default_str();
}

json train_json(const TrainConfig& t) {
  return {{"l2", t.l2_lambda}, {"iterations", t.max_iterations}, {"tol", t.convergence_tol}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Section splitting and attribute extraction for contract documents"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.config_formatter(std::make_shared<ConfigReader>());
  app.set_config("--config", "", "TOML or JSON config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--jobs", g.jobs, "Worker threads for document-level parallelism")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--manifest", g.manifest, "Write the run manifest here instead of next to the output");

  std::function<void()> action;
  auto bind = [&](CLI::App* sub, std::function<void()> fn) {
    sub->callback([&action, fn] { action = fn; });
  };

  // gen ----------------------------------------------------------------------
  GenConfig gen;
  std::string gen_out;
  bool gen_force = false;
  {
    auto* sub = app.add_subcommand("gen", "Generate a seeded synthetic labeled corpus");
    sub->add_option("--seed", gen.seed, "Corpus seed (also seeds the 80/10/10 split)")->capture_default_str();
    sub->add_option("--docs", gen.doc_count, "Number of documents")->capture_default_str();
    sub->add_option("--mean-words", gen.mean_words_per_doc, "Target mean words per document")
        ->capture_default_str();
    sub->add_option("--header-prob", gen.header_prob, "Probability that a document has running headers")
        ->capture_default_str();
    sub->add_option("--footer-prob", gen.footer_prob, "Probability that a document has footers")
        ->capture_default_str();
    sub->add_option("--broken-span-prob", gen.broken_span_prob,
                    "Probability that the governing-law sentence straddles a page break")
        ->capture_default_str();
    sub->add_option("--style-noise", gen.style_noise, "Probability of perturbing a token's style")
        ->capture_default_str();
    sub->add_option("--out", gen_out, "Output corpus directory")->required();
    sub->add_flag("--force", gen_force, "Replace an existing non-empty output directory");
    bind(sub, [&] {
      gen.validate();
      Run run{"gen"};
      run.seed = gen.seed;
      run.settings = {{"seed", gen.seed},           {"docs", gen.doc_count},
                      {"mean_words", gen.mean_words_per_doc}, {"header_prob", gen.header_prob},
                      {"footer_prob", gen.footer_prob},    {"broken_span_prob", gen.broken_span_prob},
                      {"style_noise", gen.style_noise}};
      fs::path out = fs::path(gen_out).lexically_normal();
      if (out.filename().empty()) out = out.parent_path();
      if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out)) && !gen_force) {
        throw ConfigError("--out " + gen_out + " exists and is not empty; pass --force to replace it");
      }
      const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
      const fs::path tmp = parent / ("." + out.filename().string() + ".tmp-" + std::to_string(::getpid()));
      try {
        const Corpus corpus = generate_corpus(gen);
        write_corpus(tmp, corpus, split_corpus(corpus.size(), gen.seed));
        run.outputs.push_back(gen_out);
        write_file_atomic(tmp / "run_manifest.json", run.manifest_json(g.jobs));
        std::error_code ec;
        if (fs::exists(out)) fs::remove_all(out);
        fs::rename(tmp, out, ec);
        if (ec) throw IoError("cannot move corpus into " + out.string() + ": " + ec.message());
      } catch (...) {
        std::error_code ec;
        fs::remove_all(tmp, ec);
        throw;
      }
      std::cerr << "wrote " << gen.doc_count << " documents to " << gen_out << "\n";
    });
  }

  // train-splitter -----------------------------------------------------------
  std::string ts_corpus, ts_groups = "all", ts_split = "train", ts_out;
  TrainConfig ts_train{0.1, 100, 1e-4, 0, 1};
  {
    auto* sub = app.add_subcommand("train-splitter", "Train the line-level section tagger");
    sub->add_option("--corpus", ts_corpus, "Corpus directory")->required();
    sub->add_option("--groups", ts_groups,
                    "Feature groups: all, baseline, or a list such as page_layout,style")
        ->capture_default_str();
    sub->add_option("--split", ts_split, "Documents to train on")
        ->check(CLI::IsMember({"train", "dev", "test", "all"}))
        ->capture_default_str();
    add_train_options(sub, ts_train);
    sub->add_option("--out", ts_out, "Output model JSON")->required();
    bind(sub, [&] {
      const FeatureConfig features = FeatureConfig::from_groups(ts_groups);
      features.validate();
      ts_train.jobs = g.jobs;
      ts_train.validate();
      Run run{"train-splitter"};
      run.settings = {{"groups", features.groups_string()}, {"split", ts_split},
                      {"train", train_json(ts_train)}};
      run.inputs = {ts_corpus};
      run.outputs = {ts_out};
      const LoadedCorpus lc = load_corpus(ts_corpus);
      const auto idx = select_split(lc, ts_split);
      require_labels(lc, idx);
      TrainResult result;
      const CrfModel model = train_splitter(lc.docs, idx, features, ts_train, &result);
      Outputs outputs;
      outputs.add(ts_out, model.to_json() + "\n");
      finish(g, run, outputs, fs::path(ts_out));
      std::cerr << "trained on " << idx.size() << " documents, " << model.feature_count()
                << " features, " << result.iterations << " iterations\n";
    });
  }

  // split --------------------------------------------------------------------
  std::string sp_model, sp_doc, sp_out, sp_groups;
  {
    auto* sub = app.add_subcommand("split", "Split one document into typed sections (JSON)");
    sub->add_option("--model", sp_model, "Section tagger model JSON")->required();
    sub->add_option("--doc", sp_doc, "Document JSON")->required();
    sub->add_option("--groups", sp_groups,
                    "Expected feature groups; a mismatch with the model is an error");
    sub->add_option("--out", sp_out, "Output sections JSON (standard output when omitted)");
    bind(sub, [&] {
      Run run{"split"};
      run.inputs = {sp_model, sp_doc};
      const CrfModel model = CrfModel::from_json(read_file(sp_model));
      FeatureConfig features = FeatureConfig::from_fingerprint(model.feature_fingerprint());
      if (!sp_groups.empty()) {
        const FeatureConfig asked = FeatureConfig::from_groups(sp_groups);
        if (asked.fingerprint() != features.fingerprint()) {
          throw ConfigMismatch("model was trained with '" + features.groups_string() +
                               "' but --groups is '" + asked.groups_string() + "'");
        }
      }
      run.settings = {{"groups", features.groups_string()}};
      const Document doc = load_document(sp_doc);
      const std::string out = sections_to_json(doc.doc_id, split_document(model, doc, features)) + "\n";
      Outputs outputs;
      if (sp_out.empty()) {
        std::cout << out;
        finish(g, run, outputs, std::nullopt);
      } else {
        run.outputs = {sp_out};
        outputs.add(sp_out, out);
        finish(g, run, outputs, fs::path(sp_out));
      }
    });
  }

  // train-extractors ---------------------------------------------------------
  std::string te_corpus, te_groups = "all", te_split = "train", te_out;
  ExtractorConfig te_config;
  {
    auto* sub = app.add_subcommand("train-extractors",
                                   "Train section relevance, entity and yes/no attribute models");
    sub->add_option("--corpus", te_corpus, "Corpus directory (gold sections are used)")->required();
    sub->add_option("--groups", te_groups, "Feature groups for the attribute models")
        ->capture_default_str();
    sub->add_option("--split", te_split, "Documents to train on")
        ->check(CLI::IsMember({"train", "dev", "test", "all"}))
        ->capture_default_str();
    sub->add_option("--l2", te_config.entity.l2_lambda, "L2 strength of the entity taggers")
        ->capture_default_str();
    sub->add_option("--iterations", te_config.entity.max_iterations,
                    "Maximum iterations of the entity taggers")
        ->capture_default_str();
    sub->add_option("--logistic-l2", te_config.classifier.l2_lambda,
                    "L2 strength of the relevance and yes/no classifiers")
        ->capture_default_str();
    sub->add_option("--out", te_out, "Output extractor bundle JSON")->required();
    bind(sub, [&] {
      te_config.features = FeatureConfig::from_groups(te_groups);
      te_config.relevance.l2_lambda = te_config.classifier.l2_lambda;
      te_config.entity.jobs = g.jobs;
      te_config.validate();
      Run run{"train-extractors"};
      run.settings = {{"groups", te_config.features.groups_string()},
                      {"split", te_split},
                      {"entity", train_json(te_config.entity)},
                      {"logistic_l2", te_config.classifier.l2_lambda}};
      run.inputs = {te_corpus};
      run.outputs = {te_out};
      const LoadedCorpus lc = load_corpus(te_corpus);
      const auto idx = select_split(lc, te_split);
      require_labels(lc, idx);
      const ExtractorBundle bundle = train_extractors(lc.docs, idx, te_config);
      Outputs outputs;
      outputs.add(te_out, bundle.to_json() + "\n");
      finish(g, run, outputs, fs::path(te_out));
    });
  }

  // predict ------------------------------------------------------------------
  std::string pr_model, pr_extractors, pr_corpus, pr_doc, pr_split = "test", pr_out, pr_metrics;
  bool pr_gold_sections = false;
  {
    auto* sub = app.add_subcommand("predict", "Predict the four attributes (JSONL, one line each)");
    sub->add_option("--model", pr_model, "Section tagger model JSON");
    sub->add_option("--extractors", pr_extractors, "Extractor bundle JSON")->required();
    auto* corpus_opt = sub->add_option("--corpus", pr_corpus, "Corpus directory");
    auto* doc_opt = sub->add_option("--doc", pr_doc, "Single document JSON");
    corpus_opt->excludes(doc_opt);
    sub->add_option("--split", pr_split, "Corpus documents to predict")
        ->check(CLI::IsMember({"train", "dev", "test", "all"}))
        ->capture_default_str();
    sub->add_flag("--gold-sections", pr_gold_sections, "Use gold sections instead of --model");
    sub->add_option("--out", pr_out, "Output predictions JSONL")->required();
    sub->add_option("--metrics", pr_metrics, "Also write per-attribute metrics CSV (labeled corpus)");
    bind(sub, [&] {
      if (pr_corpus.empty() == pr_doc.empty()) throw ConfigError("give exactly one of --corpus and --doc");
      if (pr_model.empty() != pr_gold_sections) {
        throw ConfigError("give exactly one of --model and --gold-sections");
      }
      if (!pr_metrics.empty() && pr_corpus.empty()) throw ConfigError("--metrics needs --corpus");
      Run run{"predict"};
      run.settings = {{"split", pr_split}, {"gold_sections", pr_gold_sections}};
      run.inputs = {pr_extractors};
      const ExtractorBundle bundle = ExtractorBundle::from_json(read_file(pr_extractors));
      std::optional<CrfModel> model;
      FeatureConfig features;
      if (!pr_model.empty()) {
        run.inputs.push_back(pr_model);
        model = CrfModel::from_json(read_file(pr_model));
        features = FeatureConfig::from_fingerprint(model->feature_fingerprint());
      }
      LoadedCorpus lc;
      std::vector<std::size_t> idx;
      if (!pr_doc.empty()) {
        run.inputs.push_back(pr_doc);
        LabeledDocument ld;
        ld.doc = load_document(pr_doc);
        ld.has_labels = false;
        lc.docs.push_back(std::move(ld));
        idx = {0};
      } else {
        run.inputs.push_back(pr_corpus);
        lc = load_corpus(pr_corpus);
        idx = select_split(lc, pr_split);
      }
      if (pr_gold_sections) require_labels(lc, idx);
      std::vector<std::vector<Section>> sections(idx.size());
      if (model) {
        sections = split_documents(*model, lc.docs, idx, features, g.jobs);
      } else {
        for (std::size_t k = 0; k < idx.size(); ++k) sections[k] = gold_sections(lc.docs[idx[k]]);
      }
      std::vector<std::vector<AttributePrediction>> preds(idx.size());
      parallel_for(idx.size(), g.jobs,
                   [&](std::size_t k) { preds[k] = predict_document(bundle, sections[k]); });
      std::string jsonl;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        for (const auto& p : preds[k]) jsonl += prediction_to_json(lc.docs[idx[k]].doc.doc_id, p) + "\n";
      }
      Outputs outputs;
      outputs.add(pr_out, jsonl);
      run.outputs = {pr_out};
      if (!pr_metrics.empty()) {
        require_labels(lc, idx);
        outputs.add(pr_metrics, score_predictions(lc.docs, idx, preds));
        run.outputs.push_back(pr_metrics);
      }
      finish(g, run, outputs, fs::path(pr_out));
    });
  }

  // rules --------------------------------------------------------------------
  std::string ru_rules = "rules/starter.jsonl", ru_model, ru_corpus, ru_doc, ru_split = "test", ru_out,
              ru_metrics;
  bool ru_any = false;
  {
    auto* sub = app.add_subcommand("rules", "Answer the attributes with pattern rules (JSONL)");
    sub->add_option("--rules", ru_rules, "Rule file (JSONL)")->capture_default_str();
    sub->add_option("--model", ru_model,
                    "Section tagger for clause-scoped rules (gold sections when omitted)");
    auto* corpus_opt = sub->add_option("--corpus", ru_corpus, "Corpus directory");
    auto* doc_opt = sub->add_option("--doc", ru_doc, "Single document JSON");
    corpus_opt->excludes(doc_opt);
    sub->add_option("--split", ru_split, "Corpus documents to answer")
        ->check(CLI::IsMember({"train", "dev", "test", "all"}))
        ->capture_default_str();
    sub->add_flag("--any-match", ru_any, "Answer yes when any matching rule says yes");
    sub->add_option("--out", ru_out, "Output predictions JSONL")->required();
    sub->add_option("--metrics", ru_metrics, "Also write per-attribute metrics CSV (labeled corpus)");
    bind(sub, [&] {
      if (ru_corpus.empty() == ru_doc.empty()) throw ConfigError("give exactly one of --corpus and --doc");
      if (!ru_metrics.empty() && ru_corpus.empty()) throw ConfigError("--metrics needs --corpus");
      Run run{"rules"};
      run.settings = {{"split", ru_split}, {"any_match", ru_any}, {"rules_fingerprint", ""}};
      const std::string rule_text = read_file(ru_rules);
      run.settings["rules_fingerprint"] = fnv1a_hex(rule_text);
      run.inputs = {ru_rules};
      const RuleSet rules = parse_rules(rule_text);
      std::optional<CrfModel> model;
      FeatureConfig features;
      if (!ru_model.empty()) {
        run.inputs.push_back(ru_model);
        model = CrfModel::from_json(read_file(ru_model));
        features = FeatureConfig::from_fingerprint(model->feature_fingerprint());
      }
      LoadedCorpus lc;
      std::vector<std::size_t> idx;
      if (!ru_doc.empty()) {
        run.inputs.push_back(ru_doc);
        LabeledDocument ld;
        ld.doc = load_document(ru_doc);
        ld.has_labels = false;
        lc.docs.push_back(std::move(ld));
        idx = {0};
      } else {
        run.inputs.push_back(ru_corpus);
        lc = load_corpus(ru_corpus);
        idx = select_split(lc, ru_split);
      }
      std::vector<std::vector<Section>> sections(idx.size());
      if (model) {
        sections = split_documents(*model, lc.docs, idx, features, g.jobs);
      } else {
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (lc.docs[idx[k]].has_labels) sections[k] = gold_sections(lc.docs[idx[k]]);
        }
      }
      const RuleOptions options{ru_any};
      std::vector<std::vector<AttributePrediction>> preds(idx.size());
      parallel_for(idx.size(), g.jobs, [&](std::size_t k) {
        for (Attribute a : kAttributes) {
          preds[k].push_back(apply_rules(rules, lc.docs[idx[k]].doc, sections[k], a, options));
        }
      });
      std::string jsonl;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        for (const auto& p : preds[k]) jsonl += prediction_to_json(lc.docs[idx[k]].doc.doc_id, p) + "\n";
      }
      Outputs outputs;
      outputs.add(ru_out, jsonl);
      run.outputs = {ru_out};
      if (!ru_metrics.empty()) {
        require_labels(lc, idx);
        outputs.add(ru_metrics, score_predictions(lc.docs, idx, preds));
        run.outputs.push_back(ru_metrics);
      }
      finish(g, run, outputs, fs::path(ru_out));
    });
  }

  // eval-sections ------------------------------------------------------------
  std::string es_model, es_corpus, es_split = "test", es_out;
  {
    auto* sub = app.add_subcommand("eval-sections", "Score a section tagger per section type (CSV)");
    sub->add_option("--model", es_model, "Section tagger model JSON")->required();
    sub->add_option("--corpus", es_corpus, "Labeled corpus directory")->required();
    sub->add_option("--split", es_split, "Documents to score")
        ->check(CLI::IsMember({"train", "dev", "test", "all"}))
        ->capture_default_str();
    sub->add_option("--out", es_out, "Output CSV")->required();
    bind(sub, [&] {
      Run run{"eval-sections"};
      run.settings = {{"split", es_split}};
      run.inputs = {es_model, es_corpus};
      run.outputs = {es_out};
      const CrfModel model = CrfModel::from_json(read_file(es_model));
      const FeatureConfig features = FeatureConfig::from_fingerprint(model.feature_fingerprint());
      run.settings["groups"] = features.groups_string();
      const LoadedCorpus lc = load_corpus(es_corpus);
      const auto idx = select_split(lc, es_split);
      require_labels(lc, idx);
      const auto sections = split_documents(model, lc.docs, idx, features, g.jobs);
      std::vector<std::vector<SectionSpan>> pred, gold;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        pred.push_back(section_spans(sections[k]));
        gold.push_back(lc.docs[idx[k]].labels.sections);
      }
      std::string csv = "section_type,mode,P,R,F1,tp,fp,fn\n";
      for (MatchMode mode : {MatchMode::exact, MatchMode::overlap}) {
        const auto m = section_prf(pred, gold, mode);
        for (std::size_t t = 0; t < m.size(); ++t) {
          csv += std::string(to_string(static_cast<SectionType>(t))) + "," +
                 (mode == MatchMode::exact ? "exact" : "overlap") + "," + fmt4(m[t].precision) + "," +
                 fmt4(m[t].recall) + "," + fmt4(m[t].f1) + "," + std::to_string(m[t].tp) + "," +
                 std::to_string(m[t].fp) + "," + std::to_string(m[t].fn) + "\n";
        }
      }
      Outputs outputs;
      outputs.add(es_out, csv);
      finish(g, run, outputs, fs::path(es_out));
    });
  }

  // ablate -------------------------------------------------------------------
  std::string ab_corpus, ab_out;
  TrainConfig ab_train{0.1, 100, 1e-4, 0, 1};
  {
    auto* sub = app.add_subcommand("ablate", "Feature-group ablation of the section tagger (CSV)");
    sub->add_option("--corpus", ab_corpus, "Labeled corpus directory (its train/test split is used)")
        ->required();
    add_train_options(sub, ab_train);
    sub->add_option("--out", ab_out, "Output CSV")->required();
    bind(sub, [&] {
      ab_train.validate();
      Run run{"ablate"};
      run.settings = {{"train", train_json(ab_train)}};
      run.inputs = {ab_corpus};
      run.outputs = {ab_out};
      const LoadedCorpus lc = load_corpus(ab_corpus);
      require_labels(lc, select_split(lc, "all"));
      const AblationReport report = run_ablation(lc.docs, lc.split, ab_train, g.jobs);
      Outputs outputs;
      outputs.add(ab_out, ablation_csv(report));
      finish(g, run, outputs, fs::path(ab_out));
    });
  }

  // doclength ----------------------------------------------------------------
  std::string dl_corpus, dl_out, dl_plot;
  std::vector<std::size_t> dl_windows = {100, 500, 2500, 5000};
  std::uint64_t dl_seed = 7;
  TrainConfig dl_train{0.1, 100, 1e-4, 0, 1};
  {
    auto* sub = app.add_subcommand("doclength",
                                   "Governing-law extraction F1 against input window length (CSV)");
    sub->add_option("--corpus", dl_corpus, "Labeled corpus directory")->required();
    sub->add_option("--windows", dl_windows, "Window sizes in tokens, ascending")
        ->delimiter(',')
        ->capture_default_str();
    sub->add_option("--seed", dl_seed, "Seed for window placement")->capture_default_str();
    add_train_options(sub, dl_train);
    sub->add_option("--out", dl_out, "Output CSV (standard output when omitted)");
    sub->add_option("--plot-data", dl_plot, "Also write two-column window/F1 plot data");
    bind(sub, [&] {
      dl_train.jobs = 1;
      dl_train.validate();
      Run run{"doclength"};
      run.seed = dl_seed;
      run.settings = {{"windows", dl_windows}, {"seed", dl_seed}, {"train", train_json(dl_train)}};
      run.inputs = {dl_corpus};
      const LoadedCorpus lc = load_corpus(dl_corpus);
      require_labels(lc, select_split(lc, "all"));
      const LengthCurve curve =
          run_length_experiment(lc.docs, lc.split, dl_windows, dl_seed, dl_train, g.jobs);
      Outputs outputs;
      std::optional<fs::path> primary;
      if (!dl_out.empty()) {
        outputs.add(dl_out, length_csv(curve));
        run.outputs.push_back(dl_out);
        primary = dl_out;
      }
      if (!dl_plot.empty()) {
        outputs.add(dl_plot, length_plot_data(curve));
        run.outputs.push_back(dl_plot);
        if (!primary) primary = dl_plot;
      }
      if (dl_out.empty()) std::cout << length_csv(curve);
      finish(g, run, outputs, primary);
    });
  }

  // compare ------------------------------------------------------------------
  std::string cm_corpus, cm_rules = "rules/starter.jsonl", cm_out;
  EndToEndConfig cm_config;
  {
    auto* sub = app.add_subcommand("compare",
                                   "End-to-end comparison of rules, model and model+visual (CSV)");
    sub->add_option("--corpus", cm_corpus, "Labeled corpus directory")->required();
    sub->add_option("--rules", cm_rules, "Rule file (JSONL)")->capture_default_str();
    add_train_options(sub, cm_config.splitter);
    sub->add_flag("--any-match", cm_config.rule_options.any_match,
                  "Rules answer yes when any matching rule says yes");
    sub->add_option("--out", cm_out, "Output CSV")->required();
    bind(sub, [&] {
      cm_config.splitter.validate();
      Run run{"compare"};
      const std::string rule_text = read_file(cm_rules);
      run.settings = {{"train", train_json(cm_config.splitter)},
                      {"any_match", cm_config.rule_options.any_match},
                      {"rules_fingerprint", fnv1a_hex(rule_text)}};
      run.inputs = {cm_corpus, cm_rules};
      run.outputs = {cm_out};
      const RuleSet rules = parse_rules(rule_text);
      const LoadedCorpus lc = load_corpus(cm_corpus);
      require_labels(lc, select_split(lc, "all"));
      const ComparisonReport report = run_endtoend_comparison(lc.docs, lc.split, rules, cm_config, g.jobs);
      Outputs outputs;
      outputs.add(cm_out, comparison_csv(report));
      finish(g, run, outputs, fs::path(cm_out));
    });
  }

  // inspect-features ---------------------------------------------------------
  std::string if_doc, if_groups = "all", if_model, if_out;
  std::optional<std::size_t> if_line;
  {
    auto* sub = app.add_subcommand("inspect-features", "Dump line feature vectors of a document (JSON)");
    sub->add_option("--doc", if_doc, "Document JSON")->required();
    auto* groups_opt = sub->add_option("--groups", if_groups, "Feature groups")->capture_default_str();
    sub->add_option("--model", if_model, "Take the feature groups from this model")->excludes(groups_opt);
    sub->add_option("--line", if_line, "Only this reading-order line index");
    sub->add_option("--out", if_out, "Output JSON (standard output when omitted)");
    bind(sub, [&] {
      FeatureConfig features = FeatureConfig::from_groups(if_groups);
      Run run{"inspect-features"};
      run.inputs = {if_doc};
      if (!if_model.empty()) {
        run.inputs.push_back(if_model);
        features = FeatureConfig::from_fingerprint(CrfModel::from_json(read_file(if_model)).feature_fingerprint());
      }
      features.validate();
      run.settings = {{"groups", features.groups_string()}};
      const Document doc = load_document(if_doc);
      const DocumentFeaturizer featurizer(doc, features);
      if (if_line && *if_line >= featurizer.size()) {
        throw InvalidRef("line " + std::to_string(*if_line) + " of " + std::to_string(featurizer.size()));
      }
      json lines = json::array();
      for (std::size_t i = 0; i < featurizer.size(); ++i) {
        if (if_line && i != *if_line) continue;
        json fv = json::object();
        const FeatureVector vec = featurizer.line(i);
        for (const auto& [name, w] : vec.entries()) fv[name] = w;
        lines.push_back({{"line", i}, {"text", line_text(*featurizer.order()[i].line)}, {"features", fv}});
      }
      const json j = {{"doc_id", doc.doc_id}, {"feature_groups", features.groups_string()}, {"lines", lines}};
      const std::string out = j.dump(2) + "\n";
      Outputs outputs;
      if (if_out.empty()) {
        std::cout << out;
        finish(g, run, outputs, std::nullopt);
      } else {
        run.outputs = {if_out};
        outputs.add(if_out, out);
        finish(g, run, outputs, fs::path(if_out));
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    action();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
