// Acceptance checks on the seeded synthetic corpus. Prints one PASS/FAIL
// line per criterion and exits non-zero when any fails.
//
//   acceptance --cli path/to/cuesplit [--only 3,5]

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../support/crf_oracle.hpp"
#include "cuesplit/evaluation.hpp"
#include "cuesplit/extractors.hpp"
#include "cuesplit/rules.hpp"
#include "cuesplit/splitter.hpp"
#include "cuesplit/synth.hpp"

namespace fs = std::filesystem;
using namespace cuesplit;

namespace {

constexpr std::uint64_t kSeed = 7;
constexpr std::size_t kDocs = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Corpus corpus_for(std::uint64_t seed, double broken = GenConfig{}.broken_span_prob) {
  GenConfig c;
  c.seed = seed;
  c.doc_count = kDocs;
  c.broken_span_prob = broken;
  return generate_corpus(c);
}

const Corpus& main_corpus() {
  static const Corpus c = corpus_for(kSeed);
  return c;
}

const CorpusSplit& main_split() {
  static const CorpusSplit s = split_corpus(kDocs, kSeed);
  return s;
}

TrainConfig experiment_train() { return TrainConfig{0.1, 100, 1e-4, 0, 1}; }

std::string root_dir() { return CUESPLIT_SOURCE_DIR; }

// 1 ------------------------------------------------------------------------
Outcome crf_correctness() {
  double worst_grad = 0, worst_brute = 0;
  std::size_t brute_cases = 0;
  bool viterbi_ok = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t labels = 2 + s % 4;
    const std::size_t length = 1 + (s * 7) % 9;
    const auto inst = oracle::random_instance(derive_seed(kSeed, s), labels, length);
    worst_grad = std::max(worst_grad, oracle::gradient_error(inst));
    if (std::pow(double(labels), double(length)) > 4096) continue;
    ++brute_cases;
    const auto seq = inst.model.compile(inst.sequence);
    const auto ref = oracle::enumerate(inst.model, inst.sequence);
    worst_brute = std::max(worst_brute, std::abs(log_partition(inst.model, seq) - ref.log_z));
    const auto m = marginals(inst.model, seq);
    for (std::size_t i = 0; i < m.size(); ++i) worst_brute = std::max(worst_brute, std::abs(m[i] - ref.marginals[i]));
    viterbi_ok = viterbi_ok && viterbi_decode(inst.model, seq) == ref.best;
  }
  return {worst_grad < 1e-4 && worst_brute < 1e-8 && viterbi_ok && brute_cases > 0,
          "max gradient rel. error " + sci(worst_grad) + ", max brute-force error " +
              sci(worst_brute) + " over " + std::to_string(brute_cases) +
              " enumerable cases, viterbi " + (viterbi_ok ? "exact" : "MISMATCH")};
}

// 2 ------------------------------------------------------------------------
Outcome page_break_repair() {
  const Corpus corpus = corpus_for(kSeed, 1.0);
  const CorpusSplit split = split_corpus(corpus.size(), kSeed);
  const FeatureConfig features = FeatureConfig::all_groups();
  const CrfModel splitter = train_splitter(corpus, split.train, features, experiment_train());
  const ExtractorBundle bundle = train_extractors(corpus, split.train, ExtractorConfig{});
  const auto sections = split_documents(splitter, corpus, split.test, features, 1);
  std::size_t extracted = 0, clean = 0, contiguous = 0;
  for (std::size_t k = 0; k < split.test.size(); ++k) {
    const auto& ld = corpus[split.test[k]];
    const auto preds = predict_document(bundle, sections[k]);
    const auto& p = preds[index_of(Attribute::governing_law)];
    if (!p.span) continue;
    ++extracted;
    const Section& s = sections[k][p.span->section];
    bool furniture = false;
    for (std::size_t t = p.span->token_start; t <= p.span->token_end; ++t) {
      const SectionTag tag = ld.labels.line_labels[s.tokens[t].origin.reading_line];
      const auto type = tag_type(tag);
      if (type && !is_content(*type)) furniture = true;
    }
    clean += !furniture;
    const std::string gold = normalize_answer(gold_span_text(ld.doc, ld.labels, *ld.labels.governing_law));
    contiguous += normalize_answer(p.span->text).find(gold) != std::string::npos;
  }
  return {extracted > 0 && clean == extracted && contiguous == extracted,
          std::to_string(extracted) + " spans extracted on " + std::to_string(split.test.size()) +
              " broken test docs; " + std::to_string(clean) + " free of page furniture, " +
              std::to_string(contiguous) + " contain the jurisdiction contiguously"};
}

// 3 ------------------------------------------------------------------------
Outcome ablation_direction() {
  const AblationReport r = run_ablation(main_corpus(), main_split(), experiment_train(), 1);
  std::size_t base = r.names.size(), all = r.names.size();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    if (r.names[i] == "baseline") base = i;
    if (r.names[i] == "+all_groups") all = i;
  }
  if (base == r.names.size() || all == r.names.size()) return {false, "ablation rows missing"};
  const auto footer = static_cast<std::size_t>(SectionType::footer);
  const auto clause = static_cast<std::size_t>(SectionType::clause);
  const double footer_gain = r.exact[all][footer].f1 - r.exact[base][footer].f1;
  const double clause_base = r.exact[base][clause].f1, clause_all = r.exact[all][clause].f1;
  const std::string example = format_delta(0.919, 0.904);
  return {footer_gain >= 0.03 && clause_all >= clause_base && example == "+1.7%",
          "footer F1 " + num(r.exact[base][footer].f1) + " -> " + num(r.exact[all][footer].f1) + " (gain " +
              num(footer_gain) + "), clause F1 " + num(clause_base) + " -> " + num(clause_all) +
              ", format_delta(.919,.904) = " + example};
}

// 4 and 6 share the end-to-end runs.
const std::vector<ComparisonReport>& comparisons() {
  static const std::vector<ComparisonReport> reports = [] {
    const RuleSet rules = load_rules(fs::path(root_dir()) / "rules" / "starter.jsonl");
    std::vector<ComparisonReport> out;
    for (std::uint64_t seed : {kSeed, kSeed + 1, kSeed + 2}) {
      const Corpus corpus = seed == kSeed ? main_corpus() : corpus_for(seed);
      out.push_back(run_endtoend_comparison(corpus, split_corpus(corpus.size(), seed), rules,
                                            EndToEndConfig{}, 1));
    }
    return out;
  }();
  return reports;
}

Outcome visual_downstream() {
  std::size_t wins = 0;
  std::string detail;
  for (std::size_t k = 0; k < comparisons().size(); ++k) {
    const double base = comparisons()[k].get("model", Attribute::anti_assignment).f1;
    const double vis = comparisons()[k].get("model+visual", Attribute::anti_assignment).f1;
    wins += vis >= base;
    detail += (k ? "; " : "") + std::string("seed ") + std::to_string(kSeed + k) + ": " + num(base) +
              " -> " + num(vis);
  }
  return {2 * wins > comparisons().size(),
          "Anti-Assignment F1 baseline-split -> visual-split, " + detail + " (" + std::to_string(wins) +
              "/3 seeds >=)"};
}

Outcome rules_character() {
  const ComparisonReport& r = comparisons().front();
  bool ok = true;
  std::string detail;
  for (Attribute a : {Attribute::termination_for_convenience, Attribute::anti_assignment}) {
    const Metrics& m = r.get("rules", a);
    ok = ok && m.precision >= m.recall;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(a)) + " P " + num(m.precision) +
              " R " + num(m.recall);
  }
  return {ok, detail};
}

// 5 ------------------------------------------------------------------------
Outcome length_degradation() {
  const std::vector<std::size_t> windows = {100, 500, 2500, 5000};
  const LengthCurve curve =
      run_length_experiment(main_corpus(), main_split(), windows, kSeed, experiment_train(), 1);
  std::vector<double> f1;
  for (const auto& p : curve.points) f1.push_back(p.metrics.f1);
  std::size_t inversions = 0;
  bool small = true;
  for (std::size_t i = 1; i < f1.size(); ++i) {
    if (f1[i] > f1[i - 1]) {
      ++inversions;
      small = small && f1[i] - f1[i - 1] <= 0.02;
    }
  }
  const double drop = f1.front() - f1.back();
  std::string detail = "F1 by window:";
  for (std::size_t i = 0; i < f1.size(); ++i) detail += " " + std::to_string(windows[i]) + "=" + num(f1[i]);
  detail += ", drop " + num(drop) + ", inversions " + std::to_string(inversions);
  return {drop >= 0.2 && inversions <= 1 && small, detail};
}

// 7 ------------------------------------------------------------------------
Outcome metrics_oracle() {
  bool ok = true;
  const Metrics perfect = Metrics::from_counts(12, 0, 0);
  ok = ok && perfect.precision == 1 && perfect.recall == 1 && perfect.f1 == 1;
  const Metrics none = Metrics::from_counts(0, 0, 7);
  ok = ok && none.precision == 0 && none.recall == 0 && none.f1 == 0;
  Rng rng(kSeed);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t tp = rng.below(30), fp = rng.below(30), fn = rng.below(30), tn = rng.below(30);
    const Metrics m = Metrics::from_counts(tp, fp, fn, tn);
    if (tp > 0) {
      const double p = double(tp) / double(tp + fp), r = double(tp) / double(tp + fn);
      ok = ok && std::abs(m.precision - p) < 1e-15 && std::abs(m.recall - r) < 1e-15 &&
           std::abs(m.f1 - 2 * p * r / (p + r)) < 1e-15;
    }
    ok = ok && m.support == tp + fn && m.f1 <= std::max(m.precision, m.recall) + 1e-15 &&
         m.f1 >= std::min(m.precision, m.recall) - 1e-15;
  }
  std::vector<DocPrediction> preds;
  std::vector<GoldAttribute> golds;
  for (int i = 0; i < 510; ++i) {
    AttributePrediction p;
    p.attribute = Attribute::anti_assignment;
    p.answer = false;
    preds.push_back({"d" + std::to_string(i), p});
    golds.push_back({"d" + std::to_string(i), std::nullopt, i < 15});
  }
  const Metrics m = attribute_prf(preds, golds, Attribute::anti_assignment);
  const double acc = std::round(m.accuracy() * 100) / 100;
  ok = ok && m.recall == 0 && m.precision == 0 && acc == 0.97;
  return {ok, "identities over 200 random confusions; all-No on 15/510: P " + num(m.precision, 2) + " R " +
                  num(m.recall, 2) + " accuracy " + num(acc, 2)};
}

// 8 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no --cli given"};
  const fs::path work = fs::temp_directory_path() / ("cuesplit_accept_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string rules = root_dir() + "/rules/starter.jsonl";
  auto run = [&](const std::string& tag, int jobs, const std::string& args) {
    const std::string cmd = cli + " --jobs " + std::to_string(jobs) + " " + args + " 2>>" +
                            (work / "log.txt").string() + " >" + (work / (tag + ".stdout")).string();
    return std::system(cmd.c_str()) == 0;
  };
  struct Step {
    std::string name;
    std::string args;  // $W = this run's directory
    std::vector<std::string> files;
  };
  const std::vector<Step> steps = {
      {"gen", "gen --seed 7 --docs 50 --out $W/corpus", {}},
      {"train-splitter", "train-splitter --corpus $W/corpus --groups all --out $W/model.json", {"model.json"}},
      {"split", "split --model $W/model.json --doc $W/corpus/doc_003.json --out $W/sections.json", {"sections.json"}},
      {"train-extractors", "train-extractors --corpus $W/corpus --out $W/ext.json", {"ext.json"}},
      {"predict", "predict --model $W/model.json --extractors $W/ext.json --corpus $W/corpus --out $W/pred.jsonl --metrics $W/pred.csv",
       {"pred.jsonl", "pred.csv"}},
      {"rules", "rules --rules " + rules + " --corpus $W/corpus --out $W/rules.jsonl --metrics $W/rules.csv",
       {"rules.jsonl", "rules.csv"}},
      {"eval-sections", "eval-sections --model $W/model.json --corpus $W/corpus --out $W/eval.csv", {"eval.csv"}},
      {"ablate", "ablate --corpus $W/corpus --out $W/ablation.csv", {"ablation.csv"}},
      {"doclength", "doclength --corpus $W/corpus --windows 100,500,2500 --seed 7 --out $W/length.csv --plot-data $W/length.dat",
       {"length.csv", "length.dat"}},
      {"compare", "compare --corpus $W/corpus --rules " + rules + " --out $W/compare.csv", {"compare.csv"}},
      {"inspect-features", "inspect-features --doc $W/corpus/doc_003.json --line 5 --out $W/features.json", {"features.json"}},
  };
  std::vector<std::string> bad;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = work / ("run" + std::to_string(pass));
    fs::create_directories(dir);
    for (const auto& step : steps) {
      std::string args = step.args;
      for (std::size_t at; (at = args.find("$W")) != std::string::npos;) args.replace(at, 2, dir.string());
      if (!run(step.name + std::to_string(pass), pass + 1, args)) bad.push_back(step.name + " failed");
    }
  }
  std::size_t compared = 0;
  for (const auto& step : steps) {
    std::vector<std::string> files = step.files;
    if (step.name == "gen") {
      for (const auto& e : fs::directory_iterator(work / "run0" / "corpus")) {
        if (e.path().filename() != "run_manifest.json") files.push_back("corpus/" + e.path().filename().string());
      }
    }
    for (const auto& f : files) {
      ++compared;
      const std::string a = slurp(work / "run0" / f), b = slurp(work / "run1" / f);
      if (a.empty() || a != b) bad.push_back(f);
    }
  }
  std::set<std::string> manifests;
  for (const auto& step : steps) {
    for (const auto& f : step.files) {
      if (!fs::exists(work / "run0" / (f + ".manifest.json")) && f != "length.dat" && f != "pred.csv" &&
          f != "rules.csv") {
        bad.push_back(f + " has no manifest");
      }
    }
  }
  if (!fs::exists(work / "run0" / "corpus" / "run_manifest.json")) bad.push_back("corpus has no manifest");
  const bool ok = bad.empty();
  std::string detail = std::to_string(compared) + " output files compared across two runs (--jobs 1 vs 2)";
  if (!ok) {
    detail += "; differing or failed:";
    for (std::size_t i = 0; i < bad.size() && i < 8; ++i) detail += " " + bad[i];
  } else {
    fs::remove_all(work);
  }
  return {ok, detail};
}

// 9 ------------------------------------------------------------------------
Outcome round_trips() {
  GenConfig c;
  c.seed = kSeed;
  c.doc_count = 100;
  const Corpus corpus = generate_corpus(c);
  std::size_t doc_ok = 0, assembly_ok = 0;
  for (const auto& ld : corpus) {
    const std::string text = serialize_document(ld.doc);
    const Document back = parse_document(text);
    doc_ok += back == ld.doc && serialize_document(back) == text;
    assembly_ok += section_spans(assemble_sections(ld.doc, ld.labels.line_labels)) == ld.labels.sections;
  }
  std::vector<std::size_t> train(40), held;
  for (std::size_t i = 0; i < 40; ++i) train[i] = i;
  for (std::size_t i = 40; i < 100; ++i) held.push_back(i);
  const FeatureConfig f = FeatureConfig::all_groups();
  const CrfModel model = train_splitter(corpus, train, f, TrainConfig{0.1, 40, 1e-4, 0, 1});
  const CrfModel loaded = CrfModel::from_json(model.to_json());
  std::size_t decode_ok = 0;
  for (std::size_t i : held) decode_ok += predict_tags(model, corpus[i].doc, f) == predict_tags(loaded, corpus[i].doc, f);
  return {doc_ok == 100 && assembly_ok == 100 && decode_ok == held.size() && loaded == model,
          "document format " + std::to_string(doc_ok) + "/100, assembly(gold tags) " + std::to_string(assembly_ok) +
              "/100, reloaded model decodes " + std::to_string(decode_ok) + "/" + std::to_string(held.size()) +
              " identically"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream s(argv[++i]);
      for (std::string x; std::getline(s, x, ',');) only.insert(std::stoi(x));
    } else {
      std::cerr << "usage: acceptance --cli PATH [--only N,M]\n";
      return 2;
    }
  }

  struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "crf-correctness", 60, crf_correctness},
      {2, "page-break-repair", 120, page_break_repair},
      {3, "ablation-direction", 600, ablation_direction},
      {4, "visual-cues-downstream", 600, visual_downstream},
      {5, "document-length-degradation", 600, length_degradation},
      {6, "rules-precision-over-recall", 600, rules_character},
      {7, "metrics-oracle", 60, metrics_oracle},
      {8, "determinism", 900, [&] { return determinism(cli); }},
      {9, "round-trips", 300, round_trips},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << num(secs, 1) << "s, limit " << num(c.limit_seconds, 0) << "s"
              << (in_time ? "" : ", OVER TIME") << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
