// Python bindings: corpus generation, splitter training and splitting,
// attribute extraction, rules and metrics. Structured results cross the
// boundary as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "cuesplit/errors.hpp"
#include "cuesplit/evaluation.hpp"
#include "cuesplit/extractors.hpp"
#include "cuesplit/rules.hpp"
#include "cuesplit/splitter.hpp"
#include "cuesplit/synth.hpp"
#include "cuesplit/version.hpp"

namespace py = pybind11;
using namespace cuesplit;

namespace {

py::object loads(const std::string& json_text) {
  return py::module_::import("json").attr("loads")(json_text);
}

const std::vector<std::size_t>& split_indices(const LoadedCorpus& c, const std::string& name) {
  if (name == "train") return c.split.train;
  if (name == "dev") return c.split.dev;
  if (name == "test") return c.split.test;
  throw ConfigError("split must be train, dev or test, got '" + name + "'");
}

const LabeledDocument& doc_at(const LoadedCorpus& c, std::size_t i) {
  if (i >= c.docs.size()) throw py::index_error("document index out of range");
  return c.docs[i];
}

struct Splitter {
  CrfModel model;
  FeatureConfig features;

  static Splitter from_model(CrfModel m) {
    FeatureConfig f = FeatureConfig::from_fingerprint(m.feature_fingerprint());
    return {std::move(m), f};
  }

  std::vector<Section> sections(const Document& doc) const { return split_document(model, doc, features); }
};

std::vector<Section> sections_for(const Document& doc, const Splitter* splitter,
                                  const LabeledDocument* gold) {
  if (splitter) return splitter->sections(doc);
  if (gold && gold->has_labels) return gold_sections(*gold);
  throw ConfigError("a splitter is required for documents without labels");
}

py::list predictions(const std::string& doc_id, const std::vector<AttributePrediction>& preds) {
  py::list out;
  for (const auto& p : preds) out.append(loads(prediction_to_json(doc_id, p)));
  return out;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["fn"] = m.fn;
  d["tn"] = m.tn;
  d["support"] = m.support;
  return d;
}

TrainConfig train_config(double l2, std::size_t iterations, std::size_t jobs) {
  TrainConfig t{l2, iterations, 1e-4, 0, jobs};
  t.validate();
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Section splitting and attribute extraction for contracts";
  m.attr("__version__") = kToolkitVersion;

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<LoadedCorpus>(m, "Corpus")
      .def_static(
          "generate",
          [](std::uint64_t seed, std::size_t docs, std::size_t mean_words, double header_prob,
             double footer_prob, double broken_span_prob, double style_noise) {
            GenConfig c;
            c.seed = seed;
            c.doc_count = docs;
            c.mean_words_per_doc = mean_words;
            c.header_prob = header_prob;
            c.footer_prob = footer_prob;
            c.broken_span_prob = broken_span_prob;
            c.style_noise = style_noise;
            c.validate();
            py::gil_scoped_release unlocked;
            return LoadedCorpus{generate_corpus(c), split_corpus(docs, seed)};
          },
          py::arg("seed") = 7, py::arg("docs") = 200, py::arg("mean_words") = GenConfig{}.mean_words_per_doc,
          py::arg("header_prob") = GenConfig{}.header_prob, py::arg("footer_prob") = GenConfig{}.footer_prob,
          py::arg("broken_span_prob") = GenConfig{}.broken_span_prob,
          py::arg("style_noise") = GenConfig{}.style_noise)
      .def_static("read", &read_corpus, py::arg("path"))
      .def("write", [](const LoadedCorpus& c, const std::filesystem::path& dir) { write_corpus(dir, c.docs, c.split); },
           py::arg("path"))
      .def("__len__", [](const LoadedCorpus& c) { return c.docs.size(); })
      .def("doc_id", [](const LoadedCorpus& c, std::size_t i) { return doc_at(c, i).doc.doc_id; })
      .def("document", [](const LoadedCorpus& c, std::size_t i) { return loads(serialize_document(doc_at(c, i).doc)); })
      .def("labels",
           [](const LoadedCorpus& c, std::size_t i) -> py::object {
             const auto& ld = doc_at(c, i);
             if (!ld.has_labels) return py::none();
             return loads(labels_to_json(ld.labels));
           })
      .def("split", &split_indices, py::arg("name"));

  py::class_<Splitter>(m, "Splitter")
      .def_static(
          "train",
          [](const LoadedCorpus& c, const std::string& groups, const std::string& split, double l2,
             std::size_t iterations, std::size_t jobs) {
            const FeatureConfig f = FeatureConfig::from_groups(groups);
            const TrainConfig t = train_config(l2, iterations, jobs);
            const auto& idx = split_indices(c, split);
            py::gil_scoped_release unlocked;
            return Splitter{train_splitter(c.docs, idx, f, t), f};
          },
          py::arg("corpus"), py::arg("groups") = "all", py::arg("split") = "train", py::arg("l2") = 0.1,
          py::arg("iterations") = 100, py::arg("jobs") = 1)
      .def_static("from_json", [](const std::string& s) { return Splitter::from_model(CrfModel::from_json(s)); })
      .def("to_json", [](const Splitter& s) { return s.model.to_json(); })
      .def_property_readonly("feature_fingerprint", [](const Splitter& s) { return s.features.fingerprint(); })
      .def(
          "tags",
          [](const Splitter& s, const std::string& doc_json) {
            std::vector<std::string> out;
            for (SectionTag t : predict_tags(s.model, parse_document(doc_json), s.features)) {
              out.emplace_back(to_string(t));
            }
            return out;
          },
          py::arg("document_json"))
      .def(
          "split",
          [](const Splitter& s, const std::string& doc_json) {
            const Document doc = parse_document(doc_json);
            return loads(sections_to_json(doc.doc_id, s.sections(doc)));
          },
          py::arg("document_json"));

  py::class_<ExtractorBundle>(m, "Extractors")
      .def_static(
          "train",
          [](const LoadedCorpus& c, const std::string& groups, const std::string& split, double l2,
             std::size_t iterations, double logistic_l2) {
            ExtractorConfig cfg;
            cfg.features = FeatureConfig::from_groups(groups);
            cfg.entity = train_config(l2, iterations, 1);
            cfg.relevance.l2_lambda = logistic_l2;
            cfg.classifier.l2_lambda = logistic_l2;
            cfg.validate();
            const auto& idx = split_indices(c, split);
            py::gil_scoped_release unlocked;
            return train_extractors(c.docs, idx, cfg);
          },
          py::arg("corpus"), py::arg("groups") = "all", py::arg("split") = "train", py::arg("l2") = 0.1,
          py::arg("iterations") = 100, py::arg("logistic_l2") = LogisticConfig{}.l2_lambda)
      .def_static("from_json", &ExtractorBundle::from_json)
      .def("to_json", &ExtractorBundle::to_json)
      .def(
          "predict",
          [](const ExtractorBundle& b, const LoadedCorpus& c, std::size_t i, const Splitter* splitter) {
            const auto& ld = doc_at(c, i);
            return predictions(ld.doc.doc_id, predict_document(b, sections_for(ld.doc, splitter, &ld)));
          },
          py::arg("corpus"), py::arg("index"), py::arg("splitter") = nullptr,
          "Predicts the four attributes; gold sections are used when no splitter is given.");

  py::class_<RuleSet>(m, "Rules")
      .def_static("parse", &parse_rules, py::arg("jsonl"))
      .def_static("load", &load_rules, py::arg("path"))
      .def("__len__", &RuleSet::size)
      .def(
          "apply",
          [](const RuleSet& r, const LoadedCorpus& c, std::size_t i, const Splitter* splitter, bool any_match) {
            const auto& ld = doc_at(c, i);
            const auto sections = sections_for(ld.doc, splitter, &ld);
            std::vector<AttributePrediction> preds;
            for (Attribute a : kAttributes) preds.push_back(apply_rules(r, ld.doc, sections, a, {any_match}));
            return predictions(ld.doc.doc_id, preds);
          },
          py::arg("corpus"), py::arg("index"), py::arg("splitter") = nullptr, py::arg("any_match") = false);

  m.def(
      "metrics",
      [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
        return metrics_dict(Metrics::from_counts(tp, fp, fn, tn));
      },
      py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn") = 0);
  m.def("format_delta", &format_delta, py::arg("value"), py::arg("baseline"));
  m.def("normalize_answer", [](const std::string& s) { return normalize_answer(s); });

  m.def(
      "evaluate_sections",
      [](const Splitter& s, const LoadedCorpus& c, const std::string& split, std::size_t jobs) {
        const auto& idx = split_indices(c, split);
        std::vector<std::vector<SectionSpan>> pred, gold;
        {
          py::gil_scoped_release unlocked;
          for (const auto& secs : split_documents(s.model, c.docs, idx, s.features, jobs)) {
            pred.push_back(section_spans(secs));
          }
        }
        for (std::size_t i : idx) gold.push_back(c.docs[i].labels.sections);
        py::dict out;
        for (auto mode : {MatchMode::exact, MatchMode::overlap}) {
          py::dict per_type;
          const auto all = section_prf(pred, gold, mode);
          for (SectionType t : kSectionTypes) per_type[py::str(std::string(to_string(t)))] = metrics_dict(all[static_cast<std::size_t>(t)]);
          out[mode == MatchMode::exact ? "exact" : "overlap"] = per_type;
        }
        return out;
      },
      py::arg("splitter"), py::arg("corpus"), py::arg("split") = "test", py::arg("jobs") = 1);

  m.def(
      "ablation_csv",
      [](const LoadedCorpus& c, double l2, std::size_t iterations, std::size_t jobs) {
        const TrainConfig t = train_config(l2, iterations, 1);
        py::gil_scoped_release unlocked;
        return ablation_csv(run_ablation(c.docs, c.split, t, jobs));
      },
      py::arg("corpus"), py::arg("l2") = 0.1, py::arg("iterations") = 100, py::arg("jobs") = 1);
  m.def(
      "length_csv",
      [](const LoadedCorpus& c, const std::vector<std::size_t>& windows, std::uint64_t seed, double l2,
         std::size_t iterations, std::size_t jobs) {
        const TrainConfig t = train_config(l2, iterations, 1);
        py::gil_scoped_release unlocked;
        return length_csv(run_length_experiment(c.docs, c.split, windows, seed, t, jobs));
      },
      py::arg("corpus"), py::arg("windows") = std::vector<std::size_t>{100, 500, 2500, 5000},
      py::arg("seed") = 7, py::arg("l2") = 0.1, py::arg("iterations") = 100, py::arg("jobs") = 1);
}
