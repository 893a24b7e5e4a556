#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <stdexcept>

#include "clonescope/corpus.hpp"
#include "clonescope/link_analysis.hpp"
#include "clonescope/normalizer.hpp"
#include "clonescope/pipeline.hpp"
#include "clonescope/reporter.hpp"

namespace py = pybind11;
using namespace clonescope;

namespace {

InputFormat input_format(const std::string& name) {
  auto f = parse_input_format(name);
  if (!f) throw py::value_error("format must be 'jsonl' or 'se_xml'");
  return *f;
}

BodyFormat body_format(const std::string& name) {
  if (name == "markdown") return BodyFormat::markdown;
  if (name == "html") return BodyFormat::html;
  throw py::value_error("body format must be 'markdown' or 'html'");
}

py::dict post_dict(const Post& p) {
  py::dict d;
  d["post_id"] = p.post_id;
  d["post_type"] = std::string(to_string(p.post_type));
  d["parent_id"] = p.parent_id;
  d["thread_id"] = p.thread_id;
  d["creation_date"] = format_timestamp(p.creation_date);
  d["author_id"] = p.author_id;
  d["score"] = p.score;
  d["body"] = p.body;
  return d;
}

py::dict block_dict(const CodeBlock& b) {
  py::dict d;
  d["post_id"] = b.post_id;
  d["block_index"] = b.block_index;
  d["raw_content"] = b.raw_content;
  d["kind"] = std::string(to_string(b.kind));
  return d;
}

// Move-only analysis result handed to Python by pointer.
struct PyAnalysis {
  Analysis analysis;
};

}  // namespace

PYBIND11_MODULE(_clonescope, m) {
  m.doc() = "Exact code-clone analysis of Q&A post corpora";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<NormalizedSnippet>(m, "NormalizedSnippet")
      .def_readonly("content", &NormalizedSnippet::content)
      .def_readonly("nloc", &NormalizedSnippet::nloc)
      .def_readonly("projection", &NormalizedSnippet::projection)
      .def_readonly("fingerprint", &NormalizedSnippet::fingerprint)
      .def("__repr__", [](const NormalizedSnippet& s) {
        return "NormalizedSnippet(nloc=" + std::to_string(s.nloc) + ", fingerprint=" +
               fingerprint_hex(s.fingerprint) + ")";
      });

  m.def("normalize", &normalize, py::arg("raw"), "Whitespace and bracket-line normalization.");
  m.def("nloc", &clonescope::nloc, py::arg("normalized"));
  m.def("project_alnum", &project_alnum, py::arg("text"));
  m.def("fingerprint", [](const std::string& projection) { return fingerprint(projection); },
        py::arg("projection"), "FNV-1a 64 of the projection's UTF-8 bytes.");
  m.def("fnv1a64", [](const py::bytes& data) { return fnv1a64(std::string(data)); },
        py::arg("data"));
  m.def("fingerprint_hex", &fingerprint_hex, py::arg("fingerprint"));
  m.def("process_block", &normalize_snippet, py::arg("raw"));

  m.def(
      "parse_posts",
      [](const std::string& text, const std::string& format) {
        py::list out;
        for (const auto& p : parse_posts_from_string(text, input_format(format))) {
          out.append(post_dict(p));
        }
        return out;
      },
      py::arg("text"), py::arg("format") = "jsonl");

  m.def(
      "extract_code_blocks",
      [](const std::string& body, const std::string& format, PostId post_id) {
        py::list out;
        for (const auto& b : extract_code_blocks(body, body_format(format), post_id)) {
          out.append(block_dict(b));
        }
        return out;
      },
      py::arg("body"), py::arg("format") = "markdown", py::arg("post_id") = 0);

  m.def(
      "extract_links",
      [](const std::string& body, const std::string& format, const std::string& rules_path) {
        RuleTable rules = rules_path.empty() ? RuleTable::defaults() : RuleTable::load(rules_path);
        py::list out;
        for (auto& link : extract_links(body, body_format(format))) {
          out.append(serialize(source_link_json(classify_source(std::move(link), rules))));
        }
        return out;
      },
      py::arg("body"), py::arg("format") = "markdown", py::arg("rules_path") = "",
      "Classified links as JSON strings.");

  py::class_<PyAnalysis, std::unique_ptr<PyAnalysis>>(m, "Analysis")
      .def("summary_json",
           [](const PyAnalysis& a) {
             return serialize(summary_json(a.analysis.stats, a.analysis.meta));
           })
      .def("histogram_csv", [](const PyAnalysis& a) { return histogram_csv(a.analysis.stats); })
      .def("ranked_keys",
           [](const PyAnalysis& a) {
             std::vector<std::string> keys;
             for (const auto* s : a.analysis.ranked) keys.push_back(s->key());
             return keys;
           })
      .def("clone_set_json",
           [](const PyAnalysis& a, const std::string& key) {
             for (std::size_t i = 0; i < a.analysis.ranked.size(); ++i) {
               if (a.analysis.ranked[i]->key() == key) {
                 return serialize(clone_set_json(*a.analysis.ranked[i], a.analysis.origins[i]));
               }
             }
             throw py::key_error(key);
           })
      .def("write", [](const PyAnalysis& a, const std::string& out) { write_outputs(a.analysis, out); },
           py::arg("out_dir"));

  m.def(
      "analyze",
      [](const std::string& corpus, const std::string& format, std::uint32_t min_nloc,
         std::size_t min_threads, const std::string& rules_path, unsigned workers) {
        AnalyzeOptions options;
        options.format = input_format(format);
        options.min_nloc = min_nloc;
        options.min_threads = min_threads;
        options.workers = workers;
        if (!rules_path.empty()) {
          options.rules = RuleTable::load(rules_path);
          options.rules_source = rules_path;
        }
        auto result = std::make_unique<PyAnalysis>();
        {
          py::gil_scoped_release release;
          result->analysis = clonescope::analyze(corpus, options);
        }
        return result;
      },
      py::arg("corpus"), py::arg("format") = "jsonl", py::arg("min_nloc") = 20,
      py::arg("min_threads") = 2, py::arg("rules_path") = "", py::arg("workers") = 0,
      "Run the full pipeline over corpus text.");
}
