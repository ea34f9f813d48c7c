#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "parley/config.hpp"
#include "parley/corpus.hpp"
#include "parley/diag.hpp"
#include "parley/embed.hpp"
#include "parley/errors.hpp"
#include "parley/issues_latent.hpp"
#include "parley/issues_query.hpp"
#include "parley/pipeline.hpp"
#include "parley/stopwords.hpp"
#include "parley/version.hpp"

namespace py = pybind11;
using namespace parley;

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

std::set<std::string> stopword_set(const std::optional<std::vector<std::string>>& words) {
    if (!words) return default_stopwords();
    return {words->begin(), words->end()};
}

py::dict comment_dict(const Comment& c) {
    py::dict d;
    d["id"] = c.id;
    d["text"] = c.text;
    d["source_file"] = c.meta.source_file;
    d["year"] = c.meta.year;
    d["month"] = c.meta.month;
    d["participant"] = c.participant;
    d["organisation"] = c.organisation;
    d["multi_organisations"] = c.multi_organisations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dialogue-note structuring and issue-position measurement";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "ParleyError");

    m.def("tokenize", &tokenize, py::arg("text"),
          "Lowercased word tokens of length >= 2.");

    m.def(
        "clean_text",
        [](const std::string& raw,
           const std::map<std::string, std::string>& abbreviations,
           const std::map<std::string, std::string>& entities,
           const std::vector<std::string>& phrases,
           const std::vector<std::string>& strip_patterns) {
            NormalizationConfig cfg;
            cfg.abbreviation_map = abbreviations;
            cfg.entity_map = entities;
            cfg.phrase_list = phrases;
            cfg.strip_patterns = strip_patterns;
            return clean_text(raw, cfg);
        },
        py::arg("raw"), py::arg("abbreviations") = std::map<std::string, std::string>{},
        py::arg("entities") = std::map<std::string, std::string>{},
        py::arg("phrases") = std::vector<std::string>{},
        py::arg("strip_patterns") = std::vector<std::string>{},
        "Normalizes raw note text.");

    m.def(
        "parse_notes",
        [](const std::string& raw, const std::string& source_file, int year,
           int month, long long start_id) {
            SessionMeta meta{source_file, year, month};
            py::list out;
            for (const auto& c : parse_notes(raw, meta, {}, start_id))
                out.append(comment_dict(c));
            return out;
        },
        py::arg("raw"), py::arg("source_file"), py::arg("year"), py::arg("month"),
        py::arg("start_id") = 0,
        "Parses one session's notes into comment records.");

    m.def("default_stopwords",
          [] {
              const auto& s = default_stopwords();
              return std::vector<std::string>(s.begin(), s.end());
          });

    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def_static("load",
                    [](const std::string& path) { return EmbeddingTable::load(path); },
                    py::arg("path"))
        .def_property_readonly("dimension", &EmbeddingTable::dimension)
        .def_property_readonly("size", &EmbeddingTable::size)
        .def("contains", &EmbeddingTable::contains, py::arg("term"))
        .def("vector",
             [](const EmbeddingTable& t, const std::string& term) {
                 return to_std(t.vector_of(term));
             },
             py::arg("term"))
        .def(
            "neighbors",
            [](const EmbeddingTable& t, const std::string& term, double min_sim,
               double raise_to, int cap) {
                std::vector<std::pair<std::string, double>> out;
                for (const auto& n : neighbors(t, term, min_sim, raise_to, cap))
                    out.emplace_back(n.term, n.similarity);
                return out;
            },
            py::arg("term"), py::arg("min_sim") = 0.4, py::arg("raise_to") = 0.6,
            py::arg("cap") = 1000,
            "Similar terms above the threshold, raised when too many qualify.");

    m.def(
        "cosine",
        [](const std::vector<double>& u, const std::vector<double>& v) {
            return cosine(to_eigen(u), to_eigen(v));
        },
        py::arg("u"), py::arg("v"));

    m.def(
        "pool",
        [](const EmbeddingTable& table, const std::vector<std::string>& tokens,
           bool remove_stopwords,
           const std::optional<std::vector<std::string>>& stopwords)
            -> std::optional<std::vector<double>> {
            PoolingOptions opts;
            opts.remove_stopwords = remove_stopwords;
            opts.stopword_list = stopword_set(stopwords);
            const auto v = pool_text(table, tokens, opts);
            if (!v) return std::nullopt;
            return to_std(*v);
        },
        py::arg("table"), py::arg("tokens"), py::arg("remove_stopwords") = true,
        py::arg("stopwords") = std::nullopt,
        "Mean vector of the in-vocabulary tokens, or None.");

    m.def(
        "expand_issues",
        [](const std::map<std::string, std::vector<std::string>>& catalog,
           const EmbeddingTable& table, double min_sim, double raise_to,
           int cap) {
            IssueCatalog cat;
            for (const auto& [name, seeds] : catalog)
                cat.issues.push_back({name, seeds});
            QueryParams params{min_sim, raise_to, cap};
            py::dict out;
            for (const auto& iss : expand_catalog(cat, table, params).issues) {
                py::list terms;
                for (const auto& t : iss.expanded)
                    terms.append(py::make_tuple(t.term, t.similarity,
                                                t.source_seed));
                out[py::str(iss.name)] = terms;
            }
            return out;
        },
        py::arg("catalog"), py::arg("table"), py::arg("min_sim") = 0.4,
        py::arg("raise_to") = 0.6, py::arg("cap") = 1000,
        "Expands each issue's seed terms through the embedding table.");

    m.def(
        "topic_keywords_from_texts",
        [](const std::vector<std::string>& texts, int k, int n_keywords,
           int max_iter,
           const std::optional<std::vector<std::string>>& stopwords) {
            std::vector<Comment> corpus;
            for (std::size_t i = 0; i < texts.size(); ++i) {
                Comment c;
                c.id = static_cast<long long>(i);
                c.text = texts[i];
                corpus.push_back(std::move(c));
            }
            VocabConfig vc;
            vc.stopword_list = stopword_set(stopwords);
            NMFParams params;
            params.k = k;
            params.max_iter = max_iter;
            const auto model = fit_nmf(build_tfidf(corpus, vc), params);
            return topic_keywords(model, n_keywords);
        },
        py::arg("texts"), py::arg("k"), py::arg("n_keywords") = 10,
        py::arg("max_iter") = 200, py::arg("stopwords") = std::nullopt,
        "Fits the topic model over raw texts and returns keyword lists.");

    m.def(
        "anisotropy",
        [](const EmbeddingTable& table) { return anisotropy(table).counts; },
        py::arg("table"),
        "How often each dimension is a vector's largest component.");

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config,
           const std::optional<std::string>& out,
           const std::optional<std::uint64_t>& seed,
           const std::optional<std::string>& source,
           const std::optional<std::string>& baseline, bool emit_svg) {
            CliOverrides ov;
            ov.out_dir = out;
            ov.seed = seed;
            ov.source = source;
            ov.baseline = baseline;
            ov.emit_svg = emit_svg;
            return run_command(subcommand, config, ov);
        },
        py::arg("subcommand"), py::arg("config"), py::arg("out") = std::nullopt,
        py::arg("seed") = std::nullopt, py::arg("source") = std::nullopt,
        py::arg("baseline") = std::nullopt, py::arg("emit_svg") = false,
        "Runs one pipeline subcommand; returns the process exit code.");
}
