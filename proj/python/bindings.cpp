// Python bindings for the core library and the run commands.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "app.hpp"
#include "clsim/corpus.hpp"
#include "clsim/embeddings.hpp"
#include "clsim/error.hpp"
#include "clsim/evaluation.hpp"
#include "clsim/methods.hpp"
#include "clsim/optimizer.hpp"
#include "clsim/pos_weights.hpp"

namespace py = pybind11;
using namespace clsim;

namespace {

MethodId method_from(const std::string& name) {
    auto m = parse_method(name);
    if (!m) throw std::invalid_argument("unknown method '" + name + "'");
    return *m;
}

Granularity granularity_from(const std::string& name) {
    auto g = parse_granularity(name);
    if (!g) throw std::invalid_argument("unknown granularity '" + name + "'");
    return *g;
}

PosWeights weights_from(const std::map<std::string, double>& raw) {
    std::array<double, kNumUniversalTags> values;
    values.fill(1.0);
    for (const auto& [name, w] : raw) {
        auto tag = parse_universal_tag(name);
        if (!tag) throw std::invalid_argument("unknown tag '" + name + "'");
        values[tag_index(*tag)] = w;
    }
    return PosWeights(values);
}

std::map<std::string, double> weights_to(const PosWeights& w) {
    std::map<std::string, double> out;
    for (auto tag : kAllUniversalTags) out[std::string(to_string(tag))] = w[tag];
    return out;
}

Resources resources(const std::shared_ptr<EmbeddingSpace>& space,
                    const std::shared_ptr<BilingualDictionary>& dictionary,
                    const std::optional<std::map<std::string, double>>& pos_weights,
                    std::size_t cts_k) {
    Resources r;
    r.space = space;
    r.dictionary = dictionary;
    if (pos_weights) r.pos_weights = weights_from(*pos_weights);
    r.cts.k = cts_k;
    return r;
}

std::string unit_text(const TextualUnit& u) {
    std::string s;
    for (const auto& t : u.tokens) {
        if (!s.empty()) s += ' ';
        s += t.surface + '/' + std::string(to_string(t.upos));
    }
    return s;
}

py::dict fold_dict(const FoldResult& f) {
    py::dict d;
    d["fold"] = f.fold_index;
    d["seed"] = f.seed;
    d["threshold"] = f.threshold;
    d["precision"] = f.precision;
    d["recall"] = f.recall;
    d["f1"] = f.f1;
    d["tuning"] = f.tuning;
    return d;
}

app::RunConfig config_from(const std::filesystem::path& path,
                           const std::optional<std::filesystem::path>& out) {
    auto c = app::load_config(path);
    if (out) c.out = *out;
    app::validate(c);
    return c;
}

}  // namespace

PYBIND11_MODULE(_clsim, m) {
    m.doc() = "Cross-language textual similarity detection";

    // Common base for the library's own errors; no translator of its own.
    auto base = py::reinterpret_steal<py::object>(
        PyErr_NewException("clsim._clsim.ClsimError", PyExc_RuntimeError, nullptr));
    m.attr("ClsimError") = base;
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<UnknownTagError>(m, "UnknownTagError", base.ptr());
    py::register_exception<MissingResourceError>(m, "MissingResourceError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

    m.attr("METHODS") = [] {
        std::vector<std::string> names;
        for (auto id : kAllMethods) names.emplace_back(to_string(id));
        return names;
    }();

    py::class_<EmbeddingSpace, std::shared_ptr<EmbeddingSpace>>(m, "EmbeddingSpace")
        .def_property_readonly("dim", &EmbeddingSpace::dim)
        .def_property_readonly("duplicate_count", &EmbeddingSpace::duplicate_count)
        .def("__len__", &EmbeddingSpace::size)
        .def("languages", &EmbeddingSpace::languages)
        .def("vector",
             [](const EmbeddingSpace& s, const std::string& lang, const std::string& surface) {
                 auto v = s.lookup(lang, surface);
                 if (!v) throw py::key_error(lang + ":" + surface);
                 return std::vector<double>(v->begin(), v->end());
             })
        .def(
            "neighbors",
            [](const EmbeddingSpace& s, const std::string& lang, const std::string& surface,
               std::size_t k, std::optional<std::string> filter) {
                auto v = s.lookup(lang, surface);
                if (!v) throw py::key_error(lang + ":" + surface);
                std::vector<std::tuple<std::string, std::string, double>> out;
                for (const auto& n : top_k_neighbors(s, *v, k, filter, EmbeddingKey{lang, surface}))
                    out.emplace_back(n.lang, n.surface, n.cosine);
                return out;
            },
            py::arg("lang"), py::arg("surface"), py::arg("k") = 10, py::arg("lang_filter") = py::none());

    m.def(
        "load_embeddings",
        [](const std::filesystem::path& path, bool lowercase_fallback) {
            return std::make_shared<EmbeddingSpace>(load_embeddings(path, {lowercase_fallback}));
        },
        py::arg("path"), py::arg("lowercase_fallback") = false);

    py::class_<BilingualDictionary, std::shared_ptr<BilingualDictionary>>(m, "BilingualDictionary")
        .def("__len__", &BilingualDictionary::size)
        .def("probability", &BilingualDictionary::probability);
    m.def("load_dictionary", [](const std::filesystem::path& path) {
        return std::make_shared<BilingualDictionary>(load_dictionary(path));
    });

    py::class_<AlignedPairCorpus, std::shared_ptr<AlignedPairCorpus>>(m, "Corpus")
        .def_property_readonly("name", &AlignedPairCorpus::name)
        .def_property_readonly("source_lang", &AlignedPairCorpus::source_lang)
        .def_property_readonly("target_lang", &AlignedPairCorpus::target_lang)
        .def("__len__", &AlignedPairCorpus::size)
        .def("pair", [](const AlignedPairCorpus& c, std::size_t i) {
            if (i >= c.size()) throw py::index_error("pair index out of range");
            return std::make_tuple(c[i].source.id, unit_text(c[i].source), unit_text(c[i].target));
        });
    m.def(
        "load_corpus",
        [](const std::filesystem::path& path, const std::string& granularity, const std::string& name) {
            return std::make_shared<AlignedPairCorpus>(
                parse_corpus(path, granularity_from(granularity), nullptr, name));
        },
        py::arg("path"), py::arg("granularity") = "sentence", py::arg("name") = "");

    m.def("load_pos_weights",
          [](const std::filesystem::path& path) { return weights_to(load_pos_weights(path)); });

    m.def(
        "score",
        [](const std::string& method, const AlignedPairCorpus& corpus, std::size_t row,
           std::size_t col, std::shared_ptr<EmbeddingSpace> space,
           std::shared_ptr<BilingualDictionary> dictionary,
           std::optional<std::map<std::string, double>> pos_weights, std::size_t cts_k) {
            if (row >= corpus.size() || col >= corpus.size())
                throw py::index_error("pair index out of range");
            return score_pair(method_from(method), resources(space, dictionary, pos_weights, cts_k),
                              corpus[row].source, corpus[col].target);
        },
        py::arg("method"), py::arg("corpus"), py::arg("row"), py::arg("col"),
        py::arg("space") = nullptr, py::arg("dictionary") = nullptr,
        py::arg("pos_weights") = py::none(), py::arg("cts_k") = 10,
        "Similarity of source unit `row` and target unit `col`.");

    m.def(
        "evaluate",
        [](const std::string& method, const AlignedPairCorpus& corpus,
           std::shared_ptr<EmbeddingSpace> space, std::shared_ptr<BilingualDictionary> dictionary,
           std::optional<std::map<std::string, double>> pos_weights, std::size_t folds,
           std::size_t m_cols, std::uint64_t seed, std::size_t cts_k) {
            std::vector<FoldResult> results;
            {
                py::gil_scoped_release release;
                results = run_folds(method_from(method),
                                    resources(space, dictionary, pos_weights, cts_k), corpus,
                                    folds, m_cols, seed);
            }
            py::list out;
            for (const auto& f : results) out.append(fold_dict(f));
            return out;
        },
        py::arg("method"), py::arg("corpus"), py::arg("space") = nullptr,
        py::arg("dictionary") = nullptr, py::arg("pos_weights") = py::none(),
        py::arg("folds") = 10, py::arg("m") = 1000, py::arg("seed") = 1, py::arg("cts_k") = 10,
        "Per-fold threshold, precision, recall and F1.");

    m.def(
        "sweep_threshold",
        [](const std::vector<std::vector<double>>& scores, const std::vector<std::size_t>& gold_col) {
            if (scores.empty()) throw py::value_error("empty matrix");
            const std::size_t cols = scores.front().size();
            std::vector<double> flat;
            for (const auto& row : scores) {
                if (row.size() != cols) throw py::value_error("ragged matrix");
                flat.insert(flat.end(), row.begin(), row.end());
            }
            auto choice = sweep_threshold(
                DistanceMatrix::from_scores(scores.size(), cols, std::move(flat), gold_col));
            return py::make_tuple(choice.threshold, choice.scores.precision, choice.scores.recall,
                                  choice.scores.f1);
        },
        py::arg("scores"), py::arg("gold_col"),
        "Best (threshold, precision, recall, f1) for a matrix whose gold cells are given per row.");

    m.def(
        "tune_pos_weights",
        [](const EmbeddingSpace& space, const AlignedPairCorpus& corpus, std::size_t m_cols,
           std::uint64_t seed, std::size_t budget) {
            TuningOptions options;
            options.m = m_cols;
            options.base_seed = seed;
            options.budget = budget;
            PosWeightTuning tuned;
            {
                py::gil_scoped_release release;
                tuned = tune_pos_weights(space, corpus, options);
            }
            return py::make_tuple(weights_to(tuned.weights), tuned.result.best_value);
        },
        py::arg("space"), py::arg("corpus"), py::arg("m") = 1000, py::arg("seed") = 1,
        py::arg("budget") = 300, "Tuned weights (largest = 1) and their tuning-fold F1.");

    m.def(
        "run_evaluate",
        [](const std::filesystem::path& config, std::optional<std::filesystem::path> out) {
            auto c = config_from(config, out);
            std::ostringstream log;
            app::cmd_evaluate(c, log);
            return c.out;
        },
        py::arg("config"), py::arg("out") = py::none(),
        "Runs the evaluate command of a JSON config; returns the output directory.");

    m.def(
        "run_fuse",
        [](const std::filesystem::path& config, const std::string& mode,
           std::optional<std::filesystem::path> out) {
            auto c = config_from(config, out);
            std::ostringstream log;
            const auto fm = mode == "average"    ? app::FuseMode::average
                            : mode == "weighted" ? app::FuseMode::weighted
                            : mode == "tree"     ? app::FuseMode::tree
                                                 : throw std::invalid_argument("unknown fusion mode '" + mode + "'");
            app::cmd_fuse(c, fm, log);
            return c.out;
        },
        py::arg("config"), py::arg("mode") = "average", py::arg("out") = py::none());
}
