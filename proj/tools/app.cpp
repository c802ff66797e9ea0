#include "app.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "clsim/embeddings.hpp"
#include "clsim/error.hpp"
#include "clsim/evaluation.hpp"
#include "clsim/optimizer.hpp"
#include "clsim/pos_weights.hpp"

namespace clsim::app {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- configuration ------------------------------------------------------------

std::vector<MethodId> parse_method_list(const std::string& list) {
    std::vector<MethodId> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (item.empty()) continue;
        auto m = parse_method(item);
        if (!m) throw std::invalid_argument("unknown method '" + item + "'");
        if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    if (out.empty()) throw std::invalid_argument("no methods given");
    return out;
}

namespace {

const std::set<std::string> kConfigKeys = {
    "embeddings", "dictionary", "tag_mapping", "pos_weights", "fusion_weights", "corpora",
    "methods", "m", "folds", "seed", "granularity", "out", "cts_k", "cts_overlap",
    "cts_neighbor_lang", "asa_mu", "asa_sigma", "lowercase_fallback", "tune_budget", "restarts",
    "global_tuning", "overall", "tree_min_leaf", "tree_confidence", "tree_prune",
    "negatives_per_positive", "bins", "histogram_sample"};

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

Granularity granularity_from(const std::string& s) {
    auto g = parse_granularity(s);
    if (!g) throw std::invalid_argument("unknown granularity '" + s + "'");
    return *g;
}

std::string file_token(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            c = '_';
    return s;
}

std::string substitute(std::string pattern, const std::string& corpus, Granularity g) {
    auto replace = [&pattern](const std::string& key, const std::string& value) {
        for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos))
            pattern.replace(pos, key.size(), value), pos += value.size();
    };
    replace("{corpus}", file_token(corpus));
    replace("{granularity}", std::string(to_string(g)));
    return pattern;
}

bool has_placeholder(const std::string& s) {
    return s.find("{corpus}") != std::string::npos || s.find("{granularity}") != std::string::npos;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!kConfigKeys.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");

    RunConfig c;
    try {
        if (j.contains("embeddings")) c.embeddings = resolve(base_dir, j["embeddings"].get<std::string>());
        if (j.contains("dictionary")) c.dictionary = resolve(base_dir, j["dictionary"].get<std::string>());
        if (j.contains("tag_mapping")) c.tag_mapping = resolve(base_dir, j["tag_mapping"].get<std::string>());
        if (j.contains("pos_weights"))
            c.pos_weights = resolve(base_dir, j["pos_weights"].get<std::string>()).string();
        if (j.contains("fusion_weights"))
            c.fusion_weights = resolve(base_dir, j["fusion_weights"].get<std::string>()).string();
        if (j.contains("corpora")) {
            for (const auto& entry : j["corpora"]) {
                CorpusSpec spec;
                spec.path = resolve(base_dir, entry.at("path").get<std::string>());
                spec.name = entry.value("name", spec.path.stem().string());
                spec.granularity = granularity_from(entry.value("granularity", "sentence"));
                c.corpora.push_back(std::move(spec));
            }
        }
        if (j.contains("methods")) {
            std::string joined;
            for (const auto& m : j["methods"]) joined += m.get<std::string>() + ",";
            c.methods = parse_method_list(joined);
        }
        if (j.contains("m")) c.m = j["m"].get<std::size_t>();
        if (j.contains("folds")) c.folds = j["folds"].get<std::size_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("granularity")) {
            auto g = j["granularity"].get<std::string>();
            if (g != "all") c.granularity = granularity_from(g);
        }
        if (j.contains("out")) c.out = resolve(base_dir, j["out"].get<std::string>());
        if (j.contains("cts_k")) c.cts.k = j["cts_k"].get<std::size_t>();
        if (j.contains("cts_overlap")) {
            auto o = j["cts_overlap"].get<std::string>();
            if (o == "max") c.cts.overlap = BagOverlap::max_normalized;
            else if (o == "jaccard") c.cts.overlap = BagOverlap::jaccard;
            else throw std::invalid_argument("cts_overlap must be 'max' or 'jaccard'");
        }
        if (j.contains("cts_neighbor_lang")) c.cts.neighbor_lang = j["cts_neighbor_lang"].get<std::string>();
        if (j.contains("asa_mu")) c.asa.mu = j["asa_mu"].get<double>();
        if (j.contains("asa_sigma")) c.asa.sigma = j["asa_sigma"].get<double>();
        if (j.contains("lowercase_fallback")) c.lowercase_fallback = j["lowercase_fallback"].get<bool>();
        if (j.contains("tune_budget")) c.tune_budget = j["tune_budget"].get<std::size_t>();
        if (j.contains("restarts")) c.restarts = j["restarts"].get<std::size_t>();
        if (j.contains("global_tuning")) c.global_tuning = j["global_tuning"].get<bool>();
        if (j.contains("overall")) c.overall = j["overall"].get<bool>();
        if (j.contains("tree_min_leaf")) c.tree.min_leaf = j["tree_min_leaf"].get<std::size_t>();
        if (j.contains("tree_confidence")) c.tree.confidence = j["tree_confidence"].get<double>();
        if (j.contains("tree_prune")) c.tree.prune = j["tree_prune"].get<bool>();
        if (j.contains("negatives_per_positive"))
            c.negatives_per_positive = j["negatives_per_positive"].get<double>();
        if (j.contains("bins")) c.bins = j["bins"].get<std::size_t>();
        if (j.contains("histogram_sample")) c.histogram_sample = j["histogram_sample"].get<std::size_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

void validate(const RunConfig& c) {
    if (c.m == 0) throw std::invalid_argument("m must be at least 1");
    if (c.folds == 0) throw std::invalid_argument("folds must be at least 1");
    if (c.methods.empty()) throw std::invalid_argument("no methods selected");
    if (c.cts.k == 0) throw std::invalid_argument("cts_k must be at least 1");
    if (!(c.asa.sigma > 0.0)) throw std::invalid_argument("asa_sigma must be positive");
    if (c.bins == 0) throw std::invalid_argument("bins must be at least 1");
    auto must_exist = [](const fs::path& p, const char* what) {
        if (!fs::exists(p))
            throw std::invalid_argument(std::string(what) + " '" + p.string() + "' does not exist");
    };
    if (c.embeddings) must_exist(*c.embeddings, "embeddings file");
    if (c.dictionary) must_exist(*c.dictionary, "dictionary file");
    if (c.tag_mapping) must_exist(*c.tag_mapping, "tag mapping file");
    if (c.pos_weights && !has_placeholder(*c.pos_weights)) must_exist(*c.pos_weights, "POS weights file");
    if (c.fusion_weights && !has_placeholder(*c.fusion_weights))
        must_exist(*c.fusion_weights, "fusion weights file");
    for (const auto& spec : c.corpora) must_exist(spec.path, "corpus file");

    const bool needs_space = std::any_of(c.methods.begin(), c.methods.end(), [](MethodId m) {
        return m == MethodId::CL_CTS_WE || m == MethodId::CL_WES || m == MethodId::CL_WESS;
    });
    if (needs_space && !c.embeddings)
        throw std::invalid_argument("the selected methods need an 'embeddings' file");
    if (std::count(c.methods.begin(), c.methods.end(), MethodId::CL_ASA) && !c.dictionary)
        throw std::invalid_argument("CL-ASA needs a 'dictionary' file");
}

void OutputSet::commit() const {
    std::vector<fs::path> written;
    try {
        fs::create_directories(dir_);
        for (const auto& [name, content] : files_) {
            const fs::path target = dir_ / name;
            const fs::path tmp = dir_ / (name + ".tmp");
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
                out << content;
                if (!out.flush()) throw std::runtime_error("cannot write '" + tmp.string() + "'");
            }
            fs::rename(tmp, target);
            written.push_back(target);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        for (const auto& [name, content] : files_) fs::remove(dir_ / (name + ".tmp"), ec);
        throw;
    }
}

// ---- shared run state -----------------------------------------------------------

namespace {

struct LoadedCorpus {
    AlignedPairCorpus corpus;
    Granularity granularity;
};

std::string granularity_name(Granularity g) { return std::string(to_string(g)); }

class Session {
public:
    Session(const RunConfig& config, std::ostream& log) : config_(config), log_(log) {
        validate(config);
        if (config.embeddings) {
            log_ << "loading embeddings " << config.embeddings->string() << '\n';
            space_ = std::make_shared<const EmbeddingSpace>(
                load_embeddings(*config.embeddings, {config.lowercase_fallback}));
        }
        if (config.dictionary)
            dictionary_ = std::make_shared<const BilingualDictionary>(load_dictionary(*config.dictionary));
        if (config.tag_mapping) mapping_ = load_tag_mapping(*config.tag_mapping);
    }

    const RunConfig& config() const { return config_; }
    std::ostream& log() { return log_; }
    const std::shared_ptr<const EmbeddingSpace>& space() const { return space_; }

    std::vector<LoadedCorpus> load_corpora() const {
        if (config_.corpora.empty()) throw std::invalid_argument("no corpora configured");
        std::vector<LoadedCorpus> out;
        for (const auto& spec : config_.corpora) {
            if (config_.granularity && spec.granularity != *config_.granularity) continue;
            out.push_back({parse_corpus(spec.path, spec.granularity,
                                        mapping_ ? &*mapping_ : nullptr, spec.name),
                           spec.granularity});
        }
        if (out.empty()) throw std::invalid_argument("no corpus matches the requested granularity");
        if (config_.overall) {
            for (auto g : {Granularity::chunk, Granularity::sentence}) {
                std::vector<AlignedPair> pooled;
                std::size_t members = 0;
                for (const auto& lc : out) {
                    if (lc.granularity != g || lc.corpus.name() == "Overall") continue;
                    ++members;
                    for (auto pair : lc.corpus.pairs()) {
                        pair.source.id = lc.corpus.name() + "/" + pair.source.id;
                        pair.target.id = pair.source.id;
                        pooled.push_back(std::move(pair));
                    }
                }
                if (members >= 2) out.push_back({AlignedPairCorpus("Overall", std::move(pooled)), g});
            }
        }
        return out;
    }

    Resources base_resources() const {
        Resources r;
        r.space = space_;
        r.dictionary = dictionary_;
        r.cts = config_.cts;
        r.asa = config_.asa;
        return r;
    }

    TuningOptions tuning_options() const {
        TuningOptions t;
        t.m = config_.m;
        t.base_seed = config_.seed;
        t.budget = config_.tune_budget;
        t.nelder_mead.random_restarts = config_.restarts;
        return t;
    }

    /// CL-WESS weights for one corpus: from the configured file, or tuned on
    /// its tuning folds (jointly over `all` when tuning globally).
    PosWeights pos_weights_for(const LoadedCorpus& lc, const std::vector<LoadedCorpus>& all,
                               OutputSet* outputs) {
        if (config_.pos_weights)
            return load_pos_weights(substitute(*config_.pos_weights, lc.corpus.name(), lc.granularity));
        const std::string key = config_.global_tuning ? std::string("*")
                                                      : lc.corpus.name() + "|" + granularity_name(lc.granularity);
        auto it = tuned_.find(key);
        if (it != tuned_.end()) return it->second;
        if (!space_) throw MissingResourceError("POS weight tuning requires an embedding space");

        std::vector<const AlignedPairCorpus*> targets;
        if (config_.global_tuning)
            for (const auto& c : all) targets.push_back(&c.corpus);
        else
            targets.push_back(&lc.corpus);
        log_ << "tuning POS weights for " << (config_.global_tuning ? "all corpora" : key) << '\n';
        auto tuning = tune_pos_weights(*space_, targets, tuning_options());
        if (outputs) {
            const std::string name = config_.global_tuning
                                         ? std::string("pos_weights.tsv")
                                         : "pos_weights_" + file_token(lc.corpus.name()) + "_" +
                                               granularity_name(lc.granularity) + ".tsv";
            std::ostringstream w;
            write_pos_weights(w, tuning.weights);
            outputs->file(name) = w.str();
        }
        return tuned_.emplace(key, tuning.weights).first->second;
    }

    Resources resources_for(const LoadedCorpus& lc, const std::vector<LoadedCorpus>& all,
                            OutputSet* outputs) {
        auto r = base_resources();
        if (std::count(config_.methods.begin(), config_.methods.end(), MethodId::CL_WESS))
            r.pos_weights = pos_weights_for(lc, all, outputs);
        return r;
    }

private:
    const RunConfig& config_;
    std::ostream& log_;
    std::shared_ptr<const EmbeddingSpace> space_;
    std::shared_ptr<const BilingualDictionary> dictionary_;
    std::optional<TagMapping> mapping_;
    std::map<std::string, PosWeights> tuned_;
};

std::string trace_text(const OptimizationResult& result, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "evaluation\tvalue";
    for (const auto& n : names) out << '\t' << n;
    out << '\n';
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", result.trace[i].second);
        out << i << '\t' << buf;
        for (double x : result.trace[i].first) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out << '\t' << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::vector<MethodMatrix> member_matrices(const std::vector<MethodId>& methods,
                                          const std::vector<CellScorer>& scorers, std::size_t n,
                                          std::size_t m, std::uint64_t seed) {
    const auto layout = sample_layout(n, m, seed);
    std::vector<MethodMatrix> out;
    for (std::size_t i = 0; i < methods.size(); ++i)
        out.push_back({methods[i], fill_matrix(layout, scorers[i], std::string(to_string(methods[i])))});
    return out;
}

std::string corpus_suffix(const LoadedCorpus& lc) {
    return file_token(lc.corpus.name()) + "_" + granularity_name(lc.granularity);
}

}  // namespace

// ---- commands -------------------------------------------------------------------

void cmd_evaluate(const RunConfig& config, std::ostream& log) {
    Session session(config, log);
    OutputSet outputs(config.out);
    const auto corpora = session.load_corpora();

    std::vector<ReportRow> rows;
    std::ostringstream folds;
    write_fold_details_header(folds);
    for (const auto& lc : corpora) {
        auto resources = session.resources_for(lc, corpora, &outputs);
        const auto g = granularity_name(lc.granularity);
        for (auto method : config.methods) {
            log << "evaluating " << to_string(method) << " on " << lc.corpus.name() << " (" << g << ")\n";
            auto results = run_folds(method, resources, lc.corpus, config.folds, config.m, config.seed);
            const std::string name(to_string(method));
            rows.push_back(summarize(name, lc.corpus.name(), g, results));
            write_fold_details(folds, name, lc.corpus.name(), g, results);
        }
    }
    std::ostringstream report, table;
    write_report(report, rows);
    write_table(table, rows);
    outputs.file("report.tsv") = report.str();
    outputs.file("folds.tsv") = folds.str();
    outputs.file("table.tsv") = table.str();
    outputs.commit();
}

void cmd_tune(const RunConfig& config, TuneTarget target, std::ostream& log) {
    Session session(config, log);
    OutputSet outputs(config.out);
    const auto corpora = session.load_corpora();

    if (target == TuneTarget::pos_weights) {
        if (!session.space()) throw std::invalid_argument("POS weight tuning needs an 'embeddings' file");
        std::vector<std::string> names;
        for (auto tag : kAllUniversalTags) names.emplace_back(to_string(tag));
        auto emit = [&](const std::string& suffix, const PosWeightTuning& t) {
            std::ostringstream w;
            write_pos_weights(w, t.weights);
            outputs.file("pos_weights" + suffix + ".tsv") = w.str();
            outputs.file("tune_trace_pos" + suffix + ".tsv") = trace_text(t.result, names);
            log << "best tuning-fold F1 " << t.result.best_value << " after "
                << t.result.evaluations_used << " evaluations\n";
        };
        if (config.global_tuning) {
            std::vector<const AlignedPairCorpus*> all;
            for (const auto& lc : corpora) all.push_back(&lc.corpus);
            emit("", tune_pos_weights(*session.space(), all, session.tuning_options()));
        } else {
            for (const auto& lc : corpora) {
                log << "tuning POS weights on " << lc.corpus.name() << '\n';
                emit("_" + corpus_suffix(lc),
                     tune_pos_weights(*session.space(), lc.corpus, session.tuning_options()));
            }
        }
        outputs.commit();
        return;
    }

    std::vector<std::string> names;
    for (auto m : config.methods) names.emplace_back(to_string(m));
    const std::size_t tuning_folds = std::min(config.folds, kTuningFolds);
    std::vector<std::vector<MethodMatrix>> pooled;
    for (const auto& lc : corpora) {
        auto resources = session.resources_for(lc, corpora, nullptr);
        std::vector<CellScorer> scorers;
        for (auto m : config.methods) scorers.push_back(prepare_scorer(m, resources, lc.corpus));
        std::vector<std::vector<MethodMatrix>> folds;
        for (std::size_t k = 0; k < tuning_folds; ++k)
            folds.push_back(member_matrices(config.methods, scorers, lc.corpus.size(), config.m,
                                            config.seed + k));
        if (config.global_tuning) {
            for (auto& f : folds) pooled.push_back(std::move(f));
            continue;
        }
        log << "tuning fusion weights on " << lc.corpus.name() << '\n';
        auto t = tune_fusion_weights(folds, config.tune_budget, config.seed,
                                     {.random_restarts = config.restarts});
        std::ostringstream w;
        write_fusion_weights(w, t.weights);
        outputs.file("fusion_weights_" + corpus_suffix(lc) + ".tsv") = w.str();
        outputs.file("tune_trace_fusion_" + corpus_suffix(lc) + ".tsv") = trace_text(t.result, names);
    }
    if (config.global_tuning) {
        auto t = tune_fusion_weights(pooled, config.tune_budget, config.seed,
                                     {.random_restarts = config.restarts});
        std::ostringstream w;
        write_fusion_weights(w, t.weights);
        outputs.file("fusion_weights.tsv") = w.str();
        outputs.file("tune_trace_fusion.tsv") = trace_text(t.result, names);
    }
    outputs.commit();
}

void cmd_fuse(const RunConfig& config, FuseMode mode, std::ostream& log) {
    if (mode == FuseMode::weighted && !config.fusion_weights)
        throw std::invalid_argument("weighted fusion needs a fusion weights file (--weights)");
    Session session(config, log);
    OutputSet outputs(config.out);
    const auto corpora = session.load_corpora();
    const std::string label = mode == FuseMode::average    ? "average-fusion"
                              : mode == FuseMode::weighted ? "weighted-fusion"
                                                           : "decision-tree";

    std::vector<ReportRow> rows;
    std::ostringstream folds_out, roots;
    write_fold_details_header(folds_out);
    roots << "corpus\tgranularity\troot_attributes\n";
    for (const auto& lc : corpora) {
        const auto g = granularity_name(lc.granularity);
        auto resources = session.resources_for(lc, corpora, &outputs);
        std::vector<CellScorer> scorers;
        for (auto m : config.methods) scorers.push_back(prepare_scorer(m, resources, lc.corpus));
        auto members_for = [&](std::size_t k) {
            return member_matrices(config.methods, scorers, lc.corpus.size(), config.m, config.seed + k);
        };

        std::optional<FusionWeights> weights;
        if (mode == FuseMode::weighted)
            weights = load_fusion_weights(substitute(*config.fusion_weights, lc.corpus.name(), lc.granularity));

        std::optional<DecisionTree> tree;
        if (mode == FuseMode::tree) {
            std::vector<std::vector<MethodMatrix>> tuning;
            for (std::size_t k = 0; k < std::min(config.folds, kTuningFolds); ++k)
                tuning.push_back(members_for(k));
            auto training = training_rows(tuning, config.seed, config.negatives_per_positive);
            log << "training C4.5 on " << training.size() << " rows of " << lc.corpus.name() << '\n';
            tree = train_c45(training, config.tree);
            outputs.file("tree_" + corpus_suffix(lc) + ".txt") = serialize_tree(*tree);
            roots << lc.corpus.name() << '\t' << g << '\t';
            auto attrs = root_attributes(*tree, 3);
            for (std::size_t i = 0; i < attrs.size(); ++i) roots << (i ? "," : "") << to_string(attrs[i]);
            roots << '\n';
        }

        std::vector<FoldResult> results;
        for (std::size_t k = 0; k < config.folds; ++k) {
            auto members = members_for(k);
            DistanceMatrix fused = mode == FuseMode::average    ? average_fused_matrix(members)
                                   : mode == FuseMode::weighted ? weighted_fused_matrix(members, *weights)
                                                                : tree_fused_matrix(members, *tree);
            results.push_back(evaluate_fold(fused, k));
        }
        log << label << " on " << lc.corpus.name() << " (" << g << ") done\n";
        rows.push_back(summarize(label, lc.corpus.name(), g, results));
        write_fold_details(folds_out, label, lc.corpus.name(), g, results);
    }
    std::ostringstream report;
    write_report(report, rows);
    outputs.file("fusion_report.tsv") = report.str();
    outputs.file("fusion_folds.tsv") = folds_out.str();
    if (mode == FuseMode::tree) outputs.file("tree_roots.tsv") = roots.str();
    outputs.commit();
}

void cmd_histogram(const RunConfig& config, MethodId method, std::ostream& log) {
    RunConfig single = config;
    single.methods = {method};
    Session session(single, log);
    OutputSet outputs(config.out);
    const auto corpora = session.load_corpora();
    for (const auto& lc : corpora) {
        auto resources = session.resources_for(lc, corpora, nullptr);
        auto matrix = build_matrix(method, resources, lc.corpus, config.m, config.seed);
        auto h = histogram(matrix, config.bins, config.seed, config.histogram_sample);
        std::ostringstream out;
        write_histogram(out, h);
        outputs.file("histogram_" + file_token(std::string(to_string(method))) + "_" +
                     corpus_suffix(lc) + ".tsv") = out.str();
    }
    outputs.commit();
}

void cmd_neighbors(const RunConfig& config, const std::string& word, std::size_t k,
                   const std::optional<std::string>& lang, std::ostream& out) {
    if (!config.embeddings) throw std::invalid_argument("neighbors needs an embeddings file");
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    auto colon = word.find(':');
    if (colon == std::string::npos || colon == 0)
        throw std::invalid_argument("word must be written lang:surface, e.g. en:cat");
    const auto space = load_embeddings(*config.embeddings, {config.lowercase_fallback});
    const std::string wlang = word.substr(0, colon), surface = word.substr(colon + 1);
    auto row = space.find(wlang, surface);
    if (!row) throw std::invalid_argument("'" + word + "' is not in the embedding space");
    for (const auto& n : top_k_neighbors(space, space.vector(*row), k, lang, space.key(*row))) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", n.cosine);
        out << n.lang << ':' << n.surface << '\t' << buf << '\n';
    }
}

}  // namespace clsim::app
