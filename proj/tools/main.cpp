#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "app.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string methods;
    std::optional<std::size_t> m;
    std::optional<std::size_t> folds;
    std::optional<std::uint64_t> seed;
    std::string granularity;
    std::string out;
    std::string embeddings;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--methods", o.methods, "comma-separated methods, e.g. CL-C3G,CL-WES");
    cmd->add_option("--m", o.m, "columns per distance matrix");
    cmd->add_option("--folds", o.folds, "number of folds");
    cmd->add_option("--seed", o.seed, "base seed; fold k uses seed + k");
    cmd->add_option("--granularity", o.granularity, "chunk, sentence or all");
    cmd->add_option("--out", o.out, "output directory");
}

clsim::app::RunConfig make_config(const Overrides& o) {
    using namespace clsim::app;
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (!o.methods.empty()) c.methods = parse_method_list(o.methods);
    if (o.m) c.m = *o.m;
    if (o.folds) c.folds = *o.folds;
    if (o.seed) c.seed = *o.seed;
    if (!o.granularity.empty()) {
        if (o.granularity == "all") c.granularity.reset();
        else if (auto g = clsim::parse_granularity(o.granularity)) c.granularity = *g;
        else throw std::invalid_argument("unknown granularity '" + o.granularity + "'");
    }
    if (!o.out.empty()) c.out = o.out;
    if (!o.embeddings.empty()) c.embeddings = o.embeddings;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace clsim::app;
    CLI::App app{"Cross-language textual similarity detection with word embeddings"};
    app.require_subcommand(1);
    Overrides o;

    auto* evaluate = app.add_subcommand("evaluate", "score every method on every corpus");
    add_common(evaluate, o);

    auto* tune = app.add_subcommand("tune", "optimise POS or fusion weights on folds 0-1");
    add_common(tune, o);
    std::string target = "pos-weights";
    tune->add_option("--target", target, "pos-weights or fusion-weights")
        ->check(CLI::IsMember({"pos-weights", "fusion-weights"}));

    auto* fuse = app.add_subcommand("fuse", "combine methods and evaluate the fusion");
    add_common(fuse, o);
    std::string mode = "average";
    std::string weights;
    fuse->add_option("--mode", mode, "average, weighted or tree")
        ->check(CLI::IsMember({"average", "weighted", "tree"}));
    fuse->add_option("--weights", weights, "fusion weights file (weighted mode)");

    auto* hist = app.add_subcommand("histogram", "score distributions of matches and mismatches");
    add_common(hist, o);
    std::string hist_method;
    std::size_t bins = 0;
    hist->add_option("--method", hist_method, "method to histogram")->required();
    hist->add_option("--bins", bins, "number of bins");

    auto* neighbors = app.add_subcommand("neighbors", "print the nearest words of lang:word");
    add_common(neighbors, o);
    std::string word;
    std::size_t k = 10;
    std::string lang;
    neighbors->add_option("word", word, "query, e.g. en:cat")->required();
    neighbors->add_option("--k", k, "number of neighbours");
    neighbors->add_option("--lang", lang, "restrict neighbours to one language");
    neighbors->add_option("--embeddings", o.embeddings, "embeddings file");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = make_config(o);
        if (evaluate->parsed()) {
            cmd_evaluate(config, std::cerr);
        } else if (tune->parsed()) {
            cmd_tune(config, target == "pos-weights" ? TuneTarget::pos_weights
                                                     : TuneTarget::fusion_weights,
                     std::cerr);
        } else if (fuse->parsed()) {
            if (!weights.empty()) config.fusion_weights = weights;
            cmd_fuse(config,
                     mode == "average"    ? FuseMode::average
                     : mode == "weighted" ? FuseMode::weighted
                                          : FuseMode::tree,
                     std::cerr);
        } else if (hist->parsed()) {
            auto method = clsim::parse_method(hist_method);
            if (!method) throw std::invalid_argument("unknown method '" + hist_method + "'");
            if (bins) config.bins = bins;
            cmd_histogram(config, *method, std::cerr);
        } else if (neighbors->parsed()) {
            cmd_neighbors(config, word, k,
                          lang.empty() ? std::nullopt : std::optional<std::string>(lang),
                          std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "clsim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
