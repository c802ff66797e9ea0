#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "app.hpp"
#include "clsim/error.hpp"
#include "clsim/evaluation.hpp"
#include "clsim/pos_weights.hpp"
#include "fixtures.hpp"
#include "synthetic.hpp"

using namespace clsim;
using namespace clsim::app;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fixtures::TempDir dir;
    fs::path config;

    explicit Workspace(const synthetic::Data& data, const std::string& extra = "") {
        synthetic::write_embeddings(dir.path() / "vectors.txt", data);
        synthetic::write_corpus(dir.path() / "wiki.tsv", data);
        synthetic::write_dictionary(dir.path() / "dict.tsv", data);
        config = dir.write("run.json",
                           "{\n"
                           "  \"embeddings\": \"vectors.txt\",\n"
                           "  \"dictionary\": \"dict.tsv\",\n"
                           "  \"corpora\": [{\"path\": \"wiki.tsv\", \"name\": \"Wiki\", \"granularity\": \"sentence\"}],\n"
                           "  \"m\": 20, \"folds\": 4, \"seed\": 3, \"tune_budget\": 60,\n"
                           "  \"out\": \"out\"" + extra + "\n}\n");
    }
    fs::path out() const { return dir.path() / "out"; }
    RunConfig load() const { return load_config(config); }
};

std::vector<ReportRow> report(const fs::path& p) {
    std::istringstream in(fixtures::slurp(p));
    return read_report(in);
}

int run_exe(const std::string& args, const fs::path& err) {
    const std::string cmd = std::string(CLSIM_EXE) + " " + args + " 2>" + err.string() + " >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    auto c = parse_config(R"({"embeddings": "v.txt", "methods": ["CL-C3G", "cl_wes"], "m": 5,
                              "corpora": [{"path": "c.tsv"}]})",
                          "/data");
    CHECK(*c.embeddings == fs::path("/data/v.txt"));
    CHECK(c.methods == std::vector<MethodId>{MethodId::CL_C3G, MethodId::CL_WES});
    CHECK(c.m == 5);
    CHECK(c.folds == 10);
    REQUIRE(c.corpora.size() == 1);
    CHECK(c.corpora[0].name == "c");

    CHECK_THROWS_AS(parse_config(R"({"colour": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("{"), std::invalid_argument);
    try {
        parse_config(R"({"methods": ["CL-WES", "CL-FOO"]})");
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("CL-FOO") != std::string::npos);
    }
}

TEST_CASE("validation") {
    RunConfig c;
    c.methods = {MethodId::CL_WES};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c.methods = {MethodId::CL_C3G};
    CHECK_NOTHROW(validate(c));
    c.m = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c.m = 1;
    c.corpora.push_back({"/nonexistent/corpus.tsv", "x", Granularity::chunk});
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("evaluate: one method, one corpus, two folds") {
    Workspace ws(synthetic::translation(1, 30, 100, 8, 0.1));
    auto c = ws.load();
    c.methods = {MethodId::CL_WES};
    c.folds = 2;
    std::ostringstream log;
    cmd_evaluate(c, log);
    auto rows = report(ws.out() / "report.tsv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].method == "CL-WES");
    CHECK(rows[0].corpus == "Wiki");
    CHECK(rows[0].granularity == "sentence");
    CHECK(rows[0].folds == 2);
    CHECK(fs::exists(ws.out() / "folds.tsv"));
    CHECK(fs::exists(ws.out() / "table.tsv"));
}

TEST_CASE("evaluate is byte-reproducible") {
    Workspace ws(synthetic::translation(2, 25, 80, 8, 0.2));
    auto c = ws.load();
    std::ostringstream log;
    cmd_evaluate(c, log);
    const auto first = fixtures::slurp(ws.out() / "report.tsv");
    const auto first_folds = fixtures::slurp(ws.out() / "folds.tsv");
    fs::remove_all(ws.out());
    cmd_evaluate(c, log);
    CHECK(fixtures::slurp(ws.out() / "report.tsv") == first);
    CHECK(fixtures::slurp(ws.out() / "folds.tsv") == first_folds);
    CHECK(report(ws.out() / "report.tsv").size() == 5);
    CHECK(fs::exists(ws.out() / "pos_weights_Wiki_sentence.tsv"));
}

TEST_CASE("tune: NOUN-dominant weights from the NOUN-signal corpus") {
    Workspace ws(synthetic::noun_signal(5, 60, 16), R"(, "tune_budget": 800, "m": 60, "seed": 21)");
    auto c = ws.load();
    std::ostringstream log;
    cmd_tune(c, TuneTarget::pos_weights, log);
    auto w = load_pos_weights(ws.out() / "pos_weights_Wiki_sentence.tsv");
    for (auto tag : kAllUniversalTags)
        if (tag != UniversalTag::NOUN) CHECK(w[tag] < w[UniversalTag::NOUN]);
    CHECK(fs::exists(ws.out() / "tune_trace_pos_Wiki_sentence.tsv"));

    const auto first = fixtures::slurp(ws.out() / "pos_weights_Wiki_sentence.tsv");
    fs::remove_all(ws.out());
    cmd_tune(c, TuneTarget::pos_weights, log);
    CHECK(fixtures::slurp(ws.out() / "pos_weights_Wiki_sentence.tsv") == first);
}

TEST_CASE("tune: fusion weights") {
    Workspace ws(synthetic::translation(3, 25, 80, 8, 0.2));
    auto c = ws.load();
    c.methods = {MethodId::CL_C3G, MethodId::CL_WES};
    std::ostringstream log;
    cmd_tune(c, TuneTarget::fusion_weights, log);
    auto w = load_fusion_weights(ws.out() / "fusion_weights_Wiki_sentence.tsv");
    CHECK(w.weights().size() == 2);
}

TEST_CASE("fuse: average over one method equals that method") {
    Workspace ws(synthetic::translation(4, 25, 80, 8, 0.3));
    auto c = ws.load();
    c.methods = {MethodId::CL_C3G};
    std::ostringstream log;
    cmd_evaluate(c, log);
    cmd_fuse(c, FuseMode::average, log);
    auto single = report(ws.out() / "report.tsv");
    auto fused = report(ws.out() / "fusion_report.tsv");
    REQUIRE(single.size() == 1);
    REQUIRE(fused.size() == 1);
    CHECK(fused[0].mean_f1 == single[0].mean_f1);
    CHECK(fused[0].ci_half_width == single[0].ci_half_width);
    CHECK(fused[0].folds == single[0].folds);
}

TEST_CASE("fuse: weighted mode needs a weights file") {
    Workspace ws(synthetic::translation(5, 20, 60, 8, 0.2));
    auto c = ws.load();
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_fuse(c, FuseMode::weighted, log), std::invalid_argument);
    c.fusion_weights = (ws.dir.path() / "missing.tsv").string();
    CHECK_THROWS_AS(cmd_fuse(c, FuseMode::weighted, log), std::invalid_argument);
    CHECK_FALSE(fs::exists(ws.out()));

    ws.dir.write("fw.tsv", "CL-C3G\t1\nCL-WES\t3\n");
    c.fusion_weights = (ws.dir.path() / "fw.tsv").string();
    c.methods = {MethodId::CL_C3G, MethodId::CL_WES};
    cmd_fuse(c, FuseMode::weighted, log);
    CHECK(report(ws.out() / "fusion_report.tsv")[0].method == "weighted-fusion");
}

TEST_CASE("fuse: tree mode writes the tree and its root attributes") {
    Workspace ws(synthetic::translation(6, 30, 90, 8, 0.6));
    auto c = ws.load();
    c.methods = {MethodId::CL_C3G, MethodId::CL_WES, MethodId::CL_ASA};
    std::ostringstream log;
    cmd_fuse(c, FuseMode::tree, log);
    auto tree = parse_tree(fixtures::slurp(ws.out() / "tree_Wiki_sentence.txt"));
    CHECK(tree.nodes().size() >= 1);
    const auto roots = fixtures::slurp(ws.out() / "tree_roots.tsv");
    CHECK(roots.rfind("corpus\tgranularity\troot_attributes\nWiki\tsentence\t", 0) == 0);
    CHECK(report(ws.out() / "fusion_report.tsv")[0].method == "decision-tree");
}

TEST_CASE("histogram: counts reconcile with the fold-0 matrix") {
    Workspace ws(synthetic::translation(7, 40, 120, 8, 0.05));
    auto c = ws.load();
    c.bins = 5;
    std::ostringstream log;
    cmd_histogram(c, MethodId::CL_WES, log);
    const auto text = fixtures::slurp(ws.out() / "histogram_CL-WES_Wiki_sentence.tsv");
    std::istringstream in(text);
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "bin_lo\tbin_hi\tpositives\tnegatives");
    std::size_t pos = 0, neg = 0, lines = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double lo, hi;
        std::size_t p, n;
        ls >> lo >> hi >> p >> n;
        pos += p;
        neg += n;
        ++lines;
    }
    CHECK(lines == 5);
    CHECK(pos == 40);
    CHECK(neg == 40);

    const auto data = synthetic::translation(7, 40, 120, 8, 0.05);
    Resources res;
    res.space = std::make_shared<const EmbeddingSpace>(data.space());
    auto matrix = build_matrix(MethodId::CL_WES, res, data.corpus(), c.m, c.seed);
    std::ostringstream direct;
    write_histogram(direct, histogram(matrix, 5, c.seed, c.histogram_sample));
    CHECK(direct.str() == text);

    fs::remove_all(ws.out());
    cmd_histogram(c, MethodId::CL_WES, log);
    CHECK(fixtures::slurp(ws.out() / "histogram_CL-WES_Wiki_sentence.tsv") == text);
}

TEST_CASE("neighbors") {
    fixtures::TempDir dir;
    auto vec = dir.write("v.txt", "3 2\nen:a 1 0\nen:b 0.9 0.1\nfr:c 0 1\n");
    RunConfig c;
    c.embeddings = vec;
    std::ostringstream out;
    cmd_neighbors(c, "en:a", 2, std::nullopt, out);
    CHECK(out.str() == "en:b\t0.993884\nfr:c\t0.000000\n");
    CHECK_THROWS_AS(cmd_neighbors(c, "en:zzz", 2, std::nullopt, out), std::invalid_argument);
    CHECK_THROWS_AS(cmd_neighbors(c, "nolang", 2, std::nullopt, out), std::invalid_argument);
}

TEST_CASE("failed commits leave nothing behind") {
    fixtures::TempDir dir;
    fs::create_directories(dir.path() / "out" / "b.tsv" / "blocker");
    OutputSet outputs(dir.path() / "out");
    outputs.file("a.tsv") = "a\n";
    outputs.file("b.tsv") = "b\n";
    CHECK_THROWS(outputs.commit());
    CHECK_FALSE(fs::exists(dir.path() / "out" / "a.tsv"));
    CHECK_FALSE(fs::exists(dir.path() / "out" / "a.tsv.tmp"));
}

TEST_CASE("executable: exit codes and messages") {
    const auto data = synthetic::translation(8, 20, 60, 8, 0.2);
    Workspace ws(data);
    const auto err = ws.dir.path() / "stderr.txt";
    const std::string cfg = "--config " + ws.config.string();

    CHECK(run_exe("evaluate " + cfg + " --methods CL-C3G,CL-WES --folds 2", err) == 0);
    CHECK(report(ws.out() / "report.tsv").size() == 2);

    const auto out2 = ws.dir.path() / "out2";
    CHECK(run_exe("evaluate " + cfg + " --methods CL-C3G,CL-NOPE --out " + out2.string(), err) == 1);
    CHECK(fixtures::slurp(err).find("unknown method 'CL-NOPE'") != std::string::npos);
    CHECK_FALSE(fs::exists(out2));

    CHECK(run_exe("fuse " + cfg + " --mode weighted --out " + out2.string(), err) == 1);
    CHECK(fixtures::slurp(err).find("fusion weights") != std::string::npos);
    CHECK_FALSE(fs::exists(out2));

    CHECK(run_exe("fuse " + cfg + " --mode weighted --weights " + (ws.dir.path() / "nope.tsv").string() +
                      " --out " + out2.string(), err) == 1);
    CHECK_FALSE(fs::exists(out2));

    CHECK(run_exe("histogram " + cfg + " --method CL-C3G --bins 4 --out " + out2.string(), err) == 0);
    CHECK(fs::exists(out2 / "histogram_CL-C3G_Wiki_sentence.tsv"));

    const auto& key = data.entries.front().first;
    CHECK(run_exe("neighbors --embeddings " + (ws.dir.path() / "vectors.txt").string() + " --k 3 " +
                      key.lang + ":" + key.surface,
                  err) == 0);
    CHECK(run_exe("bogus", err) != 0);
}
