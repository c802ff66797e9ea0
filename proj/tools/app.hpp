#pragma once

// Command implementations behind the `clsim` executable.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/fusion.hpp"
#include "clsim/methods.hpp"

namespace clsim::app {

struct CorpusSpec {
    std::filesystem::path path;
    std::string name;
    Granularity granularity = Granularity::sentence;
};

/// Everything a run needs. Loaded from a JSON file; command-line flags
/// override individual fields. Weight-file paths may contain `{corpus}` and
/// `{granularity}` placeholders.
struct RunConfig {
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> dictionary;
    std::optional<std::filesystem::path> tag_mapping;
    std::optional<std::string> pos_weights;
    std::optional<std::string> fusion_weights;
    std::vector<CorpusSpec> corpora;
    std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
    std::size_t m = 1000;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::optional<Granularity> granularity;  ///< unset: every granularity
    std::filesystem::path out = "out";

    // method settings
    CtsOptions cts;
    AsaOptions asa;
    bool lowercase_fallback = false;

    // tuning and fusion settings
    std::size_t tune_budget = 1000;
    std::size_t restarts = 3;
    bool global_tuning = false;
    bool overall = false;
    C45Options tree;
    double negatives_per_positive = 1.0;
    std::size_t bins = 20;
    std::size_t histogram_sample = 1000;
};

/// Relative paths are resolved against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

/// Comma-separated method names; throws std::invalid_argument naming the
/// first unknown one.
std::vector<MethodId> parse_method_list(const std::string& list);

/// Checks ranges and that every referenced file exists.
void validate(const RunConfig& config);

enum class TuneTarget { pos_weights, fusion_weights };
enum class FuseMode { average, weighted, tree };

/// Each command writes its files under config.out and returns normally, or
/// throws and leaves no output behind.
void cmd_evaluate(const RunConfig& config, std::ostream& log);
void cmd_tune(const RunConfig& config, TuneTarget target, std::ostream& log);
void cmd_fuse(const RunConfig& config, FuseMode mode, std::ostream& log);
void cmd_histogram(const RunConfig& config, MethodId method, std::ostream& log);
void cmd_neighbors(const RunConfig& config, const std::string& word, std::size_t k,
                   const std::optional<std::string>& lang, std::ostream& out);

/// Collects output files in memory and writes them together; a failed
/// commit removes whatever it had already written.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string& file(const std::string& name) { return files_[name]; }
    void commit() const;

private:
    std::filesystem::path dir_;
    std::map<std::string, std::string> files_;
};

}  // namespace clsim::app
