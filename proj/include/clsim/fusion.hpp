#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clsim/evaluation.hpp"
#include "clsim/methods.hpp"

namespace clsim {

/// Per-pair scores of several methods, optionally labelled match/mismatch.
class ScoreVector {
public:
    ScoreVector() = default;
    /// Throws PreconditionError on a repeated method or a non-finite score.
    explicit ScoreVector(std::vector<std::pair<MethodId, double>> scores,
                         std::optional<bool> label = std::nullopt);

    const std::vector<std::pair<MethodId, double>>& scores() const noexcept { return scores_; }
    std::optional<bool> label() const noexcept { return label_; }
    std::size_t size() const noexcept { return scores_.size(); }
    bool empty() const noexcept { return scores_.empty(); }

    std::optional<double> find(MethodId method) const;
    /// Throws PreconditionError when the method is absent.
    double at(MethodId method) const;

private:
    std::vector<std::pair<MethodId, double>> scores_;
    std::optional<bool> label_;
};

/// Nonnegative method weights, normalized to sum to 1.
class FusionWeights {
public:
    FusionWeights() = default;
    /// Throws PreconditionError if a weight is negative or non-finite or all
    /// weights are zero.
    explicit FusionWeights(std::map<MethodId, double> raw);

    static FusionWeights uniform(std::span<const MethodId> methods);

    std::optional<double> weight(MethodId method) const;
    const std::map<MethodId, double>& weights() const noexcept { return weights_; }

private:
    std::map<MethodId, double> weights_;
};

/// Lines `method <TAB> weight`.
FusionWeights read_fusion_weights(std::istream& in, const std::string& source_name = "<stream>");
FusionWeights load_fusion_weights(const std::filesystem::path& path);
void write_fusion_weights(std::ostream& out, const FusionWeights& weights);

double average_fusion(const ScoreVector& v);

/// Convex combination of the scores. Uniform weights reproduce
/// average_fusion exactly.
double weighted_fusion(const ScoreVector& v, const FusionWeights& w);

// ---- C4.5 -------------------------------------------------------------------

struct C45Options {
    std::size_t min_leaf = 2;
    double confidence = 0.25;
    bool prune = true;
};

/// Binary decision tree over method scores. Internal nodes send
/// `score <= threshold` left.
class DecisionTree {
public:
    struct Node {
        bool leaf = true;
        MethodId attribute = MethodId::CL_C3G;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        std::size_t match_count = 0;
        std::size_t mismatch_count = 0;

        bool predicts_match() const noexcept { return match_count > mismatch_count; }
        bool operator==(const Node&) const = default;
    };

    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes);

    static DecisionTree single_leaf(std::size_t match_count, std::size_t mismatch_count);

    const Node& root() const { return nodes_.front(); }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t leaf_count() const;
    std::size_t depth() const;

    /// Leaf reached by `v`. Throws PreconditionError on a missing attribute.
    const Node& route(const ScoreVector& v) const;

    bool operator==(const DecisionTree&) const = default;

private:
    std::vector<Node> nodes_;
};

struct Classification {
    bool match = false;
    double confidence = 0.0;      ///< majority fraction of the leaf
    double match_fraction = 0.0;  ///< fraction of match rows in the leaf
};

/// Information gain of splitting `rows` at `attribute <= threshold` divided
/// by the split information; 0 when the split information is 0.
double gain_ratio(std::span<const ScoreVector> rows, MethodId attribute, double threshold);

DecisionTree train_c45(std::span<const ScoreVector> rows, const C45Options& options = {});

Classification classify(const DecisionTree& tree, const ScoreVector& v);

/// Distinct attributes tested in the first `depth` levels, breadth first.
std::vector<MethodId> root_attributes(const DecisionTree& tree, std::size_t depth);

/// Indented text, one node per line: `METHOD <= threshold` or
/// `match|mismatch (match_count, mismatch_count)`; left child first.
void write_tree(std::ostream& out, const DecisionTree& tree);
std::string serialize_tree(const DecisionTree& tree);
DecisionTree read_tree(std::istream& in);
DecisionTree parse_tree(const std::string& text);

/// C4.5's pessimistic extra-error estimate for `errors` mistakes among `n`
/// cases at confidence `cf`.
double pessimistic_extra_errors(double n, double errors, double cf);

// ---- fusion over distance matrices ----------------------------------------

/// One method's matrix for a fold. All matrices fused together must share
/// their layout (same corpus, same seed).
struct MethodMatrix {
    MethodId method;
    DistanceMatrix matrix;
};

ScoreVector score_vector_at(std::span<const MethodMatrix> members, std::size_t r, std::size_t c,
                            std::optional<bool> label = std::nullopt);

DistanceMatrix average_fused_matrix(std::span<const MethodMatrix> members);
DistanceMatrix weighted_fused_matrix(std::span<const MethodMatrix> members,
                                     const FusionWeights& weights);
/// Cell score = match fraction of the leaf the cell's score vector reaches.
DistanceMatrix tree_fused_matrix(std::span<const MethodMatrix> members, const DecisionTree& tree);

/// Labelled rows from tuning-fold matrices: relevant cells are matches,
/// other cells mismatches, the majority class downsampled so that
/// negatives = round(negatives_per_positive * positives) where possible.
std::vector<ScoreVector> training_rows(std::span<const std::vector<MethodMatrix>> folds,
                                       std::uint64_t seed, double negatives_per_positive = 1.0);

}  // namespace clsim
