#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/methods.hpp"

namespace clsim {

/// Marks a cell whose target is not a corpus unit (hand-built matrices).
inline constexpr std::size_t kNoTarget = std::numeric_limits<std::size_t>::max();

/// N x M grid of similarity scores. Row i compares source unit i with its
/// gold target (at gold_col[i]) and M-1 targets drawn with replacement.
/// A cell is relevant when its target is row i's own counterpart, so a
/// distractor that happens to redraw the gold unit is relevant as well.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> scores,
                   std::vector<std::size_t> targets, std::vector<std::size_t> gold_col,
                   std::uint64_t seed = 0, std::string label = {});

    /// Hand-built matrix: only the gold cells are relevant.
    static DistanceMatrix from_scores(std::size_t rows, std::size_t cols,
                                      std::vector<double> scores,
                                      std::vector<std::size_t> gold_col,
                                      std::string label = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t cells() const noexcept { return scores_.size(); }
    double score(std::size_t r, std::size_t c) const { return scores_[r * cols_ + c]; }
    std::size_t target(std::size_t r, std::size_t c) const { return targets_[r * cols_ + c]; }
    bool relevant(std::size_t r, std::size_t c) const { return target(r, c) == r; }
    std::size_t gold_col(std::size_t r) const { return gold_col_[r]; }
    std::size_t relevant_count() const noexcept { return relevant_count_; }
    std::span<const double> scores() const noexcept { return scores_; }
    std::span<const std::size_t> targets() const noexcept { return targets_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& label() const noexcept { return label_; }

    /// Same layout, different scores (used to build fused matrices).
    DistanceMatrix with_scores(std::vector<double> scores, std::string label) const;

    bool operator==(const DistanceMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> scores_;
    std::vector<std::size_t> targets_;
    std::vector<std::size_t> gold_col_;
    std::size_t relevant_count_ = 0;
    std::uint64_t seed_ = 0;
    std::string label_;
};

/// Column targets for n rows: gold in column 0, then m-1 uniform draws with
/// replacement from [0, n). Depends only on (n, m, seed), so every method
/// evaluated under the same seed sees the same layout.
struct SampleLayout {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> targets;
    std::vector<std::size_t> gold_col;
    std::uint64_t seed = 0;
};

SampleLayout sample_layout(std::size_t n, std::size_t m, std::uint64_t seed);

DistanceMatrix fill_matrix(const SampleLayout& layout, const CellScorer& scorer,
                           std::string label = {});

DistanceMatrix build_matrix(MethodId method, const Resources& resources,
                            const AlignedPairCorpus& corpus, std::size_t m, std::uint64_t seed);
DistanceMatrix build_matrix(const CellScorer& scorer, std::size_t n, std::size_t m,
                            std::uint64_t seed, std::string label = {});

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision/recall/F1 from raw counts; recall is relative to all relevant
/// cells.
Prf prf_from_counts(std::size_t relevant_retrieved, std::size_t retrieved,
                    std::size_t total_relevant);

/// Cells with score >= threshold are retrieved.
Prf prf(const DistanceMatrix& matrix, double threshold);

struct ThresholdChoice {
    double threshold = 0.0;
    Prf scores;
};

/// Exact F1 maximiser over the distinct cell scores; ties go to the larger
/// threshold.
ThresholdChoice sweep_threshold(const DistanceMatrix& matrix);

struct FoldResult {
    std::size_t fold_index = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool tuning = false;
};

inline constexpr std::size_t kTuningFolds = 2;

FoldResult evaluate_fold(const DistanceMatrix& matrix, std::size_t fold_index);

/// Fold k is built with seed base_seed + k. Folds 0 and 1 are tuning folds.
std::vector<FoldResult> run_folds(const CellScorer& scorer, std::size_t n, std::size_t folds,
                                  std::size_t m, std::uint64_t base_seed);
std::vector<FoldResult> run_folds(MethodId method, const Resources& resources,
                                  const AlignedPairCorpus& corpus, std::size_t folds,
                                  std::size_t m, std::uint64_t base_seed);

/// Folds that enter a report: the non-tuning folds when there are at least
/// two of them, otherwise every fold.
std::vector<std::size_t> reporting_folds(std::size_t folds);

struct Interval {
    double mean = 0.0;
    double half_width = 0.0;
};

/// Mean and 95% normal-approximation half width (1.96 s / sqrt(n)).
Interval confidence_interval(std::span<const double> values);

struct ReportRow {
    std::string method;
    std::string corpus;
    std::string granularity;
    double mean_f1 = 0.0;
    double ci_half_width = 0.0;
    std::size_t folds = 0;
};

ReportRow summarize(const std::string& method, const std::string& corpus,
                    const std::string& granularity, const std::vector<FoldResult>& results);

void write_report(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report(std::istream& in);

/// Per-fold detail lines for one (method, corpus, granularity).
void write_fold_details(std::ostream& out, const std::string& method, const std::string& corpus,
                        const std::string& granularity, const std::vector<FoldResult>& results);
void write_fold_details_header(std::ostream& out);

/// Methods as rows, sub-corpora as columns, `mean ± half` in percent; one
/// block per granularity.
void write_table(std::ostream& out, const std::vector<ReportRow>& rows);

struct HistogramPair {
    std::vector<double> bin_edges;
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
};

/// Gold-cell scores (at most `sample_size`, sampled when there are more)
/// against an equally sized uniform sample of non-relevant cells, binned
/// over [min, max] of all counted scores.
HistogramPair histogram(const DistanceMatrix& matrix, std::size_t bins, std::uint64_t seed,
                        std::size_t sample_size = 1000);

void write_histogram(std::ostream& out, const HistogramPair& h);

}  // namespace clsim
