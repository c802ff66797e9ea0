#include "clsim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "clsim/error.hpp"
#include "strings.hpp"

namespace clsim {

DistanceMatrix::DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> scores,
                               std::vector<std::size_t> targets, std::vector<std::size_t> gold_col,
                               std::uint64_t seed, std::string label)
    : rows_(rows), cols_(cols), scores_(std::move(scores)), targets_(std::move(targets)),
      gold_col_(std::move(gold_col)), seed_(seed), label_(std::move(label)) {
    if (scores_.size() != rows_ * cols_ || targets_.size() != rows_ * cols_ ||
        gold_col_.size() != rows_)
        throw PreconditionError("distance matrix parts disagree on its shape");
    for (std::size_t r = 0; r < rows_; ++r) {
        if (gold_col_[r] >= cols_ || targets_[r * cols_ + gold_col_[r]] != r)
            throw PreconditionError("row " + std::to_string(r) + " has no gold cell");
    }
    if (!std::all_of(scores_.begin(), scores_.end(), [](double s) { return std::isfinite(s); }))
        throw PreconditionError("distance matrix holds a non-finite score");
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) relevant_count_ += relevant(r, c) ? 1 : 0;
}

DistanceMatrix DistanceMatrix::from_scores(std::size_t rows, std::size_t cols,
                                           std::vector<double> scores,
                                           std::vector<std::size_t> gold_col, std::string label) {
    std::vector<std::size_t> targets(rows * cols, kNoTarget);
    for (std::size_t r = 0; r < rows && r < gold_col.size(); ++r)
        if (gold_col[r] < cols) targets[r * cols + gold_col[r]] = r;
    return DistanceMatrix(rows, cols, std::move(scores), std::move(targets), std::move(gold_col),
                          0, std::move(label));
}

DistanceMatrix DistanceMatrix::with_scores(std::vector<double> scores, std::string label) const {
    return DistanceMatrix(rows_, cols_, std::move(scores), targets_, gold_col_, seed_,
                          std::move(label));
}

SampleLayout sample_layout(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n == 0) throw PreconditionError("cannot sample from an empty corpus");
    if (m == 0) throw PreconditionError("m must be at least 1");
    SampleLayout layout{n, m, std::vector<std::size_t>(n * m), std::vector<std::size_t>(n, 0),
                        seed};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        layout.targets[r * m] = r;
        for (std::size_t c = 1; c < m; ++c) layout.targets[r * m + c] = pick(rng);
    }
    return layout;
}

DistanceMatrix fill_matrix(const SampleLayout& layout, const CellScorer& scorer,
                           std::string label) {
    std::vector<double> scores(layout.targets.size());
    for (std::size_t r = 0; r < layout.rows; ++r)
        for (std::size_t c = 0; c < layout.cols; ++c)
            scores[r * layout.cols + c] = scorer(r, layout.targets[r * layout.cols + c]);
    return DistanceMatrix(layout.rows, layout.cols, std::move(scores), layout.targets,
                          layout.gold_col, layout.seed, std::move(label));
}

DistanceMatrix build_matrix(const CellScorer& scorer, std::size_t n, std::size_t m,
                            std::uint64_t seed, std::string label) {
    return fill_matrix(sample_layout(n, m, seed), scorer, std::move(label));
}

DistanceMatrix build_matrix(MethodId method, const Resources& resources,
                            const AlignedPairCorpus& corpus, std::size_t m, std::uint64_t seed) {
    if (corpus.empty()) throw PreconditionError("cannot build a matrix from an empty corpus");
    return build_matrix(prepare_scorer(method, resources, corpus), corpus.size(), m, seed,
                        std::string(to_string(method)));
}

Prf prf_from_counts(std::size_t relevant_retrieved, std::size_t retrieved,
                    std::size_t total_relevant) {
    Prf out;
    if (retrieved > 0)
        out.precision = static_cast<double>(relevant_retrieved) / static_cast<double>(retrieved);
    if (total_relevant > 0)
        out.recall = static_cast<double>(relevant_retrieved) / static_cast<double>(total_relevant);
    // Harmonic mean from the counts: one rounding, so f1 <= max(p, r) holds exactly.
    if (relevant_retrieved > 0)
        out.f1 = 2.0 * static_cast<double>(relevant_retrieved) /
                 static_cast<double>(retrieved + total_relevant);
    return out;
}

Prf prf(const DistanceMatrix& matrix, double threshold) {
    std::size_t retrieved = 0, hits = 0;
    for (std::size_t r = 0; r < matrix.rows(); ++r)
        for (std::size_t c = 0; c < matrix.cols(); ++c)
            if (matrix.score(r, c) >= threshold) {
                ++retrieved;
                if (matrix.relevant(r, c)) ++hits;
            }
    return prf_from_counts(hits, retrieved, matrix.relevant_count());
}

ThresholdChoice sweep_threshold(const DistanceMatrix& matrix) {
    if (matrix.cells() == 0) throw PreconditionError("threshold sweep over an empty matrix");
    struct Cell {
        double score;
        bool relevant;
    };
    std::vector<Cell> cells;
    cells.reserve(matrix.cells());
    for (std::size_t r = 0; r < matrix.rows(); ++r)
        for (std::size_t c = 0; c < matrix.cols(); ++c)
            cells.push_back({matrix.score(r, c), matrix.relevant(r, c)});
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return a.score > b.score; });

    ThresholdChoice best{cells.front().score, {}};
    bool have_best = false;
    std::size_t retrieved = 0, hits = 0;
    for (std::size_t i = 0; i < cells.size();) {
        const double t = cells[i].score;
        while (i < cells.size() && cells[i].score == t) {
            ++retrieved;
            hits += cells[i].relevant ? 1 : 0;
            ++i;
        }
        Prf here = prf_from_counts(hits, retrieved, matrix.relevant_count());
        // Descending scan: strict improvement keeps the larger threshold on ties.
        if (!have_best || here.f1 > best.scores.f1) {
            best = {t, here};
            have_best = true;
        }
    }
    return best;
}

FoldResult evaluate_fold(const DistanceMatrix& matrix, std::size_t fold_index) {
    auto choice = sweep_threshold(matrix);
    return {fold_index,         matrix.seed(),        choice.threshold,
            choice.scores.precision, choice.scores.recall, choice.scores.f1,
            fold_index < kTuningFolds};
}

std::vector<FoldResult> run_folds(const CellScorer& scorer, std::size_t n, std::size_t folds,
                                  std::size_t m, std::uint64_t base_seed) {
    if (folds == 0) throw PreconditionError("folds must be at least 1");
    std::vector<FoldResult> out;
    out.reserve(folds);
    for (std::size_t k = 0; k < folds; ++k)
        out.push_back(evaluate_fold(build_matrix(scorer, n, m, base_seed + k), k));
    return out;
}

std::vector<FoldResult> run_folds(MethodId method, const Resources& resources,
                                  const AlignedPairCorpus& corpus, std::size_t folds,
                                  std::size_t m, std::uint64_t base_seed) {
    if (corpus.empty()) throw PreconditionError("cannot evaluate an empty corpus");
    return run_folds(prepare_scorer(method, resources, corpus), corpus.size(), folds, m,
                     base_seed);
}

std::vector<std::size_t> reporting_folds(std::size_t folds) {
    std::vector<std::size_t> out;
    const std::size_t first = folds >= kTuningFolds + 2 ? kTuningFolds : 0;
    for (std::size_t k = first; k < folds; ++k) out.push_back(k);
    return out;
}

Interval confidence_interval(std::span<const double> values) {
    if (values.size() < 2)
        throw PreconditionError("a confidence interval needs at least 2 values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sd / std::sqrt(n)};
}

ReportRow summarize(const std::string& method, const std::string& corpus,
                    const std::string& granularity, const std::vector<FoldResult>& results) {
    std::vector<double> f1s;
    for (std::size_t k : reporting_folds(results.size())) f1s.push_back(results[k].f1);
    ReportRow row{method, corpus, granularity, 0.0, 0.0, f1s.size()};
    if (f1s.size() >= 2) {
        auto ci = confidence_interval(f1s);
        row.mean_f1 = ci.mean;
        row.ci_half_width = ci.half_width;
    } else if (f1s.size() == 1) {
        row.mean_f1 = f1s.front();
    }
    return row;
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "method\tcorpus\tgranularity\tmean_f1\tci_half_width\tfolds\n";
    for (const auto& r : rows)
        out << r.method << '\t' << r.corpus << '\t' << r.granularity << '\t'
            << detail::format_fixed(r.mean_f1, 6) << '\t'
            << detail::format_fixed(r.ci_half_width, 6) << '\t' << r.folds << '\n';
}

std::vector<ReportRow> read_report(std::istream& in) {
    std::vector<ReportRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line_no == 1) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != 6) throw ParseError("<report>", line_no, "expected 6 fields");
        rows.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]),
                        std::stod(std::string(f[3])), std::stod(std::string(f[4])),
                        static_cast<std::size_t>(std::stoul(std::string(f[5])))});
    }
    return rows;
}

void write_fold_details_header(std::ostream& out) {
    out << "method\tcorpus\tgranularity\tfold\trole\tseed\tthreshold\tprecision\trecall\tf1\n";
}

void write_fold_details(std::ostream& out, const std::string& method, const std::string& corpus,
                        const std::string& granularity, const std::vector<FoldResult>& results) {
    for (const auto& r : results)
        out << method << '\t' << corpus << '\t' << granularity << '\t' << r.fold_index << '\t'
            << (r.tuning ? "tune" : "eval") << '\t' << r.seed << '\t'
            << detail::format_exact(r.threshold) << '\t' << detail::format_fixed(r.precision, 6)
            << '\t' << detail::format_fixed(r.recall, 6) << '\t' << detail::format_fixed(r.f1, 6)
            << '\n';
}

void write_table(std::ostream& out, const std::vector<ReportRow>& rows) {
    auto ordered_unique = [&rows](auto field) {
        std::vector<std::string> seen;
        for (const auto& r : rows)
            if (std::find(seen.begin(), seen.end(), r.*field) == seen.end())
                seen.push_back(r.*field);
        return seen;
    };
    // Chunk block before sentence block whatever the input order.
    auto granularities = ordered_unique(&ReportRow::granularity);
    auto rank = [](const std::string& g) {
        const auto parsed = parse_granularity(g);
        return parsed ? static_cast<int>(*parsed) : 2;
    };
    std::stable_sort(granularities.begin(), granularities.end(),
                     [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });
    const auto corpora = ordered_unique(&ReportRow::corpus);
    const auto methods = ordered_unique(&ReportRow::method);

    for (const auto& g : granularities) {
        out << "# " << g << " level\n";
        out << "Methods";
        for (const auto& c : corpora) out << '\t' << c << " (%)";
        out << '\n';
        for (const auto& m : methods) {
            bool any = false;
            std::string line = m;
            for (const auto& c : corpora) {
                auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
                    return r.granularity == g && r.corpus == c && r.method == m;
                });
                line += '\t';
                if (it == rows.end()) {
                    line += '-';
                    continue;
                }
                any = true;
                line += detail::format_fixed(100.0 * it->mean_f1, 2) + " ± " +
                        detail::format_fixed(100.0 * it->ci_half_width, 3);
            }
            if (any) out << line << '\n';
        }
    }
}

HistogramPair histogram(const DistanceMatrix& matrix, std::size_t bins, std::uint64_t seed,
                        std::size_t sample_size) {
    if (bins == 0) throw PreconditionError("histogram needs at least one bin");
    std::mt19937_64 rng(seed);

    // Partial Fisher-Yates: first k of `pool` become a uniform sample.
    auto sample = [&rng](std::vector<double> pool, std::size_t k) {
        k = std::min(k, pool.size());
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        pool.resize(k);
        return pool;
    };

    std::vector<double> gold, other;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        gold.push_back(matrix.score(r, matrix.gold_col(r)));
        for (std::size_t c = 0; c < matrix.cols(); ++c)
            if (!matrix.relevant(r, c)) other.push_back(matrix.score(r, c));
    }
    auto positives = gold.size() > sample_size ? sample(std::move(gold), sample_size) : gold;
    auto negatives = sample(std::move(other), positives.size());

    HistogramPair h;
    h.positives.assign(bins, 0);
    h.negatives.assign(bins, 0);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto* v : {&positives, &negatives})
        for (double s : *v) {
            lo = first ? s : std::min(lo, s);
            hi = first ? s : std::max(hi, s);
            first = false;
        }
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b)
        h.bin_edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
    auto bin_of = [&](double s) -> std::size_t {
        if (width <= 0.0) return 0;
        auto b = static_cast<std::size_t>((s - lo) / width);
        return std::min(b, bins - 1);
    };
    for (double s : positives) ++h.positives[bin_of(s)];
    for (double s : negatives) ++h.negatives[bin_of(s)];
    return h;
}

void write_histogram(std::ostream& out, const HistogramPair& h) {
    out << "bin_lo\tbin_hi\tpositives\tnegatives\n";
    for (std::size_t b = 0; b < h.positives.size(); ++b)
        out << detail::format_exact(h.bin_edges[b]) << '\t'
            << detail::format_exact(h.bin_edges[b + 1]) << '\t' << h.positives[b] << '\t'
            << h.negatives[b] << '\n';
}

}  // namespace clsim
