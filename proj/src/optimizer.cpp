#include "clsim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "clsim/error.hpp"

namespace clsim {

namespace {

/// Budget-limited, clamping, trace-recording wrapper around the evaluator.
class Evaluator {
public:
    Evaluator(const ObjectiveSpec& spec, OptimizationResult& result)
        : spec_(spec), result_(result) {}

    bool exhausted() const { return result_.evaluations_used >= spec_.budget; }

    /// Value to minimise (negated objective), or nullopt once out of budget.
    std::optional<double> operator()(std::vector<double>& x) {
        if (exhausted()) return std::nullopt;
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = std::clamp(x[i], spec_.bounds[i].first, spec_.bounds[i].second);
        const double value = spec_.evaluator(x);
        ++result_.evaluations_used;
        result_.trace.emplace_back(x, value);
        if (result_.trace.size() == 1 || value > result_.best_value) {
            result_.best_value = value;
            result_.best_weights = x;
        }
        return -value;
    }

private:
    const ObjectiveSpec& spec_;
    OptimizationResult& result_;
};

struct Vertex {
    std::vector<double> x;
    double f;
};

/// One Nelder-Mead run from `start`. Returns false once the budget is gone.
bool nelder_mead(const ObjectiveSpec& spec, const NelderMeadOptions& options,
                 std::vector<double> start, Evaluator& eval) {
    const std::size_t n = spec.dimension();
    const double nd = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / nd;
    const double gamma = 0.75 - 1.0 / (2.0 * nd);
    const double delta = 1.0 - 1.0 / nd;
    const std::size_t cap = options.max_evals_per_dim * n;
    std::size_t used = 0;

    auto f = [&](std::vector<double>& x) -> std::optional<double> {
        ++used;
        return eval(x);
    };

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    {
        auto fx = f(start);
        if (!fx) return false;
        simplex.push_back({start, *fx});
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto x = start;
        const auto [lo, hi] = spec.bounds[i];
        const double step = options.initial_step * (hi - lo);
        x[i] = x[i] + step <= hi ? x[i] + step : x[i] - step;
        auto fx = f(x);
        if (!fx) return false;
        simplex.push_back({std::move(x), *fx});
    }

    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t v = 1; v <= n; ++v)
            for (std::size_t i = 0; i < n; ++i) {
                const double range = spec.bounds[i].second - spec.bounds[i].first;
                if (range > 0.0)
                    d = std::max(d, std::abs(simplex[v].x[i] - simplex[0].x[i]) / range);
            }
        return d;
    };
    auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = from[i] + t * (to[i] - from[i]);
        return x;
    };

    while (used < cap) {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (diameter() < options.x_tolerance) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / nd;
        auto& worst = simplex[n];

        auto xr = along(centroid, worst.x, -alpha);
        auto fr = f(xr);
        if (!fr) return false;

        if (*fr < simplex[0].f) {
            auto xe = along(centroid, xr, beta);
            auto fe = f(xe);
            if (!fe) return false;
            if (*fe < *fr) worst = {std::move(xe), *fe};
            else worst = {std::move(xr), *fr};
            continue;
        }
        if (*fr < simplex[n - 1].f) {
            worst = {std::move(xr), *fr};
            continue;
        }
        const bool outside = *fr < worst.f;
        auto xc = outside ? along(centroid, xr, gamma) : along(centroid, worst.x, gamma);
        auto fc = f(xc);
        if (!fc) return false;
        if (outside ? *fc <= *fr : *fc <= worst.f) {
            worst = {std::move(xc), *fc};
            continue;
        }
        for (std::size_t v = 1; v <= n; ++v) {
            auto xs = along(simplex[0].x, simplex[v].x, delta);
            auto fs = f(xs);
            if (!fs) return false;
            simplex[v] = {std::move(xs), *fs};
        }
    }
    return true;
}

}  // namespace

OptimizationResult optimize(const ObjectiveSpec& spec, std::span<const double> initial,
                            const NelderMeadOptions& options) {
    const std::size_t n = spec.dimension();
    if (n == 0) throw PreconditionError("optimisation needs at least one coordinate");
    if (!spec.evaluator) throw PreconditionError("optimisation needs an evaluator");
    if (initial.size() != n)
        throw PreconditionError("initial point has " + std::to_string(initial.size()) +
                                " coordinates, expected " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto [lo, hi] = spec.bounds[i];
        if (!(lo <= hi)) throw PreconditionError("empty bounds for coordinate " + std::to_string(i));
        if (!(initial[i] >= lo && initial[i] <= hi))
            throw PreconditionError("initial point lies outside the bounds at coordinate " +
                                    std::to_string(i));
    }
    if (spec.budget < n + 1)
        throw PreconditionError("budget of " + std::to_string(spec.budget) +
                                " evaluations cannot complete a first simplex of " +
                                std::to_string(n + 1) + " points");

    std::mt19937_64 rng(spec.seed);
    std::vector<std::vector<double>> starts{{initial.begin(), initial.end()}};
    for (std::size_t r = 0; r < options.random_restarts; ++r) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> u(spec.bounds[i].first, spec.bounds[i].second);
            x[i] = u(rng);
        }
        starts.push_back(std::move(x));
    }

    OptimizationResult result;
    Evaluator eval(spec, result);
    for (auto& start : starts)
        if (!nelder_mead(spec, options, start, eval)) break;
    return result;
}

// ---- POS weights --------------------------------------------------------------

PosWeightObjective::PosWeightObjective(const EmbeddingSpace& space,
                                       const AlignedPairCorpus& corpus, std::size_t m,
                                       std::uint64_t base_seed, std::size_t tuning_folds)
    : space_(space), corpus_(corpus) {
    if (corpus.empty()) throw PreconditionError("cannot tune on an empty corpus");
    if (tuning_folds == 0) throw PreconditionError("need at least one tuning fold");
    for (std::size_t k = 0; k < tuning_folds; ++k)
        layouts_.push_back(sample_layout(corpus.size(), m, base_seed + k));
}

PosWeights PosWeightObjective::to_weights(std::span<const double> raw) {
    std::array<double, kNumUniversalTags> v{};
    if (raw.size() != kNumUniversalTags)
        throw PreconditionError("expected 12 POS weights");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, raw[i]);
    return PosWeights(v).normalized();
}

double PosWeightObjective::operator()(std::span<const double> raw) const {
    return (*this)(to_weights(raw));
}

double PosWeightObjective::operator()(const PosWeights& weights) const {
    std::vector<Vector> src, tgt;
    src.reserve(corpus_.size());
    tgt.reserve(corpus_.size());
    for (const auto& p : corpus_.pairs()) {
        src.push_back(weighted_unit_vector(space_, p.source, weights).values);
        tgt.push_back(weighted_unit_vector(space_, p.target, weights).values);
    }
    CellScorer scorer = [&](std::size_t r, std::size_t c) { return cosine(src[r], tgt[c]); };
    double total = 0.0;
    for (const auto& layout : layouts_)
        total += sweep_threshold(fill_matrix(layout, scorer)).scores.f1;
    return total / static_cast<double>(layouts_.size());
}

PosWeightTuning tune_pos_weights(const EmbeddingSpace& space,
                                 std::span<const AlignedPairCorpus* const> corpora,
                                 const TuningOptions& options) {
    if (corpora.empty()) throw PreconditionError("no corpora to tune on");
    std::vector<PosWeightObjective> objectives;
    for (const auto* c : corpora) objectives.emplace_back(space, *c, options.m, options.base_seed);

    ObjectiveSpec spec;
    spec.bounds.assign(kNumUniversalTags, {0.0, 1.0});
    spec.budget = options.budget;
    spec.seed = options.base_seed;
    spec.evaluator = [&objectives](std::span<const double> x) {
        const auto weights = PosWeightObjective::to_weights(x);
        double total = 0.0;
        for (const auto& obj : objectives) total += obj(weights);
        return total / static_cast<double>(objectives.size());
    };
    const std::vector<double> ones(kNumUniversalTags, 1.0);
    auto result = optimize(spec, ones, options.nelder_mead);
    return {PosWeightObjective::to_weights(result.best_weights), std::move(result)};
}

PosWeightTuning tune_pos_weights(const EmbeddingSpace& space, const AlignedPairCorpus& corpus,
                                 const TuningOptions& options) {
    const AlignedPairCorpus* one[] = {&corpus};
    return tune_pos_weights(space, one, options);
}

// ---- fusion weights -----------------------------------------------------------

namespace {

FusionWeights fusion_weights_from(std::span<const MethodId> methods, std::span<const double> x) {
    std::map<MethodId, double> raw;
    double total = 0.0;
    for (std::size_t i = 0; i < methods.size(); ++i) total += std::max(0.0, x[i]);
    for (std::size_t i = 0; i < methods.size(); ++i)
        raw[methods[i]] = total > 0.0 ? std::max(0.0, x[i]) : 1.0;
    return FusionWeights(std::move(raw));
}

}  // namespace

FusionWeightTuning tune_fusion_weights(std::span<const std::vector<MethodMatrix>> tuning_folds,
                                       std::size_t budget, std::uint64_t seed,
                                       const NelderMeadOptions& options) {
    if (tuning_folds.empty() || tuning_folds.front().empty())
        throw PreconditionError("fusion tuning needs member matrices");
    std::vector<MethodId> methods;
    for (const auto& mm : tuning_folds.front()) methods.push_back(mm.method);
    for (const auto& fold : tuning_folds) {
        if (fold.size() != methods.size())
            throw PreconditionError("tuning folds disagree on the member methods");
        for (std::size_t i = 0; i < methods.size(); ++i)
            if (fold[i].method != methods[i])
                throw PreconditionError("tuning folds disagree on the member methods");
    }

    ObjectiveSpec spec;
    spec.bounds.assign(methods.size(), {0.0, 1.0});
    spec.budget = budget;
    spec.seed = seed;
    spec.evaluator = [&](std::span<const double> x) {
        const auto weights = fusion_weights_from(methods, x);
        double total = 0.0;
        for (const auto& fold : tuning_folds)
            total += sweep_threshold(weighted_fused_matrix(fold, weights)).scores.f1;
        return total / static_cast<double>(tuning_folds.size());
    };
    const std::vector<double> uniform(methods.size(), 1.0);
    auto result = optimize(spec, uniform, options);
    return {fusion_weights_from(methods, result.best_weights), std::move(result)};
}

}  // namespace clsim
