#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/embeddings.hpp"
#include "clsim/evaluation.hpp"
#include "clsim/fusion.hpp"
#include "clsim/pos_weights.hpp"

namespace clsim {

/// A bounded maximisation problem over a box.
struct ObjectiveSpec {
    std::vector<std::pair<double, double>> bounds;  ///< [lo, hi] per coordinate
    std::function<double(std::span<const double>)> evaluator;
    std::size_t budget = 200;  ///< total evaluations over all restarts
    std::uint64_t seed = 0;

    std::size_t dimension() const noexcept { return bounds.size(); }
};

struct NelderMeadOptions {
    std::size_t random_restarts = 3;
    /// Initial simplex edge, as a fraction of each coordinate's range.
    double initial_step = 0.25;
    /// A restart ends once its simplex is this small (fraction of range)...
    double x_tolerance = 1e-4;
    /// ...or after this many evaluations per coordinate.
    std::size_t max_evals_per_dim = 60;
};

struct OptimizationResult {
    std::vector<double> best_weights;
    double best_value = 0.0;
    std::size_t evaluations_used = 0;
    std::vector<std::pair<std::vector<double>, double>> trace;
};

/// Bounded Nelder-Mead with dimension-adaptive coefficients and clamping to
/// the box. The first restart starts at `initial`; the others at seeded
/// uniform points. Restarts run in turn until the budget is spent, so a
/// larger budget only extends the same evaluation sequence.
OptimizationResult optimize(const ObjectiveSpec& spec, std::span<const double> initial,
                            const NelderMeadOptions& options = {});

/// Best-F1 objective over the tuning folds of one corpus for CL-WESS.
/// Weights are normalized (largest = 1) before scoring.
class PosWeightObjective {
public:
    PosWeightObjective(const EmbeddingSpace& space, const AlignedPairCorpus& corpus, std::size_t m,
                       std::uint64_t base_seed, std::size_t tuning_folds = kTuningFolds);

    double operator()(const PosWeights& weights) const;
    double operator()(std::span<const double> raw) const;

    static PosWeights to_weights(std::span<const double> raw);

private:
    const EmbeddingSpace& space_;
    const AlignedPairCorpus& corpus_;
    std::vector<SampleLayout> layouts_;
};

struct TuningOptions {
    std::size_t m = 1000;
    std::uint64_t base_seed = 0;
    std::size_t budget = 300;
    NelderMeadOptions nelder_mead;
};

struct PosWeightTuning {
    PosWeights weights;
    OptimizationResult result;
};

/// Maximises mean best-F1 of CL-WESS over folds 0-1 in [0,1]^12, starting
/// from all ones. Several corpora are tuned jointly (mean over all).
PosWeightTuning tune_pos_weights(const EmbeddingSpace& space,
                                 std::span<const AlignedPairCorpus* const> corpora,
                                 const TuningOptions& options = {});
PosWeightTuning tune_pos_weights(const EmbeddingSpace& space, const AlignedPairCorpus& corpus,
                                 const TuningOptions& options = {});

struct FusionWeightTuning {
    FusionWeights weights;
    OptimizationResult result;
};

/// `tuning_folds[f]` holds every member method's matrix for tuning fold f.
/// Maximises mean best-F1 of the weighted fused matrices, starting from
/// uniform weights.
FusionWeightTuning tune_fusion_weights(std::span<const std::vector<MethodMatrix>> tuning_folds,
                                       std::size_t budget = 300, std::uint64_t seed = 0,
                                       const NelderMeadOptions& options = {});

}  // namespace clsim
