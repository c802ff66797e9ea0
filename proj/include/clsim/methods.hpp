#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/embeddings.hpp"
#include "clsim/pos_weights.hpp"

namespace clsim {

/// The cross-language similarity scorers. Declaration order is the
/// tie-break order used by the decision tree.
enum class MethodId { CL_C3G, CL_CTS_WE, CL_WES, CL_WESS, CL_ASA };

inline constexpr std::array<MethodId, 5> kAllMethods = {
    MethodId::CL_C3G, MethodId::CL_CTS_WE, MethodId::CL_WES, MethodId::CL_WESS, MethodId::CL_ASA};

/// "CL-C3G", "CL-CTS-WE", ...
std::string_view to_string(MethodId id) noexcept;
/// Case-insensitive; accepts '-' or '_' as separator.
std::optional<MethodId> parse_method(std::string_view name) noexcept;

/// p(target word | source word) from a probabilistic unigram dictionary.
class BilingualDictionary {
public:
    BilingualDictionary() = default;

    /// Throws PreconditionError if a probability is outside (0, 1], a pair
    /// repeats, or a source word's probabilities sum past 1.
    explicit BilingualDictionary(
        const std::vector<std::tuple<std::string, std::string, double>>& entries);

    double probability(std::string_view src, std::string_view tgt) const;
    const std::unordered_map<std::string, double>* translations(std::string_view src) const;
    std::size_t size() const noexcept { return n_entries_; }
    bool empty() const noexcept { return n_entries_ == 0; }

private:
    std::unordered_map<std::string, std::unordered_map<std::string, double>> table_;
    std::size_t n_entries_ = 0;
};

/// Lines `src_surface <TAB> tgt_surface <TAB> probability`.
BilingualDictionary read_dictionary(std::istream& in, const std::string& source_name = "<stream>");
BilingualDictionary load_dictionary(const std::filesystem::path& path);

enum class BagOverlap {
    max_normalized,  ///< |A ∩ B| / max(|A|, |B|)
    jaccard,         ///< |A ∩ B| / |A ∪ B|
};

struct CtsOptions {
    std::size_t k = 10;
    BagOverlap overlap = BagOverlap::max_normalized;
    /// Restrict neighbours to one language; both languages when unset.
    std::optional<std::string> neighbor_lang;
};

struct AsaOptions {
    double mu = 1.0;
    double sigma = 0.3;
};

// ---- character 3-grams -----------------------------------------------------

/// Lowercased, alphanumeric-only rendering of the unit's tokens joined by
/// single spaces.
std::string normalize_for_ngrams(const TextualUnit& unit);

/// Character 3-gram counts of a normalized string. Strings of one or two
/// characters yield themselves as a single gram.
std::unordered_map<std::u32string, int> char_trigrams(std::string_view normalized);

double cl_c3g(const TextualUnit& ux, const TextualUnit& uy);

// ---- embedding-based ------------------------------------------------------

/// Union over in-vocabulary tokens of {token} ∪ top-k neighbours, with the
/// language marker stripped.
std::set<std::string> concept_bag(const EmbeddingSpace& space, const TextualUnit& unit,
                                  const CtsOptions& options = {});

double bag_overlap(const std::set<std::string>& a, const std::set<std::string>& b,
                   BagOverlap mode = BagOverlap::max_normalized);

double cl_cts_we(const EmbeddingSpace& space, const TextualUnit& ux, const TextualUnit& uy,
                 const CtsOptions& options = {});

double cl_wes(const EmbeddingSpace& space, const TextualUnit& ux, const TextualUnit& uy);

double cl_wess(const EmbeddingSpace& space, const TextualUnit& ux, const TextualUnit& uy,
               const PosWeights& weights);

// ---- dictionary-based -----------------------------------------------------

/// exp(-0.5 ((|uy|/|ux| - mu) / sigma)^2)
double asa_length_factor(std::size_t len_x, std::size_t len_y, const AsaOptions& options = {});

double cl_asa(const BilingualDictionary& dict, const TextualUnit& ux, const TextualUnit& uy,
              const AsaOptions& options = {});

// ---- dispatch -------------------------------------------------------------

/// Everything a scorer may need. Members a method does not use may be unset.
struct Resources {
    std::shared_ptr<const EmbeddingSpace> space;
    std::shared_ptr<const BilingualDictionary> dictionary;
    std::optional<PosWeights> pos_weights;
    CtsOptions cts;
    AsaOptions asa;
};

/// Throws MissingResourceError naming the method and the absent resource.
void require_resources(MethodId method, const Resources& resources);

double score_pair(MethodId method, const Resources& resources, const TextualUnit& ux,
                  const TextualUnit& uy);

/// Scores source unit `row` of a corpus against target unit `col`.
using CellScorer = std::function<double(std::size_t row, std::size_t col)>;

/// Precomputes per-unit representations for every pair of `corpus` so
/// repeated cell scoring is cheap. Results equal score_pair bitwise.
CellScorer prepare_scorer(MethodId method, const Resources& resources,
                          const AlignedPairCorpus& corpus);

}  // namespace clsim
