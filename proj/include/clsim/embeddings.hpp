#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/pos_weights.hpp"

namespace clsim {

using Vector = std::vector<double>;

struct EmbeddingKey {
    std::string lang;
    std::string surface;

    bool operator==(const EmbeddingKey&) const = default;
    auto operator<=>(const EmbeddingKey&) const = default;
};

struct EmbeddingOptions {
    /// Retry a failed exact lookup with the lowercased surface.
    bool lowercase_fallback = false;
};

/// A bilingual word-vector space. Every token is qualified by its language.
/// Immutable once built.
class EmbeddingSpace {
public:
    EmbeddingSpace() = default;

    /// Later duplicates of a key replace earlier ones and are counted.
    /// Throws PreconditionError on a wrong-length or non-finite vector.
    EmbeddingSpace(std::size_t dim, std::vector<std::pair<EmbeddingKey, Vector>> entries,
                   EmbeddingOptions options = {});

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }
    std::size_t duplicate_count() const noexcept { return duplicates_; }
    const EmbeddingOptions& options() const noexcept { return options_; }

    const EmbeddingKey& key(std::size_t row) const { return keys_[row]; }
    std::span<const double> vector(std::size_t row) const {
        return {data_.data() + row * dim_, dim_};
    }

    /// Row of (lang, surface), honouring the lowercase fallback.
    std::optional<std::size_t> find(std::string_view lang, std::string_view surface) const;
    std::optional<std::span<const double>> lookup(std::string_view lang,
                                                  std::string_view surface) const;

    /// Sorted distinct language codes.
    std::vector<std::string> languages() const;

private:
    std::optional<std::size_t> find_exact(std::string_view lang, std::string_view surface) const;

    std::size_t dim_ = 0;
    std::vector<EmbeddingKey> keys_;
    std::vector<double> data_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t duplicates_ = 0;
    EmbeddingOptions options_;
};

/// Reads the text format: a `count dim` header, then `lang:token v1 ... vdim`
/// per line. Requires at least two languages.
EmbeddingSpace load_embeddings(const std::filesystem::path& path, EmbeddingOptions options = {});
EmbeddingSpace read_embeddings(std::istream& in, EmbeddingOptions options = {},
                               const std::string& source_name = "<stream>");

/// dot(a,b) / (|a| |b|) clamped to [-1, 1]; 0 when either norm is 0.
double cosine(std::span<const double> a, std::span<const double> b);

struct Neighbor {
    std::string lang;
    std::string surface;
    double cosine = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// The k rows closest to `query` by cosine, best first. Ties go to the
/// lexicographically smaller (lang, surface).
std::vector<Neighbor> top_k_neighbors(const EmbeddingSpace& space, std::span<const double> query,
                                      std::size_t k,
                                      const std::optional<std::string>& lang_filter = std::nullopt,
                                      const std::optional<EmbeddingKey>& exclude = std::nullopt);

struct UnitVector {
    Vector values;
    std::size_t n_known = 0;
};

/// Sum of the vectors of the unit's in-vocabulary tokens.
UnitVector unit_vector(const EmbeddingSpace& space, const TextualUnit& unit);

/// Sum of weight(tag) * vector over in-vocabulary tokens.
UnitVector weighted_unit_vector(const EmbeddingSpace& space, const TextualUnit& unit,
                                const PosWeights& weights);

}  // namespace clsim
