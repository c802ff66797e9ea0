#include "clsim/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "clsim/error.hpp"
#include "strings.hpp"
#include "utf8.hpp"

namespace clsim {

namespace {

std::string index_key(std::string_view lang, std::string_view surface) {
    std::string key;
    key.reserve(lang.size() + 1 + surface.size());
    key.append(lang).push_back(':');
    key.append(surface);
    return key;
}

}  // namespace

EmbeddingSpace::EmbeddingSpace(std::size_t dim,
                               std::vector<std::pair<EmbeddingKey, Vector>> entries,
                               EmbeddingOptions options)
    : dim_(dim), options_(options) {
    if (dim == 0) throw PreconditionError("embedding dimension must be positive");
    keys_.reserve(entries.size());
    data_.reserve(entries.size() * dim);
    for (auto& [key, vec] : entries) {
        if (key.lang.empty()) throw PreconditionError("embedding key '" + key.surface + "' has no language");
        if (vec.size() != dim)
            throw PreconditionError("vector for " + key.lang + ":" + key.surface + " has " +
                                    std::to_string(vec.size()) + " components, expected " +
                                    std::to_string(dim));
        if (!std::all_of(vec.begin(), vec.end(), [](double v) { return std::isfinite(v); }))
            throw PreconditionError("vector for " + key.lang + ":" + key.surface +
                                    " has a non-finite component");
        auto [it, inserted] = index_.try_emplace(index_key(key.lang, key.surface), keys_.size());
        if (!inserted) {
            ++duplicates_;
            std::copy(vec.begin(), vec.end(), data_.begin() + it->second * dim);
            continue;
        }
        keys_.push_back(std::move(key));
        data_.insert(data_.end(), vec.begin(), vec.end());
    }
    if (languages().size() < 2)
        throw PreconditionError("embedding space must contain at least two languages");
}

std::optional<std::size_t> EmbeddingSpace::find_exact(std::string_view lang,
                                                      std::string_view surface) const {
    auto it = index_.find(index_key(lang, surface));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> EmbeddingSpace::find(std::string_view lang,
                                                std::string_view surface) const {
    if (auto row = find_exact(lang, surface)) return row;
    if (options_.lowercase_fallback) {
        auto lowered = detail::utf8_lower(surface);
        if (lowered != surface) return find_exact(lang, lowered);
    }
    return std::nullopt;
}

std::optional<std::span<const double>> EmbeddingSpace::lookup(std::string_view lang,
                                                              std::string_view surface) const {
    if (auto row = find(lang, surface)) return vector(*row);
    return std::nullopt;
}

std::vector<std::string> EmbeddingSpace::languages() const {
    std::set<std::string> langs;
    for (const auto& k : keys_) langs.insert(k.lang);
    return {langs.begin(), langs.end()};
}

EmbeddingSpace read_embeddings(std::istream& in, EmbeddingOptions options,
                               const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t count = 0, dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        auto fields = detail::split_nonempty(line, ' ');
        if (fields.empty()) continue;
        auto parse_size = [&](std::string_view f, std::size_t& out) {
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
            return ec == std::errc() && p == f.data() + f.size();
        };
        if (fields.size() != 2 || !parse_size(fields[0], count) || !parse_size(fields[1], dim) ||
            dim == 0)
            throw ParseError(source_name, line_no, "expected header 'vocab_count dim'");
        break;
    }
    if (dim == 0) throw ParseError(source_name, line_no, "missing header line");

    std::vector<std::pair<EmbeddingKey, Vector>> entries;
    entries.reserve(count);
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        auto fields = detail::split_nonempty(line, ' ');
        if (fields.empty()) continue;
        auto token = fields[0];
        auto colon = token.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == token.size())
            throw ParseError(source_name, line_no,
                             "token '" + std::string(token) + "' lacks a 'lang:' prefix");
        if (fields.size() - 1 != dim)
            throw ParseError(source_name, line_no,
                             "dimension mismatch for '" + std::string(token) + "': " +
                                 std::to_string(fields.size() - 1) + " values, header says " +
                                 std::to_string(dim));
        Vector vec(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            auto f = fields[d + 1];
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[d]);
            if (ec != std::errc() || p != f.data() + f.size())
                throw ParseError(source_name, line_no, "bad number '" + std::string(f) + "'");
            if (!std::isfinite(vec[d]))
                throw ParseError(source_name, line_no,
                                 "non-finite value in '" + std::string(token) + "'");
        }
        entries.push_back({{std::string(token.substr(0, colon)), std::string(token.substr(colon + 1))},
                           std::move(vec)});
    }
    if (entries.size() != count)
        throw ParseError(source_name, line_no,
                         "header announces " + std::to_string(count) + " vectors, found " +
                             std::to_string(entries.size()));
    try {
        return EmbeddingSpace(dim, std::move(entries), options);
    } catch (const PreconditionError& e) {
        throw ParseError(source_name + ": " + e.what());
    }
}

EmbeddingSpace load_embeddings(const std::filesystem::path& path, EmbeddingOptions options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings '" + path.string() + "'");
    return read_embeddings(in, options, path.string());
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw PreconditionError("cosine of vectors with lengths " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    double denom = std::sqrt(na * nb);
    if (!(denom > 0.0) || !std::isfinite(denom)) denom = std::sqrt(na) * std::sqrt(nb);
    return std::clamp(dot / denom, -1.0, 1.0);
}

std::vector<Neighbor> top_k_neighbors(const EmbeddingSpace& space, std::span<const double> query,
                                      std::size_t k, const std::optional<std::string>& lang_filter,
                                      const std::optional<EmbeddingKey>& exclude) {
    if (space.empty()) throw PreconditionError("nearest-neighbour query on an empty space");
    if (k == 0) throw PreconditionError("k must be at least 1");
    if (query.size() != space.dim())
        throw PreconditionError("query has " + std::to_string(query.size()) +
                                " components, space dimension is " + std::to_string(space.dim()));

    struct Candidate {
        double score;
        std::size_t row;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(space.size());
    for (std::size_t row = 0; row < space.size(); ++row) {
        const auto& key = space.key(row);
        if (lang_filter && key.lang != *lang_filter) continue;
        if (exclude && key == *exclude) continue;
        candidates.push_back({cosine(query, space.vector(row)), row});
    }
    auto better = [&space](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return space.key(a.row) < space.key(b.row);
    };
    const std::size_t n = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                      candidates.end(), better);

    std::vector<Neighbor> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& key = space.key(candidates[i].row);
        out.push_back({key.lang, key.surface, candidates[i].score});
    }
    return out;
}

UnitVector unit_vector(const EmbeddingSpace& space, const TextualUnit& unit) {
    UnitVector out{Vector(space.dim(), 0.0), 0};
    for (const auto& token : unit.tokens) {
        auto vec = space.lookup(unit.lang, token.surface);
        if (!vec) continue;
        ++out.n_known;
        for (std::size_t d = 0; d < out.values.size(); ++d) out.values[d] += (*vec)[d];
    }
    return out;
}

UnitVector weighted_unit_vector(const EmbeddingSpace& space, const TextualUnit& unit,
                                const PosWeights& weights) {
    UnitVector out{Vector(space.dim(), 0.0), 0};
    for (const auto& token : unit.tokens) {
        auto vec = space.lookup(unit.lang, token.surface);
        if (!vec) continue;
        ++out.n_known;
        const double w = weights[token.upos];
        for (std::size_t d = 0; d < out.values.size(); ++d) out.values[d] += w * (*vec)[d];
    }
    return out;
}

}  // namespace clsim
