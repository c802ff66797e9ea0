#include "clsim/methods.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <tuple>

#include "clsim/error.hpp"
#include "strings.hpp"
#include "utf8.hpp"

namespace clsim {

namespace {

constexpr std::array<std::string_view, 5> kMethodNames = {"CL-C3G", "CL-CTS-WE", "CL-WES",
                                                         "CL-WESS", "CL-ASA"};

using GramCounts = std::unordered_map<std::u32string, int>;

double sparse_cosine(const GramCounts& a, const GramCounts& b) {
    if (a.empty() || b.empty()) return 0.0;
    const GramCounts& small = a.size() <= b.size() ? a : b;
    const GramCounts& large = a.size() <= b.size() ? b : a;
    std::uint64_t dot = 0, na = 0, nb = 0;
    for (const auto& [gram, c] : small) {
        auto it = large.find(gram);
        if (it != large.end()) dot += static_cast<std::uint64_t>(c) * it->second;
    }
    for (const auto& [gram, c] : a) na += static_cast<std::uint64_t>(c) * c;
    for (const auto& [gram, c] : b) nb += static_cast<std::uint64_t>(c) * c;
    // Integer norms keep cl_c3g(u, u) exactly 1.
    return std::min(1.0, static_cast<double>(dot) /
                             std::sqrt(static_cast<double>(na) * static_cast<double>(nb)));
}

/// Caches top-k neighbour surfaces per embedding row.
class NeighborCache {
public:
    NeighborCache(const EmbeddingSpace& space, const CtsOptions& options)
        : space_(space), options_(options) {}

    std::set<std::string> bag(const TextualUnit& unit) {
        std::set<std::string> out;
        for (const auto& token : unit.tokens) {
            auto row = space_.find(unit.lang, token.surface);
            if (!row) continue;
            out.insert(space_.key(*row).surface);
            for (const auto& surface : neighbors(*row)) out.insert(surface);
        }
        return out;
    }

private:
    const std::vector<std::string>& neighbors(std::size_t row) {
        auto it = cache_.find(row);
        if (it != cache_.end()) return it->second;
        std::vector<std::string> surfaces;
        for (auto& n : top_k_neighbors(space_, space_.vector(row), options_.k,
                                       options_.neighbor_lang, space_.key(row)))
            surfaces.push_back(std::move(n.surface));
        return cache_.emplace(row, std::move(surfaces)).first->second;
    }

    const EmbeddingSpace& space_;
    const CtsOptions& options_;
    std::unordered_map<std::size_t, std::vector<std::string>> cache_;
};

}  // namespace

std::string_view to_string(MethodId id) noexcept { return kMethodNames[static_cast<int>(id)]; }

std::optional<MethodId> parse_method(std::string_view name) noexcept {
    std::string canon;
    for (char c : name) {
        if (c == '_') c = '-';
        canon.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    for (std::size_t i = 0; i < kMethodNames.size(); ++i)
        if (kMethodNames[i] == canon) return kAllMethods[i];
    return std::nullopt;
}

// ---- dictionary -------------------------------------------------------------

BilingualDictionary::BilingualDictionary(
    const std::vector<std::tuple<std::string, std::string, double>>& entries) {
    std::unordered_map<std::string, double> mass;
    for (const auto& [src, tgt, p] : entries) {
        if (!(p > 0.0 && p <= 1.0))
            throw PreconditionError("p(" + tgt + "|" + src + ") = " + detail::format_exact(p) +
                                    " is outside (0, 1]");
        if (!table_[src].emplace(tgt, p).second)
            throw PreconditionError("duplicate dictionary entry " + src + " -> " + tgt);
        if ((mass[src] += p) > 1.0 + 1e-6)
            throw PreconditionError("probabilities for '" + src + "' sum past 1");
        ++n_entries_;
    }
}

double BilingualDictionary::probability(std::string_view src, std::string_view tgt) const {
    auto row = translations(src);
    if (row == nullptr) return 0.0;
    auto it = row->find(std::string(tgt));
    return it == row->end() ? 0.0 : it->second;
}

const std::unordered_map<std::string, double>* BilingualDictionary::translations(
    std::string_view src) const {
    auto it = table_.find(std::string(src));
    return it == table_.end() ? nullptr : &it->second;
}

BilingualDictionary read_dictionary(std::istream& in, const std::string& source_name) {
    std::vector<std::tuple<std::string, std::string, double>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty())
            throw ParseError(source_name, line_no, "expected 'src<TAB>tgt<TAB>probability'");
        double p = 0.0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), p);
        if (ec != std::errc() || ptr != fields[2].data() + fields[2].size())
            throw ParseError(source_name, line_no, "bad probability '" + std::string(fields[2]) + "'");
        entries.emplace_back(std::string(fields[0]), std::string(fields[1]), p);
    }
    try {
        return BilingualDictionary(entries);
    } catch (const PreconditionError& e) {
        throw ParseError(source_name + ": " + e.what());
    }
}

BilingualDictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dictionary '" + path.string() + "'");
    return read_dictionary(in, path.string());
}

// ---- CL-C3G -----------------------------------------------------------------

std::string normalize_for_ngrams(const TextualUnit& unit) {
    std::string out;
    for (const auto& token : unit.tokens) {
        std::string word;
        for (char32_t cp : detail::utf8_decode(token.surface))
            if (detail::is_alnum(cp)) detail::utf8_append(word, detail::to_lower(cp));
        if (word.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

std::unordered_map<std::u32string, int> char_trigrams(std::string_view normalized) {
    GramCounts grams;
    auto text = detail::utf8_decode(normalized);
    if (text.empty()) return grams;
    if (text.size() < 3) {
        grams[text] = 1;
        return grams;
    }
    for (std::size_t i = 0; i + 3 <= text.size(); ++i) ++grams[text.substr(i, 3)];
    return grams;
}

double cl_c3g(const TextualUnit& ux, const TextualUnit& uy) {
    return sparse_cosine(char_trigrams(normalize_for_ngrams(ux)),
                         char_trigrams(normalize_for_ngrams(uy)));
}

// ---- CL-CTS-WE --------------------------------------------------------------

std::set<std::string> concept_bag(const EmbeddingSpace& space, const TextualUnit& unit,
                                  const CtsOptions& options) {
    NeighborCache cache(space, options);
    return cache.bag(unit);
}

double bag_overlap(const std::set<std::string>& a, const std::set<std::string>& b,
                   BagOverlap mode) {
    if (a.empty() || b.empty()) return 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++common; ++ia; ++ib; }
    }
    const double denom = mode == BagOverlap::jaccard
                             ? static_cast<double>(a.size() + b.size() - common)
                             : static_cast<double>(std::max(a.size(), b.size()));
    return static_cast<double>(common) / denom;
}

double cl_cts_we(const EmbeddingSpace& space, const TextualUnit& ux, const TextualUnit& uy,
                 const CtsOptions& options) {
    NeighborCache cache(space, options);
    return bag_overlap(cache.bag(ux), cache.bag(uy), options.overlap);
}

// ---- CL-WES / CL-WESS -------------------------------------------------------

double cl_wes(const EmbeddingSpace& space, const TextualUnit& ux, const TextualUnit& uy) {
    return cosine(unit_vector(space, ux).values, unit_vector(space, uy).values);
}

double cl_wess(const EmbeddingSpace& space, const TextualUnit& ux, const TextualUnit& uy,
               const PosWeights& weights) {
    return cosine(weighted_unit_vector(space, ux, weights).values,
                  weighted_unit_vector(space, uy, weights).values);
}

// ---- CL-ASA -----------------------------------------------------------------

double asa_length_factor(std::size_t len_x, std::size_t len_y, const AsaOptions& options) {
    if (len_x == 0) return 0.0;
    const double z = (static_cast<double>(len_y) / static_cast<double>(len_x) - options.mu) /
                     options.sigma;
    return std::exp(-0.5 * z * z);
}

double cl_asa(const BilingualDictionary& dict, const TextualUnit& ux, const TextualUnit& uy,
              const AsaOptions& options) {
    if (dict.empty()) throw MissingResourceError("CL-ASA: bilingual dictionary is empty");
    if (ux.tokens.empty() || uy.tokens.empty()) return 0.0;
    double total = 0.0;
    for (const auto& x : ux.tokens) {
        const auto* row = dict.translations(x.surface);
        if (row == nullptr) continue;
        for (const auto& y : uy.tokens) {
            auto it = row->find(y.surface);
            if (it != row->end()) total += it->second;
        }
    }
    const double t = total / (static_cast<double>(ux.tokens.size()) *
                              static_cast<double>(uy.tokens.size()));
    return t * asa_length_factor(ux.tokens.size(), uy.tokens.size(), options);
}

// ---- dispatch ---------------------------------------------------------------

void require_resources(MethodId method, const Resources& resources) {
    auto missing = [method](const char* what) {
        throw MissingResourceError(std::string(to_string(method)) + " requires " + what);
    };
    switch (method) {
        case MethodId::CL_C3G:
            break;
        case MethodId::CL_CTS_WE:
        case MethodId::CL_WES:
            if (!resources.space) missing("an embedding space");
            break;
        case MethodId::CL_WESS:
            if (!resources.space) missing("an embedding space");
            if (!resources.pos_weights) missing("POS weights");
            break;
        case MethodId::CL_ASA:
            if (!resources.dictionary || resources.dictionary->empty())
                missing("a bilingual dictionary");
            break;
    }
}

double score_pair(MethodId method, const Resources& resources, const TextualUnit& ux,
                  const TextualUnit& uy) {
    require_resources(method, resources);
    switch (method) {
        case MethodId::CL_C3G: return cl_c3g(ux, uy);
        case MethodId::CL_CTS_WE: return cl_cts_we(*resources.space, ux, uy, resources.cts);
        case MethodId::CL_WES: return cl_wes(*resources.space, ux, uy);
        case MethodId::CL_WESS: return cl_wess(*resources.space, ux, uy, *resources.pos_weights);
        case MethodId::CL_ASA: return cl_asa(*resources.dictionary, ux, uy, resources.asa);
    }
    return 0.0;
}

CellScorer prepare_scorer(MethodId method, const Resources& resources,
                          const AlignedPairCorpus& corpus) {
    require_resources(method, resources);
    const auto& pairs = corpus.pairs();

    switch (method) {
        case MethodId::CL_C3G: {
            auto src = std::make_shared<std::vector<GramCounts>>();
            auto tgt = std::make_shared<std::vector<GramCounts>>();
            for (const auto& p : pairs) {
                src->push_back(char_trigrams(normalize_for_ngrams(p.source)));
                tgt->push_back(char_trigrams(normalize_for_ngrams(p.target)));
            }
            return [src, tgt](std::size_t r, std::size_t c) {
                return sparse_cosine((*src)[r], (*tgt)[c]);
            };
        }
        case MethodId::CL_CTS_WE: {
            NeighborCache cache(*resources.space, resources.cts);
            auto src = std::make_shared<std::vector<std::set<std::string>>>();
            auto tgt = std::make_shared<std::vector<std::set<std::string>>>();
            for (const auto& p : pairs) {
                src->push_back(cache.bag(p.source));
                tgt->push_back(cache.bag(p.target));
            }
            return [src, tgt, mode = resources.cts.overlap](std::size_t r, std::size_t c) {
                return bag_overlap((*src)[r], (*tgt)[c], mode);
            };
        }
        case MethodId::CL_WES:
        case MethodId::CL_WESS: {
            auto src = std::make_shared<std::vector<Vector>>();
            auto tgt = std::make_shared<std::vector<Vector>>();
            for (const auto& p : pairs) {
                if (method == MethodId::CL_WES) {
                    src->push_back(unit_vector(*resources.space, p.source).values);
                    tgt->push_back(unit_vector(*resources.space, p.target).values);
                } else {
                    src->push_back(
                        weighted_unit_vector(*resources.space, p.source, *resources.pos_weights)
                            .values);
                    tgt->push_back(
                        weighted_unit_vector(*resources.space, p.target, *resources.pos_weights)
                            .values);
                }
            }
            return [src, tgt](std::size_t r, std::size_t c) {
                return cosine((*src)[r], (*tgt)[c]);
            };
        }
        case MethodId::CL_ASA: {
            auto dict = resources.dictionary;
            auto options = resources.asa;
            auto units = std::make_shared<std::vector<AlignedPair>>(pairs);
            return [dict, options, units](std::size_t r, std::size_t c) {
                return cl_asa(*dict, (*units)[r].source, (*units)[c].target, options);
            };
        }
    }
    throw PreconditionError("unknown method");
}

}  // namespace clsim
