#pragma once

// Synthetic bilingual data with known structure.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/embeddings.hpp"
#include "clsim/error.hpp"
#include "clsim/methods.hpp"

namespace synthetic {

struct Data {
    std::size_t dim = 0;
    std::vector<std::pair<clsim::EmbeddingKey, clsim::Vector>> entries;
    std::vector<clsim::AlignedPair> pairs;
    std::vector<std::tuple<std::string, std::string, double>> dictionary;

    clsim::EmbeddingSpace space() const { return clsim::EmbeddingSpace(dim, entries); }
    clsim::AlignedPairCorpus corpus(const std::string& name = "synthetic") const {
        return clsim::AlignedPairCorpus(name, pairs);
    }
};

inline clsim::Vector gaussian(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    clsim::Vector v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t len) {
    std::uniform_int_distribution<int> letter('a', 'z');
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w += static_cast<char>(letter(rng));
    return w;
}

/// French vocabulary = English vocabulary plus Gaussian noise of relative
/// size `sigma`; each French unit translates its English unit word by word.
/// French surfaces share most letters with their English source.
inline Data translation(std::uint64_t seed, std::size_t n_pairs, std::size_t vocab,
                        std::size_t dim, double sigma, std::size_t unit_len = 8) {
    std::mt19937_64 rng(seed);
    Data d;
    d.dim = dim;
    std::vector<std::string> en_words, fr_words;
    for (std::size_t i = 0; i < vocab; ++i) {
        auto w = random_word(rng, 5 + i % 4) + std::to_string(i);
        auto f = w;
        f[0] = static_cast<char>('a' + (f[0] - 'a' + 1) % 26);
        en_words.push_back(w);
        fr_words.push_back(f);
        auto v = gaussian(rng, dim);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        const double noise = sigma * std::sqrt(norm / static_cast<double>(dim));
        auto fv = v;
        auto e = gaussian(rng, dim, noise);
        for (std::size_t k = 0; k < dim; ++k) fv[k] += e[k];
        d.entries.push_back({{"en", w}, std::move(v)});
        d.entries.push_back({{"fr", f}, std::move(fv)});
        d.dictionary.emplace_back(w, f, 0.8);
    }
    std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
    std::uniform_int_distribution<std::size_t> tag(0, clsim::kNumUniversalTags - 1);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const auto id = "s" + std::to_string(p);
        clsim::TextualUnit en{id, "en", clsim::Granularity::sentence, {}};
        clsim::TextualUnit fr{id, "fr", clsim::Granularity::sentence, {}};
        for (std::size_t i = 0; i < unit_len; ++i) {
            const auto w = pick(rng);
            const auto t = clsim::kAllUniversalTags[tag(rng)];
            en.tokens.push_back({en_words[w], t});
            fr.tokens.push_back({fr_words[w], t});
        }
        d.pairs.push_back({std::move(en), std::move(fr)});
    }
    return d;
}

/// Only NOUN tokens are translations of each other; every other tag's
/// tokens are unrelated noise words, drawn independently per side.
inline Data noun_signal(std::uint64_t seed, std::size_t n_pairs, std::size_t dim,
                        double noun_noise = 0.3, double noise_scale = 1.0) {
    std::mt19937_64 rng(seed);
    Data d;
    d.dim = dim;
    const std::size_t nouns = 4 * n_pairs;
    const std::size_t fillers = 40;
    for (std::size_t i = 0; i < nouns; ++i) {
        auto v = gaussian(rng, dim);
        auto fv = v;
        auto e = gaussian(rng, dim, noun_noise);
        for (std::size_t k = 0; k < dim; ++k) fv[k] += e[k];
        d.entries.push_back({{"en", "n" + std::to_string(i)}, std::move(v)});
        d.entries.push_back({{"fr", "n" + std::to_string(i)}, std::move(fv)});
    }
    for (const char* lang : {"en", "fr"})
        for (std::size_t i = 0; i < fillers; ++i)
            d.entries.push_back({{lang, "f" + std::to_string(i)}, gaussian(rng, dim, noise_scale)});

    std::uniform_int_distribution<std::size_t> noun(0, nouns - 1), filler(0, fillers - 1);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const auto id = "p" + std::to_string(p);
        clsim::TextualUnit en{id, "en", clsim::Granularity::sentence, {}};
        clsim::TextualUnit fr{id, "fr", clsim::Granularity::sentence, {}};
        for (int i = 0; i < 2; ++i) {
            const auto w = "n" + std::to_string(noun(rng));
            en.tokens.push_back({w, clsim::UniversalTag::NOUN});
            fr.tokens.push_back({w, clsim::UniversalTag::NOUN});
        }
        for (auto tag : clsim::kAllUniversalTags) {
            if (tag == clsim::UniversalTag::NOUN) continue;
            en.tokens.push_back({"f" + std::to_string(filler(rng)), tag});
            fr.tokens.push_back({"f" + std::to_string(filler(rng)), tag});
        }
        d.pairs.push_back({std::move(en), std::move(fr)});
    }
    return d;
}

inline void write_embeddings(const std::filesystem::path& path, const Data& d) {
    std::ofstream out(path);
    out << d.entries.size() << ' ' << d.dim << '\n';
    char buf[32];
    for (const auto& [key, v] : d.entries) {
        out << key.lang << ':' << key.surface;
        for (double x : v) {
            std::snprintf(buf, sizeof buf, " %.17g", x);
            out << buf;
        }
        out << '\n';
    }
}

inline void write_corpus(const std::filesystem::path& path, const Data& d) {
    std::ofstream out(path);
    clsim::write_corpus(out, d.corpus());
}

inline void write_dictionary(const std::filesystem::path& path, const Data& d) {
    std::ofstream out(path);
    for (const auto& [s, t, p] : d.dictionary) out << s << '\t' << t << '\t' << p << '\n';
}

}  // namespace synthetic
