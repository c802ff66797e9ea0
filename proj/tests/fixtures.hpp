#pragma once

// Builders and random generators shared by the test suites.

#include <cstdint>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clsim/corpus.hpp"
#include "clsim/embeddings.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return CLSIM_TEST_DATA_DIR; }

/// "the/DET cat/NOUN" -> unit in `lang`.
inline clsim::TextualUnit unit(const std::string& lang, const std::string& tagged,
                               const std::string& id = "u") {
    clsim::TextualUnit u{id, lang, clsim::Granularity::sentence, {}};
    std::istringstream in(tagged);
    std::string item;
    while (in >> item) {
        auto [surface, tag] = clsim::split_token(item);
        u.tokens.push_back({surface, *clsim::parse_universal_tag(tag)});
    }
    return u;
}

inline clsim::EmbeddingSpace space(
    std::size_t dim, std::vector<std::pair<std::string, clsim::Vector>> entries,
    clsim::EmbeddingOptions options = {}) {
    std::vector<std::pair<clsim::EmbeddingKey, clsim::Vector>> keyed;
    for (auto& [qualified, vec] : entries) {
        auto colon = qualified.find(':');
        keyed.push_back({{qualified.substr(0, colon), qualified.substr(colon + 1)}, std::move(vec)});
    }
    return clsim::EmbeddingSpace(dim, std::move(keyed), options);
}

/// Random bilingual space: `per_lang` words per language named w0, w1, ...
inline clsim::EmbeddingSpace random_space(std::mt19937_64& rng, std::size_t per_lang,
                                          std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::pair<clsim::EmbeddingKey, clsim::Vector>> entries;
    for (const char* lang : {"en", "fr"})
        for (std::size_t i = 0; i < per_lang; ++i) {
            clsim::Vector v(dim);
            for (auto& x : v) x = g(rng);
            entries.push_back({{lang, "w" + std::to_string(i)}, std::move(v)});
        }
    return clsim::EmbeddingSpace(dim, std::move(entries));
}

/// Random unit over the vocabulary w0..w{vocab-1} (plus some OOV words).
inline clsim::TextualUnit random_unit(std::mt19937_64& rng, const std::string& lang,
                                      std::size_t vocab, std::size_t max_len = 12) {
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<std::size_t> word(0, vocab + vocab / 5);
    std::uniform_int_distribution<std::size_t> tag(0, clsim::kNumUniversalTags - 1);
    clsim::TextualUnit u{"r", lang, clsim::Granularity::sentence, {}};
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i)
        u.tokens.push_back({"w" + std::to_string(word(rng)), clsim::kAllUniversalTags[tag(rng)]});
    return u;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("clsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace fixtures
