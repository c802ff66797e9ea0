#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace clsim {

/// The 12 coarse categories of the Universal Tagset. PUNCT is written ".".
enum class UniversalTag : unsigned char {
    NOUN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PRT, PUNCT, X
};

inline constexpr std::size_t kNumUniversalTags = 12;

inline constexpr std::array<UniversalTag, kNumUniversalTags> kAllUniversalTags = {
    UniversalTag::NOUN, UniversalTag::VERB, UniversalTag::ADJ,  UniversalTag::ADV,
    UniversalTag::PRON, UniversalTag::DET,  UniversalTag::ADP,  UniversalTag::NUM,
    UniversalTag::CONJ, UniversalTag::PRT,  UniversalTag::PUNCT, UniversalTag::X};

std::string_view to_string(UniversalTag tag) noexcept;

/// Accepts the canonical spelling ("NOUN", ".", ...) and "PUNCT" as an alias.
std::optional<UniversalTag> parse_universal_tag(std::string_view name) noexcept;

inline std::size_t tag_index(UniversalTag tag) noexcept { return static_cast<std::size_t>(tag); }

enum class Granularity { chunk, sentence };

std::string_view to_string(Granularity g) noexcept;
std::optional<Granularity> parse_granularity(std::string_view name) noexcept;

struct TaggedToken {
    std::string surface;
    UniversalTag upos = UniversalTag::X;

    bool operator==(const TaggedToken&) const = default;
};

struct TextualUnit {
    std::string id;
    std::string lang;
    Granularity granularity = Granularity::sentence;
    std::vector<TaggedToken> tokens;

    bool operator==(const TextualUnit&) const = default;
};

struct AlignedPair {
    TextualUnit source;
    TextualUnit target;

    bool operator==(const AlignedPair&) const = default;
};

/// One sub-corpus of aligned cross-language pairs. Row i of every distance
/// matrix built from it is pair i.
class AlignedPairCorpus {
public:
    AlignedPairCorpus() = default;

    /// Validates the pair invariants (distinct languages, one language
    /// combination, unique ids, nonempty units). Throws PreconditionError.
    AlignedPairCorpus(std::string name, std::vector<AlignedPair> pairs);

    const std::string& name() const noexcept { return name_; }
    const std::vector<AlignedPair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }
    const AlignedPair& operator[](std::size_t i) const { return pairs_[i]; }

    const std::string& source_lang() const;
    const std::string& target_lang() const;

    bool operator==(const AlignedPairCorpus&) const = default;

private:
    std::string name_;
    std::vector<AlignedPair> pairs_;
};

/// Raw tagger tag -> universal tag.
class TagMapping {
public:
    TagMapping() = default;
    explicit TagMapping(std::unordered_map<std::string, UniversalTag> entries)
        : entries_(std::move(entries)) {}

    /// Throws UnknownTagError when `raw` has no entry.
    UniversalTag normalize(std::string_view raw) const;
    bool contains(std::string_view raw) const { return entries_.count(std::string(raw)) != 0; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::unordered_map<std::string, UniversalTag> entries_;
};

/// Lines `raw_tag <TAB> universal_tag`; `#` comments and blank lines skipped.
TagMapping load_tag_mapping(const std::filesystem::path& path);
TagMapping read_tag_mapping(std::istream& in, const std::string& source_name = "<stream>");

UniversalTag normalize_tag(std::string_view raw, const TagMapping& mapping);

/// Parses an aligned-pairs file. Tags are read as universal tags unless a
/// mapping is supplied, in which case they are raw tagger tags.
AlignedPairCorpus parse_corpus(const std::filesystem::path& path, Granularity granularity,
                               const TagMapping* mapping = nullptr, std::string name = {});
AlignedPairCorpus read_corpus(std::istream& in, Granularity granularity, std::string name,
                              const TagMapping* mapping = nullptr,
                              const std::string& source_name = "<stream>");

/// Inverse of read_corpus for corpora with universal tags.
void write_corpus(std::ostream& out, const AlignedPairCorpus& corpus);
std::string serialize_corpus(const AlignedPairCorpus& corpus);

/// Splits `surface/TAG` at the last slash.
std::pair<std::string, std::string> split_token(std::string_view item);

}  // namespace clsim
