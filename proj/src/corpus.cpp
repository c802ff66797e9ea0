#include "clsim/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "clsim/error.hpp"
#include "strings.hpp"

namespace clsim {

namespace {

constexpr std::array<std::string_view, kNumUniversalTags> kTagNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", ".", "X"};

std::vector<TaggedToken> parse_tokens(std::string_view field, const TagMapping* mapping,
                                      const std::string& source, std::size_t line_no) {
    std::vector<TaggedToken> tokens;
    for (std::string_view item : detail::split_nonempty(field, ' ')) {
        auto [surface, tag] = split_token(item);
        if (surface.empty() || tag.empty())
            throw ParseError(source, line_no, "malformed token '" + std::string(item) + "'");
        UniversalTag upos;
        if (mapping != nullptr) {
            try {
                upos = mapping->normalize(tag);
            } catch (const UnknownTagError&) {
                throw UnknownTagError(source + ":" + std::to_string(line_no) +
                                      ": unknown POS tag '" + tag + "'");
            }
        } else {
            auto parsed = parse_universal_tag(tag);
            if (!parsed)
                throw UnknownTagError(source + ":" + std::to_string(line_no) +
                                      ": unknown POS tag '" + tag + "'");
            upos = *parsed;
        }
        tokens.push_back({std::move(surface), upos});
    }
    return tokens;
}

}  // namespace

std::string_view to_string(UniversalTag tag) noexcept { return kTagNames[tag_index(tag)]; }

std::optional<UniversalTag> parse_universal_tag(std::string_view name) noexcept {
    if (name == "PUNCT") return UniversalTag::PUNCT;
    for (std::size_t i = 0; i < kNumUniversalTags; ++i)
        if (kTagNames[i] == name) return kAllUniversalTags[i];
    return std::nullopt;
}

std::string_view to_string(Granularity g) noexcept {
    return g == Granularity::chunk ? "chunk" : "sentence";
}

std::optional<Granularity> parse_granularity(std::string_view name) noexcept {
    if (name == "chunk") return Granularity::chunk;
    if (name == "sentence") return Granularity::sentence;
    return std::nullopt;
}

AlignedPairCorpus::AlignedPairCorpus(std::string name, std::vector<AlignedPair> pairs)
    : name_(std::move(name)), pairs_(std::move(pairs)) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto& p = pairs_[i];
        const std::string where = "pair " + std::to_string(i) + " ('" + p.source.id + "')";
        if (p.source.tokens.empty() || p.target.tokens.empty())
            throw PreconditionError(where + ": empty textual unit");
        if (p.source.lang == p.target.lang)
            throw PreconditionError(where + ": source and target share language '" +
                                    p.source.lang + "'");
        if (p.source.lang != pairs_.front().source.lang ||
            p.target.lang != pairs_.front().target.lang)
            throw PreconditionError(where + ": language combination differs from first pair");
        if (!seen.insert(p.source.id).second)
            throw PreconditionError(where + ": duplicate pair id");
    }
}

const std::string& AlignedPairCorpus::source_lang() const {
    if (pairs_.empty()) throw PreconditionError("empty corpus has no source language");
    return pairs_.front().source.lang;
}

const std::string& AlignedPairCorpus::target_lang() const {
    if (pairs_.empty()) throw PreconditionError("empty corpus has no target language");
    return pairs_.front().target.lang;
}

UniversalTag TagMapping::normalize(std::string_view raw) const {
    auto it = entries_.find(std::string(raw));
    if (it == entries_.end())
        throw UnknownTagError("unknown POS tag '" + std::string(raw) + "'");
    return it->second;
}

UniversalTag normalize_tag(std::string_view raw, const TagMapping& mapping) {
    return mapping.normalize(raw);
}

TagMapping read_tag_mapping(std::istream& in, const std::string& source_name) {
    std::unordered_map<std::string, UniversalTag> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty())
            throw ParseError(source_name, line_no, "expected 'raw_tag<TAB>universal_tag'");
        auto tag = parse_universal_tag(fields[1]);
        if (!tag)
            throw ParseError(source_name, line_no,
                             "'" + std::string(fields[1]) + "' is not a universal tag");
        entries[std::string(fields[0])] = *tag;
    }
    return TagMapping(std::move(entries));
}

TagMapping load_tag_mapping(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tag mapping '" + path.string() + "'");
    return read_tag_mapping(in, path.string());
}

std::pair<std::string, std::string> split_token(std::string_view item) {
    auto slash = item.rfind('/');
    if (slash == std::string_view::npos) return {std::string(item), std::string()};
    return {std::string(item.substr(0, slash)), std::string(item.substr(slash + 1))};
}

AlignedPairCorpus read_corpus(std::istream& in, Granularity granularity, std::string name,
                              const TagMapping* mapping, const std::string& source_name) {
    std::vector<AlignedPair> pairs;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    std::string src_lang, tgt_lang;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 5)
            throw ParseError(source_name, line_no,
                             "expected 5 tab-separated fields, got " +
                                 std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty() || fields[3].empty())
            throw ParseError(source_name, line_no, "empty id or language field");
        AlignedPair pair;
        pair.source = {std::string(fields[0]), std::string(fields[1]), granularity,
                       parse_tokens(fields[2], mapping, source_name, line_no)};
        pair.target = {std::string(fields[0]), std::string(fields[3]), granularity,
                       parse_tokens(fields[4], mapping, source_name, line_no)};
        if (pair.source.tokens.empty())
            throw ParseError(source_name, line_no, "empty source unit");
        if (pair.target.tokens.empty())
            throw ParseError(source_name, line_no, "empty target unit");
        if (pair.source.lang == pair.target.lang)
            throw ParseError(source_name, line_no, "source and target language are identical");
        if (pairs.empty()) {
            src_lang = pair.source.lang;
            tgt_lang = pair.target.lang;
        } else if (pair.source.lang != src_lang || pair.target.lang != tgt_lang) {
            throw ParseError(source_name, line_no,
                             "language pair differs from " + src_lang + "-" + tgt_lang);
        }
        if (!ids.insert(pair.source.id).second)
            throw ParseError(source_name, line_no, "duplicate pair id '" + pair.source.id + "'");
        pairs.push_back(std::move(pair));
    }
    return AlignedPairCorpus(std::move(name), std::move(pairs));
}

AlignedPairCorpus parse_corpus(const std::filesystem::path& path, Granularity granularity,
                               const TagMapping* mapping, std::string name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus '" + path.string() + "'");
    if (name.empty()) name = path.stem().string();
    return read_corpus(in, granularity, std::move(name), mapping, path.string());
}

void write_corpus(std::ostream& out, const AlignedPairCorpus& corpus) {
    auto write_unit = [&out](const TextualUnit& unit) {
        for (std::size_t i = 0; i < unit.tokens.size(); ++i) {
            if (i) out << ' ';
            out << unit.tokens[i].surface << '/' << to_string(unit.tokens[i].upos);
        }
    };
    for (const auto& pair : corpus.pairs()) {
        out << pair.source.id << '\t' << pair.source.lang << '\t';
        write_unit(pair.source);
        out << '\t' << pair.target.lang << '\t';
        write_unit(pair.target);
        out << '\n';
    }
}

std::string serialize_corpus(const AlignedPairCorpus& corpus) {
    std::ostringstream out;
    write_corpus(out, corpus);
    return out.str();
}

}  // namespace clsim
