#include "clsim/pos_weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "clsim/error.hpp"
#include "strings.hpp"

namespace clsim {

PosWeights::PosWeights(const std::array<double, kNumUniversalTags>& values) : values_(values) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]) || values_[i] < 0.0)
            throw PreconditionError("weight for " + std::string(to_string(kAllUniversalTags[i])) +
                                    " must be finite and nonnegative");
}

PosWeights PosWeights::scaled(double factor) const {
    auto v = values_;
    for (auto& x : v) x *= factor;
    return PosWeights(v);
}

PosWeights PosWeights::normalized() const {
    const double top = *std::max_element(values_.begin(), values_.end());
    if (top <= 0.0) return *this;
    auto v = values_;
    for (auto& x : v) x /= top;
    return PosWeights(v);
}

PosWeights read_pos_weights(std::istream& in, const std::string& source_name) {
    std::array<double, kNumUniversalTags> values{};
    std::array<bool, kNumUniversalTags> seen{};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 2) throw ParseError(source_name, line_no, "expected 'tag<TAB>weight'");
        auto tag = parse_universal_tag(fields[0]);
        if (!tag)
            throw ParseError(source_name, line_no,
                             "'" + std::string(fields[0]) + "' is not a universal tag");
        double w = 0.0;
        auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), w);
        if (ec != std::errc() || p != fields[1].data() + fields[1].size() || !std::isfinite(w) ||
            w < 0.0)
            throw ParseError(source_name, line_no, "bad weight '" + std::string(fields[1]) + "'");
        if (seen[tag_index(*tag)])
            throw ParseError(source_name, line_no, "duplicate tag " + std::string(fields[0]));
        seen[tag_index(*tag)] = true;
        values[tag_index(*tag)] = w;
    }
    for (std::size_t i = 0; i < kNumUniversalTags; ++i)
        if (!seen[i])
            throw ParseError(source_name + ": missing weight for tag " +
                             std::string(to_string(kAllUniversalTags[i])));
    return PosWeights(values);
}

PosWeights load_pos_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open POS weights '" + path.string() + "'");
    return read_pos_weights(in, path.string());
}

void write_pos_weights(std::ostream& out, const PosWeights& weights) {
    for (auto tag : kAllUniversalTags)
        out << to_string(tag) << '\t' << detail::format_exact(weights[tag]) << '\n';
}

}  // namespace clsim
