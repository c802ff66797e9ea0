#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "clsim/corpus.hpp"

namespace clsim {

/// One nonnegative weight per universal tag, used to scale each word's
/// contribution to a syntactically weighted unit vector.
class PosWeights {
public:
    /// All ones: the weighted unit vector then equals the plain sum.
    PosWeights() { values_.fill(1.0); }
    /// Throws PreconditionError on a negative or non-finite weight.
    explicit PosWeights(const std::array<double, kNumUniversalTags>& values);

    static PosWeights ones() { return PosWeights(); }

    double operator[](UniversalTag tag) const noexcept { return values_[tag_index(tag)]; }
    const std::array<double, kNumUniversalTags>& values() const noexcept { return values_; }

    PosWeights scaled(double factor) const;
    /// Divided by the largest weight; all-zero weights are returned unchanged.
    PosWeights normalized() const;

    bool operator==(const PosWeights&) const = default;

private:
    std::array<double, kNumUniversalTags> values_;
};

/// Lines `tag <TAB> weight`; every one of the 12 tags must appear once.
PosWeights read_pos_weights(std::istream& in, const std::string& source_name = "<stream>");
PosWeights load_pos_weights(const std::filesystem::path& path);
void write_pos_weights(std::ostream& out, const PosWeights& weights);

}  // namespace clsim
