#include "clsim/fusion.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "clsim/error.hpp"
#include "strings.hpp"

namespace clsim {

// ---- score vectors and weights ----------------------------------------------

ScoreVector::ScoreVector(std::vector<std::pair<MethodId, double>> scores, std::optional<bool> label)
    : scores_(std::move(scores)), label_(label) {
    std::set<MethodId> seen;
    for (const auto& [method, s] : scores_) {
        if (!seen.insert(method).second)
            throw PreconditionError("score vector repeats " + std::string(to_string(method)));
        if (!std::isfinite(s))
            throw PreconditionError("non-finite score for " + std::string(to_string(method)));
    }
}

std::optional<double> ScoreVector::find(MethodId method) const {
    for (const auto& [m, s] : scores_)
        if (m == method) return s;
    return std::nullopt;
}

double ScoreVector::at(MethodId method) const {
    if (auto s = find(method)) return *s;
    throw PreconditionError("score vector has no " + std::string(to_string(method)) + " score");
}

FusionWeights::FusionWeights(std::map<MethodId, double> raw) {
    double total = 0.0;
    for (const auto& [m, w] : raw) {
        if (!std::isfinite(w) || w < 0.0)
            throw PreconditionError("fusion weight for " + std::string(to_string(m)) +
                                    " must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw PreconditionError("at least one fusion weight must be positive");
    for (auto& [m, w] : raw) w /= total;
    weights_ = std::move(raw);
}

FusionWeights FusionWeights::uniform(std::span<const MethodId> methods) {
    std::map<MethodId, double> raw;
    for (auto m : methods) raw[m] = 1.0;
    return FusionWeights(std::move(raw));
}

std::optional<double> FusionWeights::weight(MethodId method) const {
    auto it = weights_.find(method);
    if (it == weights_.end()) return std::nullopt;
    return it->second;
}

FusionWeights read_fusion_weights(std::istream& in, const std::string& source_name) {
    std::map<MethodId, double> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 2) throw ParseError(source_name, line_no, "expected 'method<TAB>weight'");
        auto method = parse_method(fields[0]);
        if (!method)
            throw ParseError(source_name, line_no, "unknown method '" + std::string(fields[0]) + "'");
        double w = 0.0;
        auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), w);
        if (ec != std::errc() || p != fields[1].data() + fields[1].size())
            throw ParseError(source_name, line_no, "bad weight '" + std::string(fields[1]) + "'");
        if (!raw.emplace(*method, w).second)
            throw ParseError(source_name, line_no, "duplicate method " + std::string(fields[0]));
    }
    try {
        return FusionWeights(std::move(raw));
    } catch (const PreconditionError& e) {
        throw ParseError(source_name + ": " + e.what());
    }
}

FusionWeights load_fusion_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fusion weights '" + path.string() + "'");
    return read_fusion_weights(in, path.string());
}

void write_fusion_weights(std::ostream& out, const FusionWeights& weights) {
    for (const auto& [m, w] : weights.weights())
        out << to_string(m) << '\t' << detail::format_exact(w) << '\n';
}

double average_fusion(const ScoreVector& v) {
    if (v.empty()) throw PreconditionError("average fusion of an empty score vector");
    double sum = 0.0;
    for (const auto& [m, s] : v.scores()) sum += s;
    return sum / static_cast<double>(v.size());
}

double weighted_fusion(const ScoreVector& v, const FusionWeights& w) {
    if (v.empty()) throw PreconditionError("weighted fusion of an empty score vector");
    double top = 0.0;
    for (const auto& [m, s] : v.scores()) {
        auto wm = w.weight(m);
        if (!wm) throw PreconditionError("no fusion weight for " + std::string(to_string(m)));
        top = std::max(top, *wm);
    }
    if (!(top > 0.0)) throw PreconditionError("all fusion weights of present methods are zero");
    // Relative weights (largest = 1): uniform weights become exact ones.
    double num = 0.0, den = 0.0, lo = v.scores().front().second, hi = lo;
    for (const auto& [m, s] : v.scores()) {
        const double rel = *w.weight(m) / top;
        num += rel * s;
        den += rel;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return std::clamp(num / den, lo, hi);
}

// ---- C4.5 -------------------------------------------------------------------

namespace {

double entropy2(double a, double b) {
    const double n = a + b;
    double h = 0.0;
    for (double c : {a, b})
        if (c > 0.0) h -= (c / n) * std::log2(c / n);
    return h;
}

struct SplitCounts {
    double left_match = 0, left_mismatch = 0, right_match = 0, right_mismatch = 0;
};

/// Gain and split information, in bits.
std::pair<double, double> split_gain(const SplitCounts& s) {
    const double nl = s.left_match + s.left_mismatch;
    const double nr = s.right_match + s.right_mismatch;
    const double n = nl + nr;
    if (nl == 0 || nr == 0) return {0.0, 0.0};
    const double gain = entropy2(s.left_match + s.right_match, s.left_mismatch + s.right_mismatch) -
                        (nl / n) * entropy2(s.left_match, s.left_mismatch) -
                        (nr / n) * entropy2(s.right_match, s.right_mismatch);
    const double info = entropy2(nl, nr);
    return {gain, info};
}

constexpr double kMinGain = 1e-10;

class C45Builder {
public:
    C45Builder(std::span<const ScoreVector> rows, const C45Options& options) : options_(options) {
        if (rows.empty()) throw PreconditionError("cannot train a tree on no rows");
        if (options.min_leaf == 0) throw PreconditionError("min_leaf must be at least 1");
        if (!(options.confidence > 0.0 && options.confidence <= 0.5))
            throw PreconditionError("pruning confidence must lie in (0, 0.5]");
        for (const auto& [m, s] : rows.front().scores()) attributes_.push_back(m);
        std::sort(attributes_.begin(), attributes_.end());
        if (attributes_.empty()) throw PreconditionError("training rows carry no scores");

        values_.resize(rows.size() * attributes_.size());
        labels_.resize(rows.size());
        bool any_match = false, any_mismatch = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (!row.label()) throw PreconditionError("training row " + std::to_string(i) + " is unlabelled");
            if (row.size() != attributes_.size())
                throw PreconditionError("training row " + std::to_string(i) +
                                        " has a different method set");
            for (std::size_t a = 0; a < attributes_.size(); ++a) {
                auto s = row.find(attributes_[a]);
                if (!s)
                    throw PreconditionError("training row " + std::to_string(i) +
                                            " has a different method set");
                values_[i * attributes_.size() + a] = *s;
            }
            labels_[i] = *row.label();
            (labels_[i] ? any_match : any_mismatch) = true;
        }
        if (!any_match || !any_mismatch)
            throw PreconditionError("training rows must contain both classes");
    }

    DecisionTree build() {
        std::vector<std::size_t> all(labels_.size());
        std::iota(all.begin(), all.end(), 0);
        nodes_.clear();
        grow(all);
        if (options_.prune) prune(0);
        return compact();
    }

private:
    double value(std::size_t row, std::size_t a) const { return values_[row * attributes_.size() + a]; }

    std::size_t grow(const std::vector<std::size_t>& rows) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        auto& counts = nodes_[id];
        for (auto r : rows) ++(labels_[r] ? counts.match_count : counts.mismatch_count);

        const bool pure = counts.match_count == 0 || counts.mismatch_count == 0;
        if (pure || rows.size() < 2 * options_.min_leaf) return id;

        struct Best {
            double ratio = -1.0;
            std::size_t attribute = 0;
            double threshold = 0.0;
        } best;

        std::vector<std::size_t> order(rows);
        for (std::size_t a = 0; a < attributes_.size(); ++a) {
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return value(x, a) < value(y, a);
            });
            SplitCounts s;
            for (auto r : order) (labels_[r] ? s.right_match : s.right_mismatch) += 1;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const bool m = labels_[order[i]];
                (m ? s.left_match : s.left_mismatch) += 1;
                (m ? s.right_match : s.right_mismatch) -= 1;
                const double lo = value(order[i], a), hi = value(order[i + 1], a);
                if (lo == hi) continue;
                if (i + 1 < options_.min_leaf || order.size() - i - 1 < options_.min_leaf) continue;
                auto [gain, info] = split_gain(s);
                if (gain <= kMinGain || info <= 0.0) continue;
                const double ratio = gain / info;
                if (ratio > best.ratio) {
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(mid < hi)) mid = lo;
                    best = {ratio, a, mid};
                }
            }
        }
        if (best.ratio < 0.0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows)
            (value(r, best.attribute) <= best.threshold ? left : right).push_back(r);
        nodes_[id].leaf = false;
        nodes_[id].attribute = attributes_[best.attribute];
        nodes_[id].threshold = best.threshold;
        const std::size_t l = grow(left);
        const std::size_t r = grow(right);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    double leaf_errors(const DecisionTree::Node& n) const {
        const double total = static_cast<double>(n.match_count + n.mismatch_count);
        const double wrong = static_cast<double>(std::min(n.match_count, n.mismatch_count));
        return wrong + pessimistic_extra_errors(total, wrong, options_.confidence);
    }

    /// Returns the estimated errors of the (possibly pruned) subtree.
    double prune(std::size_t id) {
        if (nodes_[id].leaf) return leaf_errors(nodes_[id]);
        const double subtree = prune(nodes_[id].left) + prune(nodes_[id].right);
        const double as_leaf = leaf_errors(nodes_[id]);
        if (as_leaf <= subtree + 0.1) {
            nodes_[id].leaf = true;
            return as_leaf;
        }
        return subtree;
    }

    /// Drops nodes orphaned by pruning and renumbers in preorder.
    DecisionTree compact() const {
        std::vector<DecisionTree::Node> out;
        auto copy = [&](auto&& self, std::size_t id) -> std::size_t {
            const std::size_t at = out.size();
            out.push_back(nodes_[id]);
            if (nodes_[id].leaf) {
                out[at].left = out[at].right = 0;
                out[at].threshold = 0.0;
                out[at].attribute = MethodId::CL_C3G;
                return at;
            }
            const std::size_t l = self(self, nodes_[id].left);
            const std::size_t r = self(self, nodes_[id].right);
            out[at].left = l;
            out[at].right = r;
            return at;
        };
        copy(copy, 0);
        return DecisionTree(std::move(out));
    }

    const C45Options& options_;
    std::vector<MethodId> attributes_;
    std::vector<double> values_;
    std::vector<bool> labels_;
    std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

double pessimistic_extra_errors(double n, double errors, double cf) {
    if (n <= 0.0) return 0.0;
    if (errors < 1.0) {
        const double base = n * (1.0 - std::pow(cf, 1.0 / n));
        if (errors == 0.0) return base;
        return base + errors * (pessimistic_extra_errors(n, 1.0, cf) - base);
    }
    if (errors + 0.5 >= n) return std::max(n - errors, 0.0);
    const double z = boost::math::quantile(boost::math::normal(), 1.0 - cf);
    const double f = (errors + 0.5) / n;
    const double r = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) /
                     (1 + z * z / n);
    return r * n - errors;
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw PreconditionError("a decision tree needs at least one node");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.leaf) {
            if (n.match_count + n.mismatch_count == 0)
                throw PreconditionError("leaf " + std::to_string(i) + " has an empty distribution");
        } else if (n.left <= i || n.right <= i || n.left >= nodes_.size() ||
                   n.right >= nodes_.size() || !std::isfinite(n.threshold)) {
            throw PreconditionError("node " + std::to_string(i) + " has invalid children");
        }
    }
}

DecisionTree DecisionTree::single_leaf(std::size_t match_count, std::size_t mismatch_count) {
    Node leaf;
    leaf.match_count = match_count;
    leaf.mismatch_count = mismatch_count;
    return DecisionTree({leaf});
}

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

std::size_t DecisionTree::depth() const {
    auto walk = [&](auto&& self, std::size_t id) -> std::size_t {
        const auto& n = nodes_[id];
        if (n.leaf) return 0;
        return 1 + std::max(self(self, n.left), self(self, n.right));
    };
    return nodes_.empty() ? 0 : walk(walk, 0);
}

const DecisionTree::Node& DecisionTree::route(const ScoreVector& v) const {
    std::size_t id = 0;
    while (!nodes_[id].leaf) {
        const auto& n = nodes_[id];
        id = v.at(n.attribute) <= n.threshold ? n.left : n.right;
    }
    return nodes_[id];
}

double gain_ratio(std::span<const ScoreVector> rows, MethodId attribute, double threshold) {
    if (rows.empty()) throw PreconditionError("gain ratio of no rows");
    SplitCounts s;
    for (const auto& row : rows) {
        if (!row.label()) throw PreconditionError("gain ratio needs labelled rows");
        const bool left = row.at(attribute) <= threshold;
        const bool m = *row.label();
        (left ? (m ? s.left_match : s.left_mismatch) : (m ? s.right_match : s.right_mismatch)) += 1;
    }
    auto [gain, info] = split_gain(s);
    if (info <= 0.0) return 0.0;
    return std::max(0.0, gain) / info;
}

DecisionTree train_c45(std::span<const ScoreVector> rows, const C45Options& options) {
    return C45Builder(rows, options).build();
}

Classification classify(const DecisionTree& tree, const ScoreVector& v) {
    const auto& leaf = tree.route(v);
    const double total = static_cast<double>(leaf.match_count + leaf.mismatch_count);
    const double frac = static_cast<double>(leaf.match_count) / total;
    const bool match = leaf.predicts_match();
    return {match, match ? frac : 1.0 - frac, frac};
}

std::vector<MethodId> root_attributes(const DecisionTree& tree, std::size_t depth) {
    if (depth == 0) throw PreconditionError("depth must be at least 1");
    std::vector<MethodId> out;
    std::deque<std::pair<std::size_t, std::size_t>> queue{{0, 0}};
    while (!queue.empty()) {
        auto [id, level] = queue.front();
        queue.pop_front();
        const auto& n = tree.node(id);
        if (n.leaf || level >= depth) continue;
        if (std::find(out.begin(), out.end(), n.attribute) == out.end()) out.push_back(n.attribute);
        queue.emplace_back(n.left, level + 1);
        queue.emplace_back(n.right, level + 1);
    }
    return out;
}

void write_tree(std::ostream& out, const DecisionTree& tree) {
    auto walk = [&](auto&& self, std::size_t id, std::size_t level) -> void {
        const auto& n = tree.node(id);
        out << std::string(2 * level, ' ');
        if (n.leaf) {
            out << (n.predicts_match() ? "match" : "mismatch") << " (" << n.match_count << ", "
                << n.mismatch_count << ")\n";
            return;
        }
        out << to_string(n.attribute) << " <= " << detail::format_exact(n.threshold) << '\n';
        self(self, n.left, level + 1);
        self(self, n.right, level + 1);
    };
    walk(walk, 0, 0);
}

std::string serialize_tree(const DecisionTree& tree) {
    std::ostringstream out;
    write_tree(out, tree);
    return out.str();
}

DecisionTree read_tree(std::istream& in) {
    struct Line {
        std::size_t level;
        std::string text;
        std::size_t line_no;
    };
    std::vector<Line> lines;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        detail::strip_cr(raw);
        if (raw.empty() || raw.front() == '#') continue;
        const auto indent = raw.find_first_not_of(' ');
        if (indent == std::string::npos) continue;
        if (indent % 2 != 0) throw ParseError("<tree>", line_no, "odd indentation");
        lines.push_back({indent / 2, raw.substr(indent), line_no});
    }
    if (lines.empty()) throw ParseError("empty tree");

    std::vector<DecisionTree::Node> nodes;
    std::size_t pos = 0;
    auto parse = [&](auto&& self, std::size_t level) -> std::size_t {
        if (pos >= lines.size()) throw ParseError("tree ends before every branch has a leaf");
        const auto& line = lines[pos++];
        if (line.level != level)
            throw ParseError("<tree>", line.line_no, "unexpected indentation");
        const std::size_t id = nodes.size();
        nodes.emplace_back();
        auto le = line.text.find(" <= ");
        if (le != std::string::npos) {
            auto method = parse_method(line.text.substr(0, le));
            if (!method) throw ParseError("<tree>", line.line_no, "unknown method");
            const std::string num = line.text.substr(le + 4);
            double t = 0.0;
            auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), t);
            if (ec != std::errc() || p != num.data() + num.size())
                throw ParseError("<tree>", line.line_no, "bad threshold '" + num + "'");
            nodes[id].leaf = false;
            nodes[id].attribute = *method;
            nodes[id].threshold = t;
            const std::size_t l = self(self, level + 1);
            const std::size_t r = self(self, level + 1);
            nodes[id].left = l;
            nodes[id].right = r;
            // Internal counts are not written; a node's rows are its children's.
            nodes[id].match_count = nodes[l].match_count + nodes[r].match_count;
            nodes[id].mismatch_count = nodes[l].mismatch_count + nodes[r].mismatch_count;
            return id;
        }
        std::string cls;
        unsigned long long a = 0, b = 0;
        char open = 0, comma = 0, close = 0;
        std::istringstream ls(line.text);
        if (!(ls >> cls >> open >> a >> comma >> b >> close) || open != '(' || comma != ',' ||
            close != ')' || (cls != "match" && cls != "mismatch"))
            throw ParseError("<tree>", line.line_no, "malformed node '" + line.text + "'");
        nodes[id].match_count = a;
        nodes[id].mismatch_count = b;
        return id;
    };
    parse(parse, 0);
    if (pos != lines.size()) throw ParseError("<tree>", lines[pos].line_no, "trailing nodes");
    return DecisionTree(std::move(nodes));
}

DecisionTree parse_tree(const std::string& text) {
    std::istringstream in(text);
    return read_tree(in);
}

// ---- fusion over matrices -----------------------------------------------------

ScoreVector score_vector_at(std::span<const MethodMatrix> members, std::size_t r, std::size_t c,
                            std::optional<bool> label) {
    std::vector<std::pair<MethodId, double>> scores;
    scores.reserve(members.size());
    for (const auto& m : members) scores.emplace_back(m.method, m.matrix.score(r, c));
    return ScoreVector(std::move(scores), label);
}

namespace {

void check_layouts(std::span<const MethodMatrix> members) {
    if (members.empty()) throw PreconditionError("fusion needs at least one member matrix");
    const auto& first = members.front().matrix;
    for (const auto& m : members)
        if (m.matrix.rows() != first.rows() || m.matrix.cols() != first.cols() ||
            !std::equal(m.matrix.targets().begin(), m.matrix.targets().end(),
                        first.targets().begin()))
            throw PreconditionError("member matrices do not share a sampling layout");
}

template <class Fn>
DistanceMatrix fuse(std::span<const MethodMatrix> members, std::string label, Fn&& cell) {
    check_layouts(members);
    const auto& first = members.front().matrix;
    std::vector<double> scores(first.cells());
    for (std::size_t r = 0; r < first.rows(); ++r)
        for (std::size_t c = 0; c < first.cols(); ++c)
            scores[r * first.cols() + c] = cell(score_vector_at(members, r, c));
    return first.with_scores(std::move(scores), std::move(label));
}

}  // namespace

DistanceMatrix average_fused_matrix(std::span<const MethodMatrix> members) {
    return fuse(members, "average-fusion", [](const ScoreVector& v) { return average_fusion(v); });
}

DistanceMatrix weighted_fused_matrix(std::span<const MethodMatrix> members,
                                     const FusionWeights& weights) {
    return fuse(members, "weighted-fusion",
                [&](const ScoreVector& v) { return weighted_fusion(v, weights); });
}

DistanceMatrix tree_fused_matrix(std::span<const MethodMatrix> members, const DecisionTree& tree) {
    return fuse(members, "decision-tree",
                [&](const ScoreVector& v) { return classify(tree, v).match_fraction; });
}

std::vector<ScoreVector> training_rows(std::span<const std::vector<MethodMatrix>> folds,
                                       std::uint64_t seed, double negatives_per_positive) {
    std::vector<ScoreVector> positives, negatives;
    for (const auto& members : folds) {
        check_layouts(members);
        const auto& first = members.front().matrix;
        for (std::size_t r = 0; r < first.rows(); ++r)
            for (std::size_t c = 0; c < first.cols(); ++c) {
                const bool rel = first.relevant(r, c);
                (rel ? positives : negatives).push_back(score_vector_at(members, r, c, rel));
            }
    }
    std::mt19937_64 rng(seed);
    auto keep_first = [&rng](std::vector<ScoreVector>& v, std::size_t k) {
        k = std::min(k, v.size());
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, v.size() - 1);
            std::swap(v[i], v[pick(rng)]);
        }
        v.resize(k);
    };
    const auto wanted =
        static_cast<std::size_t>(std::llround(negatives_per_positive * positives.size()));
    if (negatives.size() > wanted) {
        keep_first(negatives, wanted);
    } else if (negatives_per_positive > 0.0) {
        keep_first(positives, static_cast<std::size_t>(
                                  std::llround(negatives.size() / negatives_per_positive)));
    }
    std::vector<ScoreVector> rows = std::move(positives);
    rows.insert(rows.end(), std::make_move_iterator(negatives.begin()),
                std::make_move_iterator(negatives.end()));
    return rows;
}

}  // namespace clsim
