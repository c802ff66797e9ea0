#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "clsim/error.hpp"
#include "clsim/evaluation.hpp"
#include "fixtures.hpp"

using namespace clsim;
using doctest::Approx;

namespace {

DistanceMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> coarse(0, 20);
    std::vector<double> s(n * m);
    // Coarse values produce ties, which the sweep must handle.
    for (auto& x : s) x = coarse(rng) % 3 == 0 ? coarse(rng) / 20.0 : u(rng);
    return build_matrix([&s, m](std::size_t r, std::size_t c) { return s[r * m + c]; }, n, m,
                        rng());
}

// Counting oracle independent of prf().
double oracle_f1(const DistanceMatrix& mx, double t) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < mx.rows(); ++r)
        for (std::size_t c = 0; c < mx.cols(); ++c) {
            const bool rel = mx.target(r, c) == r;
            const bool got = mx.score(r, c) >= t;
            tp += rel && got;
            fp += !rel && got;
            fn += rel && !got;
        }
    return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace

TEST_CASE("sample layout") {
    auto a = sample_layout(5, 3, 42);
    auto b = sample_layout(5, 3, 42);
    CHECK(a.targets == b.targets);
    CHECK(a.targets.size() == 15);
    for (std::size_t r = 0; r < 5; ++r) {
        CHECK(a.gold_col[r] == 0);
        CHECK(a.targets[r * 3] == r);
    }
    CHECK(sample_layout(5, 3, 43).targets != a.targets);
    CHECK_THROWS_AS(sample_layout(0, 3, 1), PreconditionError);
    CHECK_THROWS_AS(sample_layout(5, 0, 1), PreconditionError);
}

TEST_CASE("distractors are uniform over the corpus") {
    const std::size_t n = 5, m = 1000;
    auto layout = sample_layout(n, m, 2024);
    std::vector<double> counts(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 1; c < m; ++c) counts[layout.targets[r * m + c]] += 1.0;
    const double expected = static_cast<double>(n * (m - 1)) / static_cast<double>(n);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 4 degrees of freedom; 18.467 is the 0.999 quantile.
    CHECK(chi2 < 18.467);
}

TEST_CASE("one pair and one column") {
    auto mx = build_matrix([](std::size_t, std::size_t) { return 0.25; }, 1, 1, 7);
    CHECK(mx.rows() == 1);
    CHECK(mx.cols() == 1);
    CHECK(mx.score(0, 0) == 0.25);
    CHECK(mx.relevant(0, 0));
}

TEST_CASE("matrices are reproducible") {
    auto scorer = [](std::size_t r, std::size_t c) { return 1.0 / (1.0 + r + 2.0 * c); };
    CHECK(build_matrix(scorer, 5, 3, 99) == build_matrix(scorer, 5, 3, 99));
}

TEST_CASE("duplicate gold draws are relevant") {
    auto layout = sample_layout(2, 200, 5);
    auto mx = fill_matrix(layout, [](std::size_t r, std::size_t c) { return r == c ? 1.0 : 0.0; });
    std::size_t relevant = 0;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 200; ++c) relevant += layout.targets[r * 200 + c] == r;
    CHECK(relevant > 2);
    CHECK(mx.relevant_count() == relevant);
    auto p = prf(mx, 0.5);
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
}

TEST_CASE("precision, recall and F1 at fixed thresholds") {
    auto ex = DistanceMatrix::from_scores(2, 2, {0.9, 0.1, 0.4, 0.8}, {0, 1});
    auto p = prf(ex, 0.5);
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
    CHECK(p.f1 == 1.0);

    auto all = prf(ex, -std::numeric_limits<double>::infinity());
    CHECK(all.recall == 1.0);
    CHECK(all.precision == 2.0 / 4.0);

    auto none = prf(ex, 2.0);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);

    auto half = DistanceMatrix::from_scores(2, 2, {0.9, 0.6, 0.4, 0.8}, {1, 1});
    auto q = prf(half, 0.5);
    CHECK(q.precision == 2.0 / 3.0);
    CHECK(q.recall == 1.0);
    CHECK(q.f1 == 0.8);
}

TEST_CASE("matrix validation") {
    CHECK_THROWS_AS(DistanceMatrix::from_scores(2, 2, {0.1, 0.2, 0.3}, {0, 0}), PreconditionError);
    CHECK_THROWS_AS(DistanceMatrix::from_scores(1, 2, {0.1, NAN}, {0}), PreconditionError);
    CHECK_THROWS_AS(DistanceMatrix::from_scores(1, 2, {0.1, 0.2}, {2}), PreconditionError);
}

TEST_CASE("threshold sweep") {
    SUBCASE("separable") {
        auto mx = DistanceMatrix::from_scores(3, 3, {0.9, 0.1, 0.2, 0.3, 0.8, 0.1, 0.0, 0.2, 0.7},
                                              {0, 1, 2});
        auto best = sweep_threshold(mx);
        CHECK(best.scores.f1 == 1.0);
        CHECK(best.threshold == 0.7);
    }
    SUBCASE("all cells equal") {
        auto mx = DistanceMatrix::from_scores(4, 5, std::vector<double>(20, 0.3), {0, 1, 2, 3});
        auto best = sweep_threshold(mx);
        const double p = 4.0 / 20.0;
        CHECK(best.scores.recall == 1.0);
        CHECK(best.scores.precision == p);
        CHECK(best.scores.f1 == Approx(2 * p / (p + 1)).epsilon(1e-15));
    }
    SUBCASE("random 10x10 against a 10,000-point grid") {
        std::mt19937_64 rng(17);
        for (int t = 0; t < 20; ++t) {
            auto mx = random_matrix(rng, 10, 10);
            auto best = sweep_threshold(mx);
            CHECK(best.scores.f1 == prf(mx, best.threshold).f1);
            CHECK(best.scores.f1 == Approx(oracle_f1(mx, best.threshold)).epsilon(1e-15));
            double grid_best = 0.0;
            for (int i = 0; i <= 10000; ++i) grid_best = std::max(grid_best, prf(mx, i / 10000.0).f1);
            CHECK(best.scores.f1 >= grid_best);
        }
    }
}

TEST_CASE("prf bounds and optimality over random probes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> probe(-0.1, 1.1);
    for (int t = 0; t < 10; ++t) {
        auto mx = random_matrix(rng, 12, 30);
        auto best = sweep_threshold(mx);
        for (int i = 0; i < 1000; ++i) {
            auto p = prf(mx, probe(rng));
            CHECK(p.precision >= 0.0);
            CHECK(p.precision <= 1.0);
            CHECK(p.recall <= 1.0);
            CHECK(p.f1 <= std::max(p.precision, p.recall));
            CHECK(best.scores.f1 >= p.f1);
        }
    }
}

TEST_CASE("folds") {
    auto scorer = [](std::size_t r, std::size_t c) { return r == c ? 0.9 : 0.1 + 0.01 * static_cast<double>(c % 7); };
    auto one = run_folds(scorer, 6, 1, 4, 100);
    REQUIRE(one.size() == 1);
    auto direct = sweep_threshold(build_matrix(scorer, 6, 4, 100));
    CHECK(one[0].f1 == direct.scores.f1);
    CHECK(one[0].threshold == direct.threshold);
    CHECK(one[0].tuning);

    auto ten = run_folds(scorer, 6, 10, 4, 100);
    CHECK(ten.size() == 10);
    for (const auto& f : ten) {
        CHECK(f.f1 == 1.0);
        CHECK(f.seed == 100 + f.fold_index);
        CHECK(f.tuning == (f.fold_index < 2));
    }
    auto again = run_folds(scorer, 6, 10, 4, 100);
    for (std::size_t k = 0; k < 10; ++k) CHECK(again[k].threshold == ten[k].threshold);

    CHECK(reporting_folds(10) == std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(reporting_folds(2) == std::vector<std::size_t>{0, 1});
    CHECK(reporting_folds(3) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("confidence intervals") {
    std::vector<double> flat{0.5, 0.5, 0.5};
    auto ci = confidence_interval(flat);
    CHECK(ci.mean == 0.5);
    CHECK(ci.half_width == 0.0);

    std::vector<double> two{0.0, 1.0};
    ci = confidence_interval(two);
    CHECK(ci.mean == 0.5);
    CHECK(ci.half_width == Approx(1.96 * std::sqrt(0.5) / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(ci.half_width - 0.98) < 1e-12);

    std::vector<double> single{0.3};
    CHECK_THROWS_AS(confidence_interval(single), PreconditionError);
}

TEST_CASE("reports") {
    std::vector<FoldResult> folds;
    for (std::size_t k = 0; k < 10; ++k) folds.push_back({k, k, 0.5, 1, 1, k < 2 ? 0.0 : 0.5 + 0.01 * k, k < 2});
    auto row = summarize("CL-WES", "JRC", "chunk", folds);
    CHECK(row.folds == 8);
    CHECK(row.mean_f1 == Approx(0.5 + 0.01 * 5.5));

    std::ostringstream out;
    write_report(out, {row});
    CHECK(out.str().rfind("method\tcorpus\tgranularity\tmean_f1\tci_half_width\tfolds\n", 0) == 0);
    std::istringstream in(out.str());
    auto back = read_report(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].method == "CL-WES");
    CHECK(back[0].folds == 8);
    CHECK(back[0].mean_f1 == Approx(row.mean_f1).epsilon(1e-6));

    std::ostringstream table;
    auto other = row;
    other.method = "CL-C3G";
    other.granularity = "sentence";
    write_table(table, {row, other});
    const auto text = table.str();
    CHECK(text.find("# chunk level\nMethods\tJRC (%)\nCL-WES\t55.50 ± ") != std::string::npos);
    CHECK(text.find("# sentence level\nMethods\tJRC (%)\nCL-C3G\t") != std::string::npos);

    // Chunk block first even when sentence rows come first.
    std::ostringstream swapped;
    write_table(swapped, {other, row});
    CHECK(swapped.str().find("# chunk level") < swapped.str().find("# sentence level"));
}

TEST_CASE("histograms") {
    SUBCASE("separable") {
        auto mx = fill_matrix(sample_layout(50, 20, 3),
                              [](std::size_t r, std::size_t c) { return r == c ? 1.0 : 0.0; });
        auto h = histogram(mx, 2, 1);
        CHECK(h.positives == std::vector<std::size_t>{0, 50});
        CHECK(h.negatives == std::vector<std::size_t>{50, 0});
        CHECK(h.bin_edges == std::vector<double>{0.0, 0.5, 1.0});
    }
    SUBCASE("one bin and conservation") {
        std::mt19937_64 rng(4);
        auto mx = random_matrix(rng, 30, 40);
        auto h1 = histogram(mx, 1, 9);
        CHECK(h1.positives == std::vector<std::size_t>{30});
        CHECK(h1.negatives == std::vector<std::size_t>{30});
        auto h = histogram(mx, 7, 9);
        std::size_t pos = 0, neg = 0;
        for (auto x : h.positives) pos += x;
        for (auto x : h.negatives) neg += x;
        CHECK(pos == 30);
        CHECK(neg == 30);
    }
    SUBCASE("sampled and reproducible") {
        std::mt19937_64 rng(8);
        auto mx = random_matrix(rng, 300, 10);
        auto a = histogram(mx, 10, 5, 100);
        auto b = histogram(mx, 10, 5, 100);
        CHECK(a.positives == b.positives);
        CHECK(a.negatives == b.negatives);
        CHECK(a.bin_edges == b.bin_edges);
        std::size_t pos = 0;
        for (auto x : a.positives) pos += x;
        CHECK(pos == 100);
    }
    SUBCASE("counts reconcile with the matrix cells") {
        std::mt19937_64 rng(12);
        auto mx = random_matrix(rng, 40, 25);
        auto h = histogram(mx, 6, 2);
        auto bin_of = [&h](double x) {
            std::size_t b = 0;
            while (b + 1 < h.positives.size() && x >= h.bin_edges[b + 1]) ++b;
            return b;
        };
        std::vector<std::size_t> gold(6, 0), others(6, 0);
        for (std::size_t r = 0; r < mx.rows(); ++r)
            for (std::size_t c = 0; c < mx.cols(); ++c) {
                if (c == mx.gold_col(r)) ++gold[bin_of(mx.score(r, c))];
                else if (!mx.relevant(r, c)) ++others[bin_of(mx.score(r, c))];
            }
        CHECK(h.positives == gold);
        for (std::size_t b = 0; b < 6; ++b) CHECK(h.negatives[b] <= others[b]);
    }
    CHECK_THROWS_AS(histogram(DistanceMatrix::from_scores(1, 1, {0.5}, {0}), 0, 1), PreconditionError);
}
