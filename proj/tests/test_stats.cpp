#include <catch2/catch_amalgamated.hpp>

#include "lesionbench/report.hpp"
#include "lesionbench/stats.hpp"
#include "oracles.hpp"

using namespace lesionbench;

namespace {

PairedSample make_sample(const std::vector<double>& a, const std::vector<double>& b) {
    PairedSample s;
    s.values_a = a;
    s.values_b = b;
    return s;
}

}  // namespace

TEST_CASE("equal samples are degenerate with p = 1", "[stats]") {
    const auto r = wilcoxon_signed_rank(make_sample({1, 2, 3}, {1, 2, 3}));
    CHECK(r.degenerate);
    CHECK(r.n_effective == 0);
    CHECK(r.p_two_sided == 1.0);
}

TEST_CASE("n=5 all positive distinct: W=0, p = 2/32", "[stats]") {
    const auto r =
        wilcoxon_signed_rank(make_sample({5, 9, 14, 20, 27}, {4, 7, 11, 16, 22}));
    CHECK(r.method == WilcoxonMethod::Exact);
    CHECK(r.n_effective == 5);
    CHECK(r.w_statistic == 0.0);
    CHECK(r.p_two_sided == Catch::Approx(0.0625).margin(1e-15));
}

TEST_CASE("n=6 all positive distinct: p = 2/64", "[stats]") {
    const auto r = wilcoxon_signed_rank(
        make_sample({5, 9, 14, 20, 27, 35}, {4, 7, 11, 16, 22, 28}));
    CHECK(r.method == WilcoxonMethod::Exact);
    CHECK(r.p_two_sided == Catch::Approx(0.03125).margin(1e-15));
}

TEST_CASE("exact path matches the 2^n enumeration oracle", "[stats]") {
    oracle::TestRng rng(60601);
    int trials = 0;
    while (trials < 200) {
        const int n = rng.next_int(1, 10);
        std::vector<double> diffs;
        std::set<int> magnitudes;  // force distinct |d| so the exact path applies
        for (int i = 0; i < n; ++i) {
            int mag;
            do {
                mag = rng.next_int(1, 500);
            } while (magnitudes.count(mag));
            magnitudes.insert(mag);
            diffs.push_back(rng.next_unit() < 0.5 ? -mag : mag);
        }
        std::vector<double> b(diffs.size(), 0.0);
        const auto r = wilcoxon_signed_rank(make_sample(diffs, b));
        REQUIRE(r.method == WilcoxonMethod::Exact);
        const double expected = oracle::wilcoxon_exact_p_enumeration(diffs);
        REQUIRE(r.p_two_sided == Catch::Approx(expected).margin(1e-12));
        ++trials;
    }
}

TEST_CASE("ties in |differences| switch to the normal approximation", "[stats]") {
    const auto r = wilcoxon_signed_rank(make_sample({2, 3, 5}, {1, 2, 1}));  // |d| = 1, 1, 4
    CHECK(r.method == WilcoxonMethod::NormalApprox);
    CHECK(r.p_two_sided > 0.0);
    CHECK(r.p_two_sided <= 1.0);
}

TEST_CASE("n above the threshold switches to the normal approximation", "[stats]") {
    std::vector<double> a(26), b(26, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i + 1);
    const auto r = wilcoxon_signed_rank(make_sample(a, b));
    CHECK(r.method == WilcoxonMethod::NormalApprox);
}

TEST_CASE("normal approximation is close to exact at n = 15", "[stats]") {
    oracle::TestRng rng(31415);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> diffs;
        std::set<int> magnitudes;
        for (int i = 0; i < 15; ++i) {
            int mag;
            do {
                mag = rng.next_int(1, 2000);
            } while (magnitudes.count(mag));
            magnitudes.insert(mag);
            diffs.push_back(rng.next_unit() < 0.5 ? -mag : mag);
        }
        std::vector<double> zeros(diffs.size(), 0.0);
        const auto exact = wilcoxon_signed_rank(make_sample(diffs, zeros), 25);
        REQUIRE(exact.method == WilcoxonMethod::Exact);
        const auto approx = wilcoxon_signed_rank(make_sample(diffs, zeros), 5);
        REQUIRE(approx.method == WilcoxonMethod::NormalApprox);
        REQUIRE(std::abs(approx.p_two_sided - exact.p_two_sided) < 0.02);
    }
}

TEST_CASE("wilcoxon is symmetric under sample swap", "[stats]") {
    oracle::TestRng rng(999);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.next_int(2, 20);
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = rng.next_unit() * 100;
            b[i] = rng.next_unit() * 100;
        }
        const auto fwd = wilcoxon_signed_rank(make_sample(a, b));
        const auto rev = wilcoxon_signed_rank(make_sample(b, a));
        REQUIRE(fwd.w_statistic == rev.w_statistic);
        REQUIRE(fwd.p_two_sided == rev.p_two_sided);
        REQUIRE(fwd.p_two_sided > 0.0);
        REQUIRE(fwd.p_two_sided <= 1.0);
    }
}

TEST_CASE("zero differences are dropped before ranking", "[stats]") {
    const auto r = wilcoxon_signed_rank(make_sample({1, 5, 9, 14}, {1, 4, 7, 11}));
    CHECK(r.n_effective == 3);
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("sample validation", "[stats]") {
    CHECK_THROWS_AS(wilcoxon_signed_rank(make_sample({}, {})), InvalidArgumentError);
    CHECK_THROWS_AS(wilcoxon_signed_rank(make_sample({1, 2}, {1})), InvalidArgumentError);
}

// ---- pairwise dice matrix -----------------------------------------------------

TEST_CASE("identical raters give an all-100 matrix", "[stats]") {
    LabelVolume r = LabelVolume::create({3, 3, 3});
    r.at(1, 1, 1) = 1;
    const auto m = pairwise_dice_matrix({r, r, r}, 1);
    for (const auto& row : m)
        for (double v : row) REQUIRE(v == 100.0);
}

TEST_CASE("disjoint raters give zero off-diagonal", "[stats]") {
    LabelVolume a = LabelVolume::create({3, 3, 3});
    LabelVolume b = LabelVolume::create({3, 3, 3});
    a.at(0, 0, 0) = 1;
    b.at(2, 2, 2) = 1;
    const auto m = pairwise_dice_matrix({a, b}, 1);
    CHECK(m[0][1] == 0.0);
    CHECK(m[1][0] == 0.0);
    CHECK(m[0][0] == 100.0);
    CHECK(m[1][1] == 100.0);
}

TEST_CASE("matrix entries equal elementwise dice calls", "[stats]") {
    oracle::TestRng rng(808);
    std::vector<LabelVolume> raters;
    for (int r = 0; r < 3; ++r) {
        LabelVolume v = LabelVolume::create({5, 5, 5});
        for (auto& l : v.labels) l = rng.next_unit() < 0.3 ? 1 : 0;
        raters.push_back(std::move(v));
    }
    const auto m = pairwise_dice_matrix(raters, 1);
    for (std::size_t i = 0; i < raters.size(); ++i)
        for (std::size_t j = 0; j < raters.size(); ++j) {
            REQUIRE(m[i][j] == m[j][i]);
            if (i != j) REQUIRE(m[i][j] == dice(raters[i], raters[j], 1));
        }
}

// ---- aggregation -----------------------------------------------------------------

TEST_CASE("summarize computes mean, median and population stddev", "[stats]") {
    const auto s = summarize({40, 60});
    CHECK(s.mean == 50.0);
    CHECK(s.median == 50.0);
    CHECK(s.stddev == 10.0);  // population: sqrt(((−10)² + 10²)/2)
    CHECK(s.n == 2);

    const auto odd = summarize({1, 9, 5});
    CHECK(odd.median == 5.0);
}

TEST_CASE("single report aggregates to itself", "[stats]") {
    CaseReport r;
    r.case_id = "c1";
    r.lesion_label = 1;
    DiceEntry e;
    e.dice = 84.0;
    r.dice.per_label[1] = e;
    r.sensitivity = 0.5;
    r.precision = 0.75;
    r.f1 = 0.6;
    const CohortSummary s = aggregate_reports({r});
    CHECK(s.metrics.at("dice").mean == 84.0);
    CHECK(s.metrics.at("f1").mean == 0.6);
    CHECK(s.metrics.at("sensitivity").median == 0.5);
}

TEST_CASE("two reports with dice 40 and 60 average to 50", "[stats]") {
    std::vector<CaseReport> reports(2);
    for (std::size_t i = 0; i < 2; ++i) {
        reports[i].case_id = "c" + std::to_string(i);
        reports[i].lesion_label = 1;
        DiceEntry e;
        e.dice = i == 0 ? 40.0 : 60.0;
        reports[i].dice.per_label[1] = e;
    }
    const CohortSummary s = aggregate_reports(reports);
    CHECK(s.metrics.at("dice").mean == 50.0);
    CHECK(s.metrics.at("dice").median == 50.0);
}

TEST_CASE("flagged entries are excluded from the moments with a count", "[stats]") {
    std::vector<CaseReport> reports(3);
    for (std::size_t i = 0; i < 3; ++i) {
        reports[i].case_id = "c" + std::to_string(i);
        reports[i].lesion_label = 1;
        DiceEntry e;
        e.dice = 100.0;
        e.both_empty = i == 2;  // vacuous entry defaults to the convention value
        if (i < 2) e.dice = i == 0 ? 20.0 : 40.0;
        reports[i].dice.per_label[1] = e;
        reports[i].f1_vacuous = i == 2;
    }
    const CohortSummary s = aggregate_reports(reports);
    CHECK(s.metrics.at("dice").mean == 30.0);
    CHECK(s.metrics.at("dice").n == 2);
    CHECK(s.metrics.at("dice").n_excluded == 1);
    CHECK(s.metrics.at("f1").n_excluded == 1);
}

TEST_CASE("failed cases contribute nothing", "[stats]") {
    std::vector<CaseReport> reports(2);
    reports[0].lesion_label = 1;
    DiceEntry e;
    e.dice = 70.0;
    reports[0].dice.per_label[1] = e;
    reports[1].failed = true;
    reports[1].error = "unreadable";
    const CohortSummary s = aggregate_reports(reports);
    CHECK(s.n_failed == 1);
    CHECK(s.metrics.at("dice").mean == 70.0);
    CHECK(s.metrics.at("dice").n == 1);
}
