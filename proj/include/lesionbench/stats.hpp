#pragma once

// Cross-case statistics: the Wilcoxon signed-rank test on paired per-case
// metrics, inter-rater Dice matrices, and cohort summaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/overlap.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

struct PairedSample {
    std::vector<std::string> case_ids;  // optional; empty or one per pair
    std::vector<double> values_a;
    std::vector<double> values_b;

    void validate() const {
        if (values_a.empty()) throw InvalidArgumentError("paired sample is empty");
        if (values_a.size() != values_b.size())
            throw InvalidArgumentError("paired sample lengths differ");
        if (!case_ids.empty() && case_ids.size() != values_a.size())
            throw InvalidArgumentError("case_ids length does not match values");
        for (std::size_t i = 0; i < values_a.size(); ++i)
            if (!std::isfinite(values_a[i]) || !std::isfinite(values_b[i]))
                throw InvalidArgumentError("paired sample holds non-finite value");
    }
};

enum class WilcoxonMethod { Exact, NormalApprox };

struct WilcoxonResult {
    double w_statistic = 0;  // min(W+, W-)
    double w_plus = 0;
    double w_minus = 0;
    int n_effective = 0;  // pairs with nonzero difference
    double p_two_sided = 1.0;
    WilcoxonMethod method = WilcoxonMethod::Exact;
    bool degenerate = false;  // every difference was zero
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// subset-sum counts over ranks {1..n}: ways[s] = #subsets with rank sum s
inline std::vector<std::uint64_t> signed_rank_distribution(int n) {
    const int max_sum = n * (n + 1) / 2;
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(max_sum) + 1, 0);
    ways[0] = 1;
    for (int r = 1; r <= n; ++r)
        for (int s = max_sum; s >= r; --s) ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
    return ways;
}

}  // namespace detail

/// Two-sided Wilcoxon signed-rank test on paired values. Zero differences
/// are dropped; |differences| are midranked. The null distribution is exact
/// (full sign-assignment enumeration) when the effective n is at most
/// `exact_threshold` and the magnitudes are tie-free; otherwise a normal
/// approximation with tie-corrected variance and 0.5 continuity correction.
inline WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample, int exact_threshold = 25) {
    sample.validate();

    std::vector<double> diffs;
    for (std::size_t i = 0; i < sample.values_a.size(); ++i) {
        const double d = sample.values_a[i] - sample.values_b[i];
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult result;
    result.n_effective = static_cast<int>(diffs.size());
    if (diffs.empty()) {
        result.degenerate = true;
        result.p_two_sided = 1.0;
        return result;
    }

    const int n = result.n_effective;
    std::vector<int> order(diffs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(diffs[static_cast<std::size_t>(a)]) < std::abs(diffs[static_cast<std::size_t>(b)]);
    });

    // midranks over tie groups; collect group sizes for the variance correction
    std::vector<double> rank(diffs.size(), 0);
    std::vector<int> tie_sizes;
    bool has_ties = false;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        const double mag = std::abs(diffs[static_cast<std::size_t>(order[i])]);
        while (j < order.size() && std::abs(diffs[static_cast<std::size_t>(order[j])]) == mag) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) rank[static_cast<std::size_t>(order[k])] = midrank;
        tie_sizes.push_back(static_cast<int>(j - i));
        if (j - i > 1) has_ties = true;
        i = j;
    }

    double w_plus = 0, w_minus = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        (diffs[i] > 0 ? w_plus : w_minus) += rank[i];
    result.w_plus = w_plus;
    result.w_minus = w_minus;
    result.w_statistic = std::min(w_plus, w_minus);

    if (n <= exact_threshold && !has_ties) {
        result.method = WilcoxonMethod::Exact;
        const auto ways = detail::signed_rank_distribution(n);
        const auto w_obs = static_cast<std::size_t>(std::llround(result.w_statistic));
        std::uint64_t at_or_below = 0;
        for (std::size_t s = 0; s <= w_obs && s < ways.size(); ++s) at_or_below += ways[s];
        const double denom = std::ldexp(1.0, n);  // 2^n
        result.p_two_sided = std::min(1.0, 2.0 * static_cast<double>(at_or_below) / denom);
    } else {
        result.method = WilcoxonMethod::NormalApprox;
        const double nn = static_cast<double>(n);
        const double mu = nn * (nn + 1.0) / 4.0;
        double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        for (int t : tie_sizes) {
            const double td = static_cast<double>(t);
            var -= (td * td * td - td) / 48.0;
        }
        const double sigma = std::sqrt(var);
        const double z = (result.w_statistic - mu + 0.5) / sigma;
        result.p_two_sided = std::clamp(2.0 * detail::normal_cdf(z),
                                        std::numeric_limits<double>::min(), 1.0);
    }
    return result;
}

/// Symmetric matrix of pairwise Dice values across raters; diagonal is the
/// full score exactly.
inline std::vector<std::vector<double>> pairwise_dice_matrix(const std::vector<LabelVolume>& raters,
                                                             int label_id,
                                                             DiceUnit unit = DiceUnit::Percent) {
    if (raters.size() < 2) throw InvalidArgumentError("pairwise_dice_matrix: need >= 2 raters");
    for (const LabelVolume& r : raters)
        if (r.dims != raters.front().dims)
            throw DimsMismatchError("pairwise_dice_matrix: volume dims differ");

    const double full = unit == DiceUnit::Percent ? 100.0 : 1.0;
    const std::size_t n = raters.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, full));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = dice(raters[i], raters[j], label_id, unit);
            m[i][j] = d;
            m[j][i] = d;
        }
    return m;
}

/// Mean / median / population standard deviation of a metric across cases.
struct SummaryStats {
    double mean = 0;
    double median = 0;
    double stddev = 0;
    std::size_t n = 0;
    std::size_t n_excluded = 0;  // flagged entries left out of the moments
};

inline SummaryStats summarize(std::vector<double> values, std::size_t n_excluded = 0) {
    SummaryStats s;
    s.n = values.size();
    s.n_excluded = n_excluded;
    if (values.empty()) return s;

    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());

    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size()));

    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return s;
}

}  // namespace lesionbench
