#include "fate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fate/errors.hpp"

namespace fate {

namespace {

constexpr std::size_t kExactLimit = 12;

bool has_ties(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::sort(pooled.begin(), pooled.end());
    return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Counts of arrangements with each U value. Without ties, U is determined by
// which m of the pooled ranks 1..m+n belong to x: U = sum(ranks) - m(m+1)/2.
// Count m-subsets of {1..m+n} by rank sum with a subset-sum DP.
std::vector<double> exact_u_counts(std::size_t m, std::size_t n) {
    const std::size_t pooled = m + n;
    const std::size_t max_sum = pooled * (pooled + 1) / 2;
    std::vector<std::vector<double>> by_sum(m + 1, std::vector<double>(max_sum + 1, 0.0));
    by_sum[0][0] = 1.0;
    for (std::size_t rank = 1; rank <= pooled; ++rank) {
        for (std::size_t k = std::min(m, rank); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= rank; --s) {
                by_sum[k][s] += by_sum[k - 1][s - rank];
            }
        }
    }
    const std::size_t min_sum = m * (m + 1) / 2;
    std::vector<double> counts(m * n + 1, 0.0);
    for (std::size_t u = 0; u <= m * n; ++u) counts[u] = by_sum[m][min_sum + u];
    return counts;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

std::string method_name(TestMethod m) {
    return m == TestMethod::Exact ? "exact" : "normal_approx";
}

std::string direction_name(Direction d) {
    switch (d) {
        case Direction::XDominates: return "x_dominates";
        case Direction::YDominates: return "y_dominates";
        case Direction::None: return "none";
    }
    return "none";
}

double vargha_delaney_a12(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw InvalidSampleError("samples must be nonempty");
    double wins = 0.0;
    for (double xi : x) {
        for (double yj : y) {
            if (xi > yj) wins += 1.0;
            else if (xi == yj) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

std::string a12_magnitude(double a12) {
    const double scaled = std::max(a12, 1.0 - a12);
    if (scaled < 0.56) return "negligible";
    if (scaled < 0.64) return "small";
    if (scaled < 0.71) return "medium";
    return "large";
}

StatTestResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw InvalidSampleError("samples must be nonempty");

    StatTestResult res;
    res.n_x = x.size();
    res.n_y = y.size();
    res.a12 = vargha_delaney_a12(x, y);
    res.magnitude = a12_magnitude(res.a12);
    res.direction = res.a12 > 0.5   ? Direction::XDominates
                    : res.a12 < 0.5 ? Direction::YDominates
                                    : Direction::None;

    // U for x via pair counting (equivalent to the rank-sum form, midranks
    // for ties).
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double u_x = res.a12 * nx * ny;
    res.u_statistic = u_x;
    const double mu = nx * ny / 2.0;

    const bool ties = has_ties(x, y);
    if (x.size() + y.size() <= kExactLimit && !ties) {
        res.method = TestMethod::Exact;
        const auto counts = exact_u_counts(x.size(), y.size());
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        const double dev = std::abs(u_x - mu);
        double tail = 0.0;
        for (std::size_t u = 0; u < counts.size(); ++u) {
            if (std::abs(static_cast<double>(u) - mu) >= dev - 1e-12) tail += counts[u];
        }
        res.p_value = tail / total;
        return res;
    }

    res.method = TestMethod::NormalApprox;

    // Tie-corrected variance over the pooled midranks.
    std::map<double, std::size_t> tie_groups;
    for (double v : x) ++tie_groups[v];
    for (double v : y) ++tie_groups[v];
    const double n = nx + ny;
    double tie_term = 0.0;
    for (const auto& [value, t] : tie_groups) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double variance =
        nx * ny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) {
        res.p_value = 1.0;  // all observations identical
        return res;
    }
    double z = u_x - mu;
    // Continuity correction toward the mean.
    if (z > 0.5) z -= 0.5;
    else if (z < -0.5) z += 0.5;
    else z = 0.0;
    z /= std::sqrt(variance);
    res.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
    return res;
}

}  // namespace fate
