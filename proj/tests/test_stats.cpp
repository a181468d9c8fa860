#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"

#include "fate/errors.hpp"
#include "fate/rng.hpp"
#include "fate/stats.hpp"

using namespace fate;

namespace {

// Brute-force oracle: enumerate every assignment of pooled positions to x via
// selection masks and tabulate the two-sided tail of U.
double exact_p_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t nx = x.size(), ny = y.size(), n = nx + ny;
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::sort(pooled.begin(), pooled.end());

    auto u_of = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
        double u = 0;
        for (double a : xs) {
            for (double b : ys) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
        }
        return u;
    };
    const double u_obs = u_of(x, y);
    const double mu = static_cast<double>(nx) * static_cast<double>(ny) / 2.0;

    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + nx, true);
    std::sort(mask.begin(), mask.end());  // lexicographically smallest

    double total = 0, tail = 0;
    do {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n; ++i) (mask[i] ? xs : ys).push_back(pooled[i]);
        const double u = u_of(xs, ys);
        total += 1;
        if (std::abs(u - mu) >= std::abs(u_obs - mu) - 1e-12) tail += 1;
    } while (std::next_permutation(mask.begin(), mask.end()));
    return tail / total;
}

}  // namespace

TEST_CASE("a12 golden cases") {
    CHECK(vargha_delaney_a12({3, 4}, {1, 2}) == 1.0);
    CHECK(vargha_delaney_a12({1, 2}, {1, 2}) == 0.5);
    CHECK(vargha_delaney_a12({1, 3}, {2, 4}) == 0.25);
}

TEST_CASE("a12 magnitude labels") {
    CHECK(a12_magnitude(0.5) == "negligible");
    CHECK(a12_magnitude(0.6) == "small");
    CHECK(a12_magnitude(0.37) == "small");  // symmetric around 0.5
    CHECK(a12_magnitude(0.65) == "medium");
    CHECK(a12_magnitude(0.9) == "large");
}

TEST_CASE("wilcoxon exact golden case") {
    const StatTestResult r = wilcoxon_rank_sum({1, 2}, {3, 4});
    CHECK(r.method == TestMethod::Exact);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(r.direction == Direction::YDominates);
}

TEST_CASE("identical samples separate nothing") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const StatTestResult r = wilcoxon_rank_sum(x, x);
    CHECK(r.p_value >= 0.99);
    CHECK(r.direction == Direction::None);
    CHECK(r.a12 == 0.5);
    CHECK(r.method == TestMethod::NormalApprox);  // ties force the approximation
}

TEST_CASE("clearly shifted distributions are detected") {
    Rng rng = make_rng(88);
    std::normal_distribution<double> lo(0.0, 0.3), hi(10.0, 0.3);
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(hi(rng));
        y.push_back(lo(rng));
    }
    const StatTestResult r = wilcoxon_rank_sum(x, y);
    CHECK(r.method == TestMethod::NormalApprox);
    CHECK(r.p_value < 0.05);
    CHECK(r.direction == Direction::XDominates);
    CHECK(r.a12 == 1.0);
    CHECK(r.magnitude == "large");
}

TEST_CASE("exact mode matches brute-force enumeration up to n=10") {
    Rng rng = make_rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t nx = 1; nx <= 5; ++nx) {
        for (std::size_t ny = 1; ny + nx <= 10; ++ny) {
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<double> x(nx), y(ny);
                for (auto& v : x) v = u(rng);
                for (auto& v : y) v = u(rng);
                const StatTestResult r = wilcoxon_rank_sum(x, y);
                REQUIRE(r.method == TestMethod::Exact);
                CHECK(r.p_value == doctest::Approx(exact_p_oracle(x, y)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("swapping samples mirrors a12 and preserves p") {
    Rng rng = make_rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t nx = 2 + rep % 8, ny = 2 + (rep / 3) % 9;
        std::vector<double> x(nx), y(ny);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = u(rng);
        const StatTestResult fwd = wilcoxon_rank_sum(x, y);
        const StatTestResult rev = wilcoxon_rank_sum(y, x);
        CHECK(fwd.a12 == doctest::Approx(1.0 - rev.a12).epsilon(1e-12));
        CHECK(fwd.p_value == doctest::Approx(rev.p_value).epsilon(1e-12));
    }
}

TEST_CASE("translation invariance") {
    Rng rng = make_rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(12), y(9);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const StatTestResult base = wilcoxon_rank_sum(x, y);

    std::vector<double> xs = x, ys = y;
    for (auto& v : xs) v += 1234.5;
    for (auto& v : ys) v += 1234.5;
    const StatTestResult shifted = wilcoxon_rank_sum(xs, ys);
    CHECK(shifted.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
    CHECK(shifted.a12 == doctest::Approx(base.a12).epsilon(1e-12));
    CHECK(shifted.u_statistic == doctest::Approx(base.u_statistic).epsilon(1e-12));
}

TEST_CASE("ties fall back to the tie-corrected normal approximation") {
    const StatTestResult r = wilcoxon_rank_sum({1, 2, 2}, {2, 3});
    CHECK(r.method == TestMethod::NormalApprox);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("empty samples raise InvalidSampleError") {
    CHECK_THROWS_AS(wilcoxon_rank_sum({}, {1.0}), InvalidSampleError);
    CHECK_THROWS_AS(vargha_delaney_a12({1.0}, {}), InvalidSampleError);
}

TEST_CASE("exact mode is only used through n_x+n_y = 12") {
    std::vector<double> x, y;
    for (int i = 0; i < 6; ++i) {
        x.push_back(i + 0.5);
        y.push_back(i + 100.5);
    }
    CHECK(wilcoxon_rank_sum(x, y).method == TestMethod::Exact);
    x.push_back(50.5);
    CHECK(wilcoxon_rank_sum(x, y).method == TestMethod::NormalApprox);
}
