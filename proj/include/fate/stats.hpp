#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fate {

enum class TestMethod { Exact, NormalApprox };
enum class Direction { XDominates, YDominates, None };

std::string method_name(TestMethod m);
std::string direction_name(Direction d);

struct StatTestResult {
    double u_statistic = 0;  // U for the x sample
    double p_value = 1;
    double a12 = 0.5;
    std::size_t n_x = 0, n_y = 0;
    TestMethod method = TestMethod::NormalApprox;
    Direction direction = Direction::None;
    std::string magnitude;  // negligible | small | medium | large
};

// Two-sided Mann-Whitney / Wilcoxon rank-sum for independent samples. Exact
// permutation distribution when n_x + n_y <= 12 and there are no ties;
// otherwise normal approximation with midranks, tie-corrected variance and
// continuity correction.
StatTestResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y);

// A12 = P(X > Y) + 0.5 P(X = Y) over all cross pairs.
double vargha_delaney_a12(const std::vector<double>& x, const std::vector<double>& y);

// Vargha-Delaney magnitude label at thresholds 0.56 / 0.64 / 0.71, symmetric
// around 0.5.
std::string a12_magnitude(double a12);

}  // namespace fate
