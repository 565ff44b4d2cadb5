#pragma once

// Published reference values for dimensions 1..10. `scales` and `alpha1`
// are inputs to the planners; the remaining columns are the values the
// planners are expected to regenerate and serve as regression fixtures.

#include <array>

namespace dimest::reference {

struct Row {
    int d;
    double eps1;
    double eps2;
    double alpha1;        // bound split used for the theoretical law
    double gap;           // certified gap
    long n_const;         // theoretical law n = n_const + n_coeff * sqrt(vol)
    long n_coeff;
    long pairs_90;        // heuristic close-pair budget, 90% confidence
    long pairs_70;        // same, 70% confidence
    long heuristic_coeff; // heuristic n = coeff * sqrt(vol)
};

inline constexpr std::array<Row, 10> kRows = {{
    {1, 1.5, 0.19, 0.15, 0.463241, 9, 21, 30, 10, 5},
    {2, 0.78, 0.2, 0.11, 0.387573, 94, 58, 122, 40, 12},
    {3, 0.63, 0.23, 0.09, 0.307476, 635, 146, 249, 111, 22},
    {4, 0.54, 0.23, 0.06, 0.249891, 2786, 392, 516, 238, 50},
    {5, 0.46, 0.22, 0.04, 0.223958, 7013, 1119, 878, 360, 128},
    {6, 0.4, 0.21, 0.03, 0.208521, 13221, 3366, 1329, 554, 355},
    {7, 0.36, 0.21, 0.03, 0.178814, 25138, 10644, 1719, 698, 964},
    {8, 0.33, 0.2, 0.02, 0.166892, 50033, 34890, 2481, 1070, 2949},
    {9, 0.31, 0.19, 0.02, 0.155560, 63876, 119533, 3900, 1604, 9458},
    {10, 0.29, 0.18, 0.01, 0.152528, 139412, 425554, 5849, 2414, 33021},
}};

/// Row for dimension d in [1, 10]; nullptr otherwise.
inline const Row* row(int d) {
    return (d >= 1 && d <= 10) ? &kRows[static_cast<std::size_t>(d - 1)] : nullptr;
}

// Monte Carlo success rates (percent) observed with the pair budgets above.
struct RateRow {
    const char* manifold;  // manifold spec string
    int d;
    int rate_90;
    int rate_70;
};

inline constexpr std::array<RateRow, 10> kPairBudgetRates = {{
    {"sphere:3", 3, 92, 76},
    {"sphere:4", 4, 89, 75},
    {"clifford:2", 2, 89, 69},
    {"clifford:4", 4, 93, 72},
    {"flat:2", 2, 88, 66},
    {"flat:4", 4, 90, 74},
    {"rotation", 2, 92, 70},
    {"schwarz", 2, 88, 66},
    {"gaussian:4", 4, 90, 76},
    {"product(rotation,rotation)", 4, 92, 70},
}};

// Success rates (percent) when sampling the heuristic number of points.
inline constexpr std::array<RateRow, 4> kPointBudgetRates = {{
    {"clifford:2", 2, 91, 0},
    {"sphere:3", 3, 91, 0},
    {"flat:4", 4, 91, 0},
    {"product(rotation,rotation)", 4, 94, 0},
}};

struct ComparisonRow {
    const char* manifold;
    int d;
    long points;
    int corr_rate;
    int anova_rate;
};

inline constexpr std::array<ComparisonRow, 2> kAnovaComparison = {{
    {"clifford:2", 2, 76, 93, 65},
    {"clifford:3", 3, 347, 93, 67},
}};

inline constexpr double kCliffordT4Points = 18262;  // theoretical law evaluated at (2 pi)^4
inline constexpr long kT4HeuristicPoints = 1958;
inline constexpr long kClt4Pairs = 655;

}  // namespace dimest::reference
