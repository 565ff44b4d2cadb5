#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/geometry.hpp"
#include "dimest/pair_count.hpp"
#include "dimest/planner.hpp"
#include "dimest/point_cloud.hpp"

namespace dimest {

/// Outcome of a two-scale estimate.
///
/// Value: both counts positive, `rounded` is the nearest integer to the
/// slope (halves round up). Undefined: no pairs at one of the scales; with
/// pairs at eps1 only, `lower_bound` is the floor of the slope computed with
/// c2 := 1. GreaterThan: the hypothesis-testing form of the latter, used by
/// the reach-free test with `rounded` set to the hypothesised dimension.
struct DimEstimate {
    enum class Kind { Value, GreaterThan, Undefined };

    Kind kind = Kind::Undefined;
    std::optional<double> raw_slope;
    int rounded = 0;
    std::optional<int> lower_bound;
    unsigned long long count1 = 0;
    unsigned long long count2 = 0;

    bool defined() const noexcept { return kind == Kind::Value; }
    bool equals(int d) const noexcept { return kind == Kind::Value && rounded == d; }

    std::string to_string() const {
        switch (kind) {
            case Kind::Value: return std::to_string(rounded);
            case Kind::GreaterThan: return ">" + std::to_string(rounded);
            case Kind::Undefined: break;
        }
        return count1 == 0 ? "undefined (no pairs at eps1)" : "undefined (no pairs at eps2)";
    }
};

/// Nearest integer, halves rounded up.
inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

/// Two-scale slope (log c1 - log c2) / (log eps1 - log eps2) from counts.
inline DimEstimate estimate_from_counts(unsigned long long c1, unsigned long long c2, const ScalePair& s) {
    s.validate();
    DimEstimate e;
    e.count1 = c1;
    e.count2 = c2;
    const double lr = s.log_ratio();
    if (c1 == 0) return e;
    if (c2 == 0) {
        e.lower_bound = static_cast<int>(std::floor(std::log(static_cast<double>(c1)) / lr));
        return e;
    }
    const double slope = (std::log(static_cast<double>(c1)) - std::log(static_cast<double>(c2))) / lr;
    e.kind = DimEstimate::Kind::Value;
    e.raw_slope = slope;
    e.rounded = round_half_up(slope);
    return e;
}

/// The correlation-sum estimator at scales (eps1, eps2).
inline DimEstimate dim_corr(const PointCloud& X, const ScalePair& s) {
    s.validate();
    const double eps[2] = {s.eps2, s.eps1};
    const auto counts = pair_count_curve(X, eps);
    return estimate_from_counts(counts[1].count, counts[0].count, s);
}

/// Grassberger-Procaccia single-scale estimate log(|DX| / (n(n-1))) / log eps,
/// with |DX| the ordered pair count. Empty when no pair lies within eps.
inline std::optional<double> dim_gp(const PointCloud& X, double eps) {
    if (!(eps > 0.0) || eps == 1.0) throw DomainError("dim_gp: eps must be positive and != 1");
    const auto c = count_pairs(X, eps).count;
    if (c == 0) return std::nullopt;
    const double n = static_cast<double>(X.size());
    return std::log(2.0 * static_cast<double>(c) / (n * (n - 1.0))) / std::log(eps);
}

/// The k smallest nonzero pairwise distances, ascending.
inline std::vector<double> smallest_pair_distances(const PointCloud& X, unsigned long long k) {
    if (k == 0) return {};
    if (k >= X.pair_total()) {
        auto d2 = sorted_pair_distances_squared(X);
        if (d2.size() > k) d2.resize(static_cast<std::size_t>(k));
        for (double& v : d2) v = std::sqrt(v);
        return d2;
    }
    // Max-heap of the k best squared distances seen so far.
    std::priority_queue<double> heap;
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = i + 1; j < X.size(); ++j) {
            const double v = X.distance_squared(i, j);
            if (v <= 0.0) continue;
            if (heap.size() < k) {
                heap.push(v);
            } else if (v < heap.top()) {
                heap.pop();
                heap.push(v);
            }
        }
    std::vector<double> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = std::sqrt(heap.top());
        heap.pop();
    }
    return out;
}

struct ReachFreeResult {
    DimEstimate estimate;
    double R = 0.0;
    double r = 0.0;
    bool pass = false;
};

/// Tests the hypothesis "dimension d" without knowing the reach. The working
/// scale R is the smallest radius holding `pairs` close pairs, r = R eps2/eps1
/// for the reference scale ratio. No pairs at r reports GreaterThan(d).
inline ReachFreeResult reach_free_test(const PointCloud& X, Dimension d, long long pairs, const ScalePair& ratio) {
    ratio.validate();
    if (pairs < 1) throw DomainError("reach_free_test: pair budget must be >= 1");
    const auto k = static_cast<unsigned long long>(pairs);
    const auto nearest = smallest_pair_distances(X, k);
    if (nearest.size() < k)
        throw InfeasiblePlan("cannot test d=" + std::to_string(d.get()) + ": only " +
                             std::to_string(nearest.size()) + " nonzero pairs, need " + std::to_string(k));
    ReachFreeResult res;
    res.R = nearest.back();
    res.r = ratio.eps2 / ratio.eps1 * res.R;
    const ScalePair s{res.R, res.r};
    res.estimate = dim_corr(X, s);
    if (res.estimate.count1 > 0 && res.estimate.count2 == 0) {
        res.estimate.kind = DimEstimate::Kind::GreaterThan;
        res.estimate.rounded = d.get();
    }
    res.pass = res.estimate.equals(d.get());
    return res;
}

/// Reach-free test with the budget and scale ratio of the heuristic table at 90%.
inline ReachFreeResult reach_free_test(const PointCloud& X, Dimension d) {
    const auto* row = reference::row(d.get());
    if (row == nullptr) throw DomainError("reach_free_test: no reference budget for d=" + std::to_string(d.get()));
    return reach_free_test(X, d, row->pairs_90, ScalePair{row->eps1, row->eps2});
}

inline constexpr double kLogLogSentinel = -1.0;

struct LogLogPoint {
    double log_eps;
    double log_count;  // kLogLogSentinel when the count is zero
    unsigned long long count;
};

using LogLogCurve = std::vector<LogLogPoint>;

/// (log eps, log |PX(eps)|) for each scale; zero counts map to the sentinel.
inline LogLogCurve loglog_points(const PointCloud& X, std::span<const double> eps_grid) {
    const auto counts = pair_count_curve(X, eps_grid);
    LogLogCurve curve;
    curve.reserve(counts.size());
    for (const auto& pc : counts) {
        curve.push_back({std::log(pc.eps),
                         pc.count == 0 ? kLogLogSentinel : std::log(static_cast<double>(pc.count)),
                         pc.count});
    }
    return curve;
}

/// `count` log-uniform scales from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_grid: need 0 < lo < hi, count >= 2");
    std::vector<double> g(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// Default log-log grid: 50 scales from the 1st-percentile pairwise
/// distance to the diameter.
inline std::vector<double> default_loglog_grid(const PointCloud& X, std::size_t count = 50) {
    const auto d2 = sorted_pair_distances_squared(X);
    if (d2.size() < 2) throw DomainError("log-log grid needs at least two distinct pairwise distances");
    const std::size_t idx = static_cast<std::size_t>(0.01 * static_cast<double>(d2.size() - 1));
    const double lo = std::sqrt(d2[idx]);
    const double hi = std::sqrt(d2.back());
    if (!(hi > lo)) throw DomainError("log-log grid degenerate: all distances equal");
    return log_grid(lo, hi, count);
}

inline LogLogCurve loglog_points(const PointCloud& X) {
    const auto grid = default_loglog_grid(X);
    return loglog_points(X, grid);
}

/// Least-squares slope of the defined points with log_eps in [lo, hi].
inline std::optional<double> loglog_slope(const LogLogCurve& curve, double log_lo, double log_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& p : curve) {
        if (p.count == 0 || p.log_eps < log_lo || p.log_eps > log_hi) continue;
        sx += p.log_eps;
        sy += p.log_count;
        sxx += p.log_eps * p.log_eps;
        sxy += p.log_eps * p.log_count;
        ++m;
    }
    if (m < 2) return std::nullopt;
    const double den = m * sxx - sx * sx;
    if (den <= 0.0) return std::nullopt;
    return (m * sxy - sx * sy) / den;
}

}  // namespace dimest
