#pragma once

// Sample-size planning. Two routes:
//  * the reach-based bound (Chebyshev on the close-pair counts, with the
//    curvature comparison constants cv/cr), which yields a law
//    n = n_const + n_coeff * sqrt(vol);
//  * the flat binomial model, which budgets the number N of eps1-close pairs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/geometry.hpp"
#include "dimest/reference_tables.hpp"

namespace dimest {

/// n(vol) = n_const + n_coeff * sqrt(vol).
struct SampleSizeLaw {
    double n_const;
    double n_coeff;

    double at(double vol) const { return n_const + n_coeff * std::sqrt(vol); }
    /// Integer point count with each coefficient rounded up first, the
    /// convention of the reference law tables.
    long long table_points(double vol) const {
        return static_cast<long long>(
            std::ceil(std::ceil(n_const) + std::ceil(n_coeff) * std::sqrt(vol)));
    }
};

struct TheoreticalPlan {
    int d;
    ScalePair scales;
    double alpha1;
    double delta;
    double rho;
    SampleSizeLaw law;
    double failure_prob;
    double objective;  // unrelaxed point count at the search volume
};

struct HeuristicPlan {
    int d;
    ScalePair scales;
    double confidence;
    long long pairs;
    double mean;   // E_d = (eps2 / eps1)^d
    double sigma;  // sqrt(E_d - E_d^2)
    double gap;    // min(E_{d-1/2} - E_d, E_d - E_{d+1/2})
};

/// Chebyshev budget making the deviation probability at most failure_prob.
inline double rho_for_target(const ScalePair& s, double delta, double failure_prob) {
    if (!(delta > 0.0)) throw DomainError("rho_for_target: delta must be > 0");
    if (!(failure_prob >= 0.0 && failure_prob < 1.0))
        throw DomainError("rho_for_target: failure_prob must lie in [0, 1)");
    const double t = 1.0 - std::pow(s.ratio(), 0.5 * delta);
    return failure_prob * t * t;
}

namespace detail {

struct ScaleConstants {
    double cv;
    double cr;
};

inline ScaleConstants scale_constants(Dimension d, double eps) { return {cv(d, eps), cr(d, eps)}; }

inline void check_split(double alpha1, double rho) {
    if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw DomainError("alpha1 must lie in (0, 1)");
    if (!(rho > 0.0)) throw DomainError("rho must be > 0");
}

inline SampleSizeLaw relaxed_law(const ScaleConstants& c1, const ScaleConstants& c2,
                                 double alpha1, double rho) {
    const double a[2] = {alpha1, 1.0 - alpha1};
    const ScaleConstants* c[2] = {&c1, &c2};
    double n_const = 0.0;
    double n_coeff = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double ar = a[i] * rho;
        n_const = std::max(n_const, (c[i]->cr - 1.0) * (c[i]->cr - 1.0) / ar);
        n_coeff = std::max(n_coeff, std::sqrt(2.0 / (ar * c[i]->cv)));
    }
    return {1.0 + n_const, n_coeff};
}

inline double unrelaxed_points(const ScaleConstants& c1, const ScaleConstants& c2, double alpha1,
                               double rho, double vol) {
    const double a[2] = {alpha1, 1.0 - alpha1};
    const ScaleConstants* c[2] = {&c1, &c2};
    double n = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double ar = a[i] * rho;
        const double b = (c[i]->cr - 1.0) * (c[i]->cr - 1.0) / ar;
        n = std::max(n, 1.0 + b + std::sqrt(2.0 * vol / (ar * c[i]->cv)));
    }
    return n;
}

}  // namespace detail

/// Volume-separable sample-size law from the reach-based bound.
inline SampleSizeLaw n_required(Dimension d, const ScalePair& s, double alpha1, double rho) {
    s.validate_for_bounds(d);
    detail::check_split(alpha1, rho);
    return detail::relaxed_law(detail::scale_constants(d, s.eps1),
                               detail::scale_constants(d, s.eps2), alpha1, rho);
}

/// n_required evaluated at a volume (un-rounded).
inline double n_required(Dimension d, const ScalePair& s, double alpha1, double vol, double rho) {
    if (!(vol > 0.0)) throw DomainError("n_required: vol must be > 0");
    return n_required(d, s, alpha1, rho).at(vol);
}

/// Point count from the per-scale bound before the volume-separable relaxation.
inline double n_required_unrelaxed(Dimension d, const ScalePair& s, double alpha1, double vol,
                                   double rho) {
    s.validate_for_bounds(d);
    detail::check_split(alpha1, rho);
    return detail::unrelaxed_points(detail::scale_constants(d, s.eps1),
                                    detail::scale_constants(d, s.eps2), alpha1, rho, vol);
}

/// Full theoretical plan at given scales and split.
inline TheoreticalPlan theoretical_plan(Dimension d, const ScalePair& s, double alpha1,
                                        double vol, double failure_prob = 0.1) {
    const double delta = gap_delta(d, s);
    if (!(delta > 0.0)) throw InfeasiblePlan("scales give non-positive gap");
    const double rho = rho_for_target(s, delta, failure_prob);
    return {d.get(),
            s,
            alpha1,
            delta,
            rho,
            n_required(d, s, alpha1, rho),
            failure_prob,
            n_required_unrelaxed(d, s, alpha1, vol, rho)};
}

struct ScaleSearchOptions {
    double grid_step = 0.01;
    double alpha_step = 0.01;
    double failure_prob = 0.1;
    // Optional restriction of the search box (inclusive, snapped to the grid).
    std::optional<double> eps1_min, eps1_max, eps2_min, eps2_max, alpha_min, alpha_max;
};

namespace detail {

/// Grid points k * step strictly inside (lo_excl, hi_excl), clipped to [lo, hi].
inline std::vector<double> grid_values(double step, double hi_excl, std::optional<double> lo,
                                       std::optional<double> hi) {
    std::vector<double> out;
    const double inv = 1.0 / step;
    const bool integral_inv = std::abs(inv - std::round(inv)) < 1e-9;
    for (long k = 1;; ++k) {
        const double v = integral_inv ? k / std::round(inv) : k * step;
        if (!(v < hi_excl - 1e-12)) break;
        if (lo && v < *lo - 1e-9) continue;
        if (hi && v > *hi + 1e-9) break;
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

/// Exhaustive grid minimisation of the point count over (eps1, eps2, alpha1).
///
/// The objective is the unrelaxed max over both scales of the Chebyshev
/// requirement at the given volume; ties keep the lexicographically
/// smallest (eps1, eps2, alpha1).
inline TheoreticalPlan scale_search(Dimension d, double vol, const ScaleSearchOptions& opt = {}) {
    if (!(opt.grid_step > 0.0 && opt.alpha_step > 0.0))
        throw DomainError("scale_search: steps must be > 0");
    if (!(vol > 0.0)) throw DomainError("scale_search: vol must be > 0");

    const double eps_limit = d.get() == 1 ? 2.0 : 1.0;
    // One grid for both scales; the eps1 and eps2 bounds filter it separately.
    const auto grid = detail::grid_values(opt.grid_step, eps_limit, std::nullopt, std::nullopt);
    const auto alphas = detail::grid_values(opt.alpha_step, 1.0, opt.alpha_min, opt.alpha_max);
    std::vector<detail::ScaleConstants> consts;
    consts.reserve(grid.size());
    for (double e : grid) consts.push_back(detail::scale_constants(d, e));
    const auto inside = [](double v, std::optional<double> lo, std::optional<double> hi) {
        return !(lo && v < *lo - 1e-9) && !(hi && v > *hi + 1e-9);
    };

    std::optional<TheoreticalPlan> best;
    for (std::size_t i1 = 0; i1 < grid.size(); ++i1) {
        if (!inside(grid[i1], opt.eps1_min, opt.eps1_max)) continue;
        for (std::size_t i2 = 0; i2 < i1; ++i2) {
            const double e2 = grid[i2];
            if (!inside(e2, opt.eps2_min, opt.eps2_max)) continue;
            const ScalePair s{grid[i1], e2};
            const double delta = gap_delta(d, s);
            if (!(delta > 0.0)) continue;
            const double rho = rho_for_target(s, delta, opt.failure_prob);
            for (double a : alphas) {
                const double n = detail::unrelaxed_points(consts[i1], consts[i2], a, rho, vol);
                if (!best || n < best->objective) {
                    best = TheoreticalPlan{d.get(), s, a, delta, rho,
                                           detail::relaxed_law(consts[i1], consts[i2], a, rho),
                                           opt.failure_prob, n};
                }
            }
        }
    }
    if (!best) throw InfeasiblePlan("no feasible scales on the search grid");
    return *best;
}

// ---------------------------------------------------------------------------
// Flat binomial model.

struct HeuristicStats {
    double mean;
    double sigma;
    double gap;
};

/// E_d, sigma_d and gap_d of the close-pair Bernoulli model; d may be fractional.
inline HeuristicStats heuristic_stats(double d, const ScalePair& s) {
    s.validate();
    const double c = s.ratio();
    const auto E = [c](double x) { return std::pow(c, x); };
    const double mean = E(d);
    return {mean, std::sqrt(mean - mean * mean), std::min(E(d - 0.5) - mean, mean - E(d + 0.5))};
}

/// Pairs needed under the normal approximation: ceil((z sigma_d / gap_d)^2).
inline long long pairs_required_clt(Dimension d, const ScalePair& s, double z) {
    if (!(z > 0.0)) throw DomainError("pairs_required_clt: z must be > 0");
    const auto st = heuristic_stats(d.get(), s);
    const double root = z * st.sigma / st.gap;
    // Guard against 1.0000000000000002 style round-off pushing the ceiling up.
    const double sq = root * root;
    const double nearest = std::round(sq);
    return static_cast<long long>(std::abs(sq - nearest) < 1e-9 * std::max(1.0, sq) ? nearest
                                                                                   : std::ceil(sq));
}

/// P(rounded estimate == d) when the eps2-close count is Binomial(N, E_d).
/// Success is E_{d+1/2} N <= Z <= E_{d-1/2} N; boundary hits count as success.
inline double binomial_success_probability(long long N, Dimension d, const ScalePair& s) {
    const double c = s.ratio();
    const double p = std::pow(c, d.get());
    const double lo = std::pow(c, d.get() + 0.5) * static_cast<double>(N);
    const double hi = std::pow(c, d.get() - 0.5) * static_cast<double>(N);
    const long long a = std::max<long long>(0, static_cast<long long>(std::ceil(lo)));
    const long long b = std::min<long long>(N, static_cast<long long>(std::floor(hi)));
    if (a > b) return 0.0;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double log_nf = std::lgamma(static_cast<double>(N) + 1.0);
    double sum = 0.0;
    for (long long k = a; k <= b; ++k) {
        const double kd = static_cast<double>(k);
        sum += std::exp(log_nf - std::lgamma(kd + 1.0) - std::lgamma(static_cast<double>(N - k) + 1.0) +
                        kd * log_p + static_cast<double>(N - k) * log_q);
    }
    return std::min(sum, 1.0);
}

namespace detail {

inline double bernoulli_kl(double a, double p) {
    return a * std::log(a / p) + (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
}

}  // namespace detail

/// Smallest N0 such that every budget N >= N0 reaches `confidence` under the
/// exact binomial model.
///
/// The success probability oscillates in N, so the first crossing is not
/// stable; the scan runs up to a Chernoff bound beyond which the two tails
/// are provably below 1 - confidence.
inline long long pairs_required_exact(Dimension d, const ScalePair& s, double confidence) {
    s.validate();
    if (!(confidence > 0.0 && confidence < 1.0))
        throw DomainError("pairs_required_exact: confidence must lie in (0, 1)");
    const double c = s.ratio();
    const double p = std::pow(c, d.get());
    const double kl = std::min(detail::bernoulli_kl(std::pow(c, d.get() - 0.5), p),
                               detail::bernoulli_kl(std::pow(c, d.get() + 0.5), p));
    const double safe = std::ceil(std::log(2.0 / (1.0 - confidence)) / kl);
    const long long n_safe = static_cast<long long>(std::min(safe, 1e8));
    long long last_fail = 0;
    for (long long N = 1; N <= n_safe; ++N)
        if (binomial_success_probability(N, d, s) < confidence) last_fail = N;
    return last_fail + 1;
}

inline HeuristicPlan heuristic_plan(Dimension d, const ScalePair& s, double confidence) {
    const auto st = heuristic_stats(d.get(), s);
    return {d.get(), s, confidence, pairs_required_exact(d, s, confidence), st.mean, st.sigma,
            st.gap};
}

/// Points whose expected close-pair count n^2/2 * V_B(eps1)/vol reaches N.
inline long long points_for_pairs(long long N, Dimension d, double eps1, double vol) {
    if (N < 1 || !(eps1 > 0.0) || !(vol > 0.0))
        throw DomainError("points_for_pairs: arguments must be positive");
    const double n = std::sqrt(2.0 * static_cast<double>(N) * vol / euclidean_ball_volume(d, eps1));
    return std::max<long long>(2, static_cast<long long>(std::ceil(n)));
}

/// Reference scales for d in [1, 10].
inline ScalePair reference_scales(Dimension d) {
    const auto* r = reference::row(d.get());
    if (!r) throw DomainError("reference scales exist for d in [1, 10] only");
    return {r->eps1, r->eps2};
}

/// c(d) with heuristic point count c(d) * sqrt(vol), using the reference
/// scales and the exact pair budget at `confidence`.
inline double heuristic_point_coefficient(Dimension d, double confidence = 0.9) {
    const ScalePair s = reference_scales(d);
    const long long N = pairs_required_exact(d, s, confidence);
    return std::sqrt(2.0 * static_cast<double>(N) / euclidean_ball_volume(d, s.eps1));
}

}  // namespace dimest
