#pragma once

// Comparison estimators: the all-angles ANOVA variant, local PCA, and the
// expected number of eps-close k-tuples.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/geometry.hpp"
#include "dimest/pair_count.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/quadrature.hpp"

namespace dimest {

namespace detail {

// E[(theta - pi/2)^p] for the angle between two uniform directions in R^d,
// whose density on [0, pi] is proportional to sin^{d-2}. Valid for real d > 1.
// The law is symmetric about pi/2, so integrate over [0, pi/2] and double.
// For d < 2 the weight theta^{d-2} is singular at 0; u = theta^{d-1} absorbs it.
inline double angle_moment(double d, int p) {
    if (!(d > 1.0)) throw DomainError("angle moments need d > 1");
    constexpr double h = std::numbers::pi / 2;
    if (d >= 2.0) {
        const double e = d - 2.0;
        auto w = [e](double t) { return e == 0.0 ? 1.0 : std::pow(std::sin(t), e); };
        const double num = quad::integrate([&](double t) { return std::pow(t - h, p) * w(t); }, 0.0, h);
        const double den = quad::integrate(w, 0.0, h);
        return num / den;
    }
    const double a = d - 1.0;  // in (0, 1)
    const double umax = std::pow(h, a);
    auto theta = [a](double u) { return std::pow(u, 1.0 / a); };
    // sin^{d-2}(t) dt = (sin t / t)^{d-2} du / a
    auto w = [&](double u) {
        const double t = theta(u);
        return t == 0.0 ? 1.0 : std::pow(std::sin(t) / t, d - 2.0);
    };
    const double num = quad::integrate([&](double u) { return std::pow(theta(u) - h, p) * w(u); }, 0.0, umax);
    const double den = quad::integrate(w, 0.0, umax);
    return num / den;
}

}  // namespace detail

/// beta_d: second moment about pi/2 of the angle between independent
/// uniform directions in R^d. Decreasing in d; beta_2 = pi^2/12.
inline double beta_d(double d) {
    if (!(d >= 2.0)) throw DomainError("beta_d requires d >= 2");
    return detail::angle_moment(d, 2);
}

/// Reference value used by the ANOVA search: beta_d for d >= 2 and the
/// d -> 1 limit pi^2/4 (angles on a curve are 0 or pi).
inline double anova_reference(int d) {
    if (d < 1) throw DomainError("anova_reference: d >= 1");
    if (d == 1) return std::numbers::pi * std::numbers::pi / 4.0;
    return beta_d(d);
}

/// Angle statistic of a cloud at one scale.
struct AngleStatistic {
    double mean_sq_deviation = 0.0;  // mean of (theta - pi/2)^2
    unsigned long long angles = 0;
    unsigned long long triples = 0;
};

namespace detail {

// Angle between u and v, stable near 0 and pi.
inline double vector_angle(std::span<const double> u, std::span<const double> v) {
    double nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    double diff = 0, sum = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u[i] / nu;
        const double b = v[i] / nv;
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace detail

/// Visits every unordered triple whose three mutual distances are in (0, eps],
/// passing the three vertex angles.
template <class Fn>
void for_each_close_triple(const PointCloud& X, double eps, Fn&& fn) {
    const std::size_t n = X.size();
    const std::size_t s = X.ambient_dim();
    PairGrid grid(s, X.metric(), eps);
    for (std::size_t i = 0; i < n; ++i) grid.insert(X.point(i));
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) adj[i] = grid.neighbour_indices(X.point(i));

    auto adjacent = [&](std::size_t a, std::uint32_t b) {
        return std::binary_search(adj[a].begin(), adj[a].end(), b);
    };
    std::vector<double> ab(s), ac(s), ba(s), bc(s), ca(s), cb(s);
    const Metric& m = X.metric();
    for (std::size_t a = 0; a < n; ++a) {
        const auto& na = adj[a];
        for (std::size_t p = 0; p < na.size(); ++p) {
            const std::uint32_t b = na[p];
            if (b <= a) continue;
            for (std::size_t q = p + 1; q < na.size(); ++q) {
                const std::uint32_t c = na[q];
                if (!adjacent(b, c)) continue;
                auto A = X.point(a), B = X.point(b), C = X.point(c);
                m.displacement(A, B, ab);
                m.displacement(A, C, ac);
                m.displacement(B, A, ba);
                m.displacement(B, C, bc);
                m.displacement(C, A, ca);
                m.displacement(C, B, cb);
                fn(detail::vector_angle(ab, ac), detail::vector_angle(ba, bc), detail::vector_angle(ca, cb));
            }
        }
    }
}

/// Mean of (theta - pi/2)^2 over the three vertex angles of all close triples.
inline AngleStatistic anova_statistic(const PointCloud& X, double eps) {
    if (!(eps > 0.0)) throw DomainError("anova_statistic: eps must be > 0");
    constexpr double h = std::numbers::pi / 2;
    AngleStatistic st;
    double sum = 0.0;
    for_each_close_triple(X, eps, [&](double t0, double t1, double t2) {
        sum += (t0 - h) * (t0 - h) + (t1 - h) * (t1 - h) + (t2 - h) * (t2 - h);
        st.angles += 3;
        ++st.triples;
    });
    if (st.angles > 0) st.mean_sq_deviation = sum / static_cast<double>(st.angles);
    return st;
}

/// Dimension in [d_min, d_max] whose reference moment is closest to B.
/// Ties go to the smaller dimension.
inline int nearest_anova_dimension(double B, int d_min = 1, int d_max = 12) {
    if (d_min < 1 || d_max < d_min) throw DomainError("anova: invalid dimension range");
    int best = d_min;
    double best_err = std::abs(B - anova_reference(d_min));
    for (int d = d_min + 1; d <= d_max; ++d) {
        const double err = std::abs(B - anova_reference(d));
        if (err < best_err) {
            best_err = err;
            best = d;
        }
    }
    return best;
}

/// ANOVA estimate at scale eps1; empty when no close triple exists.
inline std::optional<int> anova_estimate(const PointCloud& X, double eps1, int d_min = 1, int d_max = 12) {
    const auto st = anova_statistic(X, eps1);
    if (st.angles == 0) return std::nullopt;
    return nearest_anova_dimension(st.mean_sq_deviation, d_min, d_max);
}

/// Throwing form of anova_estimate.
inline int anova_dimension(const PointCloud& X, double eps1, int d_min = 1, int d_max = 12) {
    const auto d = anova_estimate(X, eps1, d_min, d_max);
    if (!d) throw InfeasiblePlan("cannot estimate: no triple with all distances <= eps1");
    return *d;
}

/// Normal-approximation count of angles needed to place the sample moment
/// within half the distance to the neighbouring (half-integer) references.
inline long long anova_required_angles(Dimension d, const ScalePair& s, double z) {
    s.validate();
    if (d.get() < 2) throw DomainError("anova_required_angles requires d >= 2");
    if (!(z > 0.0)) throw DomainError("z must be > 0");
    const double dd = d.get();
    const double b = detail::angle_moment(dd, 2);
    const double var = detail::angle_moment(dd, 4) - b * b;
    const double gap = std::min(detail::angle_moment(dd - 0.5, 2) - b, b - detail::angle_moment(dd + 0.5, 2));
    const double n = z * z * var / (gap * gap);
    return static_cast<long long>(std::ceil(n * (1.0 - 1e-12)));
}

/// Expected number of k-subsets of n uniform points lying in a common
/// eps-ball pattern: C(n, k) (V_B(eps) / vol)^(k-1).
inline double expected_ktuples(long long n, int k, Dimension d, double eps, double vol) {
    if (k < 2 || n < k) throw DomainError("expected_ktuples: need k >= 2 and n >= k");
    if (!(vol > 0.0) || !(eps > 0.0)) throw DomainError("expected_ktuples: eps and vol must be > 0");
    const double nn = static_cast<double>(n);
    const double log_binom = std::lgamma(nn + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nn - k + 1.0);
    return std::exp(log_binom + (k - 1) * std::log(euclidean_ball_volume(d, eps) / vol));
}

/// Principal standard deviations of a point set: singular values of the
/// centred data scaled by 1/sqrt(n), descending. Uniform data in the unit
/// d-ball gives values near 1/sqrt(d+2).
struct SingularSpectrum {
    std::vector<double> values;
};

inline SingularSpectrum local_pca_spectrum(const PointCloud& P) {
    const std::size_t n = P.size();
    const std::size_t s = P.ambient_dim();
    if (n < 2) throw DomainError("local_pca_spectrum needs at least two points");
    // Displacements from the first point unwrap periodic axes locally.
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s));
    std::vector<double> v(s);
    for (std::size_t i = 0; i < n; ++i) {
        P.metric().displacement(P.point(0), P.point(i), v);
        for (std::size_t j = 0; j < s; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
    }
    A.rowwise() -= A.colwise().mean();
    A /= std::sqrt(static_cast<double>(n));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    SingularSpectrum out;
    out.values.assign(sv.data(), sv.data() + sv.size());
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    return out;
}

struct MaxGap {};
/// Largest k with s_k >= t (or s_k^2 >= t with `squared`).
struct Threshold {
    double t;
    bool squared = false;
};

/// MaxGap: argmax_k (s_k - s_{k+1}) with s_{m+1} = 0. Zero spectrum gives 0.
inline int local_pca_dimension(const SingularSpectrum& sp, MaxGap) {
    const auto& v = sp.values;
    if (v.empty() || v.front() <= 0.0) return 0;
    int best = 1;
    double best_gap = -1.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double next = k + 1 < v.size() ? v[k + 1] : 0.0;
        if (v[k] - next > best_gap) {
            best_gap = v[k] - next;
            best = static_cast<int>(k + 1);
        }
    }
    return best;
}

inline int local_pca_dimension(const SingularSpectrum& sp, Threshold rule) {
    int k = 0;
    for (std::size_t i = 0; i < sp.values.size(); ++i) {
        const double x = rule.squared ? sp.values[i] * sp.values[i] : sp.values[i];
        if (x > 0.0 && x >= rule.t) k = static_cast<int>(i + 1);
    }
    return k;
}

template <class Rule>
int local_pca_dimension(const PointCloud& P, Rule rule) {
    return local_pca_dimension(local_pca_spectrum(P), rule);
}

}  // namespace dimest
