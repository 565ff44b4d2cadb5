#pragma once

// Constant-curvature volume formulas and the reach-based bounds on how the
// volume of the thick diagonal {(x, y) : |x - y| <= eps} scales between two
// radii. Everything here depends on the dimension and the radii only; the
// manifold enters solely through the normalisation reach >= 1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dimest/errors.hpp"
#include "dimest/quadrature.hpp"

namespace dimest {

/// Intrinsic manifold dimension, d >= 1.
class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 1) throw DomainError("dimension must be >= 1, got " + std::to_string(d));
    }
    int get() const noexcept { return d_; }
    explicit operator int() const noexcept { return d_; }
    friend bool operator==(Dimension, Dimension) = default;

private:
    int d_;
};

/// The two radii eps1 > eps2 > 0 the estimator compares.
struct ScalePair {
    double eps1;
    double eps2;

    double ratio() const noexcept { return eps2 / eps1; }
    double log_ratio() const noexcept { return std::log(eps1 / eps2); }

    void validate() const {
        if (!(eps2 > 0.0 && eps2 < eps1) || !std::isfinite(eps1))
            throw DomainError("scales must satisfy 0 < eps2 < eps1");
    }
    /// Domain of the reach-based bounds: eps1 < 1, or eps1 < 2 in dimension one.
    void validate_for_bounds(Dimension d) const {
        validate();
        const double limit = d.get() == 1 ? 2.0 : 1.0;
        if (!(eps1 < limit))
            throw DomainError("eps1 must be < " + std::to_string(static_cast<int>(limit)) +
                              " for dimension " + std::to_string(d.get()));
    }
    friend bool operator==(const ScalePair&, const ScalePair&) = default;
};

/// Lower and upper bound on vol(DM(eps1)) / vol(DM(eps2)).
struct RatioBounds {
    double lower;
    double upper;
};

namespace detail {

/// Gamma(m / 2) for positive integer m by the half-integer recurrence.
inline double gamma_half(int m) {
    double g = (m % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
    for (int k = (m % 2 == 0) ? 2 : 1; k + 2 <= m; k += 2) g *= 0.5 * k;
    return g;
}

inline constexpr double kQuadTol = 1e-13;

}  // namespace detail

/// \f$\int_0^x \sin^{d-1}(t)\,dt\f$ for x in [0, pi].
inline double integral_sin_pow(Dimension d, double x) {
    if (!(x >= 0.0 && x <= std::numbers::pi))
        throw DomainError("integral_sin_pow: x must lie in [0, pi]");
    const int p = d.get() - 1;
    if (p == 0) return x;
    if (p == 1) return 1.0 - std::cos(x);
    return quad::integrate([p](double t) { return std::pow(std::sin(t), p); }, 0.0, x,
                           detail::kQuadTol);
}

/// \f$\int_0^x \sinh^{d-1}(t)\,dt\f$ for x >= 0.
inline double integral_sinh_pow(Dimension d, double x) {
    if (!(x >= 0.0)) throw DomainError("integral_sinh_pow: x must be >= 0");
    const int p = d.get() - 1;
    if (p == 0) return x;
    if (p == 1) return std::cosh(x) - 1.0;
    return quad::integrate([p](double t) { return std::pow(std::sinh(t), p); }, 0.0, x,
                           detail::kQuadTol);
}

/// (d-1)-measure of the unit sphere in R^d.
inline double sphere_surface_measure(Dimension d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d.get()) / detail::gamma_half(d.get());
}

inline double euclidean_ball_volume(Dimension d, double r) {
    if (!(r >= 0.0)) throw DomainError("euclidean_ball_volume: r must be >= 0");
    return std::pow(std::numbers::pi, 0.5 * d.get()) * std::pow(r, d.get()) /
           detail::gamma_half(d.get() + 2);
}

/// Volume of the radius-eps ball in the unit d-sphere; lower bound for the
/// volume of any ambient eps-ball slice of a reach-1 manifold.
inline double cv(Dimension d, double eps) {
    if (!(eps > 0.0 && eps <= std::numbers::pi)) throw DomainError("cv: eps must lie in (0, pi]");
    return sphere_surface_measure(d) * integral_sin_pow(d, eps);
}

/// Upper bound for max/min ratio of the volumes of ambient eps-ball slices:
/// the curvature -2 ball of radius 2 asin(eps/2) over the spherical eps-ball.
inline double cr(Dimension d, double eps) {
    if (!(eps > 0.0 && eps < 2.0)) throw DomainError("cr: eps must lie in (0, 2)");
    const double hyperbolic_radius = 2.0 * std::numbers::sqrt2 * std::asin(0.5 * eps);
    return std::pow(2.0, -0.5 * d.get()) * integral_sinh_pow(d, hyperbolic_radius) /
           integral_sin_pow(d, eps);
}

/// Bounds on vol(DM(eps1)) / vol(DM(eps2)) valid for every reach-1 manifold.
/// Dimension one uses the sharper arc-length pair, valid up to eps1 < 2.
inline RatioBounds diagonal_ratio_bounds(Dimension d, const ScalePair& s) {
    s.validate_for_bounds(d);
    const double e1 = s.eps1;
    const double e2 = s.eps2;
    if (d.get() == 1) return {e1 / e2, 1.0 + 2.0 * std::asin(0.5 * (e1 - e2)) / e2};

    const double chord2 = std::asin(0.5 * e2);
    // The volume ratio is at least 1 since DM(eps) grows with eps; the
    // comparison bound dips just below 1 when eps2 is close to eps1 near 1.
    const double lower = std::max(1.0, (0.5 * e1) / chord2 *
                                           std::pow(std::sin(e1) / std::sin(2.0 * chord2), d.get() - 1));
    const double upper =
        integral_sinh_pow(d, 2.0 * std::numbers::sqrt2 * std::asin(0.5 * e1)) /
        integral_sinh_pow(d, std::numbers::sqrt2 * e2);
    return {lower, upper};
}

/// Margin by which the population slope log(ratio)/log(eps1/eps2) is
/// guaranteed to stay inside (d - 1/2, d + 1/2). Non-positive means the
/// scales cannot certify the dimension.
inline double gap_delta(Dimension d, const ScalePair& s) {
    const RatioBounds b = diagonal_ratio_bounds(d, s);
    const double L = s.log_ratio();
    const double upper_margin = d.get() + 0.5 - std::log(b.upper) / L;
    const double lower_margin = std::log(b.lower) / L - (d.get() - 0.5);
    return std::min(upper_margin, lower_margin);
}

}  // namespace dimest
