#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dimest/errors.hpp"

namespace dimest {

/// Distance on the ambient space: Euclidean, with optional per-axis
/// periodicity. A flat torus is every axis periodic with the same period;
/// products of periodic and non-periodic factors mix both.
class Metric {
public:
    static Metric euclidean() { return Metric{}; }
    static Metric flat_torus(std::size_t dim, double period) {
        if (!(period > 0.0)) throw DomainError("torus period must be > 0");
        return Metric{std::vector<double>(dim, period)};
    }
    /// periods[i] == 0 marks axis i as non-periodic.
    static Metric per_axis(std::vector<double> periods) {
        for (double p : periods)
            if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("invalid axis period");
        bool any = false;
        for (double p : periods) any = any || p > 0.0;
        return any ? Metric{std::move(periods)} : Metric{};
    }

    bool is_euclidean() const noexcept { return periods_.empty(); }
    /// Period of axis i, 0 if non-periodic.
    double period(std::size_t i) const noexcept { return periods_.empty() ? 0.0 : periods_[i]; }
    const std::vector<double>& periods() const noexcept { return periods_; }

    /// Uniform period if every axis shares one, else 0.
    double uniform_period() const noexcept {
        if (periods_.empty()) return 0.0;
        for (double p : periods_)
            if (p != periods_.front()) return 0.0;
        return periods_.front();
    }

    /// Signed shortest per-axis offset from a to b.
    double axis_offset(std::size_t i, double a, double b) const noexcept {
        double diff = b - a;
        const double p = period(i);
        if (p > 0.0) {
            diff = std::remainder(diff, p);
        }
        return diff;
    }

    double distance_squared(std::span<const double> a, std::span<const double> b) const noexcept {
        double sum = 0.0;
        if (periods_.empty()) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double diff = a[i] - b[i];
                sum += diff * diff;
            }
            return sum;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            double diff = std::abs(a[i] - b[i]);
            const double p = periods_[i];
            if (p > 0.0 && diff > 0.5 * p) diff = p - diff;
            sum += diff * diff;
        }
        return sum;
    }

    double distance(std::span<const double> a, std::span<const double> b) const noexcept {
        return std::sqrt(distance_squared(a, b));
    }

    /// Shortest displacement vector from a to b.
    void displacement(std::span<const double> a, std::span<const double> b,
                      std::span<double> out) const noexcept {
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = axis_offset(i, a[i], b[i]);
    }

    friend bool operator==(const Metric&, const Metric&) = default;

private:
    Metric() = default;
    explicit Metric(std::vector<double> p) : periods_(std::move(p)) {}
    std::vector<double> periods_;
};

/// n points in R^s (row-major) with the metric used for pair distances.
/// Periodic coordinates are reduced into [0, period). Immutable.
class PointCloud {
public:
    PointCloud(std::size_t ambient_dim, std::vector<double> coords, Metric metric = Metric::euclidean())
        : dim_(ambient_dim), coords_(std::move(coords)), metric_(std::move(metric)) {
        if (dim_ == 0) throw DomainError("ambient dimension must be positive");
        if (coords_.size() % dim_ != 0) throw DomainError("coordinate count not a multiple of dimension");
        if (!metric_.is_euclidean() && metric_.periods().size() != dim_)
            throw DomainError("metric period count does not match ambient dimension");
        for (std::size_t k = 0; k < coords_.size(); ++k) {
            double& x = coords_[k];
            if (!std::isfinite(x)) throw DomainError("non-finite coordinate");
            const double p = metric_.period(k % dim_);
            if (p > 0.0) {
                x = std::fmod(x, p);
                if (x < 0.0) x += p;
                if (x >= p) x = 0.0;
            }
        }
    }

    std::size_t ambient_dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coords_.size() / dim_; }
    bool empty() const noexcept { return coords_.empty(); }
    const Metric& metric() const noexcept { return metric_; }
    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<const double> coords() const noexcept { return coords_; }

    double distance_squared(std::size_t i, std::size_t j) const noexcept {
        return metric_.distance_squared(point(i), point(j));
    }

    /// Sub-cloud with the given point indices, same metric.
    PointCloud subset(std::span<const std::size_t> indices) const {
        std::vector<double> c;
        c.reserve(indices.size() * dim_);
        for (std::size_t i : indices) {
            auto p = point(i);
            c.insert(c.end(), p.begin(), p.end());
        }
        return PointCloud(dim_, std::move(c), metric_);
    }

    /// Total unordered pairs n(n-1)/2.
    unsigned long long pair_total() const noexcept {
        const unsigned long long n = size();
        return n < 2 ? 0 : n * (n - 1) / 2;
    }

private:
    std::size_t dim_;
    std::vector<double> coords_;
    Metric metric_;
};

}  // namespace dimest
