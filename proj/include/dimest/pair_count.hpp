#pragma once

// Fixed-radius close-pair counting.
//
// The grid buckets points by the first min(s, 3) coordinates with cells at
// least eps wide; every pair within eps differs by at most eps on each axis,
// so the 3^k neighbouring cells contain all candidates. Distances are
// compared squared against eps * eps, identically to the brute-force path,
// so both paths return the same count bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/point_cloud.hpp"

namespace dimest {

/// Unordered close-pair count |PX(eps)|.
struct PairCount {
    double eps;
    unsigned long long count;
};

/// Incremental close-pair counter: insert points one at a time.
class PairGrid {
public:
    PairGrid(std::size_t ambient_dim, Metric metric, double eps)
        : dim_(ambient_dim), metric_(std::move(metric)), eps_(eps), eps2_(eps * eps),
          key_axes_(std::min<std::size_t>(ambient_dim, 3)) {
        if (!(eps > 0.0)) throw DomainError("pair counting radius must be > 0");
        for (std::size_t a = 0; a < key_axes_; ++a) {
            const double p = metric_.period(a);
            if (p > 0.0) {
                cells_[a] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(p / eps)));
                width_[a] = p / static_cast<double>(cells_[a]);
            } else {
                cells_[a] = 0;
                width_[a] = eps;
            }
        }
    }

    double eps() const noexcept { return eps_; }
    std::size_t size() const noexcept { return coords_.size() / dim_; }
    unsigned long long pair_count() const noexcept { return pairs_; }

    /// Number of stored points within eps of p (excluding exact duplicates).
    unsigned long long neighbours(std::span<const double> p) const {
        unsigned long long found = 0;
        for_each_candidate(p, [&](std::uint32_t j) {
            const double d2 = metric_.distance_squared(p, stored(j));
            if (d2 > 0.0 && d2 <= eps2_) ++found;
        });
        return found;
    }

    /// Adds p; returns the number of new close pairs it forms. With
    /// `distances`, also appends their squared lengths.
    unsigned long long insert(std::span<const double> p, std::vector<double>* distances = nullptr) {
        if (p.size() != dim_) throw DomainError("point dimension mismatch");
        unsigned long long found = 0;
        if (distances) {
            const std::size_t before = distances->size();
            neighbour_distances_squared(p, *distances);
            found = distances->size() - before;
        } else {
            found = neighbours(p);
        }
        const auto idx = static_cast<std::uint32_t>(size());
        coords_.insert(coords_.end(), p.begin(), p.end());
        buckets_[key_of(p)].push_back(idx);
        pairs_ += found;
        return found;
    }

    /// Appends squared distances in (0, eps^2] from p to stored points.
    void neighbour_distances_squared(std::span<const double> p, std::vector<double>& out) const {
        for_each_candidate(p, [&](std::uint32_t j) {
            const double d2 = metric_.distance_squared(p, stored(j));
            if (d2 > 0.0 && d2 <= eps2_) out.push_back(d2);
        });
    }

    /// Indices of stored points within eps of p (excluding exact duplicates).
    std::vector<std::uint32_t> neighbour_indices(std::span<const double> p) const {
        std::vector<std::uint32_t> out;
        for_each_candidate(p, [&](std::uint32_t j) {
            const double d2 = metric_.distance_squared(p, stored(j));
            if (d2 > 0.0 && d2 <= eps2_) out.push_back(j);
        });
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    using Key = std::array<std::int64_t, 3>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = 1469598103934665603ull;
            for (auto v : k) {
                h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            }
            return static_cast<std::size_t>(h);
        }
    };

    std::span<const double> stored(std::uint32_t j) const noexcept {
        return {coords_.data() + static_cast<std::size_t>(j) * dim_, dim_};
    }

    std::int64_t cell_index(std::size_t a, double x) const noexcept {
        if (cells_[a] > 0) {
            const double p = metric_.period(a);
            double r = std::fmod(x, p);
            if (r < 0.0) r += p;
            auto c = static_cast<std::int64_t>(std::floor(r / width_[a]));
            return std::clamp<std::int64_t>(c, 0, cells_[a] - 1);
        }
        return static_cast<std::int64_t>(std::floor(x / width_[a]));
    }

    Key key_of(std::span<const double> p) const noexcept {
        Key k{0, 0, 0};
        for (std::size_t a = 0; a < key_axes_; ++a) k[a] = cell_index(a, p[a]);
        return k;
    }

    template <class Fn>
    void for_each_candidate(std::span<const double> p, Fn&& fn) const {
        const Key base = key_of(p);
        // Per-axis distinct neighbour cells (periodic axes with < 3 cells wrap onto themselves).
        std::array<std::vector<std::int64_t>, 3> offsets;
        for (std::size_t a = 0; a < 3; ++a) {
            if (a >= key_axes_) {
                offsets[a] = {0};
                continue;
            }
            for (int o = -1; o <= 1; ++o) {
                std::int64_t c = base[a] + o;
                if (cells_[a] > 0) c = ((c % cells_[a]) + cells_[a]) % cells_[a];
                if (std::find(offsets[a].begin(), offsets[a].end(), c) == offsets[a].end())
                    offsets[a].push_back(c);
            }
        }
        for (auto c0 : offsets[0])
            for (auto c1 : offsets[1])
                for (auto c2 : offsets[2]) {
                    auto it = buckets_.find(Key{c0, c1, c2});
                    if (it == buckets_.end()) continue;
                    for (std::uint32_t j : it->second) fn(j);
                }
    }

    std::size_t dim_;
    Metric metric_;
    double eps_;
    double eps2_;
    std::size_t key_axes_;
    std::array<std::int64_t, 3> cells_{};
    std::array<double, 3> width_{};
    std::vector<double> coords_;
    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> buckets_;
    unsigned long long pairs_ = 0;
};

namespace detail {

inline constexpr std::size_t kBruteForceBelow = 64;

inline unsigned long long count_pairs_direct(const PointCloud& X, double eps) {
    const double eps2 = eps * eps;
    unsigned long long count = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = i + 1; j < X.size(); ++j) {
            const double d2 = X.distance_squared(i, j);
            if (d2 > 0.0 && d2 <= eps2) ++count;
        }
    return count;
}

}  // namespace detail

/// |PX(eps)|: unordered pairs {x, y} with 0 < dist(x, y) <= eps.
inline PairCount count_pairs(const PointCloud& X, double eps) {
    if (!(eps > 0.0)) throw DomainError("count_pairs: eps must be > 0");
    if (X.size() < detail::kBruteForceBelow) return {eps, detail::count_pairs_direct(X, eps)};
    PairGrid grid(X.ambient_dim(), X.metric(), eps);
    for (std::size_t i = 0; i < X.size(); ++i) grid.insert(X.point(i));
    return {eps, grid.pair_count()};
}

/// All nonzero squared pairwise distances, sorted ascending.
inline std::vector<double> sorted_pair_distances_squared(const PointCloud& X) {
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(X.pair_total()));
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = i + 1; j < X.size(); ++j) {
            const double v = X.distance_squared(i, j);
            if (v > 0.0) d2.push_back(v);
        }
    std::sort(d2.begin(), d2.end());
    return d2;
}

namespace detail {
inline constexpr unsigned long long kSortedPairLimit = 50'000'000ull;
}

/// Close-pair counts at increasing scales.
inline std::vector<PairCount> pair_count_curve(const PointCloud& X, std::span<const double> eps_list) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw DomainError("pair_count_curve: scales must be > 0");
        if (i > 0 && !(eps_list[i] > eps_list[i - 1]))
            throw DomainError("pair_count_curve: scales must be strictly increasing");
    }
    std::vector<PairCount> out;
    out.reserve(eps_list.size());
    if (eps_list.empty()) return out;
    if (X.pair_total() <= detail::kSortedPairLimit) {
        // Squared distances up to the largest scale, gathered through the
        // grid; each scale is then one binary search.
        std::vector<double> d2;
        if (X.size() < detail::kBruteForceBelow) {
            d2 = sorted_pair_distances_squared(X);
        } else {
            PairGrid grid(X.ambient_dim(), X.metric(), eps_list.back());
            for (std::size_t i = 0; i < X.size(); ++i) grid.insert(X.point(i), &d2);
            std::sort(d2.begin(), d2.end());
        }
        for (double e : eps_list) {
            const auto it = std::upper_bound(d2.begin(), d2.end(), e * e);
            out.push_back({e, static_cast<unsigned long long>(it - d2.begin())});
        }
    } else {
        for (double e : eps_list) out.push_back(count_pairs(X, e));
    }
    return out;
}

}  // namespace dimest
