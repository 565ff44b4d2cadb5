#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/rng.hpp"

namespace dimest {

/// Piecewise-linear triangulation of cos x + cos y + cos z = 0 over one
/// period cell [0, 2pi)^3, used to draw area-uniform surface points.
class SchwarzPMesh {
public:
    using Vec3 = std::array<double, 3>;
    struct Triangle {
        Vec3 a, b, c;
    };

    static double level(const Vec3& p) { return std::cos(p[0]) + std::cos(p[1]) + std::cos(p[2]); }

    explicit SchwarzPMesh(int resolution) : resolution_(resolution) {
        if (resolution < 4) throw DomainError("Schwarz P mesh resolution must be >= 4");
        build();
    }

    int resolution() const noexcept { return resolution_; }
    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    double area() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

    /// Area-weighted triangle, uniform point inside, then Newton projection
    /// along the gradient onto the exact level set.
    Vec3 draw(Rng& rng) const {
        const double target = rng.uniform() * area();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            it - cumulative_.begin(), static_cast<std::ptrdiff_t>(triangles_.size()) - 1));
        const Triangle& t = triangles_[idx];
        double r1 = std::sqrt(rng.uniform());
        double r2 = rng.uniform();
        Vec3 p;
        for (int k = 0; k < 3; ++k)
            p[k] = (1.0 - r1) * t.a[k] + r1 * (1.0 - r2) * t.b[k] + r1 * r2 * t.c[k];
        return project(p);
    }

    static Vec3 project(Vec3 p) {
        for (int iter = 0; iter < 60; ++iter) {
            const double f = level(p);
            if (std::abs(f) < 1e-14) break;
            const Vec3 g{-std::sin(p[0]), -std::sin(p[1]), -std::sin(p[2])};
            const double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if (g2 < 1e-300) break;
            for (int k = 0; k < 3; ++k) p[k] -= f * g[k] / g2;
        }
        return p;
    }

    /// Shared mesh per resolution, built once.
    static std::shared_ptr<const SchwarzPMesh> cached(int resolution) {
        static std::mutex mu;
        static std::map<int, std::shared_ptr<const SchwarzPMesh>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[resolution];
        if (!slot) slot = std::make_shared<const SchwarzPMesh>(resolution);
        return slot;
    }

private:
    // Six tetrahedra per cube sharing the main diagonal 0 -> 7, cube corners
    // indexed by bits (x, y, z).
    static constexpr std::array<std::array<int, 4>, 6> kTets = {{
        {0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7},
    }};

    static Vec3 cross_point(const Vec3& p, double fp, const Vec3& q, double fq) {
        const double t = fp / (fp - fq);
        return {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2])};
    }

    static double tri_area(const Triangle& t) {
        const Vec3 u{t.b[0] - t.a[0], t.b[1] - t.a[1], t.b[2] - t.a[2]};
        const Vec3 v{t.c[0] - t.a[0], t.c[1] - t.a[1], t.c[2] - t.a[2]};
        const Vec3 w{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
        return 0.5 * std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    }

    void add(const Triangle& t) {
        const double a = tri_area(t);
        if (a <= 0.0) return;
        triangles_.push_back(t);
        cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + a);
    }

    void tetra(const std::array<Vec3, 4>& p, const std::array<double, 4>& f) {
        std::array<int, 4> in{}, out{};
        int ni = 0, no = 0;
        for (int k = 0; k < 4; ++k) {
            if (f[k] > 0.0)
                in[ni++] = k;
            else
                out[no++] = k;
        }
        if (ni == 0 || no == 0) return;
        auto X = [&](int i, int j) { return cross_point(p[i], f[i], p[j], f[j]); };
        if (ni == 1 || no == 1) {
            const int lone = ni == 1 ? in[0] : out[0];
            const auto& others = ni == 1 ? out : in;
            add({X(lone, others[0]), X(lone, others[1]), X(lone, others[2])});
            return;
        }
        // Two against two: the section is a quadrilateral.
        const Vec3 q0 = X(in[0], out[0]), q1 = X(in[0], out[1]);
        const Vec3 q2 = X(in[1], out[1]), q3 = X(in[1], out[0]);
        add({q0, q1, q2});
        add({q0, q2, q3});
    }

    void build() {
        const int n = resolution_;
        const double h = 2.0 * std::numbers::pi / n;
        std::vector<double> c(static_cast<std::size_t>(n + 1));
        for (int i = 0; i <= n; ++i) c[static_cast<std::size_t>(i)] = std::cos(i * h);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    std::array<Vec3, 8> corner;
                    std::array<double, 8> fv;
                    for (int b = 0; b < 8; ++b) {
                        const int di = b & 1, dj = (b >> 1) & 1, dk = (b >> 2) & 1;
                        corner[b] = {(i + di) * h, (j + dj) * h, (k + dk) * h};
                        fv[b] = c[static_cast<std::size_t>(i + di)] + c[static_cast<std::size_t>(j + dj)] +
                                c[static_cast<std::size_t>(k + dk)];
                    }
                    for (const auto& t : kTets)
                        tetra({corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]},
                              {fv[t[0]], fv[t[1]], fv[t[2]], fv[t[3]]});
                }
    }

    int resolution_;
    std::vector<Triangle> triangles_;
    std::vector<double> cumulative_;
};

}  // namespace dimest
