#pragma once

// Synthetic manifolds and their uniform samplers.
//
// Spec strings:
//   sphere:d            unit d-sphere in R^(d+1)
//   clifford:d          product of d unit circles in R^(2d)
//   flat:d[:period]     abstract flat torus R^d / period Z^d (default 2 pi)
//   rotation            torus of revolution, R = 2, r = 1
//   swissroll           area-uniform swiss roll
//   swissroll-sklearn   same surface, scikit-learn's non-uniform parameter law
//   schwarz[:res]       Schwarz P surface in the flat 3-torus (mesh res^3)
//   gaussian:d          standard normal in R^d
//   product(A,B)        Cartesian product, coordinates concatenated

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/geometry.hpp"
#include "dimest/pair_count.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/quadrature.hpp"
#include "dimest/rng.hpp"
#include "dimest/schwarz_p.hpp"

namespace dimest {

class ManifoldSpec {
public:
    enum class Kind { Sphere, Clifford, FlatTorus, Rotation, SwissRoll, SwissRollSklearn, SchwarzP, Gaussian, Product };

    static constexpr double kRotationR = 2.0;
    static constexpr double kRotationr = 1.0;
    static constexpr double kSwissTMin = 1.5 * std::numbers::pi;
    static constexpr double kSwissTMax = 4.5 * std::numbers::pi;
    static constexpr double kSwissHeight = 21.0;
    static constexpr int kDefaultSchwarzResolution = 64;

    static ManifoldSpec sphere(int d) { return ManifoldSpec(Kind::Sphere, checked_dim(d)); }
    static ManifoldSpec clifford(int d) { return ManifoldSpec(Kind::Clifford, checked_dim(d)); }
    static ManifoldSpec flat_torus(int d, double period = 2.0 * std::numbers::pi) {
        if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("flat torus period must be > 0");
        ManifoldSpec m(Kind::FlatTorus, checked_dim(d));
        m.param_ = period;
        return m;
    }
    static ManifoldSpec rotation() { return ManifoldSpec(Kind::Rotation, 2); }
    static ManifoldSpec swiss_roll(bool sklearn_law = false) {
        return ManifoldSpec(sklearn_law ? Kind::SwissRollSklearn : Kind::SwissRoll, 2);
    }
    static ManifoldSpec schwarz_p(int resolution = kDefaultSchwarzResolution) {
        if (resolution < 4) throw DomainError("schwarz resolution must be >= 4");
        ManifoldSpec m(Kind::SchwarzP, 2);
        m.param_ = resolution;
        return m;
    }
    static ManifoldSpec gaussian(int d) { return ManifoldSpec(Kind::Gaussian, checked_dim(d)); }
    static ManifoldSpec product(ManifoldSpec a, ManifoldSpec b) {
        ManifoldSpec m(Kind::Product, a.intrinsic_dim() + b.intrinsic_dim());
        m.left_ = std::make_shared<const ManifoldSpec>(std::move(a));
        m.right_ = std::make_shared<const ManifoldSpec>(std::move(b));
        return m;
    }

    /// Parses the compact string form; throws ParseError on malformed input.
    static ManifoldSpec parse(std::string_view text) {
        std::string s;
        for (char ch : text)
            if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(static_cast<char>(std::tolower(ch)));
        std::size_t pos = 0;
        ManifoldSpec m = parse_at(s, pos);
        if (pos != s.size()) throw ParseError("trailing characters in manifold spec '" + std::string(text) + "'", 0);
        return m;
    }

    std::string to_string() const {
        switch (kind_) {
            case Kind::Sphere: return "sphere:" + std::to_string(dim_);
            case Kind::Clifford: return "clifford:" + std::to_string(dim_);
            case Kind::FlatTorus: {
                if (param_ == 2.0 * std::numbers::pi) return "flat:" + std::to_string(dim_);
                char buf[64];
                std::snprintf(buf, sizeof buf, "flat:%d:%.17g", dim_, param_);
                return buf;
            }
            case Kind::Rotation: return "rotation";
            case Kind::SwissRoll: return "swissroll";
            case Kind::SwissRollSklearn: return "swissroll-sklearn";
            case Kind::SchwarzP:
                return static_cast<int>(param_) == kDefaultSchwarzResolution
                           ? "schwarz"
                           : "schwarz:" + std::to_string(static_cast<int>(param_));
            case Kind::Gaussian: return "gaussian:" + std::to_string(dim_);
            case Kind::Product: return "product(" + left_->to_string() + "," + right_->to_string() + ")";
        }
        return {};
    }

    Kind kind() const noexcept { return kind_; }
    int intrinsic_dim() const noexcept { return dim_; }
    const ManifoldSpec& left() const { return *left_; }
    const ManifoldSpec& right() const { return *right_; }

    std::size_t ambient_dim() const {
        switch (kind_) {
            case Kind::Sphere: return static_cast<std::size_t>(dim_ + 1);
            case Kind::Clifford: return static_cast<std::size_t>(2 * dim_);
            case Kind::FlatTorus:
            case Kind::Gaussian: return static_cast<std::size_t>(dim_);
            case Kind::Rotation:
            case Kind::SwissRoll:
            case Kind::SwissRollSklearn:
            case Kind::SchwarzP: return 3;
            case Kind::Product: return left_->ambient_dim() + right_->ambient_dim();
        }
        return 0;
    }

    /// Per-axis periods of the ambient space (0 = not periodic).
    std::vector<double> axis_periods() const {
        switch (kind_) {
            case Kind::FlatTorus: return std::vector<double>(static_cast<std::size_t>(dim_), param_);
            case Kind::SchwarzP: return std::vector<double>(3, 2.0 * std::numbers::pi);
            case Kind::Product: {
                auto a = left_->axis_periods();
                auto b = right_->axis_periods();
                a.insert(a.end(), b.begin(), b.end());
                return a;
            }
            default: return std::vector<double>(ambient_dim(), 0.0);
        }
    }

    Metric metric() const { return Metric::per_axis(axis_periods()); }

    bool has_finite_volume() const {
        if (kind_ == Kind::Gaussian) return false;
        if (kind_ == Kind::Product) return left_->has_finite_volume() && right_->has_finite_volume();
        return true;
    }

    /// Riemannian volume. Throws for the Gaussian (infinite support).
    double reference_volume() const {
        constexpr double tau = 2.0 * std::numbers::pi;
        switch (kind_) {
            case Kind::Sphere: return sphere_surface_measure(Dimension(dim_ + 1));
            case Kind::Clifford: return std::pow(tau, dim_);
            case Kind::FlatTorus: return std::pow(param_, dim_);
            case Kind::Rotation: return tau * kRotationr * tau * kRotationR;
            case Kind::SwissRoll:
            case Kind::SwissRollSklearn: return kSwissHeight * swiss_arc_length(kSwissTMax);
            case Kind::SchwarzP: return SchwarzPMesh::cached(static_cast<int>(param_))->area();
            case Kind::Gaussian: throw DomainError("gaussian has infinite support: no reference volume");
            case Kind::Product: return left_->reference_volume() * right_->reference_volume();
        }
        return 0.0;
    }

    /// Writes one sample into out (size ambient_dim()).
    void draw(Rng& rng, std::span<double> out) const {
        constexpr double tau = 2.0 * std::numbers::pi;
        switch (kind_) {
            case Kind::Sphere: {
                double norm2 = 0.0;
                do {
                    norm2 = 0.0;
                    for (auto& x : out) {
                        x = rng.normal();
                        norm2 += x * x;
                    }
                } while (norm2 < 1e-24);
                const double inv = 1.0 / std::sqrt(norm2);
                for (auto& x : out) x *= inv;
                return;
            }
            case Kind::Clifford:
                for (int i = 0; i < dim_; ++i) {
                    const double t = rng.uniform(0.0, tau);
                    out[2 * i] = std::cos(t);
                    out[2 * i + 1] = std::sin(t);
                }
                return;
            case Kind::FlatTorus:
                for (auto& x : out) x = rng.uniform(0.0, param_);
                return;
            case Kind::Rotation: {
                const double u = rng.uniform(0.0, tau);
                double v = 0.0;
                // Area element (R + r cos v) du dv.
                for (;;) {
                    v = rng.uniform(0.0, tau);
                    if (rng.uniform() * (kRotationR + kRotationr) <= kRotationR + kRotationr * std::cos(v)) break;
                }
                const double rad = kRotationR + kRotationr * std::cos(v);
                out[0] = rad * std::cos(u);
                out[1] = rad * std::sin(u);
                out[2] = kRotationr * std::sin(v);
                return;
            }
            case Kind::SwissRoll:
            case Kind::SwissRollSklearn: {
                double t = 0.0;
                if (kind_ == Kind::SwissRollSklearn) {
                    t = rng.uniform(kSwissTMin, kSwissTMax);
                } else {
                    // Area element sqrt(1 + t^2) dt dy.
                    const double wmax = std::sqrt(1.0 + kSwissTMax * kSwissTMax);
                    for (;;) {
                        t = rng.uniform(kSwissTMin, kSwissTMax);
                        if (rng.uniform() * wmax <= std::sqrt(1.0 + t * t)) break;
                    }
                }
                out[0] = t * std::cos(t);
                out[1] = rng.uniform(0.0, kSwissHeight);
                out[2] = t * std::sin(t);
                return;
            }
            case Kind::SchwarzP: {
                const auto p = SchwarzPMesh::cached(static_cast<int>(param_))->draw(rng);
                for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)];
                return;
            }
            case Kind::Gaussian:
                for (auto& x : out) x = rng.normal();
                return;
            case Kind::Product: {
                const std::size_t na = left_->ambient_dim();
                left_->draw(rng, out.subspan(0, na));
                right_->draw(rng, out.subspan(na));
                return;
            }
        }
    }

    friend bool operator==(const ManifoldSpec& a, const ManifoldSpec& b) { return a.to_string() == b.to_string(); }

private:
    ManifoldSpec(Kind k, int d) : kind_(k), dim_(d) {}

    static int checked_dim(int d) {
        if (d < 1) throw DomainError("manifold dimension must be >= 1");
        return d;
    }

    // Arc length of the spiral (t cos t, t sin t) from kSwissTMin to t.
    static double swiss_arc_length(double t) {
        auto F = [](double x) { return 0.5 * (x * std::sqrt(1.0 + x * x) + std::asinh(x)); };
        return F(t) - F(kSwissTMin);
    }

    static double parse_number(const std::string& s, std::size_t& pos) {
        std::size_t end = pos;
        while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
                                  s[end] == 'e' || s[end] == '-' || s[end] == '+'))
            ++end;
        if (end == pos) throw ParseError("expected a number in manifold spec at offset " + std::to_string(pos), 0);
        const std::string tok = s.substr(pos, end - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw ParseError("bad number '" + tok + "' in manifold spec", 0);
        pos = end;
        return v;
    }

    static int parse_int(const std::string& s, std::size_t& pos) {
        const double v = parse_number(s, pos);
        if (v != std::floor(v) || v < 1 || v > 1e6) throw ParseError("expected a positive integer in manifold spec", 0);
        return static_cast<int>(v);
    }

    static bool eat(const std::string& s, std::size_t& pos, std::string_view word) {
        if (s.compare(pos, word.size(), word) == 0) {
            pos += word.size();
            return true;
        }
        return false;
    }

    static void expect(const std::string& s, std::size_t& pos, char c) {
        if (pos >= s.size() || s[pos] != c)
            throw ParseError(std::string("expected '") + c + "' in manifold spec at offset " + std::to_string(pos), 0);
        ++pos;
    }

    static ManifoldSpec parse_at(const std::string& s, std::size_t& pos) {
        if (eat(s, pos, "product")) {
            expect(s, pos, '(');
            ManifoldSpec a = parse_at(s, pos);
            expect(s, pos, ',');
            ManifoldSpec b = parse_at(s, pos);
            expect(s, pos, ')');
            return product(std::move(a), std::move(b));
        }
        if (eat(s, pos, "sphere")) {
            expect(s, pos, ':');
            return sphere(parse_int(s, pos));
        }
        if (eat(s, pos, "clifford")) {
            expect(s, pos, ':');
            return clifford(parse_int(s, pos));
        }
        if (eat(s, pos, "flat")) {
            expect(s, pos, ':');
            const int d = parse_int(s, pos);
            if (pos < s.size() && s[pos] == ':') {
                ++pos;
                return flat_torus(d, parse_number(s, pos));
            }
            return flat_torus(d);
        }
        if (eat(s, pos, "rotation")) return rotation();
        if (eat(s, pos, "swissroll-sklearn")) return swiss_roll(true);
        if (eat(s, pos, "swissroll")) return swiss_roll(false);
        if (eat(s, pos, "schwarz")) {
            if (pos < s.size() && s[pos] == ':') {
                ++pos;
                return schwarz_p(parse_int(s, pos));
            }
            return schwarz_p();
        }
        if (eat(s, pos, "gaussian")) {
            expect(s, pos, ':');
            return gaussian(parse_int(s, pos));
        }
        throw ParseError("unknown manifold '" + s.substr(pos) + "'", 0);
    }

    Kind kind_;
    int dim_;
    double param_ = 0.0;
    std::shared_ptr<const ManifoldSpec> left_, right_;
};

/// n independent draws.
inline PointCloud sample(const ManifoldSpec& spec, std::size_t n, Seed seed) {
    Rng rng(seed);
    const std::size_t s = spec.ambient_dim();
    std::vector<double> coords(n * s);
    for (std::size_t i = 0; i < n; ++i) spec.draw(rng, std::span<double>(coords.data() + i * s, s));
    return PointCloud(s, std::move(coords), spec.metric());
}

/// Draws points until the cloud has at least `pairs` pairs within eps1.
/// The draw sequence equals sample(spec, n, seed) for the final n.
inline PointCloud sample_until_pairs(const ManifoldSpec& spec, double eps1, long long pairs, Seed seed,
                                     std::size_t cap) {
    if (pairs < 1) throw DomainError("sample_until_pairs: pair target must be >= 1");
    Rng rng(seed);
    const std::size_t s = spec.ambient_dim();
    const Metric metric = spec.metric();
    PairGrid grid(s, metric, eps1);
    std::vector<double> coords;
    std::vector<double> p(s);
    while (grid.pair_count() < static_cast<unsigned long long>(pairs)) {
        if (grid.size() >= cap)
            throw SamplingCapExceeded("sample_until_pairs: reached " + std::to_string(cap) + " points with " +
                                      std::to_string(grid.pair_count()) + " of " + std::to_string(pairs) +
                                      " pairs on " + spec.to_string());
        spec.draw(rng, p);
        // Same periodic reduction as PointCloud so grid distances match.
        const PointCloud one(s, p, metric);
        grid.insert(one.point(0));
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return PointCloud(s, std::move(coords), metric);
}

}  // namespace dimest
