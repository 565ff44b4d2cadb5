// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only (exit 1 on FAIL)
//
// Statistical criteria use master seed kSeed, fixed before any run.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "dimest/dimest.hpp"

using namespace dimest;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr double kTau = 2.0 * std::numbers::pi;

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

class Checker {
public:
    void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        va_list ap;
        va_start(ap, fmt);
        std::printf("  [%s] ", ok ? " ok " : "FAIL");
        std::vprintf(fmt, ap);
        std::printf("\n");
        va_end(ap);
        all_ &= ok;
    }
    bool all() const { return all_; }

private:
    bool all_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ----------------------------------------------------------------------
bool gap_table(Checker& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : reference::kRows) {
        const double g = gap_delta(Dimension(r.d), {r.eps1, r.eps2});
        c.check(std::abs(g - r.gap) <= 1e-5, "d=%-2d gap %.6f expected %.6f", r.d, g, r.gap);
    }
    const double t = seconds_since(t0);
    c.check(t < 1.0, "runtime %.3f s < 1 s", t);
    return c.all();
}

// 2 ----------------------------------------------------------------------
bool theory_table(Checker& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : reference::kRows) {
        const auto plan = theoretical_plan(Dimension(r.d), {r.eps1, r.eps2}, r.alpha1, std::pow(kTau, r.d));
        const long nc = static_cast<long>(std::ceil(plan.law.n_const));
        const long nk = static_cast<long>(std::ceil(plan.law.n_coeff));
        c.check(std::labs(nc - r.n_const) <= 1 && std::labs(nk - r.n_coeff) <= 1,
                "d=%-2d (%.2f, %.2f) n = %ld + %ld sqrt(vol), expected %ld + %ld", r.d, r.eps1, r.eps2, nc, nk,
                r.n_const, r.n_coeff);
    }
    const auto* r4 = reference::row(4);
    const double vol = std::pow(kTau, 4);
    const auto plan = theoretical_plan(Dimension(4), {r4->eps1, r4->eps2}, r4->alpha1, vol);
    const double pts = plan.law.table_points(vol);
    c.check(std::abs(pts - reference::kCliffordT4Points) <= 1, "T^4 points %.0f expected %ld", pts,
            static_cast<long>(reference::kCliffordT4Points));
    const double t = seconds_since(t0);
    c.check(t < 10.0, "runtime %.3f s < 10 s", t);
    return c.all();
}

// 3 ----------------------------------------------------------------------
bool scale_search_check(Checker& c) {
    for (int d : {2, 4}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto plan = scale_search(Dimension(d), std::pow(kTau, d));
        const double t = seconds_since(t0);
        const auto* r = reference::row(d);
        const double tol = 0.01 + 1e-9;
        c.check(std::abs(plan.scales.eps1 - r->eps1) <= tol && std::abs(plan.scales.eps2 - r->eps2) <= tol,
                "d=%d search (%.2f, %.2f, alpha %.2f) expected (%.2f, %.2f, alpha %.2f)", d, plan.scales.eps1,
                plan.scales.eps2, plan.alpha1, r->eps1, r->eps2, r->alpha1);
        c.check(t < 300.0, "d=%d runtime %.1f s < 300 s", d, t);
    }
    return c.all();
}

// 4 ----------------------------------------------------------------------
bool heuristic_tables(Checker& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : reference::kRows) {
        const Dimension d(r.d);
        const ScalePair s{r.eps1, r.eps2};
        const long long n90 = pairs_required_exact(d, s, 0.9);
        const long long n70 = pairs_required_exact(d, s, 0.7);
        c.check(n90 == r.pairs_90 && n70 == r.pairs_70, "d=%-2d N(90%%)=%lld N(70%%)=%lld expected %ld / %ld", r.d,
                n90, n70, r.pairs_90, r.pairs_70);
    }
    const auto* r4 = reference::row(4);
    const long long clt = pairs_required_clt(Dimension(4), {r4->eps1, r4->eps2}, 1.64);
    c.check(clt == reference::kClt4Pairs, "CLT d=4 pairs %lld expected %ld", clt,
            static_cast<long>(reference::kClt4Pairs));
    const long long pts = points_for_pairs(r4->pairs_90, Dimension(4), r4->eps1, std::pow(kTau, 4));
    c.check(pts == reference::kT4HeuristicPoints, "T^4 heuristic points %lld expected %ld", pts,
            static_cast<long>(reference::kT4HeuristicPoints));
    for (const auto& r : reference::kRows) {
        const double coeff = heuristic_point_coefficient(Dimension(r.d));
        const double rel = std::abs(coeff - r.heuristic_coeff) / r.heuristic_coeff;
        c.check(rel <= 0.02, "d=%-2d point coefficient %.3f vs %ld (%.2f%%)", r.d, coeff, r.heuristic_coeff,
                100.0 * rel);
    }
    const double t = seconds_since(t0);
    c.check(t < 10.0, "runtime %.3f s < 10 s", t);
    return c.all();
}

// 5 ----------------------------------------------------------------------
bool ktuples(Checker& c) {
    const double vol = std::pow(kTau, 4);
    const Dimension d(4);
    const double e3 = expected_ktuples(1958, 3, d, 0.54, vol);
    const double e6 = expected_ktuples(1958, 6, d, 0.54, vol);
    const double e6b = expected_ktuples(1958, 6, d, 2.0, vol);
    c.check(std::lround(e3) == 91, "C(1958,3) ratio^2 = %.4f, expected 91", e3);
    c.check(std::abs(e6 - 0.110373) < 5e-7, "C(1958,6) ratio^5 at 0.54 = %.6f, expected 0.110373", e6);
    c.check(std::abs(e6b - 2.043944) < 5e-7, "C(1958,6) ratio^5 at 2 = %.6g, expected 2.043944", e6b);
    return c.all();
}

// 6, 7 -------------------------------------------------------------------
bool pair_budget_suite(Checker& c, bool ninety) {
    const auto t0 = std::chrono::steady_clock::now();
    const double window = ninety ? 0.06 : 0.08;
    for (const auto& rr : reference::kPairBudgetRates) {
        const auto m = ManifoldSpec::parse(rr.manifold);
        const auto* r = reference::row(m.intrinsic_dim());
        ExperimentConfig cfg;
        cfg.manifold = m;
        cfg.mode = SampleMode::FixedPairs;
        cfg.budget = ninety ? r->pairs_90 : r->pairs_70;
        cfg.scales = {r->eps1, r->eps2};
        cfg.trials = 100;
        cfg.master_seed = kSeed;
        cfg.threads = worker_count();
        const auto rep = run_experiment(cfg);
        const double target = (ninety ? rr.rate_90 : rr.rate_70) / 100.0;
        c.check(!rep.hard_failure() && std::abs(rep.success_rate - target) <= window + 1e-12,
                "%-26s N=%-4lld rate %5.1f%% target %2d%% +-%d (%.1f s)", rr.manifold, cfg.budget,
                100.0 * rep.success_rate, ninety ? rr.rate_90 : rr.rate_70, ninety ? 6 : 8, rep.wall_time_s);
    }
    std::printf("  total %.1f s\n", seconds_since(t0));
    return c.all();
}

// 8 ----------------------------------------------------------------------
bool point_budget_suite(Checker& c) {
    for (const auto& rr : reference::kPointBudgetRates) {
        const auto m = ManifoldSpec::parse(rr.manifold);
        const auto* r = reference::row(m.intrinsic_dim());
        ExperimentConfig cfg;
        cfg.manifold = m;
        cfg.mode = SampleMode::FixedPoints;
        cfg.budget = static_cast<long long>(std::ceil(r->heuristic_coeff * std::sqrt(m.reference_volume())));
        cfg.scales = {r->eps1, r->eps2};
        cfg.trials = 100;
        cfg.master_seed = kSeed;
        cfg.threads = worker_count();
        const auto rep = run_experiment(cfg);
        c.check(std::abs(rep.success_rate - rr.rate_90 / 100.0) <= 0.06 + 1e-12,
                "%-26s n=%-5lld rate %5.1f%% target %2d%% +-6 (%.1f s)", rr.manifold, cfg.budget,
                100.0 * rep.success_rate, rr.rate_90, rep.wall_time_s);
    }
    return c.all();
}

// 9 ----------------------------------------------------------------------
bool baseline_comparison(Checker& c) {
    for (const auto& row : reference::kAnovaComparison) {
        const auto m = ManifoldSpec::parse(row.manifold);
        const auto* r = reference::row(m.intrinsic_dim());
        const auto rep = compare_estimators(m, row.points, {r->eps1, r->eps2}, 100, kSeed, worker_count());
        c.check(std::abs(rep.corr.success_rate - row.corr_rate / 100.0) <= 0.08 + 1e-12,
                "%-10s n=%-4ld corr  %5.1f%% target %2d%% +-8", row.manifold, row.points,
                100.0 * rep.corr.success_rate, row.corr_rate);
        c.check(std::abs(rep.anova.success_rate - row.anova_rate / 100.0) <= 0.08 + 1e-12,
                "%-10s n=%-4ld anova %5.1f%% target %2d%% +-8", row.manifold, row.points,
                100.0 * rep.anova.success_rate, row.anova_rate);
    }
    return c.all();
}

// 10 ---------------------------------------------------------------------
bool loglog_check(Checker& c) {
    const auto X = sample(ManifoldSpec::parse("product(rotation,rotation)"), 1000, Seed{kSeed, 0});
    const auto d2 = sorted_pair_distances_squared(X);
    const double dmin = std::sqrt(d2.front());
    const double diam = std::sqrt(d2.back());
    const auto grid = log_grid(0.5 * dmin, 1.1 * diam, 60);
    const auto curve = loglog_points(X, grid);
    double top = kLogLogSentinel;
    bool monotone = true;
    double prev = kLogLogSentinel;
    for (const auto& p : curve) {
        top = std::max(top, p.log_count);
        if (p.count > 0 && p.log_count < prev) monotone = false;
        if (p.count > 0) prev = p.log_count;
    }
    c.check(std::abs(top - std::log(1000.0 * 999.0 / 2.0)) <= 0.01 && std::abs(top - 13.12) <= 0.01,
            "plateau %.4f expected 13.12 +- 0.01", top);
    c.check(curve.front().log_count == kLogLogSentinel, "below minimal distance: sentinel %.0f", curve.front().log_count);
    c.check(monotone, "curve non-decreasing where defined");
    const double centre = 0.5 * (std::log(dmin) + std::log(diam));
    const double half = 0.5 * std::log(10.0);
    const auto slope = loglog_slope(curve, centre - half, centre + half);
    c.check(slope && *slope > 3.5 && *slope < 4.5, "central decade slope %.3f in (3.5, 4.5)", slope ? *slope : NAN);
    return c.all();
}

// 11 ---------------------------------------------------------------------
unsigned long long brute_pairs(const PointCloud& X, double eps) {
    unsigned long long n = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = i + 1; j < X.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < X.ambient_dim(); ++k) {
                double diff = std::abs(X.point(i)[k] - X.point(j)[k]);
                const double p = X.metric().period(k);
                if (p > 0.0) diff = std::min(diff, p - diff);
                s += diff * diff;
            }
            if (s > 0.0 && s <= eps * eps) ++n;
        }
    return n;
}

double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
    double x = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
        x += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    return x;
}

bool property_suite(Checker& c) {
    // 200 random clouds against the brute-force oracle.
    Rng rng(Seed{kSeed, 11});
    int agree = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(499);
        const std::size_t s = 1 + rng.below(5);
        const bool torus = rng.below(2) == 1;
        const double period = 1.0 + 3.0 * rng.uniform();
        std::vector<double> coords(n * s);
        for (auto& x : coords) x = rng.uniform(0.0, torus ? period : 2.0);
        // a few duplicates and exact-boundary pairs
        if (n > 4) {
            for (std::size_t k = 0; k < s; ++k) coords[s + k] = coords[k];
        }
        const PointCloud X(s, coords, torus ? Metric::flat_torus(s, period) : Metric::euclidean());
        const double eps = 0.05 + 0.6 * rng.uniform();
        if (count_pairs(X, eps).count == brute_pairs(X, eps)) ++agree;
    }
    c.check(agree == 200, "count_pairs equals brute force on %d/200 random clouds", agree);

    // Quadrature against closed forms for d <= 3.
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = std::numbers::pi * i / 200.0;
        const double y = 3.0 * i / 200.0;
        auto q = [](auto&& f, double b) { return quad::integrate(f, 0.0, b, 1e-14, 1e-15); };
        worst = std::max({worst, std::abs(q([](double) { return 1.0; }, x) - integral_sin_pow(Dimension(1), x)),
                          std::abs(q([](double t) { return std::sin(t); }, x) - (1.0 - std::cos(x))),
                          std::abs(q([](double t) { return std::sin(t) * std::sin(t); }, x) -
                                   (x / 2.0 - std::sin(2.0 * x) / 4.0)),
                          std::abs(integral_sin_pow(Dimension(3), x) - (x / 2.0 - std::sin(2.0 * x) / 4.0)),
                          std::abs(q([](double t) { return std::sinh(t); }, y) - (std::cosh(y) - 1.0)),
                          std::abs(integral_sinh_pow(Dimension(2), y) - (std::cosh(y) - 1.0)),
                          std::abs(integral_sinh_pow(Dimension(3), y) - (std::sinh(2.0 * y) / 4.0 - y / 2.0))});
    }
    c.check(worst <= 1e-10, "quadrature vs closed forms (d <= 3): max error %.2e <= 1e-10", worst);

    // Uniformity chi-square at n = 1e5 (coarse partitions, dof = bins - 1).
    const std::size_t n = 100000;
    auto uniformity = [&](const char* spec, int bins, auto&& bin_of, auto&& fraction) {
        const auto m = ManifoldSpec::parse(spec);
        const auto X = sample(m, n, Seed{kSeed, 99});
        std::vector<double> obs(static_cast<std::size_t>(bins), 0.0), exp(static_cast<std::size_t>(bins));
        for (std::size_t i = 0; i < X.size(); ++i) obs[static_cast<std::size_t>(bin_of(X.point(i)))] += 1.0;
        for (int b = 0; b < bins; ++b) exp[static_cast<std::size_t>(b)] = n * fraction(b);
        const double x2 = chi_square(obs, exp);
        // 99.9% quantile of chi-square with bins - 1 dof (Wilson-Hilferty).
        const double k = bins - 1;
        const double z = 3.090232;
        const double q = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3);
        c.check(x2 < q, "%-24s chi2 %.2f < %.2f (%d bins)", spec, x2, q, bins);
    };
    // Sphere: the last coordinate of a uniform point on S^2 is uniform on [-1, 1].
    uniformity("sphere:2", 10, [](auto p) { return std::min(9, static_cast<int>((p[2] + 1.0) * 5.0)); },
               [](int) { return 0.1; });
    // Clifford: angle of the first circle uniform.
    uniformity("clifford:2", 12,
               [](auto p) {
                   const double a = std::atan2(p[1], p[0]) + std::numbers::pi;
                   return std::min(11, static_cast<int>(a / kTau * 12.0));
               },
               [](int) { return 1.0 / 12.0; });
    // Rotation torus: tube angle v has density (2 + cos v) / (4 pi).
    uniformity("rotation", 8,
               [](auto p) {
                   const double rho = std::hypot(p[0], p[1]);
                   const double v = std::atan2(p[2], rho - 2.0) + std::numbers::pi;
                   return std::min(7, static_cast<int>(v / kTau * 8.0));
               },
               [](int b) {
                   const double a = -std::numbers::pi + kTau * b / 8.0, e = a + kTau / 8.0;
                   return (2.0 * (e - a) + std::sin(e) - std::sin(a)) / (4.0 * std::numbers::pi);
               });
    // Flat torus: first coordinate uniform.
    uniformity("flat:3", 10, [](auto p) { return std::min(9, static_cast<int>(p[0] / kTau * 10.0)); },
               [](int) { return 0.1; });
    // Schwarz P: the octant symmetry makes the eight half-period octants equally likely.
    uniformity("schwarz", 8,
               [](auto p) {
                   int b = 0;
                   for (int k = 0; k < 3; ++k) b |= (p[k] >= std::numbers::pi ? 1 : 0) << k;
                   return b;
               },
               [](int) { return 1.0 / 8.0; });
    // Swiss roll: y uniform on [0, 21].
    uniformity("swissroll", 7, [](auto p) { return std::min(6, static_cast<int>(p[1] / 3.0)); },
               [](int) { return 1.0 / 7.0; });

    // Determinism of the seeded paths.
    {
        const auto m = ManifoldSpec::parse("product(rotation,schwarz)");
        const auto a = sample(m, 500, Seed{7, 3});
        const auto b = sample(m, 500, Seed{7, 3});
        const bool same_sample = std::equal(a.coords().begin(), a.coords().end(), b.coords().begin());
        const auto u = sample_until_pairs(ManifoldSpec::clifford(2), 0.78, 122, Seed{7, 4}, 100000);
        const auto v = sample_until_pairs(ManifoldSpec::clifford(2), 0.78, 122, Seed{7, 4}, 100000);
        const bool same_until = u.size() == v.size() && std::equal(u.coords().begin(), u.coords().end(), v.coords().begin());
        ExperimentConfig cfg;
        cfg.manifold = ManifoldSpec::clifford(2);
        cfg.budget = 122;
        cfg.scales = {0.78, 0.2};
        cfg.trials = 8;
        cfg.master_seed = 5;
        cfg.threads = 1;
        const auto r1 = run_experiment(cfg);
        cfg.threads = 4;
        const auto r2 = run_experiment(cfg);
        bool same_report = r1.successes == r2.successes;
        for (std::size_t i = 0; i < r1.records.size(); ++i)
            same_report = same_report && to_json(r1.records[i]) == to_json(r2.records[i]);
        c.check(same_sample && same_until && same_report, "determinism: sample %d, sample_until_pairs %d, experiment %d",
                same_sample, same_until, same_report);
    }

    // RatioBounds lower <= upper on a 10^4 grid of (d, eps1, eps2).
    int grid_points = 0, violations = 0;
    for (int d = 1; d <= 10; ++d)
        for (int i = 1; i <= 40; ++i)
            for (int j = 1; j <= 25; ++j) {
                const double eps1 = (d == 1 ? 1.99 : 0.99) * i / 40.0;
                const double eps2 = eps1 * j / 26.0;
                const auto rb = diagonal_ratio_bounds(Dimension(d), {eps1, eps2});
                ++grid_points;
                if (!(rb.lower <= rb.upper) || !(rb.lower >= 1.0)) ++violations;
            }
    c.check(violations == 0, "ratio bounds 1 <= lower <= upper on %d grid points (%d violations)", grid_points,
            violations);
    return c.all();
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool(Checker&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    const std::vector<Criterion> all = {
        {1, "gap table", gap_table},
        {2, "theoretical sample-size table", theory_table},
        {3, "scale search d=2,4", scale_search_check},
        {4, "heuristic pair and point tables", heuristic_tables},
        {5, "expected k-tuple counts", ktuples},
        {6, "Monte Carlo, 90% pair budgets", [](Checker& c) { return pair_budget_suite(c, true); }},
        {7, "Monte Carlo, 70% pair budgets", [](Checker& c) { return pair_budget_suite(c, false); }},
        {8, "Monte Carlo, heuristic point budgets", point_budget_suite},
        {9, "correlation vs ANOVA comparison", baseline_comparison},
        {10, "log-log curve", loglog_check},
        {11, "property suite", property_suite},
    };
    bool ok = true;
    for (const auto& cr : all) {
        if (only && cr.id != only) continue;
        std::printf("criterion %d: %s\n", cr.id, cr.title);
        std::fflush(stdout);
        Checker c;
        bool pass = false;
        try {
            pass = cr.run(c);
        } catch (const std::exception& e) {
            std::printf("  exception: %s\n", e.what());
        }
        std::printf("%s %d %s\n", pass ? "PASS" : "FAIL", cr.id, cr.title);
        std::fflush(stdout);
        ok &= pass;
    }
    return ok ? 0 : 1;
}
