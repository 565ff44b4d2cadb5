#pragma once

// Monte Carlo validation runner: repeated sample-and-estimate trials with
// per-trial seeded streams, aggregated into success rates.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dimest/baselines.hpp"
#include "dimest/errors.hpp"
#include "dimest/estimator.hpp"
#include "dimest/geometry.hpp"
#include "dimest/manifold.hpp"
#include "dimest/rng.hpp"

namespace dimest {

enum class SampleMode { FixedPairs, FixedPoints };
enum class EstimatorKind { Corr, GP, Anova };

inline std::string to_string(SampleMode m) { return m == SampleMode::FixedPairs ? "pairs" : "points"; }
inline std::string to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::Corr: return "corr";
        case EstimatorKind::GP: return "gp";
        case EstimatorKind::Anova: return "anova";
    }
    return {};
}
inline EstimatorKind parse_estimator(const std::string& s) {
    if (s == "corr") return EstimatorKind::Corr;
    if (s == "gp") return EstimatorKind::GP;
    if (s == "anova") return EstimatorKind::Anova;
    throw DomainError("unknown estimator '" + s + "' (corr|gp|anova)");
}

struct ExperimentConfig {
    ManifoldSpec manifold = ManifoldSpec::sphere(1);
    SampleMode mode = SampleMode::FixedPairs;
    long long budget = 1;  // N pairs or n points, per mode
    ScalePair scales{0.5, 0.25};
    EstimatorKind estimator = EstimatorKind::Corr;
    int trials = 100;
    std::uint64_t master_seed = 0;
    std::size_t point_cap = 2'000'000;
    unsigned threads = 1;
    int anova_d_min = 1;
    int anova_d_max = 12;

    void validate() const {
        if (trials < 1) throw DomainError("trials must be >= 1");
        if (budget < (mode == SampleMode::FixedPairs ? 1 : 0)) throw DomainError("budget out of range");
        scales.validate();
    }
};

struct TrialRecord {
    int trial = 0;
    std::uint64_t stream_id = 0;
    bool valid = true;
    std::string error;
    std::size_t n_points = 0;
    unsigned long long count1 = 0;  // close pairs at eps1
    unsigned long long count2 = 0;  // close pairs at eps2
    std::optional<double> raw;      // slope, GP value or angle moment
    std::string estimate;           // rounded estimate, ">k" or "undefined"
    std::optional<int> rounded;
    bool success = false;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRecord> records;
    int successes = 0;
    int valid_trials = 0;
    int invalid_trials = 0;
    double success_rate = 0.0;
    double wall_time_s = 0.0;

    /// More than 5% invalid trials makes the rate meaningless.
    bool hard_failure() const noexcept { return invalid_trials * 20 > config.trials; }
};

namespace detail {

inline void fill_corr(TrialRecord& r, const PointCloud& X, const ScalePair& s, int d) {
    const DimEstimate e = dim_corr(X, s);
    r.count1 = e.count1;
    r.count2 = e.count2;
    r.raw = e.raw_slope;
    r.estimate = e.to_string();
    if (e.defined()) r.rounded = e.rounded;
    r.success = e.equals(d);
}

inline void fill_gp(TrialRecord& r, const PointCloud& X, const ScalePair& s, int d) {
    r.count1 = count_pairs(X, s.eps1).count;
    r.count2 = count_pairs(X, s.eps2).count;
    const auto g = dim_gp(X, s.eps1);
    r.raw = g;
    if (g) {
        r.rounded = round_half_up(*g);
        r.estimate = std::to_string(*r.rounded);
    } else {
        r.estimate = "undefined (no pairs at eps1)";
    }
    r.success = r.rounded && *r.rounded == d;
}

inline void fill_anova(TrialRecord& r, const PointCloud& X, const ExperimentConfig& c, int d) {
    r.count1 = count_pairs(X, c.scales.eps1).count;
    r.count2 = count_pairs(X, c.scales.eps2).count;
    const AngleStatistic st = anova_statistic(X, c.scales.eps1);
    if (st.angles == 0) {
        r.estimate = "undefined (no close triples)";
        return;
    }
    r.raw = st.mean_sq_deviation;
    r.rounded = nearest_anova_dimension(st.mean_sq_deviation, c.anova_d_min, c.anova_d_max);
    r.estimate = std::to_string(*r.rounded);
    r.success = *r.rounded == d;
}

inline PointCloud trial_cloud(const ExperimentConfig& c, Seed seed) {
    if (c.mode == SampleMode::FixedPairs)
        return sample_until_pairs(c.manifold, c.scales.eps1, c.budget, seed, c.point_cap);
    return sample(c.manifold, static_cast<std::size_t>(c.budget), seed);
}

template <class Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// One trial: sample with stream `trial_index`, estimate, compare with the
/// manifold's intrinsic dimension. A sampling cap marks the trial invalid.
inline TrialRecord run_trial(const ExperimentConfig& c, int trial_index) {
    TrialRecord r;
    r.trial = trial_index;
    r.stream_id = static_cast<std::uint64_t>(trial_index);
    const int d = c.manifold.intrinsic_dim();
    PointCloud X(1, {});
    try {
        X = detail::trial_cloud(c, Seed{c.master_seed, r.stream_id});
    } catch (const SamplingCapExceeded& e) {
        r.valid = false;
        r.error = e.what();
        r.estimate = "invalid";
        return r;
    }
    r.n_points = X.size();
    switch (c.estimator) {
        case EstimatorKind::Corr: detail::fill_corr(r, X, c.scales, d); break;
        case EstimatorKind::GP: detail::fill_gp(r, X, c.scales, d); break;
        case EstimatorKind::Anova: detail::fill_anova(r, X, c, d); break;
    }
    return r;
}

inline void tally(ExperimentReport& rep) {
    rep.successes = rep.valid_trials = rep.invalid_trials = 0;
    for (const auto& r : rep.records) {
        if (!r.valid) {
            ++rep.invalid_trials;
            continue;
        }
        ++rep.valid_trials;
        rep.successes += r.success ? 1 : 0;
    }
    rep.success_rate = rep.valid_trials ? static_cast<double>(rep.successes) / rep.valid_trials : 0.0;
}

inline ExperimentReport run_experiment(const ExperimentConfig& c) {
    c.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.config = c;
    rep.records.resize(static_cast<std::size_t>(c.trials));
    detail::parallel_for(c.trials, c.threads,
                         [&](int i) { rep.records[static_cast<std::size_t>(i)] = run_trial(c, i); });
    tally(rep);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Corr and Anova on the same clouds.
struct ComparisonReport {
    ExperimentReport corr;
    ExperimentReport anova;
};

inline ComparisonReport compare_estimators(const ManifoldSpec& m, long long n_points, const ScalePair& s, int trials,
                                           std::uint64_t master_seed = 0, unsigned threads = 1) {
    ExperimentConfig c;
    c.manifold = m;
    c.mode = SampleMode::FixedPoints;
    c.budget = n_points;
    c.scales = s;
    c.trials = trials;
    c.master_seed = master_seed;
    c.threads = threads;
    c.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonReport out;
    out.corr.config = c;
    out.corr.config.estimator = EstimatorKind::Corr;
    out.anova.config = c;
    out.anova.config.estimator = EstimatorKind::Anova;
    out.corr.records.resize(static_cast<std::size_t>(trials));
    out.anova.records.resize(static_cast<std::size_t>(trials));
    const int d = m.intrinsic_dim();
    detail::parallel_for(trials, threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        const PointCloud X = sample(m, static_cast<std::size_t>(n_points), Seed{master_seed, idx});
        for (auto* rec : {&out.corr.records[idx], &out.anova.records[idx]}) {
            rec->trial = i;
            rec->stream_id = idx;
            rec->n_points = X.size();
        }
        detail::fill_corr(out.corr.records[idx], X, s, d);
        detail::fill_anova(out.anova.records[idx], X, out.anova.config, d);
    });
    tally(out.corr);
    tally(out.anova);
    out.corr.wall_time_s = out.anova.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// ---- serialisation ------------------------------------------------------

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return {{"manifold", c.manifold.to_string()},
            {"mode", to_string(c.mode)},
            {"budget", c.budget},
            {"eps1", c.scales.eps1},
            {"eps2", c.scales.eps2},
            {"estimator", to_string(c.estimator)},
            {"trials", c.trials},
            {"master_seed", c.master_seed},
            {"intrinsic_dim", c.manifold.intrinsic_dim()}};
}

inline nlohmann::json to_json(const TrialRecord& r) {
    nlohmann::json j = {{"type", "trial"},       {"trial", r.trial},     {"stream_id", r.stream_id},
                        {"valid", r.valid},      {"n_points", r.n_points}, {"count_eps1", r.count1},
                        {"count_eps2", r.count2}, {"estimate", r.estimate}, {"success", r.success}};
    j["raw"] = r.raw ? nlohmann::json(*r.raw) : nlohmann::json(nullptr);
    j["rounded"] = r.rounded ? nlohmann::json(*r.rounded) : nlohmann::json(nullptr);
    if (!r.valid) j["error"] = r.error;
    return j;
}

inline nlohmann::json summary_json(const ExperimentReport& rep) {
    return {{"type", "summary"},
            {"config", to_json(rep.config)},
            {"successes", rep.successes},
            {"valid_trials", rep.valid_trials},
            {"invalid_trials", rep.invalid_trials},
            {"success_rate", rep.success_rate},
            {"hard_failure", rep.hard_failure()},
            {"wall_time_s", rep.wall_time_s}};
}

/// One JSON object per trial, then the summary object.
inline void write_ndjson(std::ostream& out, const ExperimentReport& rep) {
    for (const auto& r : rep.records) out << to_json(r).dump() << '\n';
    out << summary_json(rep).dump() << '\n';
}

inline void write_summary_csv_header(std::ostream& out) {
    out << "manifold,mode,budget,eps1,eps2,estimator,master_seed,trials,valid,successes,success_rate\n";
}

inline void write_summary_csv_row(std::ostream& out, const ExperimentReport& rep) {
    const auto& c = rep.config;
    out << '"' << c.manifold.to_string() << "\"," << to_string(c.mode) << ',' << c.budget << ',' << c.scales.eps1
        << ',' << c.scales.eps2 << ',' << to_string(c.estimator) << ',' << c.master_seed << ',' << c.trials << ','
        << rep.valid_trials << ',' << rep.successes << ',' << rep.success_rate << '\n';
}

}  // namespace dimest
