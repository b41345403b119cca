#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nullhom/parallel.hpp"
#include "nullhom/sampler.hpp"

namespace nullhom {

inline constexpr const char* kVerdictTight = "tight-consistent";
inline constexpr const char* kVerdictGrowing = "growing";
inline constexpr const char* kVerdictInconclusive = "inconclusive";

// Empirical quantile growth of |S_n| across horizons. Tightness has no
// finite-sample test, so this is an explicitly labeled heuristic with
// published thresholds: exponent <= 0.05 (plus a flat top quantile) reads
// tight-consistent, exponent >= 0.2 reads growing, anything else is
// inconclusive.
struct TightnessReport {
    std::vector<int> horizons;
    std::vector<double> levels;
    Eigen::MatrixXd quantiles;  // horizons x levels, quantiles of |S_n|
    double growth_exponent = 0.0;
    double top_ratio = 0.0;  // top-level quantile: largest vs median horizon
    std::string verdict;
    int reps = 0;
};

namespace detail {

inline double order_statistic(std::vector<double>& sorted_values, double level) {
    auto n = static_cast<double>(sorted_values.size());
    auto idx = static_cast<std::size_t>(
        std::min(n - 1.0, std::max(0.0, std::ceil(level * n) - 1.0)));
    return sorted_values[idx];
}

// Least-squares slope of log y against log x with a floor guard on y.
inline double log_log_slope(const std::vector<int>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double lx = std::log(static_cast<double>(xs[i]));
        double ly = std::log(std::max(ys[i], 1e-12));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace detail

inline TightnessReport tightness_diagnostic(const SamplerHandle& sampler,
                                            const std::vector<int>& horizons, int reps,
                                            const std::vector<double>& levels,
                                            RandomSource src, unsigned threads = 1) {
    if (reps < 100) throw InsufficientReps("tightness diagnostic needs reps >= 100");
    if (horizons.empty() || !std::is_sorted(horizons.begin(), horizons.end()) ||
        std::adjacent_find(horizons.begin(), horizons.end()) != horizons.end())
        throw InvalidBounds("horizons must be strictly increasing");
    if (levels.empty()) throw InvalidBounds("need at least one quantile level");

    const int max_n = horizons.back();
    const auto H = horizons.size();
    // replica-major storage: norms[rep * H + h]
    std::vector<double> norms(static_cast<std::size_t>(reps) * H);
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        Eigen::MatrixXd sums = sampler.sample(src, rep, max_n);
        for (std::size_t h = 0; h < H; ++h)
            norms[rep * H + h] = sums.row(horizons[h]).norm();
    });

    TightnessReport out;
    out.horizons = horizons;
    out.levels = levels;
    out.reps = reps;
    out.quantiles = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(H),
                                          static_cast<Eigen::Index>(levels.size()));
    for (std::size_t h = 0; h < H; ++h) {
        std::vector<double> column(static_cast<std::size_t>(reps));
        for (int rep = 0; rep < reps; ++rep)
            column[static_cast<std::size_t>(rep)] = norms[static_cast<std::size_t>(rep) * H + h];
        std::sort(column.begin(), column.end());
        for (std::size_t l = 0; l < levels.size(); ++l)
            out.quantiles(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(l)) =
                detail::order_statistic(column, levels[l]);
    }

    const auto top = static_cast<Eigen::Index>(levels.size()) - 1;
    std::vector<double> top_quantiles;
    for (std::size_t h = 0; h < H; ++h)
        top_quantiles.push_back(out.quantiles(static_cast<Eigen::Index>(h), top));
    out.growth_exponent = detail::log_log_slope(horizons, top_quantiles);

    double q_median_h = top_quantiles[H / 2];
    double q_last = top_quantiles[H - 1];
    out.top_ratio = q_last / std::max(q_median_h, 1e-12);
    bool flat_top = q_last <= 1.2 * q_median_h + 1e-12;

    if (out.growth_exponent <= 0.05 && flat_top)
        out.verdict = kVerdictTight;
    else if (out.growth_exponent >= 0.2)
        out.verdict = kVerdictGrowing;
    else
        out.verdict = kVerdictInconclusive;
    return out;
}

// ---------------------------------------------------------------------------
// Empirical L^p boundedness of |S_n| across horizons: bounded if the top
// half of horizons stays within 20% of its running median.
struct LpReport {
    double p = 1.0;
    std::vector<int> horizons;
    std::vector<double> moments;  // E |S_n|^p per horizon
    bool bounded = false;
};

inline LpReport lp_bound_check(const SamplerHandle& sampler, double p,
                               const std::vector<int>& horizons, int reps, RandomSource src,
                               unsigned threads = 1) {
    if (reps < 1) throw InsufficientReps("lp_bound_check needs reps >= 1");
    const int max_n = horizons.back();
    const auto H = horizons.size();
    std::vector<double> powers(static_cast<std::size_t>(reps) * H);
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        Eigen::MatrixXd sums = sampler.sample(src, rep, max_n);
        for (std::size_t h = 0; h < H; ++h)
            powers[rep * H + h] = std::pow(sums.row(horizons[h]).norm(), p);
    });
    LpReport out;
    out.p = p;
    out.horizons = horizons;
    for (std::size_t h = 0; h < H; ++h) {
        KahanSum acc;
        for (int rep = 0; rep < reps; ++rep)
            acc.add(powers[static_cast<std::size_t>(rep) * H + h]);
        out.moments.push_back(acc.value() / reps);
    }
    std::vector<double> tail(out.moments.begin() + static_cast<long>(H / 2), out.moments.end());
    std::vector<double> sorted = tail;
    std::sort(sorted.begin(), sorted.end());
    double med = sorted[sorted.size() / 2];
    out.bounded = std::all_of(tail.begin(), tail.end(), [&](double v) {
        return std::abs(v - med) <= 0.2 * med + 1e-12;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Joint run of the exact graph decision and the statistical diagnostic on
// one MRW. Hard assertions: a coboundary must read tight-consistent, and a
// failed decision with nonzero stationary mean increment must read growing.
// Zero-mean failures are report-only (sqrt(n) growth needs larger horizons
// than a fixed threshold can see).
struct EquivalenceConfig {
    std::vector<int> horizons{32, 64, 128, 256, 512, 1024};
    std::vector<double> levels{0.9, 0.99};
    int reps = 400;
    double tol = 1e-9;
    unsigned threads = 1;
};

struct EquivalenceReport {
    bool null_homologous = false;
    std::optional<CounterexampleCycle<double>> counterexample;
    double mu_mean_norm = 0.0;
    TightnessReport tightness;
    bool hard_assertion_applicable = false;
    bool hard_assertion_holds = true;
    std::string note;
};

inline EquivalenceReport theorem_equivalence_experiment(const MarkovChainSpec& chain,
                                                        const IncrementFunction<double>& f,
                                                        const EquivalenceConfig& cfg,
                                                        RandomSource src) {
    EquivalenceReport rep;
    auto decision = decide_null_homology(chain, f, cfg.tol);
    rep.null_homologous = std::holds_alternative<ShiftFunction<double>>(decision);
    if (!rep.null_homologous)
        rep.counterexample = std::get<CounterexampleCycle<double>>(decision);

    auto mean = stationary_mean_increment(chain, f);
    for (double c : mean) rep.mu_mean_norm = std::max(rep.mu_mean_norm, std::abs(c));

    auto sampler = make_mrw_sampler(chain, f, StartMode::Stationary);
    rep.tightness =
        tightness_diagnostic(sampler, cfg.horizons, cfg.reps, cfg.levels, src, cfg.threads);

    if (rep.null_homologous) {
        rep.hard_assertion_applicable = true;
        rep.hard_assertion_holds = rep.tightness.verdict == kVerdictTight;
        rep.note = "exact decision YES: diagnostic must read tight-consistent";
    } else if (rep.mu_mean_norm > cfg.tol) {
        rep.hard_assertion_applicable = true;
        rep.hard_assertion_holds = rep.tightness.verdict == kVerdictGrowing;
        rep.note = "exact decision NO with drift: diagnostic must read growing";
    } else {
        rep.note = "exact decision NO with zero stationary mean: report-only";
    }
    return rep;
}

}  // namespace nullhom
