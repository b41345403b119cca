#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "nullhom/parallel.hpp"
#include "nullhom/quenched_walk.hpp"
#include "nullhom/util.hpp"

namespace nullhom {

// ---------------------------------------------------------------------------
// Law of large numbers: |S_n|/n and the running drift average both vanish.
// The C log(n)/sqrt(n) envelope is a soft, report-only contract by default.
struct LLNReport {
    int n = 0;
    int reps = 0;
    double max_abs_sn_over_n = 0.0;
    double max_abs_drift_avg = 0.0;
    double envelope = 0.0;  // C log(n) / sqrt(n)
    double c_declared = 0.0;
    bool sn_within_envelope = false;
    bool drift_within_envelope = false;
};

inline LLNReport lln_check(const ConductanceField& field, int n, int reps, RandomSource src,
                           double c_declared = 1.0, unsigned threads = 1) {
    auto drift = local_drift(field);
    std::vector<double> sn_slot(static_cast<std::size_t>(reps));
    std::vector<double> drift_slot(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        auto walk = simulate_quenched_walk(field, n, src.substream(rep));
        auto visited = wrapped_sites(walk);
        Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(field.dim());
        for (int k = 0; k < n; ++k) avg += drift.row(visited[static_cast<std::size_t>(k)]);
        avg /= static_cast<double>(n);
        sn_slot[rep] = walk.sites.row(n).cast<double>().norm() / static_cast<double>(n);
        drift_slot[rep] = avg.cwiseAbs().maxCoeff();
    });
    LLNReport rep;
    rep.n = n;
    rep.reps = reps;
    rep.c_declared = c_declared;
    rep.envelope = c_declared * std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
    rep.max_abs_sn_over_n = *std::max_element(sn_slot.begin(), sn_slot.end());
    rep.max_abs_drift_avg = *std::max_element(drift_slot.begin(), drift_slot.end());
    rep.sn_within_envelope = rep.max_abs_sn_over_n <= rep.envelope;
    rep.drift_within_envelope = rep.max_abs_drift_avg <= rep.envelope;
    return rep;
}

// Fraction of reps with |S_n|/n <= threshold (used by the acceptance gate).
inline double lln_fraction_below(const ConductanceField& field, int n, int reps,
                                 RandomSource src, double threshold, unsigned threads = 1) {
    std::vector<char> ok(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        auto walk = simulate_quenched_walk(field, n, src.substream(rep));
        ok[rep] = walk.sites.row(n).cast<double>().norm() / n <= threshold ? 1 : 0;
    });
    long long hits = std::count(ok.begin(), ok.end(), char(1));
    return static_cast<double>(hits) / reps;
}

// ---------------------------------------------------------------------------
// Concentration of the martingale part: empirical frequency of the event
// {Z_n >= n^{1/2+eps}} (any coordinate) against the Azuma-Hoeffding bound
// exp(-n^{2 eps} / (2 c*^2)) with increment bound c* = 2 (unit step + drift).
struct AzumaReport {
    int n = 0;
    int reps = 0;
    double eps = 0.0;
    double threshold = 0.0;
    double bound = 0.0;
    double empirical = 0.0;
    double binom_se = 0.0;
    long long exceed_count = 0;
    bool pass = false;
};

inline AzumaReport azuma_check(const ConductanceField& field, int n, double eps, int reps,
                               RandomSource src, unsigned threads = 1) {
    if (!(eps > 0.0)) throw InvalidBounds("azuma_check needs eps > 0");
    auto drift = local_drift(field);
    const double threshold = std::pow(static_cast<double>(n), 0.5 + eps);
    std::vector<char> exceed(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        auto walk = simulate_quenched_walk(field, n, src.substream(rep));
        auto visited = wrapped_sites(walk);
        Eigen::RowVectorXd drift_sum = Eigen::RowVectorXd::Zero(field.dim());
        for (int k = 0; k < n; ++k) drift_sum += drift.row(visited[static_cast<std::size_t>(k)]);
        Eigen::RowVectorXd z =
            (walk.sites.row(n) - walk.sites.row(0)).cast<double>() - drift_sum;
        exceed[rep] = z.maxCoeff() >= threshold ? 1 : 0;
    });
    AzumaReport rep;
    rep.n = n;
    rep.reps = reps;
    rep.eps = eps;
    rep.threshold = threshold;
    rep.exceed_count = std::count(exceed.begin(), exceed.end(), char(1));
    rep.empirical = static_cast<double>(rep.exceed_count) / reps;
    const double c_star = 2.0;
    rep.bound = std::exp(-std::pow(static_cast<double>(n), 2.0 * eps) / (2.0 * c_star * c_star));
    rep.binom_se = std::sqrt(std::max(rep.empirical * (1.0 - rep.empirical), 0.0) / reps);
    rep.pass = rep.empirical <= rep.bound + 3.0 * rep.binom_se;
    return rep;
}

// ---------------------------------------------------------------------------
// Exact covariance of the corrected-martingale increments under the
// stationary environment law Q; this is the CLT covariance of S_n / sqrt(n).
inline Eigen::MatrixXd corrected_increment_covariance(const ConductanceField& field,
                                                      const EnvironmentChain& env,
                                                      const CorrectorField& corr) {
    if (corr.field_fingerprint != field.fingerprint())
        throw FieldMismatch("corrector belongs to a different field");
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(field.dim(), field.dim());
    for (long long x = 0; x < field.n_sites(); ++x) {
        auto p = transition_probs(field, x);
        for (int d = 0; d < 2 * field.dim(); ++d) {
            Eigen::RowVectorXd step = corr.v.row(field.neighbor_dir(x, d)) - corr.v.row(x);
            step(d >> 1) += (d & 1) ? -1.0 : 1.0;
            sigma += env.q(x) * p[static_cast<std::size_t>(d)] * (step.transpose() * step);
        }
    }
    return sigma;
}

// Kolmogorov-Smirnov distance between a sample and N(0, sigma2).
inline double ks_distance_to_gaussian(std::vector<double> sample, double sigma2) {
    std::sort(sample.begin(), sample.end());
    const double sd = std::sqrt(sigma2);
    const auto n = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double cdf = 0.5 * std::erfc(-sample[i] / (sd * std::sqrt(2.0)));
        double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        double lo = cdf - static_cast<double>(i) / n;
        worst = std::max({worst, hi, lo});
    }
    return worst;
}

struct CLTReport {
    int n = 0;
    int reps = 0;
    std::vector<double> sigma2;  // per-coordinate martingale variance
    std::vector<double> ks;      // per-coordinate KS distance to N(0, sigma2)
    double max_ks = 0.0;
    Eigen::MatrixXd endpoints;   // reps x dim samples of S_n / sqrt(n)
};

inline CLTReport clt_experiment(const ConductanceField& field, int n, int reps,
                                RandomSource src, unsigned threads = 1) {
    auto env = build_environment(field);
    auto corr = limit_gradient(field, env, local_drift(field));
    Eigen::MatrixXd sigma = corrected_increment_covariance(field, env, corr);

    Eigen::MatrixXd endpoints(reps, field.dim());
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        auto walk = simulate_quenched_walk(field, n, src.substream(rep));
        endpoints.row(static_cast<Eigen::Index>(rep)) =
            walk.sites.row(n).cast<double>() / std::sqrt(static_cast<double>(n));
    });

    CLTReport rep;
    rep.n = n;
    rep.reps = reps;
    for (int k = 0; k < field.dim(); ++k) {
        std::vector<double> coord(endpoints.col(k).data(), endpoints.col(k).data() + reps);
        rep.sigma2.push_back(sigma(k, k));
        rep.ks.push_back(ks_distance_to_gaussian(std::move(coord), sigma(k, k)));
    }
    rep.max_ks = *std::max_element(rep.ks.begin(), rep.ks.end());
    rep.endpoints = std::move(endpoints);
    return rep;
}

// ---------------------------------------------------------------------------
// Corrector growth scan across torus sizes: the torus corrector is bounded
// by construction, so genuine growth is probed by the trend of max |V| in L.
struct ScanRow {
    int L = 0;
    int rep = 0;
    double max_abs_v = 0.0;
    double max_abs_v_over_L = 0.0;
};

struct ScanSummary {
    int L = 0;
    double median_max_v = 0.0;
    double upper_quartile_max_v = 0.0;
    double median_ratio = 0.0;
    double upper_quartile_ratio = 0.0;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::vector<ScanSummary> summaries;
};

namespace detail {
inline double sorted_quantile(std::vector<double> v, double level) {
    std::sort(v.begin(), v.end());
    auto idx = static_cast<std::size_t>(
        std::min(static_cast<double>(v.size()) - 1.0,
                 std::max(0.0, std::ceil(level * static_cast<double>(v.size())) - 1.0)));
    return v[idx];
}
}  // namespace detail

inline ScanReport corrector_scan(int dim, double a, double b, const std::vector<int>& sides,
                                 int reps, RandomSource src, unsigned threads = 1) {
    ScanReport report;
    for (std::size_t li = 0; li < sides.size(); ++li) {
        int L = sides[li];
        std::vector<ScanRow> rows(static_cast<std::size_t>(reps));
        parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
            auto field = ConductanceField::sample(dim, L, a, b,
                                                  src.substream(li * 100003 + rep));
            auto corr = limit_gradient(field);
            double worst = 0.0;
            for (long long x = 0; x < field.n_sites(); ++x)
                worst = std::max(worst, corr.v.row(x).norm());
            rows[rep] = {L, static_cast<int>(rep), worst, worst / L};
        });
        std::vector<double> maxima, ratios;
        for (const auto& r : rows) {
            maxima.push_back(r.max_abs_v);
            ratios.push_back(r.max_abs_v_over_L);
            report.rows.push_back(r);
        }
        report.summaries.push_back({L, detail::sorted_quantile(maxima, 0.5),
                                    detail::sorted_quantile(maxima, 0.75),
                                    detail::sorted_quantile(ratios, 0.5),
                                    detail::sorted_quantile(ratios, 0.75)});
    }
    return report;
}

}  // namespace nullhom
