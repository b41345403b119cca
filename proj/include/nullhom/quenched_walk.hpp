#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nullhom/corrector.hpp"

namespace nullhom {

// Nearest-neighbor walk on Z^dim driven by the periodized field: positions
// are lifted (not wrapped), jump probabilities read the field at S_k mod L.
struct QuenchedWalk {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> sites;  // (n+1) x dim
    ConductanceField field;
    SeedRecord seed;

    int steps() const { return static_cast<int>(sites.rows()) - 1; }
};

inline long long wrap_site(const ConductanceField& field,
                           const Eigen::Matrix<long long, 1, Eigen::Dynamic>& pos) {
    std::vector<int> c(static_cast<std::size_t>(field.dim()));
    for (int k = 0; k < field.dim(); ++k) {
        long long m = pos(k) % field.side();
        if (m < 0) m += field.side();
        c[static_cast<std::size_t>(k)] = static_cast<int>(m);
    }
    return field.site_of(c);
}

// Step law for every site in one flat row-major table; row x holds the
// direction probabilities (+e_0, -e_0, ...) at site x. Keeps the per-step
// cost of long simulations allocation-free.
inline std::vector<double> step_law_table(const ConductanceField& field) {
    const int nd = 2 * field.dim();
    std::vector<double> table(static_cast<std::size_t>(field.n_sites()) * nd);
    for (long long x = 0; x < field.n_sites(); ++x) {
        auto p = transition_probs(field, x);
        for (int d = 0; d < nd; ++d)
            table[static_cast<std::size_t>(x) * nd + d] = p[static_cast<std::size_t>(d)];
    }
    return table;
}

inline QuenchedWalk simulate_quenched_walk(const ConductanceField& field, int n,
                                           RandomSource src,
                                           const std::vector<long long>& start = {}) {
    QuenchedWalk walk{Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>::Zero(
                          n + 1, field.dim()),
                      field, src.record()};
    if (!start.empty()) {
        if (static_cast<int>(start.size()) != field.dim())
            throw DimensionMismatch("start position has wrong dimension");
        for (int k = 0; k < field.dim(); ++k) walk.sites(0, k) = start[static_cast<std::size_t>(k)];
    }
    const int nd = 2 * field.dim();
    auto table = step_law_table(field);
    long long here = wrap_site(field, walk.sites.row(0));
    for (int step = 1; step <= n; ++step) {
        walk.sites.row(step) = walk.sites.row(step - 1);
        int dir = src.sample_index(
            std::span<const double>(table.data() + here * nd, static_cast<std::size_t>(nd)));
        walk.sites(step, dir >> 1) += (dir & 1) ? -1 : +1;
        here = field.neighbor_dir(here, dir);
    }
    return walk;
}

// Torus sites visited by the walk, recovered incrementally from the unit
// steps (one wrap computation total instead of one per step).
inline std::vector<long long> wrapped_sites(const QuenchedWalk& walk) {
    const auto& field = walk.field;
    std::vector<long long> out(static_cast<std::size_t>(walk.steps()) + 1);
    out[0] = wrap_site(field, walk.sites.row(0));
    for (int k = 1; k <= walk.steps(); ++k) {
        long long here = out[static_cast<std::size_t>(k - 1)];
        for (int axis = 0; axis < field.dim(); ++axis) {
            long long d = walk.sites(k, axis) - walk.sites(k - 1, axis);
            if (d != 0) {
                here = field.neighbor(here, axis, static_cast<int>(d));
                break;
            }
        }
        out[static_cast<std::size_t>(k)] = here;
    }
    return out;
}

// Martingale part of the walk: Z_n = S_n - S_0 - sum_{j<n} d(S_j).
inline Eigen::MatrixXd martingale_decomposition(const QuenchedWalk& walk,
                                                const ConductanceField& field) {
    if (walk.field.fingerprint() != field.fingerprint())
        throw FieldMismatch("walk was simulated in a different field");
    auto drift = local_drift(field);
    auto visited = wrapped_sites(walk);
    const int n = walk.steps();
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n + 1, field.dim());
    Eigen::RowVectorXd drift_sum = Eigen::RowVectorXd::Zero(field.dim());
    for (int k = 1; k <= n; ++k) {
        drift_sum += drift.row(visited[static_cast<std::size_t>(k - 1)]);
        z.row(k) = (walk.sites.row(k) - walk.sites.row(0)).cast<double>() - drift_sum;
    }
    return z;
}

// Exact conditional means of the corrected process S + V_G(S): for every
// site the walk visited, the one-step mean of the corrected increment is
// computed from the transition probabilities directly (not sampled). For a
// true corrector this is the harmonicity identity restricted to the path.
struct CorrectedMartingaleReport {
    double max_residual = 0.0;
    long long sites_visited = 0;
};

inline CorrectedMartingaleReport corrected_martingale_check(const QuenchedWalk& walk,
                                                            const CorrectorField& corr) {
    if (walk.field.fingerprint() != corr.field_fingerprint)
        throw FieldMismatch("corrector belongs to a different field");
    const ConductanceField& field = walk.field;
    std::vector<char> visited(static_cast<std::size_t>(field.n_sites()), 0);
    for (long long s : wrapped_sites(walk)) visited[static_cast<std::size_t>(s)] = 1;
    CorrectedMartingaleReport rep;
    for (long long x = 0; x < field.n_sites(); ++x) {
        if (!visited[static_cast<std::size_t>(x)]) continue;
        ++rep.sites_visited;
        auto p = transition_probs(field, x);
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(field.dim());
        for (int d = 0; d < 2 * field.dim(); ++d) {
            Eigen::RowVectorXd step = corr.v.row(field.neighbor_dir(x, d)) - corr.v.row(x);
            step(d >> 1) += (d & 1) ? -1.0 : 1.0;
            mean += p[static_cast<std::size_t>(d)] * step;
        }
        rep.max_residual = std::max(rep.max_residual, mean.cwiseAbs().maxCoeff());
    }
    return rep;
}

}  // namespace nullhom
