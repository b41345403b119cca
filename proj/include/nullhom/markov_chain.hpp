#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

#include "nullhom/errors.hpp"

namespace nullhom {

// Finite-state ergodic driving chain: validated transition matrix plus its
// unique stationary distribution. Immutable once constructed.
class MarkovChainSpec {
public:
    static constexpr double kRowSumTol = 1e-12;
    static constexpr double kStationaryTol = 1e-10;

    // Validates stochasticity and irreducibility, then solves mu' P = mu',
    // sum(mu) = 1. Periodic chains are accepted; only irreducibility is required.
    static MarkovChainSpec validate(const Eigen::MatrixXd& transition) {
        const auto n = transition.rows();
        if (n < 1 || transition.cols() != n)
            throw NotStochastic("transition matrix must be square and nonempty");
        for (Eigen::Index i = 0; i < n; ++i) {
            double row_sum = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                double p = transition(i, j);
                if (!(p >= 0.0)) throw NotStochastic("negative entry in row " + std::to_string(i));
                row_sum += p;
            }
            if (std::abs(row_sum - 1.0) > kRowSumTol)
                throw NotStochastic("row " + std::to_string(i) + " sums to " +
                                    std::to_string(row_sum));
        }
        if (!strongly_connected(transition))
            throw NotIrreducible("positive-edge digraph is not strongly connected");

        // Stationarity system: (P' - I) mu = 0 with the first equation replaced
        // by the normalization sum(mu) = 1.
        Eigen::MatrixXd A = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
        A.row(0).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        rhs(0) = 1.0;
        Eigen::VectorXd mu = A.fullPivLu().solve(rhs);
        mu /= mu.sum();
        double residual = (mu.transpose() * transition - mu.transpose()).cwiseAbs().maxCoeff();
        if (residual > kStationaryTol || mu.minCoeff() <= 0.0)
            throw SolverFailure("stationary distribution solve failed (residual " +
                                std::to_string(residual) + ")");
        return MarkovChainSpec(transition, std::move(mu));
    }

    int n_states() const { return static_cast<int>(transition_.rows()); }
    const Eigen::MatrixXd& transition() const { return transition_; }
    const Eigen::VectorXd& stationary() const { return stationary_; }
    bool has_edge(int s, int t) const { return transition_(s, t) > 0.0; }

    // Directed positive edges in ascending (from, to) order.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int s = 0; s < n_states(); ++s)
            for (int t = 0; t < n_states(); ++t)
                if (has_edge(s, t)) out.emplace_back(s, t);
        return out;
    }

private:
    MarkovChainSpec(Eigen::MatrixXd p, Eigen::VectorXd mu)
        : transition_(std::move(p)), stationary_(std::move(mu)) {}

    static bool strongly_connected(const Eigen::MatrixXd& p) {
        const auto n = p.rows();
        auto reaches_all = [&](bool transpose) {
            std::vector<char> seen(static_cast<std::size_t>(n), 0);
            std::vector<Eigen::Index> stack{0};
            seen[0] = 1;
            while (!stack.empty()) {
                Eigen::Index u = stack.back();
                stack.pop_back();
                for (Eigen::Index v = 0; v < n; ++v) {
                    double w = transpose ? p(v, u) : p(u, v);
                    if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                        seen[static_cast<std::size_t>(v)] = 1;
                        stack.push_back(v);
                    }
                }
            }
            return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
        };
        return reaches_all(false) && reaches_all(true);
    }

    Eigen::MatrixXd transition_;
    Eigen::VectorXd stationary_;
};

inline MarkovChainSpec validate_chain(const Eigen::MatrixXd& transition) {
    return MarkovChainSpec::validate(transition);
}

// 1 - |lambda_2|: distance of the second-largest eigenvalue modulus from 1.
inline double spectral_gap(const MarkovChainSpec& chain) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(chain.transition(), /*computeEigenvectors=*/false);
    std::vector<double> mods;
    mods.reserve(static_cast<std::size_t>(chain.n_states()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.begin(), mods.end(), std::greater<>());
    return mods.size() > 1 ? 1.0 - mods[1] : 1.0;
}

}  // namespace nullhom
