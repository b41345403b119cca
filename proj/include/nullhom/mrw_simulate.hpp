#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <span>

#include "nullhom/null_homology.hpp"
#include "nullhom/random.hpp"
#include "nullhom/util.hpp"

namespace nullhom {

enum class StartMode { FixedState, Stationary };

// A simulated Markov random walk: driving states M_0..M_n and partial sums
// S_0..S_n with S_0 = 0, S_k - S_{k-1} = f(M_{k-1}, M_k).
struct MRWTrajectory {
    std::vector<int> states;
    Eigen::MatrixXd sums;  // (n+1) x dim
    SeedRecord seed;
};

inline MRWTrajectory simulate_mrw(const MarkovChainSpec& chain,
                                  const IncrementFunction<double>& f, int n, RandomSource src,
                                  StartMode mode = StartMode::Stationary, int start_state = 0) {
    const int ns = chain.n_states();
    MRWTrajectory traj;
    traj.seed = src.record();
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    traj.sums = Eigen::MatrixXd::Zero(n + 1, static_cast<Eigen::Index>(f.dim));

    int state;
    if (mode == StartMode::Stationary) {
        std::vector<double> mu(chain.stationary().data(), chain.stationary().data() + ns);
        state = src.sample_index(mu);
    } else {
        if (start_state < 0 || start_state >= ns)
            throw DimensionMismatch("start state out of range");
        state = start_state;
    }
    traj.states.push_back(state);

    std::vector<double> row(static_cast<std::size_t>(ns));
    for (int k = 1; k <= n; ++k) {
        for (int t = 0; t < ns; ++t) row[static_cast<std::size_t>(t)] = chain.transition()(state, t);
        int next = src.sample_index(row);
        const auto& inc = f.at(state, next);
        for (Eigen::Index c = 0; c < traj.sums.cols(); ++c)
            traj.sums(k, c) = traj.sums(k - 1, c) + inc[static_cast<std::size_t>(c)];
        state = next;
        traj.states.push_back(state);
    }
    return traj;
}

// CSV layout: "k,state,s0,...,s{m-1}".
inline void write_trajectory_csv(std::ostream& os, const MRWTrajectory& traj) {
    os << "k,state";
    for (Eigen::Index c = 0; c < traj.sums.cols(); ++c) os << ",s" << c;
    os << "\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        os << k << "," << traj.states[k];
        for (Eigen::Index c = 0; c < traj.sums.cols(); ++c)
            os << "," << double_to_string(traj.sums(static_cast<Eigen::Index>(k), c));
        os << "\n";
    }
}

}  // namespace nullhom
