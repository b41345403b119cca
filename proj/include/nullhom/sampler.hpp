#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "nullhom/mrw_simulate.hpp"

namespace nullhom {

// A named generator of i.i.d. trajectory replicas. sample(base, rep, n)
// returns S_0..S_n as an (n+1) x dim matrix, drawing from base.substream(rep)
// so that distinct reps are independent and identical (seed, stream, rep)
// triples reproduce bitwise.
struct SamplerHandle {
    std::string name;
    int dim = 1;
    std::function<Eigen::MatrixXd(const RandomSource& base, std::uint64_t rep, int n)> sample;
};

inline SamplerHandle make_mrw_sampler(MarkovChainSpec chain, IncrementFunction<double> f,
                                      StartMode mode = StartMode::Stationary,
                                      int start_state = 0) {
    SamplerHandle h;
    h.name = "mrw";
    h.dim = static_cast<int>(f.dim);
    h.sample = [chain = std::move(chain), f = std::move(f), mode, start_state](
                   const RandomSource& base, std::uint64_t rep, int n) {
        return simulate_mrw(chain, f, n, base.substream(rep), mode, start_state).sums;
    };
    return h;
}

// Independent increments drawn from a finite set of vectors with the given
// probabilities.
inline SamplerHandle make_iid_sampler(std::vector<Eigen::VectorXd> values,
                                      std::vector<double> probs, std::string name = "iid") {
    if (values.empty() || values.size() != probs.size())
        throw DimensionMismatch("iid sampler needs matching values and probabilities");
    SamplerHandle h;
    h.name = std::move(name);
    h.dim = static_cast<int>(values.front().size());
    h.sample = [values = std::move(values), probs = std::move(probs)](
                   const RandomSource& base, std::uint64_t rep, int n) {
        RandomSource src = base.substream(rep);
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n + 1, values.front().size());
        for (int k = 1; k <= n; ++k) {
            int pick = src.sample_index(probs);
            sums.row(k) = sums.row(k - 1) + values[static_cast<std::size_t>(pick)].transpose();
        }
        return sums;
    };
    return h;
}

// Centered +/-1 steps per coordinate (simple random walk for dim = 1).
inline SamplerHandle make_srw_sampler(int dim) {
    std::vector<Eigen::VectorXd> values;
    std::vector<double> probs;
    for (int k = 0; k < dim; ++k)
        for (int sign : {+1, -1}) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
            v(k) = sign;
            values.push_back(std::move(v));
            probs.push_back(0.5 / dim);
        }
    return make_iid_sampler(std::move(values), std::move(probs), "srw");
}

}  // namespace nullhom
