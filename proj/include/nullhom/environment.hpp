#pragma once

#include <Eigen/Dense>

#include "nullhom/conductance.hpp"

namespace nullhom {

// The environment seen from the walker, made finite by periodization: state
// x stands for the field translated by x, so there are L^dim states and the
// transition operator is an explicit matrix. q is the normalized invariant
// density (proportional to the total weight incident to each site), and
// reversibility makes diag(q) * pi_hat symmetric.
struct EnvironmentChain {
    int dim = 0;
    int L = 0;
    Eigen::MatrixXd pi_hat;
    Eigen::VectorXd q;
    std::uint64_t field_fingerprint = 0;
};

struct EnvironmentResiduals {
    double stochasticity = 0.0;    // max |row sum - 1|
    double invariance = 0.0;       // max |q' pi_hat - q'|
    double self_adjointness = 0.0; // max |diag(q) pi_hat - pi_hat' diag(q)|
    int min_row_nnz = 0;
    int max_row_nnz = 0;
};

inline EnvironmentResiduals environment_residuals(const EnvironmentChain& env) {
    EnvironmentResiduals r;
    const auto n = env.pi_hat.rows();
    r.stochasticity = (env.pi_hat.rowwise().sum().array() - 1.0).abs().maxCoeff();
    r.invariance = (env.q.transpose() * env.pi_hat - env.q.transpose()).cwiseAbs().maxCoeff();
    Eigen::MatrixXd flow = env.q.asDiagonal() * env.pi_hat;
    r.self_adjointness = (flow - flow.transpose()).cwiseAbs().maxCoeff();
    r.min_row_nnz = static_cast<int>(n);
    r.max_row_nnz = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int nnz = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (env.pi_hat(i, j) != 0.0) ++nnz;
        r.min_row_nnz = std::min(r.min_row_nnz, nnz);
        r.max_row_nnz = std::max(r.max_row_nnz, nnz);
    }
    return r;
}

// Builds pi_hat and q from the field and verifies the construction
// invariants at 1e-12. On the L = 2 torus the +e and -e neighbors coincide,
// so rows then hold dim nonzeros instead of 2*dim.
inline EnvironmentChain build_environment(const ConductanceField& field) {
    EnvironmentChain env;
    env.dim = field.dim();
    env.L = field.side();
    env.field_fingerprint = field.fingerprint();
    const long long n = field.n_sites();
    env.pi_hat = Eigen::MatrixXd::Zero(n, n);
    env.q = Eigen::VectorXd::Zero(n);
    for (long long x = 0; x < n; ++x) {
        auto p = transition_probs(field, x);
        double incident = 0.0;
        for (int d = 0; d < 2 * field.dim(); ++d) {
            env.pi_hat(x, field.neighbor_dir(x, d)) += p[static_cast<std::size_t>(d)];
            incident += field.weight_dir(x, d);
        }
        env.q(x) = incident;
    }
    env.q /= env.q.sum();

    auto r = environment_residuals(env);
    const int expected_nnz = field.side() == 2 ? field.dim() : 2 * field.dim();
    if (r.stochasticity > 1e-12)
        throw SolverFailure("environment rows are not stochastic");
    if (r.invariance > 1e-12)
        throw SolverFailure("invariant density residual too large");
    if (r.self_adjointness > 1e-12)
        throw SolverFailure("environment operator is not self-adjoint in L2(Q)");
    if (r.min_row_nnz != expected_nnz || r.max_row_nnz != expected_nnz)
        throw SolverFailure("environment row sparsity is off");
    return env;
}

}  // namespace nullhom
