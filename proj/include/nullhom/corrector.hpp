#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nullhom/environment.hpp"

namespace nullhom {

// Poisson solution, gradient field and corrector on the periodized
// environment. g has one scalar field per coordinate direction (n x dim);
// grad[k](x, :) = g(x + e_k) - g(x); v holds the corrector V_G assembled by
// the axis-ordered staircase path from the origin, so v.row(origin) = 0.
struct CorrectorField {
    int dim = 0;
    int L = 0;
    double epsilon = 0.0;  // 0 for the projected (limit) solve
    Eigen::MatrixXd g;
    std::vector<Eigen::MatrixXd> grad;
    Eigen::MatrixXd v;
    std::uint64_t field_fingerprint = 0;
};

// Direct solve of ((1+eps) Id - pi_hat) g = drift, one column per coordinate.
// Strict diagonal dominance (by eps) keeps the system comfortably regular.
inline Eigen::MatrixXd solve_poisson(const EnvironmentChain& env, const Eigen::MatrixXd& drift,
                                     double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidBounds("solve_poisson needs epsilon > 0");
    const auto n = env.pi_hat.rows();
    Eigen::MatrixXd A = (1.0 + epsilon) * Eigen::MatrixXd::Identity(n, n) - env.pi_hat;
    Eigen::MatrixXd g = A.partialPivLu().solve(drift);
    double residual = (A * g - drift).cwiseAbs().maxCoeff();
    if (residual > 1e-10)
        throw SolverFailure("Poisson residual " + double_to_string(residual));
    return g;
}

// Neumann series for ((1+eps) Id - pi_hat) g = d, i.e.
// g = sum_{n>=0} pi_hat^n d / (1+eps)^{n+1}, truncated when the geometric
// tail bound (current term norm / eps) drops below tol. Since ||pi_hat||_inf
// = 1, the tail after term t_n is at most ||t_n||_inf * sum_j (1+eps)^{-j}.
inline Eigen::MatrixXd neumann_series(const EnvironmentChain& env, const Eigen::MatrixXd& drift,
                                      double epsilon, double tol = 1e-9,
                                      int max_iterations = 100000) {
    if (!(epsilon > 0.0)) throw InvalidBounds("neumann_series needs epsilon > 0");
    Eigen::MatrixXd term = drift / (1.0 + epsilon);
    Eigen::MatrixXd g = term;
    for (int it = 0; it < max_iterations; ++it) {
        if (term.cwiseAbs().maxCoeff() / epsilon <= tol) return g;
        term = (env.pi_hat * term) / (1.0 + epsilon);
        g += term;
    }
    throw MaxIterations("Neumann series did not reach the tail bound");
}

namespace detail {

// Solve (Id - pi_hat) g = rhs with the gauge g(0) = 0. The drift has q-mean
// zero, so the system is consistent; replacing the first equation by the
// gauge makes it uniquely solvable on an irreducible chain.
inline Eigen::MatrixXd solve_projected(const EnvironmentChain& env,
                                       const Eigen::MatrixXd& rhs) {
    const auto n = env.pi_hat.rows();
    double mean_residual = (env.q.transpose() * rhs).cwiseAbs().maxCoeff();
    if (mean_residual > 1e-9)
        throw SolverFailure("right-hand side has nonzero Q-mean: " +
                            double_to_string(mean_residual));
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - env.pi_hat;
    A.row(0).setZero();
    A(0, 0) = 1.0;
    Eigen::MatrixXd b = rhs;
    b.row(0).setZero();
    Eigen::MatrixXd g = A.partialPivLu().solve(b);
    Eigen::MatrixXd full_residual = (Eigen::MatrixXd::Identity(n, n) - env.pi_hat) * g - rhs;
    if (full_residual.cwiseAbs().maxCoeff() > 1e-9)
        throw SolverFailure("projected Poisson solve failed");
    return g;
}

}  // namespace detail

// Gradient field and staircase corrector derived from a Poisson solution g.
inline CorrectorField corrector_from_g(const ConductanceField& field, Eigen::MatrixXd g,
                                       double epsilon) {
    CorrectorField c;
    c.dim = field.dim();
    c.L = field.side();
    c.epsilon = epsilon;
    c.field_fingerprint = field.fingerprint();
    c.g = std::move(g);
    const long long n = field.n_sites();
    c.grad.reserve(static_cast<std::size_t>(field.dim()));
    for (int k = 0; k < field.dim(); ++k) {
        Eigen::MatrixXd Gk(n, field.dim());
        for (long long x = 0; x < n; ++x)
            Gk.row(x) = c.g.row(field.neighbor(x, k, +1)) - c.g.row(x);
        c.grad.push_back(std::move(Gk));
    }
    // Axis-ordered staircase: walk out coordinate 0 first, then 1, ...
    c.v = Eigen::MatrixXd::Zero(n, field.dim());
    for (long long x = 0; x < n; ++x) {
        auto target = field.coords(x);
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(field.dim());
        long long here = 0;
        for (int k = 0; k < field.dim(); ++k) {
            for (int step = 0; step < target[static_cast<std::size_t>(k)]; ++step) {
                acc += c.grad[static_cast<std::size_t>(k)].row(here);
                here = field.neighbor(here, k, +1);
            }
        }
        c.v.row(x) = acc;
    }
    return c;
}

// The epsilon -> 0 limit on the finite torus: exact solve on the q-mean-zero
// subspace, gauge g(0) = 0, then gradient + corrector assembly.
inline CorrectorField limit_gradient(const ConductanceField& field, const EnvironmentChain& env,
                                     const Eigen::MatrixXd& drift) {
    if (env.field_fingerprint != field.fingerprint())
        throw FieldMismatch("environment was built from a different field");
    return corrector_from_g(field, detail::solve_projected(env, drift), 0.0);
}

inline CorrectorField limit_gradient(const ConductanceField& field) {
    auto env = build_environment(field);
    return limit_gradient(field, env, local_drift(field));
}

// Largest closed-loop defect over all unit plaquettes (exact gradients
// telescope, so this probes only rounding and injected faults).
inline double max_plaquette_residual(const CorrectorField& c, const ConductanceField& field) {
    if (c.field_fingerprint != field.fingerprint())
        throw FieldMismatch("corrector belongs to a different field");
    double worst = 0.0;
    for (long long x = 0; x < field.n_sites(); ++x)
        for (int i = 0; i < field.dim(); ++i)
            for (int j = i + 1; j < field.dim(); ++j) {
                Eigen::RowVectorXd loop =
                    c.grad[static_cast<std::size_t>(i)].row(x) +
                    c.grad[static_cast<std::size_t>(j)].row(field.neighbor(x, i, +1)) -
                    c.grad[static_cast<std::size_t>(i)].row(field.neighbor(x, j, +1)) -
                    c.grad[static_cast<std::size_t>(j)].row(x);
                worst = std::max(worst, loop.cwiseAbs().maxCoeff());
            }
    return worst;
}

// Torus-winding loops: summing the gradient L times along an axis returns to
// the same environment state, so the sum telescopes to zero up to rounding.
inline double max_winding_residual(const CorrectorField& c, const ConductanceField& field) {
    if (c.field_fingerprint != field.fingerprint())
        throw FieldMismatch("corrector belongs to a different field");
    double worst = 0.0;
    for (long long x = 0; x < field.n_sites(); ++x)
        for (int k = 0; k < field.dim(); ++k) {
            Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(field.dim());
            long long here = x;
            for (int t = 0; t < field.side(); ++t) {
                acc += c.grad[static_cast<std::size_t>(k)].row(here);
                here = field.neighbor(here, k, +1);
            }
            worst = std::max(worst, acc.cwiseAbs().maxCoeff());
        }
    return worst;
}

// Harmonicity of x + V_G(x): max over sites of the conditional one-step mean
// displacement of the corrected map, V_G extended periodically (its gradient
// is stationary across the torus seam).
inline double check_harmonic(const ConductanceField& field, const CorrectorField& c) {
    if (c.field_fingerprint != field.fingerprint())
        throw FieldMismatch("corrector belongs to a different field");
    double worst = 0.0;
    for (long long x = 0; x < field.n_sites(); ++x) {
        auto p = transition_probs(field, x);
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(field.dim());
        for (int d = 0; d < 2 * field.dim(); ++d) {
            long long y = field.neighbor_dir(x, d);
            Eigen::RowVectorXd step = c.v.row(y) - c.v.row(x);
            step((d >> 1)) += (d & 1) ? -1.0 : 1.0;
            mean += p[static_cast<std::size_t>(d)] * step;
        }
        worst = std::max(worst, mean.cwiseAbs().maxCoeff());
    }
    return worst;
}

// Stationarity of the gradient: V(x) - V(y) equals the corrector of the
// translated field at x - y, for every pair. Each translation rebuilds the
// corrector from scratch, so the check exercises an independent solve.
inline double check_stationary_gradient(const ConductanceField& field,
                                        const CorrectorField& c) {
    if (c.field_fingerprint != field.fingerprint())
        throw FieldMismatch("corrector belongs to a different field");
    double worst = 0.0;
    for (long long y = 0; y < field.n_sites(); ++y) {
        auto yc = field.coords(y);
        auto shifted = translate_field(field, yc);
        auto shifted_corr = limit_gradient(shifted);
        for (long long x = 0; x < field.n_sites(); ++x) {
            // x - y on the torus.
            long long rel = x;
            for (int k = 0; k < field.dim(); ++k)
                rel = field.neighbor(rel, k, -yc[static_cast<std::size_t>(k)]);
            Eigen::RowVectorXd lhs = c.v.row(x) - c.v.row(y);
            Eigen::RowVectorXd rhs = shifted_corr.v.row(rel);
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace nullhom
