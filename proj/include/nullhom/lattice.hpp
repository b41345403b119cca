#pragma once

#include <vector>

#include "nullhom/null_homology.hpp"

namespace nullhom {

// Lattice type of a scalar MRW with exact rational increments. span = 0
// encodes the degenerate null-homologous case (every cycle sum vanishes);
// otherwise span is the maximal d with f(s,t) = xi(t) - xi(s) (mod d) on all
// positive edges, and shift_mod is the [0, d)-valued shift function.
struct LatticeReport {
    struct WitnessCycle {
        std::vector<int> states;  // closed walk, smallest state first
        Rational residue;
    };

    Rational span;
    std::vector<Rational> tree_potential;  // gauge: state 0 -> 0
    std::vector<Rational> shift_mod;       // empty when span == 0
    bool nonarithmetic = false;            // rational inputs are always arithmetic
    std::vector<WitnessCycle> witness_cycles;

    bool degenerate() const { return span.is_zero(); }
};

namespace detail {

// Every edge must satisfy f(s,t) - (xi(t) - xi(s)) in span*Z, and the
// quotients must have gcd 1 (maximality). Used as a post-construction check.
inline void check_lattice_invariant(const MarkovChainSpec& chain,
                                    const IncrementFunction<Rational>& f,
                                    const LatticeReport& rep) {
    if (rep.degenerate()) return;
    Rational quotient_gcd(0);
    for (auto [s, t] : chain.edges()) {
        Rational residual = f.at(s, t)[0] - (rep.shift_mod[t] - rep.shift_mod[s]);
        Rational q = residual / rep.span;
        if (!q.is_integer())
            throw SolverFailure("lattice invariant violated on edge (" + std::to_string(s) +
                                "," + std::to_string(t) + ")");
        quotient_gcd = Rational::gcd(quotient_gcd, q);
    }
    if (!(quotient_gcd == Rational(1)))
        throw SolverFailure("lattice span is not maximal");
}

}  // namespace detail

inline LatticeReport lattice_span(const MarkovChainSpec& chain,
                                  const IncrementFunction<Rational>& f) {
    if (f.dim != 1)
        throw RequiresExactScalars("lattice analysis is defined for scalar increments only");
    f.validate_against(chain);

    auto tree = detail::build_spanning_tree(chain);
    auto xi_rows = detail::tree_potential(chain, f, tree);
    std::vector<Rational> xi(xi_rows.size());
    for (std::size_t s = 0; s < xi_rows.size(); ++s) xi[s] = xi_rows[s][0];

    std::vector<char> is_tree_edge(static_cast<std::size_t>(chain.n_states()) *
                                       chain.n_states(),
                                   0);
    for (auto [a, b] : tree.used_edges)
        is_tree_edge[static_cast<std::size_t>(a) * chain.n_states() + b] = 1;

    LatticeReport rep;
    rep.tree_potential = xi;
    Rational span(0);
    for (auto [s, t] : chain.edges()) {
        if (is_tree_edge[static_cast<std::size_t>(s) * chain.n_states() + t]) continue;
        Rational residue = f.at(s, t)[0] - (xi[t] - xi[s]);
        if (residue.is_zero()) continue;
        span = Rational::gcd(span, residue);
        rep.witness_cycles.push_back({detail::fundamental_cycle(tree, s, t), residue});
    }
    rep.span = span;
    if (!span.is_zero()) {
        rep.shift_mod.resize(xi.size());
        for (std::size_t s = 0; s < xi.size(); ++s) rep.shift_mod[s] = xi[s].mod(span);
    }
    detail::check_lattice_invariant(chain, f, rep);
    return rep;
}

// Real-valued increments are refused: the subgroup generated by irrational
// cycle sums can be dense, so no tolerance-based gcd is trustworthy.
inline LatticeReport lattice_span(const MarkovChainSpec&, const IncrementFunction<double>&) {
    throw RequiresExactScalars(
        "lattice analysis requires exact rational scalar increments; "
        "annotate the instance with rational values");
}

}  // namespace nullhom
