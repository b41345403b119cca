#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "nullhom/markov_chain.hpp"
#include "nullhom/rational.hpp"

namespace nullhom {

// Deterministic vector increment attached to each positive-probability edge
// of a driving chain. T is double for floating data or Rational for exact
// data; the Rational instantiation is what the lattice analysis requires.
template <typename T>
struct IncrementFunction {
    std::size_t dim = 1;
    std::map<std::pair<int, int>, std::vector<T>> edge_values;

    bool defined(int s, int t) const { return edge_values.count({s, t}) > 0; }

    const std::vector<T>& at(int s, int t) const {
        auto it = edge_values.find({s, t});
        if (it == edge_values.end())
            throw DimensionMismatch("increment undefined on edge (" + std::to_string(s) + "," +
                                    std::to_string(t) + ")");
        return it->second;
    }

    void set(int s, int t, std::vector<T> v) {
        if (v.size() != dim) throw DimensionMismatch("increment vector has wrong dimension");
        edge_values[{s, t}] = std::move(v);
    }

    // Defined on exactly the positive edges of the chain.
    void validate_against(const MarkovChainSpec& chain) const {
        for (const auto& [edge, v] : edge_values) {
            if (!chain.has_edge(edge.first, edge.second))
                throw DimensionMismatch("increment on zero-probability edge (" +
                                        std::to_string(edge.first) + "," +
                                        std::to_string(edge.second) + ")");
            if (v.size() != dim) throw DimensionMismatch("ragged increment vectors");
        }
        for (auto [s, t] : chain.edges())
            if (!defined(s, t)) at(s, t);  // throws with a precise message
    }
};

inline IncrementFunction<double> to_double_increments(const IncrementFunction<Rational>& f) {
    IncrementFunction<double> out;
    out.dim = f.dim;
    for (const auto& [edge, v] : f.edge_values) {
        std::vector<double> w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i].to_double();
        out.edge_values[edge] = std::move(w);
    }
    return out;
}

// Per-state potential xi with the additive gauge xi(state 0) = 0.
template <typename T>
struct ShiftFunction {
    std::vector<std::vector<T>> values;  // n_states x dim

    int n_states() const { return static_cast<int>(values.size()); }
    std::size_t dim() const { return values.empty() ? 0 : values.front().size(); }

    // Applies the gauge: subtracts the state-0 vector from every state.
    static ShiftFunction gauged(std::vector<std::vector<T>> raw) {
        if (raw.empty()) throw DimensionMismatch("shift function needs at least one state");
        std::vector<T> base = raw.front();
        for (auto& row : raw) {
            if (row.size() != base.size()) throw DimensionMismatch("ragged shift function");
            for (std::size_t c = 0; c < base.size(); ++c) row[c] = row[c] - base[c];
        }
        return ShiftFunction{std::move(raw)};
    }
};

// One fundamental cycle violating the coboundary equations, with its cycle
// sum (edges traversed against their orientation contribute -f). The vertex
// list is closed (front == back) and rotated so the smallest state leads.
template <typename T>
struct CounterexampleCycle {
    std::vector<int> states;
    std::vector<T> cycle_sum;
    std::pair<int, int> violating_edge;
};

template <typename T>
using NullHomologyDecision = std::variant<ShiftFunction<T>, CounterexampleCycle<T>>;

namespace detail {

// Breadth-first spanning tree of the symmetrized positive-edge graph rooted
// at state 0. Tie-break: neighbors visited in ascending state order, and the
// forward orientation (parent, child) is preferred when both edges exist.
struct SpanningTree {
    std::vector<int> parent;        // -1 at the root
    std::vector<int> depth;
    std::vector<char> forward;      // constraint used edge (parent,child) vs (child,parent)
    std::vector<std::pair<int, int>> used_edges;  // directed edges consumed by the tree
};

inline SpanningTree build_spanning_tree(const MarkovChainSpec& chain) {
    const int n = chain.n_states();
    SpanningTree tree;
    tree.parent.assign(n, -1);
    tree.depth.assign(n, 0);
    tree.forward.assign(n, 1);
    std::vector<char> seen(n, 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        for (int v = 0; v < n; ++v) {
            if (seen[v] || (!chain.has_edge(u, v) && !chain.has_edge(v, u))) continue;
            seen[v] = 1;
            tree.parent[v] = u;
            tree.depth[v] = tree.depth[u] + 1;
            tree.forward[v] = chain.has_edge(u, v) ? 1 : 0;
            tree.used_edges.emplace_back(tree.forward[v] ? std::make_pair(u, v)
                                                         : std::make_pair(v, u));
            queue.push_back(v);
        }
    }
    // Irreducible chains symmetrize to a connected graph, so BFS reaches all.
    return tree;
}

// Potential from tree constraints: xi(root) = 0; along a tree edge the
// coboundary equation f(s,t) = xi(t) - xi(s) fixes the child (reverse
// orientation uses -f).
template <typename T>
std::vector<std::vector<T>> tree_potential(const MarkovChainSpec& chain,
                                           const IncrementFunction<T>& f,
                                           const SpanningTree& tree) {
    const int n = chain.n_states();
    std::vector<std::vector<T>> xi(n, std::vector<T>(f.dim, T{}));
    // used_edges is in BFS order: a child's constraint follows its parent's.
    for (auto [a, b] : tree.used_edges) {
        int child = tree.parent[b] == a ? b : a;
        int par = tree.parent[child];
        const auto& val = f.at(a, b);
        for (std::size_t c = 0; c < f.dim; ++c) {
            T delta = (a == par) ? val[c] : (T{} - val[c]);
            xi[child][c] = xi[par][c] + delta;
        }
    }
    return xi;
}

// Closed vertex walk of the fundamental cycle of non-tree edge (s, t):
// the edge itself followed by the tree path from t back to s.
inline std::vector<int> fundamental_cycle(const SpanningTree& tree, int s, int t) {
    std::vector<int> cycle{s, t};
    if (s != t) {
        int a = t, b = s;
        std::vector<int> up_t, up_s;
        while (tree.depth[a] > tree.depth[b]) {
            a = tree.parent[a];
            up_t.push_back(a);
        }
        while (tree.depth[b] > tree.depth[a]) {
            up_s.push_back(b);
            b = tree.parent[b];
        }
        while (a != b) {
            a = tree.parent[a];
            up_t.push_back(a);
            up_s.push_back(b);
            b = tree.parent[b];
        }
        cycle.insert(cycle.end(), up_t.begin(), up_t.end());
        for (auto it = up_s.rbegin(); it != up_s.rend(); ++it) cycle.push_back(*it);
        if (cycle.back() != s) cycle.push_back(s);
    }
    // Canonical rotation: smallest state first.
    cycle.pop_back();
    auto min_it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), min_it, cycle.end());
    cycle.push_back(cycle.front());
    return cycle;
}

template <typename T>
bool residual_violates(const std::vector<T>& r, double tol) {
    if constexpr (std::is_same_v<T, Rational>) {
        (void)tol;
        for (const auto& c : r)
            if (!c.is_zero()) return true;
        return false;
    } else {
        for (const auto& c : r)
            if (std::abs(c) > tol) return true;
        return false;
    }
}

}  // namespace detail

// The coboundary of xi: f(s,t) = xi(t) - xi(s) on every positive edge.
template <typename T>
IncrementFunction<T> make_null_homologous(const MarkovChainSpec& chain,
                                          const ShiftFunction<T>& xi) {
    if (xi.n_states() != chain.n_states())
        throw DimensionMismatch("shift function has wrong number of states");
    IncrementFunction<T> f;
    f.dim = xi.dim();
    if (f.dim == 0) throw DimensionMismatch("shift function has dimension zero");
    for (auto [s, t] : chain.edges()) {
        std::vector<T> v(f.dim);
        for (std::size_t c = 0; c < f.dim; ++c) v[c] = xi.values[t][c] - xi.values[s][c];
        f.edge_values[{s, t}] = std::move(v);
    }
    return f;
}

// Exact decision: propagates a potential over a spanning tree and checks
// every remaining directed edge. A single inconsistent edge yields its
// fundamental cycle together with the cycle sum. tol applies componentwise
// for floating increments; Rational increments are compared exactly.
template <typename T>
NullHomologyDecision<T> decide_null_homology(const MarkovChainSpec& chain,
                                             const IncrementFunction<T>& f,
                                             double tol = 1e-9) {
    f.validate_against(chain);
    auto tree = detail::build_spanning_tree(chain);
    auto xi = detail::tree_potential(chain, f, tree);
    std::vector<char> is_tree_edge(static_cast<std::size_t>(chain.n_states()) *
                                       chain.n_states(),
                                   0);
    for (auto [a, b] : tree.used_edges)
        is_tree_edge[static_cast<std::size_t>(a) * chain.n_states() + b] = 1;
    for (auto [s, t] : chain.edges()) {
        if (is_tree_edge[static_cast<std::size_t>(s) * chain.n_states() + t]) continue;
        const auto& val = f.at(s, t);
        std::vector<T> residual(f.dim);
        for (std::size_t c = 0; c < f.dim; ++c)
            residual[c] = val[c] - (xi[t][c] - xi[s][c]);
        if (detail::residual_violates(residual, tol)) {
            return CounterexampleCycle<T>{detail::fundamental_cycle(tree, s, t),
                                          std::move(residual),
                                          {s, t}};
        }
    }
    return ShiftFunction<T>{std::move(xi)};
}

// Constructive recovery of xi for a null-homologous walk from conditional
// expectations: h_n(s) = E[S_n | M_0 = s] satisfies the exact recursion
// h_n = b + P h_{n-1} with b(s) = sum_t P(s,t) f(s,t), and for a coboundary
// h_n(s) -> const - xi(s) geometrically. Gauge: xi(state 0) = 0.
inline ShiftFunction<double> recover_shift_function(const MarkovChainSpec& chain,
                                                    const IncrementFunction<double>& f,
                                                    int horizon) {
    f.validate_against(chain);
    const int n = chain.n_states();
    const auto m = static_cast<Eigen::Index>(f.dim);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, m);
    for (auto [s, t] : chain.edges()) {
        const auto& v = f.at(s, t);
        for (Eigen::Index c = 0; c < m; ++c) b(s, c) += chain.transition()(s, t) * v[c];
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, m);
    for (int k = 0; k < horizon; ++k) h = b + chain.transition() * h;
    std::vector<std::vector<double>> values(n, std::vector<double>(f.dim));
    for (int s = 0; s < n; ++s)
        for (Eigen::Index c = 0; c < m; ++c) values[s][c] = h(0, c) - h(s, c);
    return ShiftFunction<double>::gauged(std::move(values));
}

// Q-weighted mean increment sum_s mu(s) sum_t P(s,t) f(s,t); zero for every
// coboundary by stationarity.
inline std::vector<double> stationary_mean_increment(const MarkovChainSpec& chain,
                                                     const IncrementFunction<double>& f) {
    std::vector<double> mean(f.dim, 0.0);
    for (auto [s, t] : chain.edges()) {
        const auto& v = f.at(s, t);
        double w = chain.stationary()(s) * chain.transition()(s, t);
        for (std::size_t c = 0; c < f.dim; ++c) mean[c] += w * v[c];
    }
    return mean;
}

}  // namespace nullhom
