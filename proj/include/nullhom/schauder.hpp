#pragma once

#include <utility>

#include "nullhom/path_window.hpp"

namespace nullhom {

// Finite-sample checks of the commuting maps used to transport partial sums:
//   Lambda_k: x -> (T^k x, x + Tx + ... + T^{k-1} x)
//   S: (x, y) -> (Tx, x + y)
// On windows these are exact index-bookkeeping identities: S o Lambda_n =
// Lambda_{n+1}, S commutes with the lifted shift, and the second coordinate
// of S^n obeys Y'_{n+1} = Y'_n + X'_n.
template <typename T>
struct WindowPair {
    PathWindow<T> x;
    PathWindow<T> y;
};

template <typename T>
WindowPair<T> lambda_map(const PathWindow<T>& x, int k) {
    if (k < 1) throw WindowTooShort("lambda_map needs k >= 1");
    if (x.length() < k) throw WindowTooShort("window too short for lambda_" + std::to_string(k));
    PathWindow<T> sum = x;
    for (int i = 1; i < k; ++i) sum = add_on_overlap(sum, shift_by(x, i));
    return {shift_by(x, k), std::move(sum)};
}

template <typename T>
WindowPair<T> s_map(const WindowPair<T>& p) {
    return {shift(p.x), add_on_overlap(p.x, p.y)};
}

template <typename T>
WindowPair<T> shift_pair(const WindowPair<T>& p) {
    return {shift(p.x), shift(p.y)};
}

struct SchauderReport {
    int k_max = 0;
    bool lambda_composition_ok = false;  // S o Lambda_n == Lambda_{n+1}, n < k_max
    bool shift_commutes_ok = false;      // S o T == T o S on pairs
    bool y_recursion_ok = false;         // Y'_{n+1} == Y'_n + X'_n
    bool all_ok() const { return lambda_composition_ok && shift_commutes_ok && y_recursion_ok; }
};

template <typename T>
SchauderReport schauder_map_checks(const PathWindow<T>& x, int k_max) {
    if (k_max < 1) throw WindowTooShort("k_max must be >= 1");
    if (x.length() < k_max + 1)
        throw WindowTooShort("window of length " + std::to_string(x.length()) +
                             " cannot support k_max = " + std::to_string(k_max));
    SchauderReport rep;
    rep.k_max = k_max;

    rep.lambda_composition_ok = true;
    for (int n = 1; n < k_max; ++n) {
        auto lhs = s_map(lambda_map(x, n));
        auto rhs = lambda_map(x, n + 1);
        rep.lambda_composition_ok = rep.lambda_composition_ok &&
                                    equal_on_overlap(lhs.x, rhs.x) &&
                                    equal_on_overlap(lhs.y, rhs.y);
    }

    rep.shift_commutes_ok = true;
    for (int n = 1; n <= k_max; ++n) {
        auto pair = lambda_map(x, n);
        auto st = s_map(shift_pair(pair));
        auto ts = shift_pair(s_map(pair));
        rep.shift_commutes_ok = rep.shift_commutes_ok && equal_on_overlap(st.x, ts.x) &&
                                equal_on_overlap(st.y, ts.y);
    }

    // Iterate S from (x, 0). After n steps the y-component must equal
    // Y'_n = x + Tx + ... + T^{n-1}x entrywise, verified against direct
    // summation of the original window (independent of the map algebra),
    // which is the recursion Y'_{n+1} = Y'_n + X'_n unrolled.
    rep.y_recursion_ok = true;
    std::vector<T> zero(static_cast<std::size_t>(x.length()) * x.dim(), T{});
    WindowPair<T> p{x, PathWindow<T>(x.offset(), x.dim(), std::move(zero))};
    for (int n = 1; n <= k_max; ++n) {
        p = s_map(p);
        for (long long j = p.y.first_index(); j <= p.y.last_index(); ++j) {
            auto yv = p.y.value(j);
            std::vector<T> direct(x.dim(), T{});
            for (int i = 0; i < n; ++i) {
                auto xv = x.value(j + i);
                for (std::size_t c = 0; c < x.dim(); ++c) direct[c] += xv[c];
            }
            for (std::size_t c = 0; c < x.dim(); ++c)
                rep.y_recursion_ok = rep.y_recursion_ok && (yv[c] == direct[c]);
        }
    }
    return rep;
}

}  // namespace nullhom
