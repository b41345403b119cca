#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nullhom/errors.hpp"
#include "nullhom/util.hpp"

namespace nullhom {

// A finite window of a doubly-infinite vector sequence. Entry k of the
// storage holds x_{offset+k}; nothing outside the window is materialized.
// Immutable after construction.
template <typename T>
class PathWindow {
public:
    PathWindow(long long offset, std::size_t dim, std::vector<T> data)
        : offset_(offset), dim_(dim), data_(std::move(data)) {
        if (dim_ == 0) throw DimensionMismatch("vector dimension must be >= 1");
        if (data_.empty() || data_.size() % dim_ != 0)
            throw DimensionMismatch("window storage must be a nonempty multiple of dim");
    }

    static PathWindow from_rows(long long offset, const std::vector<std::vector<T>>& rows) {
        if (rows.empty()) throw WindowTooShort("window requires at least one entry");
        std::size_t dim = rows.front().size();
        std::vector<T> flat;
        flat.reserve(rows.size() * dim);
        for (const auto& r : rows) {
            if (r.size() != dim) throw DimensionMismatch("ragged rows in window");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return PathWindow(offset, dim, std::move(flat));
    }

    // Scalar convenience (dim = 1).
    static PathWindow scalars(long long offset, std::vector<T> values) {
        return PathWindow(offset, 1, std::move(values));
    }

    long long offset() const { return offset_; }
    std::size_t dim() const { return dim_; }
    long long length() const { return static_cast<long long>(data_.size() / dim_); }
    long long first_index() const { return offset_; }
    long long last_index() const { return offset_ + length() - 1; }
    bool contains(long long n) const { return n >= first_index() && n <= last_index(); }

    // Vector at sequence index n.
    std::span<const T> value(long long n) const {
        if (!contains(n))
            throw IndexOutOfWindow("index " + std::to_string(n) + " outside window [" +
                                   std::to_string(first_index()) + ", " +
                                   std::to_string(last_index()) + "]");
        return row(static_cast<std::size_t>(n - offset_));
    }

    // Vector at storage position k.
    std::span<const T> row(std::size_t k) const {
        return std::span<const T>(data_.data() + k * dim_, dim_);
    }

    const std::vector<T>& data() const { return data_; }

    PathWindow with_offset(long long off) const { return PathWindow(off, dim_, data_); }

    friend bool operator==(const PathWindow& a, const PathWindow& b) {
        return a.offset_ == b.offset_ && a.dim_ == b.dim_ && a.data_ == b.data_;
    }

private:
    long long offset_;
    std::size_t dim_;
    std::vector<T> data_;
};

// T x: same stored data, every entry now sits one index earlier.
template <typename T>
PathWindow<T> shift(const PathWindow<T>& p) {
    return p.with_offset(p.offset() - 1);
}

// T^k x (k may be negative: inverse shifts).
template <typename T>
PathWindow<T> shift_by(const PathWindow<T>& p, long long k) {
    return p.with_offset(p.offset() - k);
}

// D x = T x - x: entry at index n becomes x_{n+1} - x_n.
template <typename T>
PathWindow<T> difference(const PathWindow<T>& p) {
    if (p.length() < 2) throw WindowTooShort("difference needs a window of length >= 2");
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>((p.length() - 1) * static_cast<long long>(p.dim())));
    for (long long k = 0; k + 1 < p.length(); ++k) {
        auto lo = p.row(static_cast<std::size_t>(k));
        auto hi = p.row(static_cast<std::size_t>(k + 1));
        for (std::size_t c = 0; c < p.dim(); ++c) out.push_back(hi[c] - lo[c]);
    }
    return PathWindow<T>(p.offset(), p.dim(), std::move(out));
}

// Signed partial sums s_n for n in [lo, hi]:
//   s_0 = 0, s_n = x_1 + ... + x_n for n >= 1, s_n = -(x_{n+1} + ... + x_0) for n <= -1,
// so s_n - s_{n-1} = x_n at every interior index.
template <typename T>
PathWindow<T> partial_sums(const PathWindow<T>& p, long long lo, long long hi) {
    if (lo > hi) throw IndexOutOfWindow("empty output range for partial sums");
    const std::size_t m = p.dim();
    auto need = [&](long long n) {
        if (!p.contains(n))
            throw IndexOutOfWindow("partial sums need x_" + std::to_string(n) +
                                   " which lies outside the window");
    };
    std::vector<std::vector<T>> rows(static_cast<std::size_t>(hi - lo + 1),
                                     std::vector<T>(m, T{}));
    auto slot = [&](long long n) -> std::vector<T>& {
        return rows[static_cast<std::size_t>(n - lo)];
    };
    std::vector<T> acc(m, T{});
    if (lo <= 0 && hi >= 0) slot(0) = acc;
    // Forward: s_n = s_{n-1} + x_n.
    acc.assign(m, T{});
    for (long long n = 1; n <= hi; ++n) {
        need(n);
        auto x = p.value(n);
        for (std::size_t c = 0; c < m; ++c) acc[c] += x[c];
        if (n >= lo) slot(n) = acc;
    }
    // Backward: s_{n-1} = s_n - x_n.
    acc.assign(m, T{});
    for (long long n = 0; n - 1 >= lo; --n) {
        need(n);
        auto x = p.value(n);
        for (std::size_t c = 0; c < m; ++c) acc[c] -= x[c];
        if (n - 1 <= hi) slot(n - 1) = acc;
    }
    return PathWindow<T>::from_rows(lo, rows);
}

// Maximal computable range: s_0 is always available (empty sum); the positive
// side extends while x_1..x_n are stored, the negative side while x_{n+1}..x_0 are.
template <typename T>
PathWindow<T> partial_sums(const PathWindow<T>& p) {
    long long hi = (p.first_index() <= 1 && p.last_index() >= 1) ? p.last_index() : 0;
    long long lo = (p.first_index() <= 0 && p.last_index() >= 0) ? p.first_index() - 1 : 0;
    return partial_sums(p, lo, hi);
}

// Entrywise sum on the overlap of both index ranges.
template <typename T>
PathWindow<T> add_on_overlap(const PathWindow<T>& a, const PathWindow<T>& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("window dimensions differ");
    long long lo = std::max(a.first_index(), b.first_index());
    long long hi = std::min(a.last_index(), b.last_index());
    if (lo > hi) throw WindowTooShort("windows do not overlap");
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>((hi - lo + 1) * static_cast<long long>(a.dim())));
    for (long long n = lo; n <= hi; ++n) {
        auto u = a.value(n);
        auto v = b.value(n);
        for (std::size_t c = 0; c < a.dim(); ++c) out.push_back(u[c] + v[c]);
    }
    return PathWindow<T>(lo, a.dim(), std::move(out));
}

// Exact equality of the two windows restricted to their common index range.
template <typename T>
bool equal_on_overlap(const PathWindow<T>& a, const PathWindow<T>& b) {
    if (a.dim() != b.dim()) return false;
    long long lo = std::max(a.first_index(), b.first_index());
    long long hi = std::min(a.last_index(), b.last_index());
    if (lo > hi) return false;
    for (long long n = lo; n <= hi; ++n) {
        auto u = a.value(n);
        auto v = b.value(n);
        for (std::size_t c = 0; c < a.dim(); ++c)
            if (!(u[c] == v[c])) return false;
    }
    return true;
}

namespace detail {
inline std::string format_cell(double v) { return double_to_string(v); }
inline std::string format_cell(long long v) { return std::to_string(v); }
inline void parse_cell(const std::string& s, double& out) { out = parse_double(s); }
inline void parse_cell(const std::string& s, long long& out) { out = parse_ll(s); }
}  // namespace detail

// CSV layout: header "index,c0,...,c{m-1}", one row per index.
template <typename T>
void write_window_csv(std::ostream& os, const PathWindow<T>& p) {
    os << "index";
    for (std::size_t c = 0; c < p.dim(); ++c) os << ",c" << c;
    os << "\n";
    for (long long n = p.first_index(); n <= p.last_index(); ++n) {
        os << n;
        auto v = p.value(n);
        for (std::size_t c = 0; c < p.dim(); ++c) os << "," << detail::format_cell(v[c]);
        os << "\n";
    }
}

template <typename T>
PathWindow<T> read_window_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty window CSV");
    std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (dim == 0 || line.rfind("index", 0) != 0)
        throw ParseError("window CSV must start with 'index,c0,...'");
    std::vector<T> flat;
    bool first = true;
    long long offset = 0, expect = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) throw ParseError("bad CSV row: " + line);
        long long idx = parse_ll(cell);
        if (first) {
            offset = idx;
            first = false;
        } else if (idx != expect) {
            throw ParseError("non-contiguous indices in window CSV");
        }
        expect = idx + 1;
        for (std::size_t c = 0; c < dim; ++c) {
            if (!std::getline(row, cell, ',')) throw ParseError("short CSV row: " + line);
            T v{};
            detail::parse_cell(cell, v);
            flat.push_back(v);
        }
    }
    if (flat.empty()) throw ParseError("window CSV has no rows");
    return PathWindow<T>(offset, dim, std::move(flat));
}

}  // namespace nullhom
