#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "nullhom/errors.hpp"
#include "nullhom/random.hpp"
#include "nullhom/util.hpp"

namespace nullhom {

// Edge weights on the d-dimensional discrete torus of side L. Each site x
// owns the dim edges (x, x+e_k); the wrap makes the graph a multigraph for
// L = 2 (two parallel edges per axis pair). Weights live in [a, b] with
// 0 < a < b (uniform ellipticity). Immutable after construction.
class ConductanceField {
public:
    static ConductanceField sample(int dim, int L, double a, double b, RandomSource src) {
        check_geometry(dim, L);
        if (!(0.0 < a && a < b)) throw InvalidBounds("need 0 < a < b");
        ConductanceField f(dim, L, a, b);
        f.seed_ = src.record();
        for (Eigen::Index e = 0; e < f.weights_.size(); ++e) f.weights_(e) = src.uniform(a, b);
        return f;
    }

    // Test fixture: every edge carries weight c. Declared bounds bracket c
    // so the [a, b] invariant stays intact.
    static ConductanceField constant(int dim, int L, double c) {
        check_geometry(dim, L);
        if (!(c > 0.0)) throw InvalidBounds("constant weight must be positive");
        ConductanceField f(dim, L, 0.5 * c, 1.5 * c);
        f.weights_.setConstant(c);
        return f;
    }

    static ConductanceField from_weights(int dim, int L, double a, double b,
                                         Eigen::VectorXd weights,
                                         SeedRecord seed = {}) {
        check_geometry(dim, L);
        if (!(0.0 < a && a < b)) throw InvalidBounds("need 0 < a < b");
        ConductanceField f(dim, L, a, b);
        if (weights.size() != f.weights_.size())
            throw InvalidBounds("weight array has wrong length");
        if (weights.minCoeff() < a || weights.maxCoeff() > b)
            throw InvalidBounds("weights leave [a, b]");
        f.weights_ = std::move(weights);
        f.seed_ = seed;
        return f;
    }

    int dim() const { return dim_; }
    int side() const { return L_; }
    double lower() const { return a_; }
    double upper() const { return b_; }
    SeedRecord seed() const { return seed_; }
    long long n_sites() const { return n_sites_; }
    long long n_edges() const { return static_cast<long long>(weights_.size()); }
    const Eigen::VectorXd& weights() const { return weights_; }

    // Weight of the edge (x, x+e_axis); lexicographic (site, axis) storage.
    double weight(long long site, int axis) const {
        return weights_(site * dim_ + axis);
    }

    // Directions are interleaved: 2k is +e_k, 2k+1 is -e_k.
    double weight_dir(long long site, int dir) const {
        int axis = dir >> 1;
        return (dir & 1) ? weight(neighbor(site, axis, -1), axis) : weight(site, axis);
    }

    long long neighbor(long long site, int axis, int step) const {
        long long stride = strides_[static_cast<std::size_t>(axis)];
        long long coord = (site / stride) % L_;
        long long moved = coord + step;
        if (moved < 0) moved += L_;
        if (moved >= L_) moved -= L_;
        return site + (moved - coord) * stride;
    }

    long long neighbor_dir(long long site, int dir) const {
        return neighbor(site, dir >> 1, (dir & 1) ? -1 : +1);
    }

    std::vector<int> coords(long long site) const {
        std::vector<int> c(static_cast<std::size_t>(dim_));
        for (int k = 0; k < dim_; ++k)
            c[static_cast<std::size_t>(k)] =
                static_cast<int>((site / strides_[static_cast<std::size_t>(k)]) % L_);
        return c;
    }

    long long site_of(const std::vector<int>& coords) const {
        long long s = 0;
        for (int k = 0; k < dim_; ++k) {
            int c = coords[static_cast<std::size_t>(k)] % L_;
            if (c < 0) c += L_;
            s += c * strides_[static_cast<std::size_t>(k)];
        }
        return s;
    }

    std::uint64_t fingerprint() const {
        std::uint64_t h = fnv1a(&dim_, sizeof dim_);
        h = fnv1a(&L_, sizeof L_, h);
        return fnv1a(weights_.data(), sizeof(double) * static_cast<std::size_t>(weights_.size()),
                     h);
    }

private:
    ConductanceField(int dim, int L, double a, double b) : dim_(dim), L_(L), a_(a), b_(b) {
        n_sites_ = 1;
        strides_.resize(static_cast<std::size_t>(dim_));
        for (int k = 0; k < dim_; ++k) {
            strides_[static_cast<std::size_t>(k)] = n_sites_;
            n_sites_ *= L_;
        }
        weights_ = Eigen::VectorXd::Zero(n_sites_ * dim_);
    }

    static void check_geometry(int dim, int L) {
        if (dim < 1) throw InvalidBounds("dimension must be >= 1");
        if (L < 2) throw InvalidBounds("torus side must be >= 2");
    }

    int dim_;
    int L_;
    double a_;
    double b_;
    long long n_sites_ = 0;
    std::vector<long long> strides_;
    Eigen::VectorXd weights_;
    SeedRecord seed_{};
};

inline ConductanceField sample_field(int dim, int L, double a, double b, RandomSource src) {
    return ConductanceField::sample(dim, L, a, b, src);
}

// Jump law of the walk at x: pi(x, x+e) = w(x, x+e) / sum of incident weights.
// Returned in direction order (+e_0, -e_0, +e_1, ...).
inline std::vector<double> transition_probs(const ConductanceField& field, long long site) {
    const int nd = 2 * field.dim();
    std::vector<double> p(static_cast<std::size_t>(nd));
    double total = 0.0;
    for (int d = 0; d < nd; ++d) {
        p[static_cast<std::size_t>(d)] = field.weight_dir(site, d);
        total += p[static_cast<std::size_t>(d)];
    }
    for (auto& v : p) v /= total;
    return p;
}

// Local drift d(x) = sum_e e * pi(x, x+e), one row per site.
inline Eigen::MatrixXd local_drift(const ConductanceField& field) {
    Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(field.n_sites(), field.dim());
    for (long long x = 0; x < field.n_sites(); ++x) {
        auto p = transition_probs(field, x);
        for (int k = 0; k < field.dim(); ++k)
            drift(x, k) = p[static_cast<std::size_t>(2 * k)] -
                          p[static_cast<std::size_t>(2 * k + 1)];
    }
    return drift;
}

// tau_y: the field seen from y, i.e. weight'(x, e) = weight(x + y, e).
inline ConductanceField translate_field(const ConductanceField& field,
                                        const std::vector<int>& y) {
    Eigen::VectorXd w(field.n_edges());
    for (long long x = 0; x < field.n_sites(); ++x) {
        // site x + y, built axis by axis.
        long long src = x;
        for (int k = 0; k < field.dim(); ++k)
            src = field.neighbor(src, k, y[static_cast<std::size_t>(k)] % field.side());
        for (int k = 0; k < field.dim(); ++k) w(x * field.dim() + k) = field.weight(src, k);
    }
    return ConductanceField::from_weights(field.dim(), field.side(), field.lower(),
                                          field.upper(), std::move(w), field.seed());
}

inline nlohmann::json field_to_json(const ConductanceField& field) {
    nlohmann::json j;
    j["dim"] = field.dim();
    j["L"] = field.side();
    j["a"] = field.lower();
    j["b"] = field.upper();
    j["seed"] = {{"seed", field.seed().seed}, {"stream", field.seed().stream}};
    std::vector<double> w(field.weights().data(), field.weights().data() + field.n_edges());
    j["weights"] = std::move(w);
    return j;
}

inline ConductanceField field_from_json(const nlohmann::json& j) {
    auto w = j.at("weights").get<std::vector<double>>();
    Eigen::VectorXd weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    SeedRecord seed{};
    if (j.contains("seed") && j["seed"].is_object()) {
        seed.seed = j["seed"].value("seed", 0ULL);
        seed.stream = j["seed"].value("stream", 0ULL);
    }
    return ConductanceField::from_weights(j.at("dim").get<int>(), j.at("L").get<int>(),
                                          j.at("a").get<double>(), j.at("b").get<double>(),
                                          std::move(weights), seed);
}

}  // namespace nullhom
