#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullhom/lattice.hpp"
#include "nullhom/null_homology.hpp"

namespace nullhom {

// On-disk MRW instance: chain, state labels, increments, and an exact
// rational view when every increment carries {num, den} annotations.
struct MrwBundle {
    MarkovChainSpec chain;
    std::vector<std::string> labels;
    IncrementFunction<double> increments;
    std::optional<IncrementFunction<Rational>> exact_increments;

    bool exact() const { return exact_increments.has_value(); }
};

namespace detail {

inline int resolve_state(const nlohmann::json& j, const std::vector<std::string>& labels) {
    if (j.is_number_integer()) {
        int s = j.get<int>();
        if (s < 0 || s >= static_cast<int>(labels.size()))
            throw ParseError("state index " + std::to_string(s) + " out of range");
        return s;
    }
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == name) return static_cast<int>(i);
        throw ParseError("unknown state label '" + name + "'");
    }
    throw ParseError("state must be an index or a label");
}

}  // namespace detail

inline MrwBundle mrw_bundle_from_json(const nlohmann::json& j) {
    if (!j.contains("states") || !j.contains("transition") || !j.contains("increments"))
        throw ParseError("MRW file needs 'states', 'transition' and 'increments'");
    std::vector<std::string> labels = j.at("states").get<std::vector<std::string>>();
    const int n = static_cast<int>(labels.size());
    const auto flat = j.at("transition").get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != n * n)
        throw ParseError("'transition' must hold n*n row-major probabilities");
    Eigen::MatrixXd P(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) P(s, t) = flat[static_cast<std::size_t>(s) * n + t];

    auto chain = MarkovChainSpec::validate(P);

    IncrementFunction<double> f;
    IncrementFunction<Rational> fx;
    bool all_exact = true;
    bool first = true;
    for (const auto& entry : j.at("increments")) {
        int s = detail::resolve_state(entry.at("from"), labels);
        int t = detail::resolve_state(entry.at("to"), labels);
        auto value = entry.at("value").get<std::vector<double>>();
        if (first) {
            f.dim = value.size();
            fx.dim = value.size();
            first = false;
        }
        if (value.size() != f.dim) throw ParseError("increment vectors must share one dimension");
        if (entry.contains("rational")) {
            const auto& rats = entry.at("rational");
            if (rats.size() != value.size())
                throw ParseError("'rational' must match 'value' in length");
            std::vector<Rational> rv;
            rv.reserve(value.size());
            for (const auto& r : rats)
                rv.emplace_back(r.at("num").get<long long>(), r.at("den").get<long long>());
            for (std::size_t c = 0; c < rv.size(); ++c)
                if (std::abs(rv[c].to_double() - value[c]) > 1e-9)
                    throw ParseError("rational annotation disagrees with 'value'");
            fx.edge_values[{s, t}] = std::move(rv);
        } else {
            all_exact = false;
        }
        f.edge_values[{s, t}] = std::move(value);
    }
    if (first) throw ParseError("'increments' must not be empty");
    f.validate_against(chain);

    MrwBundle bundle{std::move(chain), std::move(labels), std::move(f), std::nullopt};
    if (all_exact) {
        fx.validate_against(bundle.chain);
        bundle.exact_increments = std::move(fx);
    }
    return bundle;
}

inline MrwBundle load_mrw_bundle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open MRW file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    try {
        return mrw_bundle_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed MRW file " + path + ": " + e.what());
    }
}

inline nlohmann::json mrw_bundle_to_json(const MarkovChainSpec& chain,
                                         const std::vector<std::string>& labels,
                                         const IncrementFunction<double>& f,
                                         const IncrementFunction<Rational>* exact = nullptr) {
    nlohmann::json j;
    j["states"] = labels;
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(chain.n_states()) * chain.n_states());
    for (int s = 0; s < chain.n_states(); ++s)
        for (int t = 0; t < chain.n_states(); ++t) flat.push_back(chain.transition()(s, t));
    j["transition"] = flat;
    nlohmann::json incs = nlohmann::json::array();
    for (const auto& [edge, value] : f.edge_values) {
        nlohmann::json e{{"from", edge.first}, {"to", edge.second}, {"value", value}};
        if (exact) {
            nlohmann::json rats = nlohmann::json::array();
            for (const auto& r : exact->at(edge.first, edge.second))
                rats.push_back({{"num", r.num()}, {"den", r.den()}});
            e["rational"] = std::move(rats);
        }
        incs.push_back(std::move(e));
    }
    j["increments"] = std::move(incs);
    return j;
}

}  // namespace nullhom
