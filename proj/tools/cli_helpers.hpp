#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "nullhom/config.hpp"
#include "nullhom/null_homology.hpp"
#include "nullhom/rational.hpp"
#include "nullhom/tightness.hpp"
#include "nullhom/version.hpp"

namespace cli {

using nlohmann::json;

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kInputError = 2;
inline constexpr int kNegative = 3;  // analysis ran and the answer is "no"/"fail"

// Command-line overrides that beat both defaults and the config file.
struct Overrides {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    bool threads_set = false;
    double tol = 0.0;
    bool tol_set = false;
};

// Fully resolved run: defaults <- config file <- command line. The manifest
// echoes exactly this object, so a rerun with the same inputs is bitwise
// reproducible.
struct RunContext {
    json config;
    std::filesystem::path out;
    std::string command;

    std::uint64_t seed() const { return config.at("seed").get<std::uint64_t>(); }
    unsigned threads() const { return config.at("threads").get<unsigned>(); }

    std::filesystem::path write_report(const std::string& name, const json& body) const {
        auto path = out / name;
        std::ofstream os(path);
        os << body.dump(2) << "\n";
        return path;
    }
};

inline RunContext make_context(const std::string& command, json defaults,
                               const Overrides& ov) {
    defaults["seed"] = std::uint64_t{0};
    defaults["threads"] = 1u;
    defaults["out"] = "out";
    if (!ov.config_path.empty()) {
        json from_file = nullhom::parse_config_file(ov.config_path);
        for (auto& [key, value] : from_file.items()) {
            if (!defaults.contains(key))
                throw nullhom::ParseError("unknown config key '" + key + "' for " + command);
            defaults[key] = value;
        }
    }
    if (ov.seed_set) defaults["seed"] = ov.seed;
    if (ov.threads_set) defaults["threads"] = ov.threads;
    if (ov.tol_set && defaults.contains("tol")) defaults["tol"] = ov.tol;
    if (!ov.out_dir.empty()) defaults["out"] = ov.out_dir;

    RunContext ctx;
    ctx.command = command;
    ctx.config = std::move(defaults);
    ctx.out = std::filesystem::path(ctx.config.at("out").get<std::string>());
    std::filesystem::create_directories(ctx.out);

    json manifest{{"tool", "nullhom"},
                  {"version", nullhom::kVersion},
                  {"command", command},
                  {"config", ctx.config}};
    ctx.write_report("manifest.json", manifest);
    return ctx;
}

inline json rational_json(const nullhom::Rational& r) {
    return json{{"num", r.num()}, {"den", r.den()}, {"value", r.to_double()}};
}

template <typename T>
json shift_function_json(const nullhom::ShiftFunction<T>& xi) {
    json rows = json::array();
    for (const auto& row : xi.values) {
        json r = json::array();
        for (const auto& v : row) {
            if constexpr (std::is_same_v<T, nullhom::Rational>)
                r.push_back(rational_json(v));
            else
                r.push_back(v);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

template <typename T>
json counterexample_json(const nullhom::CounterexampleCycle<T>& cex) {
    json sum = json::array();
    for (const auto& v : cex.cycle_sum) {
        if constexpr (std::is_same_v<T, nullhom::Rational>)
            sum.push_back(rational_json(v));
        else
            sum.push_back(v);
    }
    return json{{"cycle", cex.states},
                {"cycle_sum", std::move(sum)},
                {"violating_edge", {cex.violating_edge.first, cex.violating_edge.second}}};
}

inline json tightness_json(const nullhom::TightnessReport& rep) {
    json quantiles = json::array();
    for (Eigen::Index h = 0; h < rep.quantiles.rows(); ++h) {
        json row = json::array();
        for (Eigen::Index l = 0; l < rep.quantiles.cols(); ++l)
            row.push_back(rep.quantiles(h, l));
        quantiles.push_back(std::move(row));
    }
    return json{{"horizons", rep.horizons},
                {"levels", rep.levels},
                {"quantiles", std::move(quantiles)},
                {"growth_exponent", rep.growth_exponent},
                {"top_ratio", rep.top_ratio},
                {"verdict", rep.verdict},
                {"reps", rep.reps}};
}

inline void write_quantiles_csv(const std::filesystem::path& path,
                                const nullhom::TightnessReport& rep) {
    std::ofstream os(path);
    os << "horizon,level,quantile\n";
    for (std::size_t h = 0; h < rep.horizons.size(); ++h)
        for (std::size_t l = 0; l < rep.levels.size(); ++l)
            os << rep.horizons[h] << "," << nullhom::double_to_string(rep.levels[l]) << ","
               << nullhom::double_to_string(rep.quantiles(static_cast<Eigen::Index>(h),
                                                          static_cast<Eigen::Index>(l)))
               << "\n";
}

// The one line on stdout: where the report landed.
inline void announce(const std::filesystem::path& report) {
    std::cout << report.string() << "\n";
}

}  // namespace cli
