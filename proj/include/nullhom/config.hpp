#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nullhom/errors.hpp"

namespace nullhom {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline nlohmann::json parse_toml_scalar(const std::string& raw);

// Splits a TOML array body "1, 2, 3" at top-level commas (no nesting).
inline nlohmann::json parse_toml_array(const std::string& body) {
    nlohmann::json arr = nlohmann::json::array();
    std::string cur;
    bool in_string = false;
    for (char ch : body) {
        if (ch == '"') in_string = !in_string;
        if (ch == ',' && !in_string) {
            if (!trim(cur).empty()) arr.push_back(parse_toml_scalar(trim(cur)));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty()) arr.push_back(parse_toml_scalar(trim(cur)));
    return arr;
}

inline nlohmann::json parse_toml_scalar(const std::string& raw) {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\' && i + 2 < raw.size()) {
                ++i;
                switch (raw[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: throw ParseError(std::string("unknown escape \\") + raw[i]);
                }
            } else {
                out += raw[i];
            }
        }
        return out;
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']')
        return parse_toml_array(raw.substr(1, raw.size() - 2));
    // Number: integer if it parses cleanly as one, float otherwise.
    try {
        std::size_t pos = 0;
        long long v = std::stoll(raw, &pos);
        if (pos == raw.size()) return v;
    } catch (...) {
    }
    try {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos == raw.size()) return v;
    } catch (...) {
    }
    throw ParseError("cannot parse TOML value: '" + raw + "'");
}

}  // namespace detail

// Flat-table TOML subset: [section] headers, key = value lines, strings,
// integers, floats, booleans and one-dimensional arrays; '#' comments.
// Enough for run configs; anything fancier belongs in a JSON config.
inline nlohmann::json parse_toml_lite(std::istream& in) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments outside strings.
        bool in_string = false;
        std::string code;
        for (char ch : line) {
            if (ch == '"') in_string = !in_string;
            if (ch == '#' && !in_string) break;
            code += ch;
        }
        code = detail::trim(code);
        if (code.empty()) continue;
        if (code.front() == '[') {
            if (code.back() != ']')
                throw ParseError("line " + std::to_string(lineno) + ": unterminated [section]");
            std::string name = detail::trim(code.substr(1, code.size() - 2));
            if (name.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty section");
            table = &root[name];
            if (table->is_null()) *table = nlohmann::json::object();
            continue;
        }
        auto eq = code.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(code.substr(0, eq));
        std::string value = detail::trim(code.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key or value");
        try {
            (*table)[key] = detail::parse_toml_scalar(value);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return root;
}

// Loads a config file; the extension picks the format (.json or .toml).
inline nlohmann::json parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "toml") return parse_toml_lite(in);
    if (ext == "json") {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("invalid JSON in " + path + ": " + e.what());
        }
        return j;
    }
    throw ParseError("config file must end in .json or .toml: " + path);
}

}  // namespace nullhom
