#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mesonbell/default_species.hpp"
#include "mesonbell/errors.hpp"
#include "mesonbell/species.hpp"

namespace mesonbell {

/// Named collection of species loaded from a configuration document.
///
/// Document syntax: `#` starts a comment line; each species is a block that
/// opens with a `[species]` line followed by `key = value` lines. Angles are
/// given in degrees and stored in radians. Loading is all-or-nothing: any
/// malformed block raises ConfigError and no registry is produced.
class SpeciesRegistry {
public:
    SpeciesRegistry() = default;

    static SpeciesRegistry parse(std::string_view text);

    static SpeciesRegistry load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(0, "cannot open species config '" + path + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

    /// K0, D0 and Bs as shipped in config/species.conf.
    static const SpeciesRegistry& builtin() {
        static const SpeciesRegistry registry = parse(kDefaultSpeciesConfig);
        return registry;
    }

    const MesonSpecies& at(std::string_view name) const {
        auto it = entries_.find(std::string(name));
        if (it == entries_.end())
            throw InvalidArgument("unknown species '" + std::string(name) + "'");
        return it->second;
    }

    bool contains(std::string_view name) const { return entries_.count(std::string(name)) != 0; }
    const std::map<std::string, MesonSpecies>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, MesonSpecies> entries_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_real(std::string_view text, std::size_t line, std::string_view key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError(line, "value of '" + std::string(key) + "' is not a finite number: '" +
                                    std::string(text) + "'");
    }
    return value;
}

struct PendingSpecies {
    std::size_t header_line = 0;
    std::map<std::string, std::pair<std::string, std::size_t>> values;
};

inline MesonSpecies build_species(const PendingSpecies& block) {
    auto require = [&](const char* key) -> const std::pair<std::string, std::size_t>& {
        auto it = block.values.find(key);
        if (it == block.values.end())
            throw ConfigError(block.header_line, std::string("species block is missing '") + key + "'");
        return it->second;
    };
    auto real = [&](const char* key) {
        const auto& [text, line] = require(key);
        return parse_real(text, line, key);
    };
    auto optional_real = [&](const char* key) -> std::optional<double> {
        auto it = block.values.find(key);
        if (it == block.values.end()) return std::nullopt;
        return parse_real(it->second.first, it->second.second, key);
    };

    MesonSpecies s;
    s.name = require("name").first;
    s.delta_m = real("delta_m_inv_mm");
    s.gamma_light = real("gamma_L_inv_mm");
    s.gamma_heavy = real("gamma_H_inv_mm");
    if (auto zeta_deg = optional_real("zeta_deg")) s.zeta = degrees_to_radians(*zeta_deg);

    const auto eps_re = optional_real("epsilon_re");
    const auto eps_im = optional_real("epsilon_im");
    if (eps_im && !eps_re) {
        throw ConfigError(block.values.at("epsilon_im").second,
                          "'epsilon_im' given without 'epsilon_re'");
    }
    if (eps_re) s.epsilon = Complex(*eps_re, eps_im.value_or(0.0));
    s.default_t_max = optional_real("t_max_mm");

    const auto& [active, active_line] = require("active_param");
    if (active == "zeta") {
        s.active = CpParameterization::Zeta;
    } else if (active == "eps") {
        s.active = CpParameterization::Epsilon;
    } else {
        throw ConfigError(active_line, "active_param must be 'zeta' or 'eps', got '" + active + "'");
    }

    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(block.header_line, e.what());
    }
    return s;
}

}  // namespace detail

inline SpeciesRegistry SpeciesRegistry::parse(std::string_view text) {
    static const std::set<std::string, std::less<>> known_keys = {
        "name",     "delta_m_inv_mm", "gamma_L_inv_mm", "gamma_H_inv_mm", "zeta_deg",
        "epsilon_re", "epsilon_im",   "active_param",   "t_max_mm"};

    std::vector<detail::PendingSpecies> blocks;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line == "[species]") {
            blocks.push_back({line_no, {}});
            continue;
        }
        if (line.front() == '[') throw ConfigError(line_no, "unknown section '" + std::string(line) + "'");

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        if (blocks.empty()) throw ConfigError(line_no, "key outside of a [species] block");

        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (!known_keys.count(key)) throw ConfigError(line_no, "unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
        auto& values = blocks.back().values;
        if (values.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
        values.emplace(key, std::make_pair(value, line_no));
    }

    SpeciesRegistry registry;
    for (const auto& block : blocks) {
        MesonSpecies s = detail::build_species(block);
        if (registry.entries_.count(s.name))
            throw ConfigError(block.header_line, "duplicate species '" + s.name + "'");
        registry.entries_.emplace(s.name, std::move(s));
    }
    if (registry.entries_.empty()) throw ConfigError(0, "configuration defines no species");
    return registry;
}

}  // namespace mesonbell
