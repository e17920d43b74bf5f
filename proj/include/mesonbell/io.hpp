#pragma once

#include <array>
#include <charconv>
#include <ostream>
#include <string>

#include <json.hpp>

#include "mesonbell/classical.hpp"
#include "mesonbell/scan.hpp"
#include "mesonbell/species.hpp"

namespace mesonbell {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_real(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

/// Curve (single x) as
///   # species,N,x
///   # <species>,<N>,<x>
///   ct_mm,R,flag
/// and heatmaps in long format with columns ct_mm,x,R,flag (x written as
/// "grid" in the metadata row).
inline void write_csv(std::ostream& out, const ScanResult& scan) {
    const bool curve = scan.x_grid.size() == 1;
    out << "# species,N,x\n";
    out << "# " << scan.species << ',' << scan.index << ',' << (curve ? format_real(scan.x_grid[0]) : "grid")
        << '\n';
    out << (curve ? "ct_mm,R,flag\n" : "ct_mm,x,R,flag\n");
    const std::size_t nt = scan.t_grid.size();
    for (std::size_t row = 0; row < scan.x_grid.size(); ++row) {
        for (std::size_t col = 0; col < nt; ++col) {
            out << format_real(scan.t_grid[col]) << ',';
            if (!curve) out << format_real(scan.x_grid[row]) << ',';
            out << format_real(scan.value(row, col)) << ',' << static_cast<int>(scan.flag(row, col)) << '\n';
        }
    }
}

inline nlohmann::json to_json(const ScanResult& scan) {
    using nlohmann::json;
    const std::size_t nt = scan.t_grid.size();
    json values = json::array();
    json flags = json::array();
    for (std::size_t row = 0; row < scan.x_grid.size(); ++row) {
        json v = json::array();
        json f = json::array();
        for (std::size_t col = 0; col < nt; ++col) {
            v.push_back(scan.value(row, col));
            f.push_back(static_cast<int>(scan.flag(row, col)));
        }
        values.push_back(std::move(v));
        flags.push_back(std::move(f));
    }
    json contour = json::array();
    for (const auto& line : scan.contour) {
        json pts = json::array();
        for (const auto& p : line) pts.push_back({p.t, p.x});
        contour.push_back(std::move(pts));
    }
    json intervals = json::array();
    for (const auto& per_row : scan.violation_intervals) {
        json row = json::array();
        for (const auto& iv : per_row) row.push_back({{"start", iv.start}, {"end", iv.end}});
        intervals.push_back(std::move(row));
    }
    return json{{"species", scan.species},
                {"N", scan.index},
                {"param", scan.param},
                {"convention", scan.convention},
                {"t_grid", scan.t_grid},
                {"x_grid", scan.x_grid},
                {"values", std::move(values)},
                {"flags", std::move(flags)},
                {"contour", std::move(contour)},
                {"violation_intervals", std::move(intervals)}};
}

inline nlohmann::json to_json(const MesonSpecies& s) {
    nlohmann::json j{{"name", s.name},
                     {"delta_m_inv_mm", s.delta_m},
                     {"gamma_L_inv_mm", s.gamma_light},
                     {"gamma_H_inv_mm", s.gamma_heavy},
                     {"active_param", std::string(to_string(s.active))}};
    if (s.zeta) j["zeta_deg"] = *s.zeta * 180.0 / std::numbers::pi;
    if (s.epsilon) {
        j["epsilon_re"] = s.epsilon->real();
        j["epsilon_im"] = s.epsilon->imag();
    }
    if (s.default_t_max) j["t_max_mm"] = *s.default_t_max;
    return j;
}

inline nlohmann::json to_json(const StaticReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json j{{"N", row.index},
                         {"lhs", row.check.lhs},
                         {"rhs", row.check.rhs},
                         {"ratio", row.ratio},
                         {"satisfied", row.check.satisfied}};
        j["purity_threshold"] = row.purity_threshold ? nlohmann::json(*row.purity_threshold) : nlohmann::json();
        rows.push_back(std::move(j));
    }
    nlohmann::json j{{"species", r.species}, {"param", r.param}, {"x", r.purity},
                     {"violated", r.violated}, {"rows", std::move(rows)}};
    if (r.epsilon) {
        j["epsilon"] = {{"re", r.epsilon->real()}, {"im", r.epsilon->imag()}, {"abs", std::abs(*r.epsilon)}};
        j["epsilon_threshold"] = r.epsilon_threshold ? nlohmann::json(*r.epsilon_threshold) : nlohmann::json();
    }
    return j;
}

inline nlohmann::json to_json(const classical::BatchVerification& v) {
    return {{"models", v.models},
            {"seed", v.seed},
            {"tolerance", v.tolerance},
            {"inequality_failures", v.inequality_failures},
            {"max_lhs_minus_rhs", v.max_excess},
            {"identity_failures", v.identity_failures},
            {"max_residual", {{"NSC", v.max_nsc_residual}, {"ENSC", v.max_ensc_residual}, {"NSIT", v.max_nsit_residual}}},
            {"passed", v.passed()}};
}

}  // namespace mesonbell
