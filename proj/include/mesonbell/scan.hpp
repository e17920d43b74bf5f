#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mesonbell/errors.hpp"
#include "mesonbell/inequalities.hpp"
#include "mesonbell/parallel.hpp"
#include "mesonbell/twobody.hpp"

namespace mesonbell {

/// Marker stored next to every grid value.
enum class PointFlag : std::uint8_t {
    Ok = 0,
    Undefined = 1,  ///< lhs probability vanished; value holds kUndefinedRatio
};

/// Stored in place of R where the ratio is undefined. R itself is never negative.
inline constexpr double kUndefinedRatio = -1.0;

struct TimeInterval {
    double start;
    double end;
};

struct ContourPoint {
    double t;
    double x;
};
using Polyline = std::vector<ContourPoint>;

/// R over a (t, x) grid plus everything extracted from it.
struct ScanResult {
    std::string species;
    std::string param;       ///< "zeta" or "eps"
    std::string convention;  ///< "unnormalized" or "normalized"
    int index = 0;
    std::vector<double> t_grid;  ///< c*t in mm, strictly increasing
    std::vector<double> x_grid;  ///< Werner purities, strictly increasing
    std::vector<double> values;  ///< row-major, row = x, column = t
    std::vector<PointFlag> flags;
    std::vector<Polyline> contour;                          ///< R = 1 level set
    std::vector<std::vector<TimeInterval>> violation_intervals;  ///< per x row

    double value(std::size_t row, std::size_t col) const { return values[row * t_grid.size() + col]; }
    PointFlag flag(std::size_t row, std::size_t col) const { return flags[row * t_grid.size() + col]; }
};

struct ScanOptions {
    ProbabilityConvention convention = ProbabilityConvention::Unnormalized;
    unsigned workers = default_worker_count();
    double interval_tolerance = 1e-9;  ///< bisection width for violation interval ends, mm
    /// A point counts as violating when R < 1 - violation_margin. Keeps
    /// rounding noise around an exact R = 1 (classical limits) out of the
    /// extracted regions.
    double violation_margin = 1e-12;
};

inline std::string_view to_string(ProbabilityConvention c) noexcept {
    return c == ProbabilityConvention::Unnormalized ? "unnormalized" : "normalized";
}

/// `steps` equally spaced points on [lo, hi], both ends included exactly.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t steps) {
    if (steps < 2) throw InvalidArgument("a grid needs at least 2 points");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidArgument("grid bounds must be finite with hi > lo");
    std::vector<double> grid(steps);
    const double span = hi - lo;
    for (std::size_t i = 0; i < steps; ++i)
        grid[i] = lo + span * static_cast<double>(i) / static_cast<double>(steps - 1);
    grid.back() = hi;
    return grid;
}

namespace detail {

/// R(t, x) - level at t0 = 0, or nullopt where R is undefined.
class ViolationFunction {
public:
    ViolationFunction(const EvolutionKernel& kernel, int index, ProbabilityConvention convention,
                      double margin = 0.0)
        : kernel_(kernel), index_(index), convention_(convention), level_(1.0 - margin) {}

    double level() const noexcept { return level_; }

    RnEvaluation evaluate(double t, double x) const {
        if (x == 1.0) return r_n(TwoMesonState(kernel_, PureSinglet{}), index_, 0.0, t, convention_);
        return r_n_tilde(kernel_, index_, 0.0, t, x, convention_);
    }

    std::optional<double> margin(double t, double x) const {
        const auto r = evaluate(t, x);
        if (!r.defined) return std::nullopt;
        return r.ratio - level_;
    }

private:
    const EvolutionKernel& kernel_;
    int index_;
    ProbabilityConvention convention_;
    double level_;
};

inline bool is_inside(std::optional<double> margin) noexcept { return margin && *margin < 0.0; }

/// Bisects f on [lo, hi] where is_inside(f(lo)) != is_inside(f(hi)).
/// Returns the end of the final bracket with the smaller |f|.
template <class F>
double bisect_crossing(F&& f, double lo, double hi, double width_tolerance) {
    const bool lo_inside = is_inside(f(lo));
    for (int iter = 0; iter < 200 && hi - lo > width_tolerance; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (is_inside(f(mid)) == lo_inside) lo = mid;
        else hi = mid;
    }
    const auto flo = f(lo);
    const auto fhi = f(hi);
    if (!flo) return hi;
    if (!fhi) return lo;
    return std::abs(*flo) <= std::abs(*fhi) ? lo : hi;
}

inline std::vector<TimeInterval> extract_intervals(const ViolationFunction& fn, const std::vector<double>& t_grid,
                                                   double x, const double* row_values, const PointFlag* row_flags,
                                                   double tolerance) {
    auto margin_at = [&](double t) { return fn.margin(t, x); };
    auto inside_at = [&](std::size_t i) { return row_flags[i] == PointFlag::Ok && row_values[i] < fn.level(); };

    std::vector<TimeInterval> raw;
    bool open = false;
    double open_start = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const bool inside = inside_at(i);
        if (i == 0) {
            open = inside;
            open_start = t_grid[0];
            continue;
        }
        if (inside == inside_at(i - 1)) continue;
        const double crossing = bisect_crossing(margin_at, t_grid[i - 1], t_grid[i], tolerance);
        if (inside) {
            open = true;
            open_start = crossing;
        } else if (open) {
            raw.push_back({open_start, crossing});
            open = false;
        }
    }
    if (open) raw.push_back({open_start, t_grid.back()});

    // Re-verify: a violation interval must have R < 1 at its midpoint.
    std::vector<TimeInterval> verified;
    for (const auto& iv : raw) {
        if (is_inside(margin_at(0.5 * (iv.start + iv.end)))) verified.push_back(iv);
    }
    return verified;
}

/// Marching squares on the sign of R - 1 with every edge crossing refined by
/// bisection along that edge. Cells touching an undefined point are skipped.
inline std::vector<Polyline> extract_contour(const ViolationFunction& fn, const ScanResult& scan) {
    const std::size_t nt = scan.t_grid.size();
    const std::size_t nx = scan.x_grid.size();
    if (nt < 2 || nx < 2) return {};

    auto ok = [&](std::size_t row, std::size_t col) { return scan.flag(row, col) == PointFlag::Ok; };
    auto inside = [&](std::size_t row, std::size_t col) { return ok(row, col) && scan.value(row, col) < fn.level(); };

    // Edge ids: horizontal edge (row, col)-(row, col+1) -> 2 (row nt + col);
    // vertical edge (row, col)-(row+1, col) -> 2 (row nt + col) + 1.
    std::map<std::uint64_t, ContourPoint> vertex_cache;
    auto vertex = [&](std::uint64_t id) -> std::uint64_t {
        if (vertex_cache.count(id)) return id;
        const std::size_t cell = id / 2;
        const std::size_t row = cell / nt;
        const std::size_t col = cell % nt;
        ContourPoint p{};
        if (id % 2 == 0) {
            const double x = scan.x_grid[row];
            p.x = x;
            p.t = bisect_crossing([&](double t) { return fn.margin(t, x); }, scan.t_grid[col], scan.t_grid[col + 1],
                                  1e-13 * (1.0 + scan.t_grid.back()));
        } else {
            const double t = scan.t_grid[col];
            p.t = t;
            p.x = bisect_crossing([&](double x) { return fn.margin(t, x); }, scan.x_grid[row], scan.x_grid[row + 1],
                                  1e-14);
        }
        vertex_cache.emplace(id, p);
        return id;
    };
    auto h_edge = [&](std::size_t row, std::size_t col) { return std::uint64_t(2 * (row * nt + col)); };
    auto v_edge = [&](std::size_t row, std::size_t col) { return std::uint64_t(2 * (row * nt + col) + 1); };

    std::vector<std::pair<std::uint64_t, std::uint64_t>> segments;
    for (std::size_t row = 0; row + 1 < nx; ++row) {
        for (std::size_t col = 0; col + 1 < nt; ++col) {
            if (!ok(row, col) || !ok(row, col + 1) || !ok(row + 1, col + 1) || !ok(row + 1, col)) continue;
            // Corners: 0 = (row, col), 1 = (row, col+1), 2 = (row+1, col+1), 3 = (row+1, col).
            const bool c[4] = {inside(row, col), inside(row, col + 1), inside(row + 1, col + 1),
                               inside(row + 1, col)};
            // Edges: 0 bottom, 1 right, 2 top, 3 left; edge k joins corners k and k+1.
            const std::uint64_t edge_id[4] = {h_edge(row, col), v_edge(row, col + 1), h_edge(row + 1, col),
                                              v_edge(row, col)};
            std::vector<int> crossed;
            for (int k = 0; k < 4; ++k)
                if (c[k] != c[(k + 1) % 4]) crossed.push_back(k);
            if (crossed.empty()) continue;
            if (crossed.size() == 2) {
                segments.emplace_back(vertex(edge_id[crossed[0]]), vertex(edge_id[crossed[1]]));
                continue;
            }
            // Saddle: decide connectivity from the cell centre.
            const double tc = 0.5 * (scan.t_grid[col] + scan.t_grid[col + 1]);
            const double xc = 0.5 * (scan.x_grid[row] + scan.x_grid[row + 1]);
            if (is_inside(fn.margin(tc, xc)) == c[0]) {
                segments.emplace_back(vertex(edge_id[0]), vertex(edge_id[1]));
                segments.emplace_back(vertex(edge_id[2]), vertex(edge_id[3]));
            } else {
                segments.emplace_back(vertex(edge_id[3]), vertex(edge_id[0]));
                segments.emplace_back(vertex(edge_id[1]), vertex(edge_id[2]));
            }
        }
    }

    // Chain segments sharing an edge vertex into polylines. Open chains start
    // at vertices used once; the rest are closed loops.
    std::map<std::uint64_t, std::vector<std::size_t>> uses;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        uses[segments[s].first].push_back(s);
        uses[segments[s].second].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<Polyline> lines;
    auto walk = [&](std::size_t first_segment, std::uint64_t start) {
        Polyline line{vertex_cache.at(start)};
        std::uint64_t at = start;
        std::optional<std::size_t> seg = first_segment;
        while (seg) {
            used[*seg] = true;
            at = segments[*seg].first == at ? segments[*seg].second : segments[*seg].first;
            line.push_back(vertex_cache.at(at));
            seg.reset();
            for (std::size_t next : uses[at])
                if (!used[next]) {
                    seg = next;
                    break;
                }
        }
        lines.push_back(std::move(line));
    };
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        for (std::uint64_t end : {segments[s].first, segments[s].second}) {
            if (uses[end].size() == 1) {
                walk(s, end);
                break;
            }
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s]) walk(s, segments[s].first);
    return lines;
}

inline void fill_grid(const ViolationFunction& fn, ScanResult& scan, unsigned workers) {
    const std::size_t nt = scan.t_grid.size();
    const std::size_t total = nt * scan.x_grid.size();
    scan.values.assign(total, 0.0);
    scan.flags.assign(total, PointFlag::Ok);
    parallel_for(
        total,
        [&](std::size_t k) {
            const auto r = fn.evaluate(scan.t_grid[k % nt], scan.x_grid[k / nt]);
            scan.values[k] = r.defined ? r.ratio : kUndefinedRatio;
            scan.flags[k] = r.defined ? PointFlag::Ok : PointFlag::Undefined;
        },
        workers);
}

inline void fill_intervals(const ViolationFunction& fn, ScanResult& scan, double tolerance) {
    const std::size_t nt = scan.t_grid.size();
    scan.violation_intervals.clear();
    for (std::size_t row = 0; row < scan.x_grid.size(); ++row) {
        scan.violation_intervals.push_back(extract_intervals(fn, scan.t_grid, scan.x_grid[row],
                                                             scan.values.data() + row * nt,
                                                             scan.flags.data() + row * nt, tolerance));
    }
}

inline ScanResult make_scan(const EvolutionKernel& kernel, int index, const ScanOptions& options) {
    (void)inequality_assignment(index);
    if (!(options.violation_margin >= 0.0 && options.violation_margin < 1.0))
        throw InvalidArgument("violation margin must lie in [0, 1)");
    ScanResult scan;
    scan.species = kernel.species().name;
    scan.param = std::string(to_string(kernel.mixing().source));
    scan.convention = std::string(to_string(options.convention));
    scan.index = index;
    return scan;
}

}  // namespace detail

/// R_N (or R~_N at a fixed purity) on a uniform c*t grid from 0 to t_max.
inline ScanResult run_rn_curve(const EvolutionKernel& kernel, int index, double t_max, std::size_t steps,
                               double purity = 1.0, const ScanOptions& options = {}) {
    if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
    if (!(purity >= 0.0 && purity <= 1.0)) throw InvalidArgument("purity must lie in [0, 1]");
    ScanResult scan = detail::make_scan(kernel, index, options);
    scan.t_grid = uniform_grid(0.0, t_max, steps);
    scan.x_grid = {purity};
    const detail::ViolationFunction fn(kernel, index, options.convention, options.violation_margin);
    detail::fill_grid(fn, scan, options.workers);
    detail::fill_intervals(fn, scan, options.interval_tolerance);
    return scan;
}

/// R~_N over c*t in [0, t_max] and purity x in [0, 1], with the R~ = 1 contour.
inline ScanResult run_werner_heatmap(const EvolutionKernel& kernel, int index, double t_max, std::size_t t_steps,
                                     std::size_t x_steps, const ScanOptions& options = {}) {
    if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
    ScanResult scan = detail::make_scan(kernel, index, options);
    scan.t_grid = uniform_grid(0.0, t_max, t_steps);
    scan.x_grid = uniform_grid(0.0, 1.0, x_steps);
    const detail::ViolationFunction fn(kernel, index, options.convention, options.violation_margin);
    detail::fill_grid(fn, scan, options.workers);
    detail::fill_intervals(fn, scan, options.interval_tolerance);
    scan.contour = detail::extract_contour(fn, scan);
    return scan;
}

struct StaticRow {
    int index = 0;
    StaticCheck check;
    double ratio = 0.0;                         ///< rhs / lhs
    std::optional<double> purity_threshold;     ///< largest x that still satisfies it
};

/// Time-independent inequalities for one species at purity x.
struct StaticReport {
    std::string species;
    std::string param;
    double purity = 1.0;
    std::vector<StaticRow> rows;
    /// Closed-form quantities, present when the species defines epsilon.
    std::optional<Complex> epsilon;
    std::optional<double> epsilon_threshold;  ///< (1 + |eps|^2) / (1 + 2 Re eps - |eps|^2)
    bool violated = false;                    ///< any row fails at `purity`
};

inline StaticReport run_static_report(const MesonSpecies& species, CpParameterization param, double purity = 1.0) {
    const EvolutionKernel kernel(species, param);
    const TwoMesonState state(kernel, Werner{purity});
    StaticReport report;
    report.species = species.name;
    report.param = std::string(to_string(param));
    report.purity = purity;
    for (const auto& n : inequality_assignments()) {
        StaticRow row;
        row.index = n.index;
        row.check = static_wigner_check(n, state);
        row.ratio = row.check.lhs > 0.0 ? row.check.rhs / row.check.lhs : kUndefinedRatio;
        row.purity_threshold = static_purity_threshold(kernel, n);
        report.violated = report.violated || !row.check.satisfied;
        report.rows.push_back(row);
    }
    if (species.epsilon) {
        report.epsilon = species.epsilon;
        const double denom = 1.0 + 2.0 * species.epsilon->real() - std::norm(*species.epsilon);
        if (denom > 0.0) report.epsilon_threshold = werner_purity_threshold(*species.epsilon);
    }
    return report;
}

}  // namespace mesonbell
