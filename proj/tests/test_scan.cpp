#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "mesonbell/io.hpp"
#include "mesonbell/scan.hpp"
#include "test_support.hpp"

using namespace mesonbell;
using Catch::Matchers::WithinAbs;
using testing_support::species;

namespace {

EvolutionKernel zeta_kernel(const char* name) { return EvolutionKernel(species(name), CpParameterization::Zeta); }

double r_at(const EvolutionKernel& k, int n, double t, double x) {
    return x == 1.0 ? r_n(TwoMesonState(k, PureSinglet{}), n, 0.0, t).ratio : r_n_tilde(k, n, 0.0, t, x).ratio;
}

std::string csv(const ScanResult& scan) {
    std::ostringstream out;
    write_csv(out, scan);
    return out.str();
}

}  // namespace

TEST_CASE("uniform grid", "[scan]") {
    const auto g = uniform_grid(0.0, 400.0, 1001);
    REQUIRE(g.size() == 1001);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 400.0);
    for (std::size_t i = 1; i < g.size(); ++i) REQUIRE(g[i] > g[i - 1]);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 5), InvalidArgument);
}

TEST_CASE("kaon R_6 curve", "[scan]") {
    const auto k = zeta_kernel("K0");
    const auto scan = run_rn_curve(k, 6, 400.0, 1001);
    REQUIRE(scan.t_grid.size() == 1001);
    REQUIRE(scan.x_grid == std::vector<double>{1.0});
    REQUIRE(scan.values.size() == 1001);
    CHECK(scan.species == "K0");
    CHECK(scan.param == "zeta");
    CHECK(scan.index == 6);
    // With a pure phase the t = 0 value sits just below one.
    CHECK_THAT(scan.value(0, 0), WithinAbs(1.0, 1e-2));
    REQUIRE(scan.violation_intervals.size() == 1);
    const auto& intervals = scan.violation_intervals[0];
    REQUIRE_FALSE(intervals.empty());
    bool positive_window = false;
    for (const auto& iv : intervals) {
        CHECK(iv.start < iv.end);
        CHECK(r_at(k, 6, 0.5 * (iv.start + iv.end), 1.0) < 1.0);
        if (iv.end > 100.0) positive_window = true;
    }
    CHECK(positive_window);
}

TEST_CASE("interval ends are bisected crossings", "[scan]") {
    for (const char* name : testing_support::species_names()) {
        const auto k = zeta_kernel(name);
        const int n = std::string(name) == "Bs" ? 8 : 6;
        const auto scan = run_rn_curve(k, n, testing_support::t_max(k.species()), 201);
        for (const auto& iv : scan.violation_intervals[0]) {
            for (double end : {iv.start, iv.end}) {
                if (end == 0.0 || end == scan.t_grid.back()) continue;
                INFO(name << " crossing at " << end);
                CHECK_THAT(r_at(k, n, end, 1.0), WithinAbs(1.0, 1e-6));
            }
        }
    }
}

TEST_CASE("degenerate species has no violation", "[scan]") {
    const EvolutionKernel k(testing_support::degenerate_species(), CpParameterization::Zeta);
    for (int n = 1; n <= 8; ++n) {
        const auto scan = run_rn_curve(k, n, 100.0, 401);
        CHECK(scan.violation_intervals[0].empty());
    }
    const auto heat = run_werner_heatmap(k, 6, 100.0, 101, 21);
    CHECK(heat.contour.empty());
}

TEST_CASE("two-point curves", "[scan]") {
    const auto k = zeta_kernel("K0");
    const auto scan = run_rn_curve(k, 6, 400.0, 2);
    REQUIRE(scan.t_grid.size() == 2);
    REQUIRE(scan.values.size() == 2);
    CHECK(scan.violation_intervals.size() == 1);
    CHECK_THROWS_AS(run_rn_curve(k, 6, 400.0, 1), InvalidArgument);
    CHECK_THROWS_AS(run_rn_curve(k, 6, -1.0, 10), InvalidArgument);
    CHECK_THROWS_AS(run_rn_curve(k, 9, 400.0, 10), InvalidArgument);
    CHECK_THROWS_AS(run_rn_curve(k, 6, 400.0, 10, 1.2), InvalidArgument);
}

TEST_CASE("undefined points are flagged", "[scan]") {
    const auto k = zeta_kernel("D0");
    const auto scan = run_rn_curve(k, 6, 1000.0, 11);
    CHECK(scan.flag(0, 0) == PointFlag::Ok);
    CHECK(scan.flag(0, 10) == PointFlag::Undefined);
    CHECK(scan.value(0, 10) == kUndefinedRatio);
    const std::string text = csv(scan);
    CHECK(text.find("1000,-1,1\n") != std::string::npos);
}

TEST_CASE("heatmap top row equals the pure curve", "[scan]") {
    for (const char* name : testing_support::species_names()) {
        const auto k = zeta_kernel(name);
        const double t_end = testing_support::t_max(k.species());
        const auto heat = run_werner_heatmap(k, 6, t_end, 101, 11);
        const auto curve = run_rn_curve(k, 6, t_end, 101);
        REQUIRE(heat.x_grid.back() == 1.0);
        REQUIRE(heat.values.size() == 101 * 11);
        for (std::size_t col = 0; col < 101; ++col)
            REQUIRE_THAT(heat.value(10, col), WithinAbs(curve.value(0, col), 1e-12));
    }
}

TEST_CASE("contour vertices lie on R = 1", "[scan][property]") {
    for (const char* name : testing_support::species_names()) {
        const auto k = zeta_kernel(name);
        const int n = std::string(name) == "Bs" ? 8 : 6;
        const auto heat = run_werner_heatmap(k, n, testing_support::t_max(k.species()), 201, 41);
        REQUIRE_FALSE(heat.contour.empty());
        for (const auto& line : heat.contour)
            for (const auto& pt : line) {
                INFO(name << " (" << pt.t << ", " << pt.x << ")");
                REQUIRE(std::abs(r_at(k, n, pt.t, pt.x) - 1.0) < 1e-6);
            }
    }
}

TEST_CASE("heatmap intervals are re-verified", "[scan][property]") {
    const auto k = zeta_kernel("K0");
    const auto heat = run_werner_heatmap(k, 6, 400.0, 201, 21);
    REQUIRE(heat.violation_intervals.size() == heat.x_grid.size());
    for (std::size_t row = 0; row < heat.x_grid.size(); ++row)
        for (const auto& iv : heat.violation_intervals[row])
            REQUIRE(r_at(k, 6, 0.5 * (iv.start + iv.end), heat.x_grid[row]) < 1.0);
    // x = 0 never violates; x = 1 does.
    CHECK(heat.violation_intervals.front().empty());
    CHECK_FALSE(heat.violation_intervals.back().empty());
}

TEST_CASE("kaon noise tolerance", "[scan]") {
    const auto k = zeta_kernel("K0");
    const auto heat = run_werner_heatmap(k, 6, 400.0, 401, 101);
    double lowest_violating_x = 2.0;
    for (std::size_t row = 0; row < heat.x_grid.size(); ++row)
        for (std::size_t col = 0; col < heat.t_grid.size(); ++col)
            if (heat.flag(row, col) == PointFlag::Ok && heat.value(row, col) < 1.0)
                lowest_violating_x = std::min(lowest_violating_x, heat.x_grid[row]);
    double lowest_contour_x = 2.0;
    for (const auto& line : heat.contour)
        for (const auto& pt : line) lowest_contour_x = std::min(lowest_contour_x, pt.x);
    // Frozen from an independent numpy root find of min_t R~_6(t, x) = 1.
    CHECK_THAT(lowest_contour_x, WithinAbs(0.5022786, 1e-4));
    CHECK(lowest_violating_x >= lowest_contour_x);
    CHECK(lowest_violating_x < lowest_contour_x + 0.011);
}

TEST_CASE("scans are deterministic", "[scan][property]") {
    const auto k = zeta_kernel("Bs");
    ScanOptions one;
    one.workers = 1;
    ScanOptions many;
    many.workers = 8;
    const auto a = run_werner_heatmap(k, 8, 25.0, 151, 31, one);
    const auto b = run_werner_heatmap(k, 8, 25.0, 151, 31, many);
    const auto c = run_werner_heatmap(k, 8, 25.0, 151, 31, many);
    CHECK(csv(a) == csv(b));
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(to_json(b).dump() == to_json(c).dump());
}

TEST_CASE("CSV schema", "[scan][io]") {
    const auto k = zeta_kernel("K0");
    SECTION("curve") {
        const std::string text = csv(run_rn_curve(k, 6, 400.0, 3));
        CHECK(text ==
              "# species,N,x\n"
              "# K0,6,1\n"
              "ct_mm,R,flag\n" +
                  [&] {
                      std::string rows;
                      for (double t : {0.0, 200.0, 400.0})
                          rows += format_real(t) + "," + format_real(r_at(k, 6, t, 1.0)) + ",0\n";
                      return rows;
                  }());
    }
    SECTION("heatmap is long format") {
        const auto heat = run_werner_heatmap(k, 5, 400.0, 3, 2);
        std::istringstream in(csv(heat));
        std::string line;
        std::getline(in, line);
        CHECK(line == "# species,N,x");
        std::getline(in, line);
        CHECK(line == "# K0,5,grid");
        std::getline(in, line);
        CHECK(line == "ct_mm,x,R,flag");
        int rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            CHECK(std::count(line.begin(), line.end(), ',') == 3);
        }
        CHECK(rows == 6);
    }
    SECTION("format_real round-trips") {
        for (double v : {0.1, 1.0 / 3.0, 0.9968280371279148, 1e-300, 400.0}) CHECK(std::stod(format_real(v)) == v);
    }
}

TEST_CASE("JSON mirrors the scan", "[scan][io]") {
    const auto k = zeta_kernel("D0");
    const auto heat = run_werner_heatmap(k, 6, 40.0, 21, 6);
    const auto j = to_json(heat);
    CHECK(j.at("species") == "D0");
    CHECK(j.at("N") == 6);
    CHECK(j.at("t_grid").size() == 21);
    CHECK(j.at("x_grid").size() == 6);
    CHECK(j.at("values").size() == 6);
    CHECK(j.at("values")[0].size() == 21);
    CHECK(j.at("values")[5][3].get<double>() == heat.value(5, 3));
    CHECK(j.at("violation_intervals").size() == 6);
    CHECK(j.contains("contour"));
    CHECK(j.contains("flags"));
}

TEST_CASE("static report", "[scan]") {
    SECTION("kaon epsilon") {
        const auto report = run_static_report(species("K0"), CpParameterization::Epsilon);
        REQUIRE(report.epsilon_threshold.has_value());
        CHECK_THAT(*report.epsilon_threshold, WithinAbs(0.99682, 1e-4));
        CHECK(report.violated);
        CHECK(report.rows.size() == 8);
        CHECK_FALSE(report.rows[5].check.satisfied);
        REQUIRE(report.rows[5].purity_threshold.has_value());
        CHECK_THAT(*report.rows[5].purity_threshold, WithinAbs(*report.epsilon_threshold, 1e-12));
    }
    SECTION("eps = 0") {
        MesonSpecies s = species("K0");
        s.epsilon = Complex{};
        const auto report = run_static_report(s, CpParameterization::Epsilon);
        CHECK(*report.epsilon_threshold == 1.0);
        CHECK_FALSE(report.violated);
    }
    SECTION("purity either side of the threshold") {
        const double x_star = werner_purity_threshold(*species("K0").epsilon);
        CHECK(run_static_report(species("K0"), CpParameterization::Epsilon, x_star + 1e-4).violated);
        CHECK_FALSE(run_static_report(species("K0"), CpParameterization::Epsilon, x_star - 1e-4).violated);
    }
    SECTION("species without epsilon") {
        const auto report = run_static_report(species("Bs"), CpParameterization::Zeta);
        CHECK_FALSE(report.epsilon.has_value());
        CHECK_THROWS_AS(run_static_report(species("Bs"), CpParameterization::Epsilon), InvalidArgument);
    }
}
