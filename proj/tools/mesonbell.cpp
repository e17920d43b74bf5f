// mesonbell command-line front end.
//
//   mesonbell species list|show
//   mesonbell static --species S [--x X]
//   mesonbell rn --species S --n N [--tmax MM] --steps K [--x X]
//   mesonbell heatmap --species S --n N [--tmax MM] --tsteps K --xsteps J
//   mesonbell classical-verify --models M --seed SEED
//
// Exit codes: 0 success, 2 invalid arguments, 3 configuration errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mesonbell/mesonbell.hpp"

namespace {

constexpr int kExitInvalidArguments = 2;
constexpr int kExitConfigError = 3;

struct GlobalOptions {
    std::string out;
    std::string format;
    std::string param;
    std::string config;
    std::string convention = "unnormalized";
    unsigned threads = 0;
};

mesonbell::SpeciesRegistry load_registry(const GlobalOptions& g) {
    return g.config.empty() ? mesonbell::SpeciesRegistry::builtin() : mesonbell::SpeciesRegistry::load_file(g.config);
}

mesonbell::CpParameterization choose_param(const GlobalOptions& g, const mesonbell::MesonSpecies& s) {
    using mesonbell::CpParameterization;
    const CpParameterization p = g.param.empty() ? s.active
                                 : g.param == "eps" ? CpParameterization::Epsilon
                                                    : CpParameterization::Zeta;
    if (!s.has(p)) {
        throw mesonbell::InvalidArgument("species " + s.name + " defines no " +
                                         std::string(mesonbell::to_string(p)) + " parameter");
    }
    std::clog << "mesonbell: " << s.name << " uses the " << mesonbell::to_string(p) << " parameterization\n";
    return p;
}

mesonbell::ScanOptions scan_options(const GlobalOptions& g) {
    mesonbell::ScanOptions o;
    o.convention = g.convention == "normalized" ? mesonbell::ProbabilityConvention::SurvivalNormalized
                                                : mesonbell::ProbabilityConvention::Unnormalized;
    if (g.threads > 0) o.workers = g.threads;
    return o;
}

double resolve_tmax(std::optional<double> tmax, const mesonbell::MesonSpecies& s) {
    if (tmax) return *tmax;
    if (s.default_t_max) return *s.default_t_max;
    throw mesonbell::InvalidArgument("--tmax is required: species " + s.name + " has no default range");
}

void emit(const GlobalOptions& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw mesonbell::InvalidArgument("cannot write '" + g.out + "'");
    file << text;
}

std::string render_scan(const GlobalOptions& g, const mesonbell::ScanResult& scan) {
    std::ostringstream os;
    if (g.format == "json") {
        os << mesonbell::to_json(scan).dump(2) << '\n';
    } else {
        mesonbell::write_csv(os, scan);
    }
    return os.str();
}

std::string render_static(const GlobalOptions& g, const mesonbell::StaticReport& r) {
    using mesonbell::format_real;
    std::ostringstream os;
    if (g.format == "json") {
        os << mesonbell::to_json(r).dump(2) << '\n';
        return os.str();
    }
    os << "# species," << r.species << "\n# param," << r.param << "\n# x," << format_real(r.purity) << '\n';
    if (r.epsilon) {
        const auto eps = *r.epsilon;
        os << "# eps," << format_real(eps.real()) << ',' << format_real(eps.imag()) << '\n';
        os << "# inequality |Re(eps)| >= -1: " << (std::abs(eps.real()) >= -1.0 ? "holds" : "violated") << '\n';
        os << "# inequality Re(eps) <= |eps|^2: " << format_real(eps.real()) << " <= " << format_real(std::norm(eps))
           << ' ' << (eps.real() <= std::norm(eps) ? "holds" : "violated") << '\n';
        os << "# werner_threshold,"
           << (r.epsilon_threshold ? format_real(*r.epsilon_threshold) : std::string("undefined")) << '\n';
    }
    os << "# status," << (r.violated ? "violated" : "satisfied") << '\n';
    os << "N,lhs,rhs,ratio,satisfied,purity_threshold\n";
    for (const auto& row : r.rows) {
        os << row.index << ',' << format_real(row.check.lhs) << ',' << format_real(row.check.rhs) << ','
           << format_real(row.ratio) << ',' << (row.check.satisfied ? 1 : 0) << ','
           << (row.purity_threshold ? format_real(*row.purity_threshold) : std::string()) << '\n';
    }
    return os.str();
}

std::string render_classical(const GlobalOptions& g, const mesonbell::classical::BatchVerification& v) {
    using mesonbell::format_real;
    std::ostringstream os;
    if (g.format == "json") {
        os << mesonbell::to_json(v).dump(2) << '\n';
        return os.str();
    }
    os << "key,value\n"
       << "models," << v.models << '\n'
       << "seed," << v.seed << '\n'
       << "tolerance," << format_real(v.tolerance) << '\n'
       << "inequality_failures," << v.inequality_failures << '\n'
       << "max_lhs_minus_rhs," << format_real(v.max_excess) << '\n'
       << "identity_failures," << v.identity_failures << '\n'
       << "max_residual_NSC," << format_real(v.max_nsc_residual) << '\n'
       << "max_residual_ENSC," << format_real(v.max_ensc_residual) << '\n'
       << "max_residual_NSIT," << format_real(v.max_nsit_residual) << '\n'
       << "passed," << (v.passed() ? 1 : 0) << '\n';
    return os.str();
}

std::string render_species(const GlobalOptions& g, const mesonbell::SpeciesRegistry& registry,
                           const std::string& only) {
    std::ostringstream os;
    if (g.format == "json") {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& [name, s] : registry.entries())
            if (only.empty() || name == only) all.push_back(mesonbell::to_json(s));
        os << (only.empty() ? all : all.at(0)).dump(2) << '\n';
        return os.str();
    }
    using mesonbell::format_real;
    os << "name,delta_m_inv_mm,gamma_L_inv_mm,gamma_H_inv_mm,zeta_deg,epsilon_re,epsilon_im,active_param,t_max_mm\n";
    for (const auto& [name, s] : registry.entries()) {
        if (!only.empty() && name != only) continue;
        os << name << ',' << format_real(s.delta_m) << ',' << format_real(s.gamma_light) << ','
           << format_real(s.gamma_heavy) << ',' << (s.zeta ? format_real(*s.zeta * 180.0 / std::numbers::pi) : "")
           << ',' << (s.epsilon ? format_real(s.epsilon->real()) : "") << ','
           << (s.epsilon ? format_real(s.epsilon->imag()) : "") << ',' << mesonbell::to_string(s.active) << ','
           << (s.default_t_max ? format_real(*s.default_t_max) : "") << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-dependent Wigner inequalities for neutral meson pairs"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--out", g.out, "Write output to PATH instead of stdout");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--param", g.param, "CP-violation parameterization (default: species active_param)")
        ->check(CLI::IsMember({"eps", "zeta"}));
    app.add_option("--config", g.config, "Species configuration file (default: built-in)");
    app.add_option("--convention", g.convention, "Probability convention")
        ->check(CLI::IsMember({"unnormalized", "normalized"}));
    app.add_option("--threads", g.threads, "Worker threads (default: hardware concurrency)");

    auto* species_cmd = app.add_subcommand("species", "List or show registered species");
    species_cmd->require_subcommand(1);
    species_cmd->fallthrough();
    species_cmd->add_subcommand("list", "List all species");
    std::string show_name;
    auto* show_cmd = species_cmd->add_subcommand("show", "Show one species");
    show_cmd->add_option("name,--species", show_name, "Species name")->required();

    std::string species_name;
    std::optional<double> purity_opt;
    auto* static_cmd = app.add_subcommand("static", "Time-independent inequalities and Werner threshold");
    static_cmd->add_option("--species", species_name, "Species name")->required();
    static_cmd->add_option("--x", purity_opt, "Werner purity")->check(CLI::Range(0.0, 1.0));

    int index = 0;
    std::optional<double> tmax;
    std::size_t steps = 0;
    auto* rn_cmd = app.add_subcommand("rn", "R_N curve over c*t");
    rn_cmd->add_option("--species", species_name, "Species name")->required();
    rn_cmd->add_option("--n", index, "Inequality index 1..8")->required()->check(CLI::Range(1, 8));
    rn_cmd->add_option("--tmax", tmax, "Upper end of c*t in mm (default: species t_max_mm)");
    rn_cmd->add_option("--steps", steps, "Grid points")->required()->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    rn_cmd->add_option("--x", purity_opt, "Werner purity (default 1: pure singlet)")->check(CLI::Range(0.0, 1.0));

    std::size_t t_steps = 0, x_steps = 0;
    auto* heat_cmd = app.add_subcommand("heatmap", "Werner R~_N over (c*t, x) with the R~ = 1 contour");
    heat_cmd->add_option("--species", species_name, "Species name")->required();
    heat_cmd->add_option("--n", index, "Inequality index 1..8")->required()->check(CLI::Range(1, 8));
    heat_cmd->add_option("--tmax", tmax, "Upper end of c*t in mm (default: species t_max_mm)");
    heat_cmd->add_option("--tsteps", t_steps, "Time grid points")->required()->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
    heat_cmd->add_option("--xsteps", x_steps, "Purity grid points")->required()->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));

    std::size_t models = 0;
    std::uint64_t seed = 0;
    auto* classical_cmd = app.add_subcommand("classical-verify", "Check random classical models against the inequality");
    classical_cmd->add_option("--models", models, "Number of random models")->required();
    classical_cmd->add_option("--seed", seed, "Random seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidArguments;
    }

    try {
        const auto registry = load_registry(g);
        if (g.format.empty()) g.format = "csv";

        if (*species_cmd) {
            if (*show_cmd) (void)registry.at(show_name);
            emit(g, render_species(g, registry, *show_cmd ? show_name : std::string()));
        } else if (*static_cmd) {
            const auto& s = registry.at(species_name);
            emit(g, render_static(g, mesonbell::run_static_report(s, choose_param(g, s), purity_opt.value_or(1.0))));
        } else if (*rn_cmd) {
            const auto& s = registry.at(species_name);
            const mesonbell::EvolutionKernel kernel(s, choose_param(g, s));
            emit(g, render_scan(g, mesonbell::run_rn_curve(kernel, index, resolve_tmax(tmax, s), steps,
                                                           purity_opt.value_or(1.0), scan_options(g))));
        } else if (*heat_cmd) {
            const auto& s = registry.at(species_name);
            const mesonbell::EvolutionKernel kernel(s, choose_param(g, s));
            emit(g, render_scan(g, mesonbell::run_werner_heatmap(kernel, index, resolve_tmax(tmax, s), t_steps,
                                                                 x_steps, scan_options(g))));
        } else if (*classical_cmd) {
            const unsigned workers = g.threads > 0 ? g.threads : mesonbell::default_worker_count();
            const auto result = mesonbell::classical::verify_random_models(models, seed, 1e-12, workers);
            emit(g, render_classical(g, result));
            if (!result.passed()) return 1;
        }
    } catch (const mesonbell::ConfigError& e) {
        std::cerr << "mesonbell: config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const mesonbell::InvalidArgument& e) {
        std::cerr << "mesonbell: " << e.what() << '\n';
        return kExitInvalidArguments;
    } catch (const std::exception& e) {
        std::cerr << "mesonbell: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
