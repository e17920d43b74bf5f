#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mesonbell/errors.hpp"
#include "mesonbell/inequalities.hpp"
#include "mesonbell/parallel.hpp"
#include "mesonbell/twobody.hpp"

namespace mesonbell::classical {

// Outcome index convention throughout this header: 0 = '+', 1 = '-'.
inline constexpr int kPlus = 0;
inline constexpr int kMinus = 1;
inline constexpr int flip(int v) noexcept { return 1 - v; }

enum class Observable { A = 0, B = 1, C = 2 };
enum class Subsystem { I = 0, II = 1 };

/// Row-stochastic (or sub-stochastic) transition table,
/// kernel[from][to] = w(o_from(t0) -> o_to(t)).
using Kernel = std::array<std::array<double, 2>, 2>;
using Table2 = std::array<std::array<double, 2>, 2>;

inline constexpr Kernel identity_kernel() noexcept { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

inline Kernel compose(const Kernel& first, const Kernel& second) noexcept {
    Kernel out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out[i][j] = first[i][0] * second[0][j] + first[i][1] * second[1][j];
    return out;
}

/// Independent Markov evolution of one observable, split at an intermediate
/// instant t0 < t_mid < t so that no-signaling in time can be checked.
struct TransitionChain {
    Kernel to_midpoint = identity_kernel();
    Kernel from_midpoint = identity_kernel();

    Kernel effective() const noexcept { return compose(to_midpoint, from_midpoint); }
};

/// A classical (ontic) model of the pair.
///
/// `ontic` is the joint distribution of (a, b, c) for subsystem I at t0,
/// indexed by 4a + 2b + c. Subsystem II carries the opposite value of every
/// observable. Each observable of each subsystem evolves by its own chain.
struct ClassicalModel {
    std::array<double, 8> ontic{};
    std::array<std::array<TransitionChain, 3>, 2> chains{};

    static constexpr std::size_t ontic_index(int a, int b, int c) noexcept {
        return static_cast<std::size_t>(4 * a + 2 * b + c);
    }
    double ontic_probability(int a, int b, int c) const noexcept { return ontic[ontic_index(a, b, c)]; }

    const TransitionChain& chain(Subsystem s, Observable o) const noexcept {
        return chains[static_cast<std::size_t>(s)][static_cast<std::size_t>(o)];
    }
    TransitionChain& chain(Subsystem s, Observable o) noexcept {
        return chains[static_cast<std::size_t>(s)][static_cast<std::size_t>(o)];
    }
    Kernel kernel(Subsystem s, Observable o) const noexcept { return chain(s, o).effective(); }

    /// All chains identity: evolution is trivial and t behaves like t0.
    static ClassicalModel static_model(const std::array<double, 8>& ontic) {
        ClassicalModel m;
        m.ontic = ontic;
        return m;
    }

    void validate(double tolerance = 1e-12) const {
        double total = 0.0;
        for (double p : ontic) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("ontic probabilities must be >= 0");
            total += p;
        }
        if (std::abs(total - 1.0) > tolerance) throw InvalidArgument("ontic probabilities must sum to 1");
        auto check = [&](const Kernel& k) {
            for (const auto& row : k) {
                if (!(row[0] >= 0.0 && row[0] <= 1.0 && row[1] >= 0.0 && row[1] <= 1.0))
                    throw InvalidArgument("kernel entries must lie in [0, 1]");
                if (row[0] + row[1] > 1.0 + tolerance) throw InvalidArgument("kernel row sums must be <= 1");
            }
        };
        for (const auto& per_subsystem : chains)
            for (const auto& c : per_subsystem) {
                check(c.to_midpoint);
                check(c.from_midpoint);
                check(c.effective());
            }
    }
};

/// t0 cross-subsystem probabilities implied by the ontic table and the
/// anticorrelation II = -I. Rows index the subsystem-II outcome.
inline Table2 pair_ab(const ClassicalModel& m) noexcept {  // w(a^II, b^I)
    Table2 t{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) t[a][b] += m.ontic_probability(flip(a), b, c);
    return t;
}
inline Table2 pair_cb(const ClassicalModel& m) noexcept {  // w(c^II, b^I)
    Table2 t{};
    for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) t[c][b] += m.ontic_probability(a, b, flip(c));
    return t;
}
inline Table2 pair_ac(const ClassicalModel& m) noexcept {  // w(a^II, c^I)
    Table2 t{};
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            for (int b = 0; b < 2; ++b) t[a][c] += m.ontic_probability(flip(a), b, c);
    return t;
}

struct LhsRhs {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the two-time inequality for a classical model, in exact
/// table arithmetic. The left side is the four-term composition
///   w(a+^II(t), b+^I(t)) = sum_{alpha,beta} K_a^II[alpha][+] K_b^I[beta][+] w(a_alpha^II, b_beta^I; t0)
/// and the right side uses the same kernels with the t0 marginals.
inline LhsRhs classical_lhs_rhs(const ClassicalModel& m) {
    const Kernel ka = m.kernel(Subsystem::II, Observable::A);
    const Kernel kb = m.kernel(Subsystem::I, Observable::B);
    const Table2 ab = pair_ab(m);
    const Table2 cb = pair_cb(m);
    const Table2 ac = pair_ac(m);

    LhsRhs out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.lhs += ka[a][kPlus] * kb[b][kPlus] * ab[a][b];

    const double a_pp = ka[kPlus][kPlus], a_mp = ka[kMinus][kPlus];
    const double b_pp = kb[kPlus][kPlus], b_mp = kb[kMinus][kPlus];
    out.rhs = ac[kPlus][kPlus] * a_pp * (b_pp + b_mp) + ac[kMinus][kPlus] * a_mp * (b_pp + b_mp) +
              cb[kPlus][kPlus] * b_pp * (a_pp + a_mp) + cb[kPlus][kMinus] * b_mp * (a_pp + a_mp);
    return out;
}

/// Epistemic probability tables as an experimenter would tabulate them.
/// Built from a ClassicalModel they are marginals of one ontic table by
/// construction; built from quantum predictions they need not be.
struct ProbabilityTables {
    std::array<double, 8> triple{};  ///< joint (a, b, c) of subsystem I at t0, index 4a + 2b + c
    Table2 ab{}, cb{}, ac{};         ///< cross-subsystem t0 tables, rows = II outcome
    /// single[subsystem][observable][outcome] at t0
    std::array<std::array<std::array<double, 2>, 3>, 2> single{};
    /// two_time[s][o][i][j] = w(o_i(t0), o_j(t))
    std::array<std::array<Table2, 3>, 2> two_time{};
    /// three_time[s][o][i][k][j] = w(o_i(t0), o_k(t_mid), o_j(t))
    std::array<std::array<std::array<Table2, 2>, 3>, 2> three_time{};
};

inline ProbabilityTables tables_from_model(const ClassicalModel& m) {
    ProbabilityTables t;
    t.triple = m.ontic;
    t.ab = pair_ab(m);
    t.cb = pair_cb(m);
    t.ac = pair_ac(m);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const double p = m.ontic_probability(a, b, c);
                const int v[3] = {a, b, c};
                for (int o = 0; o < 3; ++o) {
                    t.single[0][o][v[o]] += p;
                    t.single[1][o][flip(v[o])] += p;
                }
            }
    for (int s = 0; s < 2; ++s)
        for (int o = 0; o < 3; ++o) {
            const auto& chain = m.chains[s][o];
            const Kernel k = chain.effective();
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    t.two_time[s][o][i][j] = t.single[s][o][i] * k[i][j];
                    for (int mid = 0; mid < 2; ++mid)
                        t.three_time[s][o][i][mid][j] =
                            t.single[s][o][i] * chain.to_midpoint[i][mid] * chain.from_midpoint[mid][j];
                }
        }
    return t;
}

enum class IdentityFamily { NSC, ENSC, NSIT };

inline std::string to_string(IdentityFamily f) {
    switch (f) {
        case IdentityFamily::NSC: return "NSC";
        case IdentityFamily::ENSC: return "ENSC";
        case IdentityFamily::NSIT: return "NSIT";
    }
    return "?";
}

struct IdentityCheck {
    IdentityFamily family;
    std::string label;
    double residual;  ///< |lhs - rhs| of the identity
};

struct MarginalizationReport {
    std::vector<IdentityCheck> checks;

    double max_residual(IdentityFamily family) const noexcept {
        double worst = 0.0;
        for (const auto& c : checks)
            if (c.family == family) worst = std::max(worst, c.residual);
        return worst;
    }
    bool passed(double tolerance = 1e-12) const noexcept {
        return std::all_of(checks.begin(), checks.end(),
                           [&](const IdentityCheck& c) { return c.residual <= tolerance; });
    }
};

/// Checks the tables against the marginalization identities:
///  - NSC: summing a cross-subsystem table over one side gives that
///    subsystem's single table;
///  - ENSC: summing the (a, b, c) table over the co-located observable
///    gives each pairwise table, and over two observables each single table;
///  - NSIT: summing a three-time table over the intermediate outcome gives
///    the two-time table.
inline MarginalizationReport verify_marginalization_identities(const ProbabilityTables& t) {
    MarginalizationReport report;
    auto add = [&](IdentityFamily f, std::string label, double lhs, double rhs) {
        report.checks.push_back({f, std::move(label), std::abs(lhs - rhs)});
    };
    const auto triple = [&](int a, int b, int c) { return t.triple[ClassicalModel::ontic_index(a, b, c)]; };
    const char* sign[2] = {"+", "-"};
    const char* obs[3] = {"a", "b", "c"};

    struct Pair {
        const Table2* table;
        int obs_II;
        int obs_I;
        const char* name;
    };
    const Pair pairs[3] = {{&t.ab, 0, 1, "ab"}, {&t.cb, 2, 1, "cb"}, {&t.ac, 0, 2, "ac"}};

    for (const auto& pr : pairs) {
        for (int i = 0; i < 2; ++i) {
            add(IdentityFamily::NSC, std::string("sum_I w_") + pr.name + "(" + sign[i] + ",.)",
                (*pr.table)[i][0] + (*pr.table)[i][1], t.single[1][pr.obs_II][i]);
            add(IdentityFamily::NSC, std::string("sum_II w_") + pr.name + "(.," + sign[i] + ")",
                (*pr.table)[0][i] + (*pr.table)[1][i], t.single[0][pr.obs_I][i]);
        }
    }

    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const std::string cell = std::string("(") + sign[x] + "," + sign[y] + ")";
            add(IdentityFamily::ENSC, "sum_c triple -> w_ab" + cell, triple(flip(x), y, 0) + triple(flip(x), y, 1),
                t.ab[x][y]);
            add(IdentityFamily::ENSC, "sum_a triple -> w_cb" + cell, triple(0, y, flip(x)) + triple(1, y, flip(x)),
                t.cb[x][y]);
            add(IdentityFamily::ENSC, "sum_b triple -> w_ac" + cell, triple(flip(x), 0, y) + triple(flip(x), 1, y),
                t.ac[x][y]);
        }
    for (int o = 0; o < 3; ++o)
        for (int v = 0; v < 2; ++v) {
            double marginal = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c) {
                        const int vals[3] = {a, b, c};
                        if (vals[o] == v) marginal += triple(a, b, c);
                    }
            add(IdentityFamily::ENSC, std::string("triple -> w(") + obs[o] + sign[v] + "^I)", marginal,
                t.single[0][o][v]);
            add(IdentityFamily::ENSC, std::string("triple -> w(") + obs[o] + sign[flip(v)] + "^II)", marginal,
                t.single[1][o][flip(v)]);
        }

    for (int s = 0; s < 2; ++s)
        for (int o = 0; o < 3; ++o)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const auto& three = t.three_time[s][o][i];
                    add(IdentityFamily::NSIT,
                        std::string(s == 0 ? "I:" : "II:") + obs[o] + "(" + sign[i] + "->" + sign[j] + ")",
                        three[0][j] + three[1][j], t.two_time[s][o][i][j]);
                }
    return report;
}

inline MarginalizationReport verify_marginalization_identities(const ClassicalModel& m) {
    return verify_marginalization_identities(tables_from_model(m));
}

/// Quantum predictions for assignment `n` written into the same tables, as
/// if they came from a classical experiment. The (a, b, c) table is the
/// conditional-independence completion w(a,b) w(a,c) / w(a); it reproduces
/// the ab and ac tables, so any inconsistency shows up in cb. The NSIT
/// tables use a projective measurement at t_mid.
inline ProbabilityTables quantum_tables(const TwoMesonState& state, const InequalityAssignment& n, double t_mid,
                                        double t_end) {
    require_elapsed(0.0, t_mid);
    require_elapsed(t_mid, t_end);
    const auto& kernel = state.kernel();
    const DichotomousValue a[2] = {n.a_plus, n.a_minus};
    const DichotomousValue b[2] = {n.b_plus, n.b_minus};
    const DichotomousValue c[2] = {n.c_plus, n.c_minus};
    const DichotomousValue* values[3] = {a, b, c};

    ProbabilityTables t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            t.ab[i][j] = joint_probability(state, a[i], b[j], 0.0, 0.0);
            t.cb[i][j] = joint_probability(state, c[i], b[j], 0.0, 0.0);
            t.ac[i][j] = joint_probability(state, a[i], c[j], 0.0, 0.0);
        }
    // Singlet and Werner states share the reduced state I/2 on each meson.
    for (int s = 0; s < 2; ++s)
        for (int o = 0; o < 3; ++o)
            for (int v = 0; v < 2; ++v) t.single[s][o][v] = 0.5 * norm2(kernel.state(values[o][v]));

    for (int x = 0; x < 2; ++x)          // a^I
        for (int y = 0; y < 2; ++y)      // b^I
            for (int z = 0; z < 2; ++z) {  // c^I
                const double w_a = t.single[0][0][x];
                const double w_ab = t.ab[flip(x)][y];
                const double w_ac = t.ac[flip(x)][z];
                t.triple[ClassicalModel::ontic_index(x, y, z)] = w_a > 0.0 ? w_ab * w_ac / w_a : 0.0;
            }

    for (int s = 0; s < 2; ++s)
        for (int o = 0; o < 3; ++o)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const auto from = values[o][i];
                    const auto to = values[o][j];
                    t.two_time[s][o][i][j] = t.single[s][o][i] * transition_probability(kernel, from, to, 0.0, t_end);
                    for (int k = 0; k < 2; ++k)
                        t.three_time[s][o][i][k][j] =
                            t.single[s][o][i] * transition_probability(kernel, from, values[o][k], 0.0, t_mid) *
                            transition_probability(kernel, values[o][k], to, t_mid, t_end);
                }
    return t;
}

/// Deterministic per-model random stream: model `index` of a batch seeded
/// with `seed` always sees the same engine state, whatever the thread count.
inline std::mt19937_64 model_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return std::mt19937_64(z);
}

/// Ontic table ~ Dirichlet(1, ..., 1); every kernel row is uniform on
/// {(u, v) : u, v >= 0, u + v <= 1} (the third Dirichlet coordinate is the
/// decay loss).
inline ClassicalModel random_model(std::mt19937_64& rng) {
    std::exponential_distribution<double> exp1(1.0);
    ClassicalModel m;
    double total = 0.0;
    for (double& p : m.ontic) total += (p = exp1(rng));
    for (double& p : m.ontic) p /= total;

    auto random_kernel = [&] {
        Kernel k{};
        for (auto& row : k) {
            const double e0 = exp1(rng), e1 = exp1(rng), e2 = exp1(rng);
            const double sum = e0 + e1 + e2;
            row = {e0 / sum, e1 / sum};
        }
        return k;
    };
    for (auto& per_subsystem : m.chains)
        for (auto& chain : per_subsystem) {
            chain.to_midpoint = random_kernel();
            chain.from_midpoint = random_kernel();
        }
    return m;
}

struct BatchVerification {
    std::size_t models = 0;
    std::uint64_t seed = 0;
    std::size_t inequality_failures = 0;  ///< models with lhs > rhs + tolerance
    double max_excess = -1.0;             ///< max over models of lhs - rhs
    double max_nsc_residual = 0.0;
    double max_ensc_residual = 0.0;
    double max_nsit_residual = 0.0;
    std::size_t identity_failures = 0;  ///< models with any residual > tolerance
    double tolerance = 1e-12;

    bool passed() const noexcept { return inequality_failures == 0 && identity_failures == 0; }
};

/// Draws `count` random classical models and checks both the inequality and
/// the marginalization identities for each.
inline BatchVerification verify_random_models(std::size_t count, std::uint64_t seed, double tolerance = 1e-12,
                                              unsigned workers = default_worker_count()) {
    struct PerModel {
        double excess;
        double nsc, ensc, nsit;
        bool identities_ok;
    };
    std::vector<PerModel> results(count);
    parallel_for(
        count,
        [&](std::size_t i) {
            auto rng = model_stream(seed, i);
            const ClassicalModel m = random_model(rng);
            const auto sides = classical_lhs_rhs(m);
            const auto report = verify_marginalization_identities(m);
            results[i] = {sides.lhs - sides.rhs, report.max_residual(IdentityFamily::NSC),
                          report.max_residual(IdentityFamily::ENSC), report.max_residual(IdentityFamily::NSIT),
                          report.passed(tolerance)};
        },
        workers);

    BatchVerification out;
    out.models = count;
    out.seed = seed;
    out.tolerance = tolerance;
    for (const auto& r : results) {
        if (r.excess > tolerance) ++out.inequality_failures;
        if (!r.identities_ok) ++out.identity_failures;
        out.max_excess = std::max(out.max_excess, r.excess);
        out.max_nsc_residual = std::max(out.max_nsc_residual, r.nsc);
        out.max_ensc_residual = std::max(out.max_ensc_residual, r.ensc);
        out.max_nsit_residual = std::max(out.max_nsit_residual, r.nsit);
    }
    return out;
}

}  // namespace mesonbell::classical
