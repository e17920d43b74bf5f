#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "mesonbell/dynamics.hpp"
#include "mesonbell/errors.hpp"
#include "mesonbell/twobody.hpp"

namespace mesonbell {

/// Binding of the abstract outcomes a±, b±, c± to physical basis states.
struct InequalityAssignment {
    int index = 0;
    DichotomousValue a_plus, b_plus, c_plus;
    DichotomousValue a_minus, b_minus, c_minus;
};

/// The eight assignments N = 1..8. In every row a is the CP basis, b the
/// flavor basis and c the mass basis; the rows enumerate the sign choices.
inline const std::array<InequalityAssignment, 8>& inequality_assignments() {
    using namespace states;
    static const std::array<InequalityAssignment, 8> table = {{
        {1, cp_even, antimeson, heavy, cp_odd, meson, light},
        {2, cp_even, meson, heavy, cp_odd, antimeson, light},
        {3, cp_odd, antimeson, heavy, cp_even, meson, light},
        {4, cp_odd, meson, heavy, cp_even, antimeson, light},
        {5, cp_even, antimeson, light, cp_odd, meson, heavy},
        {6, cp_even, meson, light, cp_odd, antimeson, heavy},
        {7, cp_odd, antimeson, light, cp_even, meson, heavy},
        {8, cp_odd, meson, light, cp_even, antimeson, heavy},
    }};
    return table;
}

inline const InequalityAssignment& inequality_assignment(int index) {
    if (index < 1 || index > 8)
        throw InvalidArgument("inequality index must be in 1..8, got " + std::to_string(index));
    return inequality_assignments()[static_cast<std::size_t>(index - 1)];
}

/// How survival loss enters R_N.
enum class ProbabilityConvention {
    /// Raw |amplitude|^2 values; decay reduces every probability.
    Unnormalized,
    /// Each single-meson transition is divided by the survival summed over
    /// the target basis and the late joint probability by the sum over its
    /// four outcome pairs. Kept as a switchable fallback.
    SurvivalNormalized,
};

struct StaticCheck {
    double lhs = 0.0;  ///< w(a+^II, b+^I)
    double rhs = 0.0;  ///< w(c+^II, b+^I) + w(a+^II, c+^I)
    bool satisfied = true;
};

/// Time-independent inequality w(a+,b+) <= w(c+,b+) + w(a+,c+) for a pair in
/// its prepared state (t = t0).
inline StaticCheck static_wigner_check(const InequalityAssignment& n, const TwoMesonState& state) {
    StaticCheck out;
    out.lhs = joint_probability(state, n.a_plus, n.b_plus, 0.0, 0.0);
    out.rhs = joint_probability(state, n.c_plus, n.b_plus, 0.0, 0.0) +
              joint_probability(state, n.a_plus, n.c_plus, 0.0, 0.0);
    out.satisfied = out.lhs <= out.rhs;
    return out;
}

/// Largest Werner purity at which the static inequality for the
/// epsilon-parameterized singlet still holds:
///   x* = (1 + |eps|^2) / (1 + 2 Re(eps) - |eps|^2).
inline double werner_purity_threshold(Complex eps) {
    const double denom = 1.0 + 2.0 * eps.real() - std::norm(eps);
    if (!(denom > 0.0)) {
        throw InvalidArgument("purity threshold undefined: 1 + 2 Re(eps) - |eps|^2 = " +
                              std::to_string(denom) + " <= 0");
    }
    return (1.0 + std::norm(eps)) / denom;
}

/// Purity threshold of one assignment obtained from the joint probabilities
/// themselves. Werner probabilities are affine in x, so the static
/// inequality fails exactly for x > x*. Empty when the pure singlet already
/// satisfies the inequality (no purity violates it).
inline std::optional<double> static_purity_threshold(const EvolutionKernel& kernel,
                                                     const InequalityAssignment& n) {
    const auto pure = static_wigner_check(n, TwoMesonState(kernel, PureSinglet{}));
    const auto noise = static_wigner_check(n, TwoMesonState(kernel, Werner{0.0}));
    const double excess = pure.lhs - pure.rhs;
    if (!(excess > 0.0)) return std::nullopt;
    const double slack = noise.rhs - noise.lhs;
    return slack / (slack + excess);
}

/// One evaluation of R_N = rhs / lhs of the two-time inequality.
struct RnEvaluation {
    int index = 0;
    double t0 = 0.0;
    double t = 0.0;
    std::optional<double> purity;  ///< empty for the pure singlet
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;    ///< meaningful only when `defined`
    bool defined = false;  ///< false when lhs vanishes (ratio undefined)
    bool violated = false; ///< defined && ratio < 1
};

/// R_N(t, t0) for the pair `state` (prepared at t0):
///
///   lhs = w(a+^II(t), b+^I(t))
///   rhs = w(a+^II, c+^I; t0) w(a+ -> a+) [w(b+ -> b+) + w(b- -> b+)]
///       + w(a-^II, c+^I; t0) w(a- -> a+) [w(b+ -> b+) + w(b- -> b+)]
///       + w(c+^II, b+^I; t0) w(b+ -> b+) [w(a+ -> a+) + w(a- -> a+)]
///       + w(c+^II, b-^I; t0) w(b- -> b+) [w(a+ -> a+) + w(a- -> a+)]
///
/// with single-meson transitions taken over [t0, t].
inline RnEvaluation r_n(const TwoMesonState& state, int index, double t0, double t,
                        ProbabilityConvention convention = ProbabilityConvention::Unnormalized) {
    require_elapsed(t0, t);
    const auto& n = inequality_assignment(index);
    const auto& kernel = state.kernel();

    auto transition = [&](DichotomousValue from, DichotomousValue to) {
        const double w = transition_probability(kernel, from, to, t0, t);
        if (convention == ProbabilityConvention::Unnormalized) return w;
        const double survival = w + transition_probability(kernel, from, to.conjugate(), t0, t);
        return survival > 0.0 ? w / survival : 0.0;
    };
    auto initial = [&](DichotomousValue ii, DichotomousValue i) {
        return joint_probability(state, ii, i, t0, t0);
    };

    RnEvaluation out;
    out.index = index;
    out.t0 = t0;
    out.t = t;
    if (!state.is_pure_singlet()) out.purity = state.purity();

    out.lhs = joint_probability(state, n.a_plus, n.b_plus, t0, t);
    if (convention == ProbabilityConvention::SurvivalNormalized) {
        double total = 0.0;
        for (auto a : {n.a_plus, n.a_minus})
            for (auto b : {n.b_plus, n.b_minus}) total += joint_probability(state, a, b, t0, t);
        out.lhs = total > 0.0 ? out.lhs / total : 0.0;
    }

    const double a_pp = transition(n.a_plus, n.a_plus);
    const double a_mp = transition(n.a_minus, n.a_plus);
    const double b_pp = transition(n.b_plus, n.b_plus);
    const double b_mp = transition(n.b_minus, n.b_plus);

    out.rhs = initial(n.a_plus, n.c_plus) * a_pp * (b_pp + b_mp) +
              initial(n.a_minus, n.c_plus) * a_mp * (b_pp + b_mp) +
              initial(n.c_plus, n.b_plus) * b_pp * (a_pp + a_mp) +
              initial(n.c_plus, n.b_minus) * b_mp * (a_pp + a_mp);

    out.defined = out.lhs > 0.0 && std::isfinite(out.lhs) && std::isfinite(out.rhs);
    if (out.defined) {
        out.ratio = out.rhs / out.lhs;
        out.defined = std::isfinite(out.ratio);
    }
    out.violated = out.defined && out.ratio < 1.0;
    return out;
}

/// Werner generalization: the same composition evaluated with rho(x).
inline RnEvaluation r_n_tilde(const EvolutionKernel& kernel, int index, double t0, double t, double purity,
                              ProbabilityConvention convention = ProbabilityConvention::Unnormalized) {
    auto out = r_n(TwoMesonState(kernel, Werner{purity}), index, t0, t, convention);
    out.purity = purity;
    return out;
}

}  // namespace mesonbell
