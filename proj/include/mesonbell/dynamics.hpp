#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "mesonbell/errors.hpp"
#include "mesonbell/species.hpp"

namespace mesonbell {

enum class Basis { Flavor, CP, Mass };
enum class Sign { Plus, Minus };

/// One outcome of a dichotomous measurement on a single meson.
///
/// Flavor: Plus = M, Minus = Mbar. CP: Plus = M_1, Minus = M_2.
/// Mass: Plus = M_L, Minus = M_H. Which outcome plays a_+, b_+ or c_+ is
/// decided by an InequalityAssignment, not here.
struct DichotomousValue {
    Basis basis = Basis::Flavor;
    Sign sign = Sign::Plus;

    constexpr DichotomousValue conjugate() const noexcept {
        return {basis, sign == Sign::Plus ? Sign::Minus : Sign::Plus};
    }
    friend constexpr bool operator==(DichotomousValue, DichotomousValue) = default;
};

namespace states {
inline constexpr DichotomousValue meson{Basis::Flavor, Sign::Plus};
inline constexpr DichotomousValue antimeson{Basis::Flavor, Sign::Minus};
inline constexpr DichotomousValue cp_even{Basis::CP, Sign::Plus};
inline constexpr DichotomousValue cp_odd{Basis::CP, Sign::Minus};
inline constexpr DichotomousValue light{Basis::Mass, Sign::Plus};
inline constexpr DichotomousValue heavy{Basis::Mass, Sign::Minus};
inline constexpr std::array<DichotomousValue, 6> all = {meson, antimeson, cp_even,
                                                        cp_odd, light, heavy};
}  // namespace states

inline std::string_view to_string(DichotomousValue v) noexcept {
    switch (v.basis) {
        case Basis::Flavor: return v.sign == Sign::Plus ? "M" : "Mbar";
        case Basis::CP: return v.sign == Sign::Plus ? "M1" : "M2";
        case Basis::Mass: return v.sign == Sign::Plus ? "ML" : "MH";
    }
    return "?";
}

/// Single-meson state in the flavor basis: {<M|psi>, <Mbar|psi>}.
using Spinor = std::array<Complex, 2>;
/// Row-major 2x2 complex matrix acting on flavor spinors.
using Matrix2 = std::array<std::array<Complex, 2>, 2>;

inline Spinor multiply(const Matrix2& m, const Spinor& v) noexcept {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Complex inner(const Spinor& bra, const Spinor& ket) noexcept {
    return std::conj(bra[0]) * ket[0] + std::conj(bra[1]) * ket[1];
}

inline double norm2(const Spinor& v) noexcept { return std::norm(v[0]) + std::norm(v[1]); }

/// Weisskopf-Wigner propagator of one meson species.
///
/// The mass eigenstates evolve as exp(-i lambda t) with
/// lambda_{L,H} = m_{L,H} - i Gamma_{L,H} / 2 and the mean mass set to zero,
/// so m_L = -delta_m / 2, m_H = +delta_m / 2. Evolution is not unitary.
class EvolutionKernel {
public:
    EvolutionKernel(const MesonSpecies& species, CpParameterization param)
        : EvolutionKernel(species, species.mixing(param)) {}

    EvolutionKernel(const MesonSpecies& species, MixingCoefficients mixing)
        : species_(species), mixing_(mixing) {
        species_.validate();
        if (mixing_.p == Complex{} || mixing_.q == Complex{})
            throw InvalidParameterization("p and q must both be non-zero");
        q_over_p_ = mixing_.q / mixing_.p;
        p_over_q_ = mixing_.p / mixing_.q;
        lambda_light_ = Complex(-0.5 * species_.delta_m, -0.5 * species_.gamma_light);
        lambda_heavy_ = Complex(0.5 * species_.delta_m, -0.5 * species_.gamma_heavy);
    }

    const MesonSpecies& species() const noexcept { return species_; }
    const MixingCoefficients& mixing() const noexcept { return mixing_; }

    Complex light_phase(double dt) const { return std::exp(Complex(0.0, -1.0) * lambda_light_ * dt); }
    Complex heavy_phase(double dt) const { return std::exp(Complex(0.0, -1.0) * lambda_heavy_ * dt); }

    /// g_+(dt) = (e^{-i lambda_L dt} + e^{-i lambda_H dt}) / 2
    Complex g_plus(double dt) const { return 0.5 * (light_phase(dt) + heavy_phase(dt)); }
    /// g_-(dt) = (e^{-i lambda_L dt} - e^{-i lambda_H dt}) / 2
    Complex g_minus(double dt) const { return 0.5 * (light_phase(dt) - heavy_phase(dt)); }

    /// U(dt) in the flavor basis:
    ///   U|M>    = g_+ |M> + (q/p) g_- |Mbar>
    ///   U|Mbar> = (p/q) g_- |M> + g_+ |Mbar>
    Matrix2 propagator(double dt) const {
        const Complex gp = g_plus(dt);
        const Complex gm = g_minus(dt);
        return {{{gp, p_over_q_ * gm}, {q_over_p_ * gm, gp}}};
    }

    /// Normalized flavor-basis vector of a basis state.
    Spinor state(DichotomousValue v) const noexcept {
        const double r = 1.0 / std::numbers::sqrt2;
        const double s = v.sign == Sign::Plus ? 1.0 : -1.0;
        switch (v.basis) {
            case Basis::Flavor:
                return v.sign == Sign::Plus ? Spinor{1.0, 0.0} : Spinor{0.0, 1.0};
            case Basis::CP: return {r, s * r};
            case Basis::Mass: return {mixing_.p, s * mixing_.q};
        }
        return {};
    }

private:
    MesonSpecies species_;
    MixingCoefficients mixing_;
    Complex q_over_p_;
    Complex p_over_q_;
    Complex lambda_light_;
    Complex lambda_heavy_;
};

inline void require_elapsed(double t0, double t) {
    if (!std::isfinite(t0) || !std::isfinite(t) || t0 < 0.0 || t < t0) {
        throw InvalidArgument("times must satisfy 0 <= t0 <= t (got t0 = " + std::to_string(t0) +
                              ", t = " + std::to_string(t) + ")");
    }
}

inline Spinor evolve(const EvolutionKernel& kernel, const Spinor& initial, double dt) {
    require_elapsed(0.0, dt);
    return multiply(kernel.propagator(dt), initial);
}

/// U(dt)|initial> expressed in the flavor basis.
inline Spinor evolve(const EvolutionKernel& kernel, DichotomousValue initial, double dt) {
    return evolve(kernel, kernel.state(initial), dt);
}

/// |<to| U(t - t0) |from>|^2. Survival-weighted: the probabilities of the two
/// outcomes of `to`'s basis need not sum to one once the meson can decay.
inline double transition_probability(const EvolutionKernel& kernel, DichotomousValue from,
                                     DichotomousValue to, double t0, double t) {
    require_elapsed(t0, t);
    return std::norm(inner(kernel.state(to), multiply(kernel.propagator(t - t0), kernel.state(from))));
}

}  // namespace mesonbell
