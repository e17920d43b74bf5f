#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "mesonbell/errors.hpp"

namespace mesonbell {

using Complex = std::complex<double>;

/// Which CP-violation parameter defines the mass eigenstates.
enum class CpParameterization {
    Zeta,     ///< q/p = exp(i zeta), |p| = |q| = 1/sqrt(2)
    Epsilon,  ///< p ∝ 1 + eps, q ∝ 1 - eps
};

inline std::string_view to_string(CpParameterization param) noexcept {
    return param == CpParameterization::Zeta ? "zeta" : "eps";
}

/// Coefficients of the mass eigenstates in the flavor basis:
/// |M_L> = p|M> + q|Mbar>, |M_H> = p|M> - q|Mbar>.
struct MixingCoefficients {
    Complex p;
    Complex q;
    CpParameterization source = CpParameterization::Zeta;
};

inline MixingCoefficients p_q_from_zeta(double zeta) noexcept {
    const double norm = 1.0 / std::numbers::sqrt2;
    return {Complex(norm, 0.0), std::polar(norm, zeta), CpParameterization::Zeta};
}

/// p = (1 + eps) / N, q = (1 - eps) / N with N = sqrt(2 (1 + |eps|^2)), so that
/// |K_S> = p|K> + q|Kbar> = (|K_1> + eps|K_2>) / sqrt(1 + |eps|^2).
inline MixingCoefficients p_q_from_epsilon(Complex eps) {
    const Complex p_raw = 1.0 + eps;
    const Complex q_raw = 1.0 - eps;
    // A vanishing amplitude makes q/p zero or infinite and the flavor
    // propagator singular.
    const double scale = std::max(std::abs(p_raw), std::abs(q_raw));
    if (!std::isfinite(eps.real()) || !std::isfinite(eps.imag()) ||
        std::min(std::abs(p_raw), std::abs(q_raw)) <= 1e-12 * scale) {
        throw InvalidParameterization("epsilon = (" + std::to_string(eps.real()) + ", " +
                                      std::to_string(eps.imag()) +
                                      ") makes p or q vanish; mass eigenstates are undefined");
    }
    const double norm = std::sqrt(2.0 * (1.0 + std::norm(eps)));
    return {p_raw / norm, q_raw / norm, CpParameterization::Epsilon};
}

/// Mixing and decay constants of one neutral pseudoscalar meson.
/// Times are c*t in millimetres; delta_m and the widths are in mm^-1.
struct MesonSpecies {
    std::string name;
    double delta_m = 0.0;      ///< m_H - m_L
    double gamma_light = 0.0;  ///< width of M_L
    double gamma_heavy = 0.0;  ///< width of M_H
    std::optional<double> zeta;      ///< radians
    std::optional<Complex> epsilon;
    CpParameterization active = CpParameterization::Zeta;
    std::optional<double> default_t_max;  ///< default scan range, mm

    bool has(CpParameterization param) const noexcept {
        return param == CpParameterization::Zeta ? zeta.has_value() : epsilon.has_value();
    }

    /// Mixing coefficients for an explicitly chosen parameterization.
    /// Never falls back to the other parameter.
    MixingCoefficients mixing(CpParameterization param) const {
        if (!has(param)) {
            throw InvalidArgument("species " + name + " defines no " +
                                  std::string(to_string(param)) + " parameter");
        }
        return param == CpParameterization::Zeta ? p_q_from_zeta(*zeta)
                                                 : p_q_from_epsilon(*epsilon);
    }

    MixingCoefficients mixing() const { return mixing(active); }

    void validate() const {
        if (name.empty()) throw InvalidArgument("species name is empty");
        if (!std::isfinite(delta_m)) throw InvalidArgument(name + ": delta_m is not finite");
        if (!(gamma_light >= 0.0) || !std::isfinite(gamma_light))
            throw InvalidArgument(name + ": gamma_L must be finite and >= 0");
        if (!(gamma_heavy >= 0.0) || !std::isfinite(gamma_heavy))
            throw InvalidArgument(name + ": gamma_H must be finite and >= 0");
        if (!has(active))
            throw InvalidArgument(name + ": active parameterization " +
                                  std::string(to_string(active)) + " has no value");
        if (zeta && !std::isfinite(*zeta)) throw InvalidArgument(name + ": zeta is not finite");
        if (epsilon) (void)p_q_from_epsilon(*epsilon);
        if (default_t_max && !(*default_t_max > 0.0))
            throw InvalidArgument(name + ": t_max must be positive");
    }
};

inline double degrees_to_radians(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

}  // namespace mesonbell
