#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>

#include "mesonbell/dynamics.hpp"
#include "mesonbell/errors.hpp"

namespace mesonbell {

/// |Psi-> = (|M>_I |Mbar>_II - |Mbar>_I |M>_II) / sqrt(2).
struct PureSinglet {};

/// rho = x |Psi-><Psi-| + (1 - x) I / 4.
struct Werner {
    double purity = 1.0;
};

/// A meson pair prepared at t0 in the singlet or a Werner mixture of it.
///
/// Both mesons evolve with the same kernel; the whole density operator,
/// noise included, is conjugated by U(dt) (x) U(dt).
class TwoMesonState {
public:
    TwoMesonState(EvolutionKernel kernel, PureSinglet) : kernel_(std::move(kernel)), purity_(1.0), pure_(true) {}

    TwoMesonState(EvolutionKernel kernel, Werner werner) : kernel_(std::move(kernel)), purity_(werner.purity) {
        if (!(purity_ >= 0.0 && purity_ <= 1.0))
            throw InvalidArgument("Werner purity must lie in [0, 1], got " + std::to_string(purity_));
    }

    const EvolutionKernel& kernel() const noexcept { return kernel_; }
    double purity() const noexcept { return purity_; }
    bool is_pure_singlet() const noexcept { return pure_; }

private:
    EvolutionKernel kernel_;
    double purity_;
    bool pure_ = false;
};

namespace detail {

struct EvolvedBras {
    Spinor second;  // U^dagger |out_II>
    Spinor first;   // U^dagger |out_I>
};

inline Spinor adjoint_apply(const Matrix2& m, const Spinor& v) noexcept {
    return {std::conj(m[0][0]) * v[0] + std::conj(m[1][0]) * v[1],
            std::conj(m[0][1]) * v[0] + std::conj(m[1][1]) * v[1]};
}

inline EvolvedBras evolved_bras(const EvolutionKernel& kernel, DichotomousValue out_II,
                                DichotomousValue out_I, double dt) {
    const Matrix2 u = kernel.propagator(dt);
    return {adjoint_apply(u, kernel.state(out_II)), adjoint_apply(u, kernel.state(out_I))};
}

/// |<u_II (x) v_I | Psi->|^2 = |v_M u_Mbar - v_Mbar u_M|^2 / 2.
inline double singlet_overlap(const Spinor& u_II, const Spinor& v_I) noexcept {
    return 0.5 * std::norm(v_I[0] * u_II[1] - v_I[1] * u_II[0]);
}

}  // namespace detail

/// Probability of finding meson II in `out_II` and meson I in `out_I` at
/// time t, for a pair prepared in `state` at t0.
///
/// Evaluated in closed form through the evolved bras U^dagger|out>:
/// pure part |<U^dag out_II (x) U^dag out_I|Psi->|^2, noise part
/// |U^dag out_II|^2 |U^dag out_I|^2 / 4.
inline double joint_probability(const TwoMesonState& state, DichotomousValue out_II,
                                DichotomousValue out_I, double t0, double t) {
    require_elapsed(t0, t);
    const auto bras = detail::evolved_bras(state.kernel(), out_II, out_I, t - t0);
    const double pure = detail::singlet_overlap(bras.second, bras.first);
    if (state.is_pure_singlet()) return pure;
    const double x = state.purity();
    const double noise = 0.25 * norm2(bras.second) * norm2(bras.first);
    return x * pure + (1.0 - x) * noise;
}

struct ScalingCheck {
    double lhs;  ///< joint probability after elapsed d
    double rhs;  ///< exp(-(Gamma_L + Gamma_H) d) * joint probability at d = 0
};

/// (U (x) U)|Psi-> = det(U)|Psi-> with |det U|^2 = exp(-(Gamma_L + Gamma_H) d),
/// so for the pure singlet every joint probability scales by that factor.
/// Only meaningful for the pure singlet.
inline ScalingCheck equal_time_pure_scaling_check(const EvolutionKernel& kernel, DichotomousValue out_II,
                                                  DichotomousValue out_I, double d) {
    require_elapsed(0.0, d);
    const TwoMesonState singlet(kernel, PureSinglet{});
    const auto& s = kernel.species();
    return {joint_probability(singlet, out_II, out_I, 0.0, d),
            std::exp(-(s.gamma_light + s.gamma_heavy) * d) *
                joint_probability(singlet, out_II, out_I, 0.0, 0.0)};
}

}  // namespace mesonbell
