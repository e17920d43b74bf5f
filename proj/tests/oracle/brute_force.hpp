#pragma once

// Independent reference computations for the closed-form library paths:
// the effective Hamiltonian is exponentiated numerically (Eigen's Padé
// scaling-and-squaring) and two-meson probabilities come from explicit 4x4
// density matrices. Nothing here calls EvolutionKernel's g_+/g_- formulas.

#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "mesonbell/mesonbell.hpp"

namespace oracle {

using C = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

/// Basis states written out from their definitions.
inline Vec2 basis_state(mesonbell::DichotomousValue v, C p, C q) {
    using mesonbell::Basis;
    using mesonbell::Sign;
    const double r = 1.0 / std::numbers::sqrt2;
    const double s = v.sign == Sign::Plus ? 1.0 : -1.0;
    switch (v.basis) {
        case Basis::Flavor: return v.sign == Sign::Plus ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
        case Basis::CP: return Vec2(r, s * r);
        case Basis::Mass: return Vec2(p, s * q);
    }
    return Vec2::Zero();
}

/// H = V diag(m_L - i Gamma_L / 2, m_H - i Gamma_H / 2) V^{-1} in the flavor
/// basis, columns of V = (M_L, M_H).
inline Mat2 effective_hamiltonian(const mesonbell::MesonSpecies& s, C p, C q) {
    Mat2 v;
    v << p, p, q, -q;
    Mat2 d = Mat2::Zero();
    d(0, 0) = C(-0.5 * s.delta_m, -0.5 * s.gamma_light);
    d(1, 1) = C(0.5 * s.delta_m, -0.5 * s.gamma_heavy);
    return v * d * v.inverse();
}

inline Mat2 propagator(const mesonbell::MesonSpecies& s, C p, C q, double dt) {
    const Mat2 h = effective_hamiltonian(s, p, q);
    return (C(0.0, -dt) * h).exp();
}

/// U (x) U from the 4x4 generator H (x) 1 + 1 (x) H.
inline Mat4 pair_propagator(const mesonbell::MesonSpecies& s, C p, C q, double dt) {
    const Mat2 h = effective_hamiltonian(s, p, q);
    const Mat2 id = Mat2::Identity();
    Mat4 h4 = Eigen::kroneckerProduct(h, id) + Eigen::kroneckerProduct(id, h);
    return (C(0.0, -dt) * h4).exp();
}

/// Tensor order: (II) (x) (I). |Psi-> = (|M>_I |Mbar>_II - |Mbar>_I |M>_II) / sqrt 2.
inline Vec4 singlet() {
    Vec4 psi = Vec4::Zero();
    const double r = 1.0 / std::numbers::sqrt2;
    psi(1 * 2 + 0) = r;   // II = Mbar, I = M
    psi(0 * 2 + 1) = -r;  // II = M, I = Mbar
    return psi;
}

inline Mat4 werner(double x) {
    const Vec4 psi = singlet();
    return x * psi * psi.adjoint() + (1.0 - x) / 4.0 * Mat4::Identity();
}

inline double joint_probability(const mesonbell::MesonSpecies& s, C p, C q, double x,
                                mesonbell::DichotomousValue out_II, mesonbell::DichotomousValue out_I, double dt) {
    const Mat4 w = pair_propagator(s, p, q, dt);
    const Mat4 rho = w * werner(x) * w.adjoint();
    const Vec4 ket = Eigen::kroneckerProduct(basis_state(out_II, p, q), basis_state(out_I, p, q));
    return std::real(C((ket.adjoint() * rho * ket)(0, 0)));
}

inline double transition_probability(const mesonbell::MesonSpecies& s, C p, C q, mesonbell::DichotomousValue from,
                                     mesonbell::DichotomousValue to, double dt) {
    const Vec2 evolved = propagator(s, p, q, dt) * basis_state(from, p, q);
    return std::norm(C(basis_state(to, p, q).adjoint() * evolved));
}

}  // namespace oracle
