#pragma once

// Reference values evaluated at 50 digits by tests/oracles/derive_constants.py
// (mpmath; energy derivatives by high-precision numerical differentiation, not
// from the closed forms under test). Truncated to 20 significant digits.

namespace oracle {

// Reference plant: L = 470 uH, C = 500 uF, E = 10 V, P = 61.25 W.
inline constexpr double kDReference = 0.59384078253350030422;
inline constexpr double kDP30 = 0.29086079144497974084;
inline constexpr double kTauOf4847e_4 = 0.99985975612327432899;
inline constexpr double kX1StarReference = 0.74230097816687538028;

// vector_field((0.4, 3.9), u = 0.8, D = 0.59384)
inline constexpr double kFieldDx1 = 0.02;
inline constexpr double kFieldDx2 = -0.072266666666666666667;

// f_d(0.7423, 4)
inline constexpr double kFd11 = -5.3886568772733396201;
inline constexpr double kFd12 = -1.6;
inline constexpr double kFd22 = -0.059384;

// hamiltonian((1, 1), D = 1, k1 = 1, k2 = 0)
inline constexpr double kHamiltonian11 = -0.51845151390782501826;

// Reference equilibrium (x2* = 4, exact D), k1 = 0.01.
inline constexpr double kK2Reference = 2.9894301961970602825;
// Roots in k1 of hessian(x*)(1,1) and det(hessian(x*)) with k2 = k2(k1).
inline constexpr double kK1PrimeReference = -0.12089235703169467088;
inline constexpr double kK1DoublePrimeReference = -0.0058801168628587979787;
inline constexpr double kDetSlopeReference = 3.94489892578125;

// Equilibrium (2, 1) with D = 1.
inline constexpr double kK1Prime21 = -0.0069882656755498638668;
inline constexpr double kDetRoot21 = -0.0278215990088831972;
inline constexpr double kDetSlope21 = -3.0;
inline constexpr double kHFactor21 = -972.0; // exact integer arithmetic

// Zero dynamics at the reference equilibrium.
inline constexpr double kZdCurrentAt2 = -0.049486731877791692019;
inline constexpr double kZdCurrentSlope = 0.0074230097816687538028;
inline constexpr double kZdVoltageSlopeDerived = 1.3471624440931179197;

// pd_control((0.4, 3.9)) with kp = -0.4, kd = -1.5, x* = (0.7423, 4), u* = 0.8.
inline constexpr double kPdControl = 1.08692;

// One RK4 step of y' = -y from y = 1 with h = 0.1.
inline constexpr double kRk4OneStep = 0.9048375;

} // namespace oracle
