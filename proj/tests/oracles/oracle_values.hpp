#pragma once

// Generated by generate_oracles.py; do not edit by hand.

#include <array>
#include <complex>

namespace oracle {

using cplx = std::complex<double>;

// Vertical slit: g_t(iy) = i sqrt(y^2 - 4t) for zero driving.
inline constexpr double kVerticalSlitY3T1 = 2.2360679774997896964;
inline constexpr double kVerticalSlitY1T02 = 0.44721359549995793928;
// (g_1(100i) - 100i) * 100i for zero driving.
inline const cplx kCapacity100i{2.0002000400100028008, 0.0};

// G(i, 1+2i) = log|(z1 - conj z2)/(z1 - z2)|.
inline constexpr double kGreenI_1p2i = 0.80471895621705023589;

// Mean of log|z| over squares of side 1 and 0.1.
inline constexpr double kCellMeanLogH1 = -1.0611754268825243451;
inline constexpr double kCellMeanLogH01 = -3.3637605198765700291;
// Integral of exp(1 - 1/(1 - r^2/R^2)) over the disc of radius 0.5.
inline constexpr double kBumpIntegralR05 = 0.31702804028189902024;

// Jacobi sn(0.3 + 0.4i | k = 0.6).
inline const cplx kSnValue{0.32629355157195224335, 0.38840916147763776256};

// Vertex observable closed form, (kappa, alpha, z) as named.
inline const cplx kVertexK4A0I{0.0, -0.7071067811865475244};
inline const cplx kVertexK6A03{0.45774309369012463737, -0.12410195144025154579};
inline const cplx kVertexK8Am05{-0.57114694481765481384, -1.3235757456468697156};

struct CardyZhanCase {
  double kappa, alpha;
  cplx z;
  std::array<double, 3> abc;
  cplx c_vertex;  // C / B with A at the origin
};

// Strip hitting probabilities from the generator ODE, f' = sinh(Z/2)^(-4/k) e^(2aZ/k).
inline const std::array<CardyZhanCase, 9> kCardyZhan{{
    {6, 0, {0.0, 1.5707963267948966192}, {0.23254010269442289, 0.38372994865278856, 0.38372994865278856}, {0.5, 0.86602540378443865}},
    {6, 0, {1.0, 1.0}, {0.29298178751149605, 0.5227899403226401, 0.18422827216586385}, {0.5, 0.86602540378443865}},
    {6, 0, {-0.5, 2.5}, {0.08716420085236744, 0.3953730922235749, 0.51746270692405766}, {0.5, 0.86602540378443865}},
    {6, 0.3, {0.0, 1.5707963267948966192}, {0.23879270120431218, 0.28409864335565856, 0.47710865544002927}, {0.3420396910736563, 0.59243012314473571}},
    {6, 0.3, {1.0, 1.0}, {0.34189629972365341, 0.41646760416426566, 0.24163609611208093}, {0.3420396910736563, 0.59243012314473571}},
    {6, 0.3, {-0.5, 2.5}, {0.085357797474295683, 0.26785882455786904, 0.64678337796783528}, {0.3420396910736563, 0.59243012314473571}},
    {8, 0.2, {0.0, 1.5707963267948966192}, {0.31856764703364351, 0.27798650100975283, 0.40344585195660366}, {7.4163962951623582e-48, 0.72654252800536089}},
    {8, 0.2, {1.0, 1.0}, {0.43750239053347413, 0.35517801783186672, 0.20731959163465916}, {7.4163962951623582e-48, 0.72654252800536089}},
    {8, 0.2, {-0.5, 2.5}, {0.1191080321125093, 0.30613880150122635, 0.57475316638626435}, {7.4163962951623582e-48, 0.72654252800536089}},
}};

}  // namespace oracle
