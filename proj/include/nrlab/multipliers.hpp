#pragma once

#include "nrlab/grid.hpp"

#include <functional>
#include <string>
#include <utility>

namespace nrlab {

/// Physical parameters of the Klein-Gordon systems (m = hbar = 1).
struct PhysicalParams {
    double c = 1.0;       // speed of light, > 0
    double lambda = 1.0;  // coupling
    int l = 2;            // nonlinearity power, >= 2

    void validate() const;
};

/// Fourier multiplier: a radial symbol m(|xi|^2) applied diagonally in
/// spectral space. Every named operator of this module is radial; directional
/// derivative factors live in the hamalg compiler. `zero_nyquist` drops the
/// Nyquist planes, used for odd-order derivative-like symbols.
struct Multiplier {
    std::string name;
    std::function<cplx(double xi2)> symbol;
    bool zero_nyquist = false;
};

Field apply(const Multiplier& m, const Field& f);

/// Composition helper: applies the product of the two symbols in one pass.
Field apply(const Multiplier& m1, const Multiplier& m2, const Field& f);

/// <nabla>_c^k: multiplies mode xi by (c^2+|xi|^2)^{k/2}.
Field japc_apply(const Field& f, double c, double k);
Multiplier japc_multiplier(double c, double k);

/// Relativistic Sobolev norm ||c^{-k} <nabla>_c^k u||_{L^2} via spectral sum.
double norm_hck(const Field& f, double c, double k);

/// Relativistic W_c^{k,p} norm: grid quadrature of |c^{-k}<nabla>_c^k u|^p.
double norm_wckp(const Field& f, double c, double k, double p);

/// Smoothing operator (c/<nabla>_c)^k: multiplies mode xi by (c/(c^2+|xi|^2)^{1/2})^k.
Field smoothing_apply(const Field& f, double c, double k);
Multiplier smoothing_multiplier(double c, double k);

/// Littlewood-Paley bump phi_0: smooth radial, == 1 for |xi| <= 1/2,
/// == 0 for |xi| >= 1, built from the exp(-1/x) partition construction.
double lp_phi0(double abs_xi);

/// Band symbol phi_j(xi) = phi_1(2^{1-j} xi), phi_1 = phi_0(./2) - phi_0;
/// j = 0 gives phi_0 itself.
double lp_phi(int j, double abs_xi);

/// Littlewood-Paley projector phi_j(D) f.
Field lp_projector(const Field& f, int j);

/// Smooth cutoff Pi_N = sum_{j<=N} phi_j(D); evaluated as phi_0(2^{-N} D),
/// which equals the telescoped sum identically.
Field lp_cutoff(const Field& f, int N);

/// Sharp Fourier cutoff: zeroes all modes with |xi| > N. Idempotent.
Field sharp_projector(const Field& f, double N);

/// Symplectic change of variables between real (u, v=u_t) and complex psi:
///   psi = ( (⟨∇⟩_c/c)^{1/2} u - i (c/⟨∇⟩_c)^{1/2} v ) / sqrt(2).
Field to_complex(const Field& u, const Field& v, double c);

/// Inverse map; throws if the reconstructed u or v has imaginary residue
/// above 1e-10 relative (the input was not in the image of real data).
std::pair<Field, Field> from_complex(const Field& psi, double c);

}  // namespace nrlab
