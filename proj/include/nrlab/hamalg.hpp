#pragma once

#include "nrlab/coeff.hpp"
#include "nrlab/grid.hpp"
#include "nrlab/multipliers.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nrlab {

/// One field occurrence inside an integrated monomial.
struct Factor {
    int component = 1;       // 1 = psi, 2 = phi
    bool conjugated = false;

    auto operator<=>(const Factor&) const = default;
};

/// Specification of a factor together with its Laplacian power, used by the
/// construction helpers (the canonical "flat" factor model).
struct FactorSpec {
    int component = 1;
    bool conjugated = false;
    int lap_power = 0;
};

/// Integrated monomial  coeff * lambda^deg * ∫ kernel(xi_1..xi_s) prod_i X_i.
///
/// Slot i carries field X_i; the kernel is prod_{i<=j} (xi_i·xi_j)^{K_ij} in
/// Fourier variables. A Laplacian Delta^m on slot i is the diagonal entry
/// K_ii = m with a factor (-1)^m folded into the coefficient. Off-diagonal
/// entries encode gradient contractions (nabla X_i · nabla X_j); they are
/// produced by Poisson brackets of derivative-carrying monomials and never
/// appear in the order-1/order-2 normal forms.
///
/// Monomials are kept canonical: slots sorted by (component, conjugated) and
/// the kernel minimized lexicographically over permutations of equal slots.
class Monomial {
  public:
    Monomial() = default;

    /// Flat constructor: factors with Laplacian powers.
    static Monomial integral(Coeff c, const std::vector<FactorSpec>& specs);

    const Coeff& coeff() const { return coeff_; }
    Coeff& coeff() { return coeff_; }
    const std::vector<Factor>& factors() const { return factors_; }
    int slots() const { return static_cast<int>(factors_.size()); }
    int kernel(int i, int j) const { return kernel_[i * slots() + j]; }

    /// +1 per unconjugated / -1 per conjugated component-1 factor, reversed
    /// for component 2: determines the e^{i n t} behaviour under the gauge flow.
    int gauge_grade() const;

    /// True if the kernel has no off-diagonal entries (flat factor model).
    bool is_flat() const;

    int total_degree() const { return slots(); }

    bool same_shape(const Monomial& o) const;

    /// Product of integrands (concatenates slots; used by brackets).
    static Monomial product(const Monomial& a, const Monomial& b);

    /// Densities d/dX for every slot matching (component, conjugated): removes
    /// the slot and substitutes its momentum by -(sum of the others).
    std::vector<Monomial> derivative(int component, bool conjugated) const;

    void canonicalize();

    std::string str() const;

    // internal/raw access for the compiler
    static Monomial raw(Coeff c, std::vector<Factor> f, std::vector<int> kernel);
    const std::vector<int>& raw_kernel() const { return kernel_; }

  private:
    Coeff coeff_;
    std::vector<Factor> factors_;
    std::vector<int> kernel_;  // slots x slots, symmetric

    bool is_flat_kernel_trivial() const;
};

/// Canonical sum of monomials: no duplicates, no zero coefficients.
class HamPoly {
  public:
    HamPoly() = default;
    explicit HamPoly(std::vector<Monomial> m);

    static HamPoly zero() { return HamPoly(); }
    static HamPoly single(Monomial m);

    const std::vector<Monomial>& monomials() const { return mono_; }
    bool empty() const { return mono_.empty(); }
    int max_abs_grade() const;
    int max_degree() const;

    HamPoly operator+(const HamPoly& o) const;
    HamPoly operator-(const HamPoly& o) const;
    HamPoly operator-() const;
    HamPoly scaled(const Coeff& s) const;
    HamPoly scaled(const Rational& s) const;

    bool operator==(const HamPoly& o) const;

    std::string str() const;

    std::string origin;  // h_j / F_j / Z_j / chi_j tag, informational
    int eps_order = 0;

  private:
    std::vector<Monomial> mono_;
    void normalize();
};

/// Generator of the gauge flow: ∫ psi psibar (+ ∫ phi phibar in the complex case).
HamPoly gauge_generator(bool complex_case = false);

/// Retains exactly the gauge-grade-0 monomials.
HamPoly gauge_average(const HamPoly& f);

/// chi with each non-resonant monomial coefficient divided by (i*n), n the
/// gauge grade; resonant monomials are dropped. Satisfies {chi,h0}+F=<F>.
HamPoly solve_homological(const HamPoly& f);

/// Poisson bracket with the convention {F,G} := dG·X_F (the derivative of G
/// along the flow of F), X_H = (i ∇_psibar H, -i ∇_psi H) and the sign of the
/// phi-component symplectic form reversed. With this convention the printed
/// first-order generator formula and the homological identity hold together.
HamPoly poisson_bracket(const HamPoly& f, const HamPoly& g);

/// Expansion coefficients of the dispersion symbol and the smoothing symbol:
/// a_j = (-1)^j binom(1/2, j), b_j = (-1)^j binom(-1/4, j). Verified against
/// the generating Taylor series on construction.
struct DispersionCoeffs {
    std::vector<Rational> a;
    std::vector<Rational> b;
};
DispersionCoeffs dispersion_coeffs(int r);

/// h_j = a_j ∫ psibar Delta^j psi (both components in the complex case).
std::vector<HamPoly> expand_dispersion(int r, bool complex_case = false);

/// F_j: smoothing corrections of total epsilon-order j-1 distributed over the
/// 2l factors of lambda/(2^{l+1} l) ∫ (psi+psibar)^{2l}. Complex case supports
/// l = 2, F_1 of lambda/16 ∫ [(psi+psibar)^2 + (phi+phibar)^2]^2.
std::vector<HamPoly> expand_nonlinearity(int l, int r, bool complex_case = false);

struct NormalForm {
    std::vector<HamPoly> Z;          // Z_1..Z_r
    std::vector<HamPoly> chi;        // chi_1..chi_r
    std::vector<HamPoly> residual;   // per-order leftovers, all empty when certified
    bool certified = false;
};

/// Iterates the Lie-series bookkeeping: at step j solves the homological
/// equation for the non-resonant epsilon^j part, pushes every term forward by
/// the Lie series truncated at epsilon^r, and collects the resonant Z_j.
/// Complex case supports r = 1 only.
NormalForm normal_form(int l, int r, bool complex_case = false);

/// Numeric options for compiled evaluators.
struct CompileOptions {
    bool dealias = true;  // 2/3-rule mask on nonlinear products
};

/// Hamiltonian functional H(psi, psibar) evaluated by grid quadrature.
std::function<cplx(const Field&)> compile_hamiltonian(const HamPoly& h, Grid g,
                                                      PhysicalParams p,
                                                      CompileOptions opt = {});
std::function<cplx(const FieldPair&)> compile_hamiltonian_pair(const HamPoly& h, Grid g,
                                                               PhysicalParams p,
                                                               CompileOptions opt = {});

/// Vector field i ∇_psibar H for single-component Hamiltonians.
std::function<Field(const Field&)> compile_vector_field(const HamPoly& h, Grid g,
                                                        PhysicalParams p,
                                                        CompileOptions opt = {});

/// Both components (i ∇_psibar H, -i ∇_phibar H) for pair Hamiltonians.
std::function<FieldPair(const FieldPair&)> compile_vector_field_pair(
    const HamPoly& h, Grid g, PhysicalParams p, CompileOptions opt = {});

/// Trapezoid quadrature of H(e^{it} psi, e^{-it} psibar) over [0, 2pi) at Q
/// points; exact for trigonometric polynomials when Q >= 2*maxgrade+1.
/// Arbitrates coefficient disputes against gauge_average.
cplx numeric_gauge_average_oracle(const HamPoly& h, const Field& f, int Q,
                                  PhysicalParams p, CompileOptions opt = {});
cplx numeric_gauge_average_oracle_pair(const HamPoly& h, const FieldPair& f, int Q,
                                       PhysicalParams p, CompileOptions opt = {});

}  // namespace nrlab
