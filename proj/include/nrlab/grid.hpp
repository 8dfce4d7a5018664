#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace nrlab {

using cplx = std::complex<double>;

/// Periodic torus discretization: n points per dimension (power of two),
/// period `length` per dimension, dim in {1,2,3}. Wavenumbers follow the
/// FFT layout 0,1,...,n/2-1,-n/2,...,-1 scaled by 2*pi/length. Immutable and
/// cheaply copyable (shared impl); safe to share across threads.
class Grid {
  public:
    Grid() = default;

    int dim() const;
    int n() const;
    double length() const;
    std::int64_t size() const;        // n^dim
    double cell_volume() const;       // (length/n)^dim
    double volume() const;            // length^dim

    /// Wavenumber offsets along one axis in FFT order (same for every axis).
    const std::vector<double>& axis_wavenumbers() const;

    /// |xi|^2 for the flattened mode index.
    double xi_squared(std::int64_t idx) const;

    /// Component d of xi for the flattened mode index.
    double xi_component(std::int64_t idx, int d) const;

    /// True if any axis index sits on the Nyquist mode -n/2.
    bool is_nyquist(std::int64_t idx) const;

    /// Physical coordinates of the flattened grid point index.
    double coord_component(std::int64_t idx, int d) const;

    /// Unitary-symmetric DFT: both directions scale by N^{-d/2}, so Parseval
    /// holds exactly and the two transforms are adjoint to each other.
    void forward(const cplx* in, cplx* out) const;
    void inverse(const cplx* in, cplx* out) const;

    bool operator==(const Grid& o) const { return impl_ == o.impl_; }

    friend Grid make_grid(int dim, int n, double length);

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Builds a grid; rejects dim outside {1,2,3}, non-power-of-two n or n < 8,
/// and non-positive length.
Grid make_grid(int dim, int n, double length);

/// Complex field on a Grid with physical and spectral views kept consistent
/// lazily. Single-writer: const access is safe concurrently only after the
/// views have been materialized (norms/transform calls below materialize).
class Field {
  public:
    Field() = default;
    explicit Field(Grid g);

    static Field from_physical(Grid g, std::vector<cplx> values);
    static Field from_spectral(Grid g, std::vector<cplx> coeffs);

    const Grid& grid() const { return grid_; }

    const std::vector<cplx>& physical() const;
    const std::vector<cplx>& spectral() const;

    /// Mutable access invalidates the other view.
    std::vector<cplx>& mutable_physical();
    std::vector<cplx>& mutable_spectral();

    bool has_physical() const { return phys_valid_; }
    bool has_spectral() const { return spec_valid_; }

  private:
    Grid grid_;
    mutable std::vector<cplx> phys_;
    mutable std::vector<cplx> spec_;
    mutable bool phys_valid_ = false;
    mutable bool spec_valid_ = false;
};

/// Pair state (psi, phi) for the complex Klein-Gordon systems. Both
/// components share one Grid.
struct FieldPair {
    Field psi;
    Field phi;

    FieldPair() = default;
    FieldPair(Field p, Field f);
    const Grid& grid() const { return psi.grid(); }
};

/// Discrete L^2 norm by quadrature, equals the spectral value exactly.
double norm_l2(const Field& f);

/// Sobolev H^k norm: ( sum <xi>^{2k} |f^(xi)|^2 * cell )^{1/2}, <xi>=(1+|xi|^2)^{1/2}.
double norm_hk(const Field& f, double k);

/// L^p norm by grid quadrature of |f|^p, 1 < p < infinity.
double norm_lp(const Field& f, double p);

/// l^infinity norm over grid points.
double norm_linf(const Field& f);

/// Bilinear pairing  <f,g> = integral f*g dx  (no conjugation).
cplx pair_bilinear(const Field& f, const Field& g);

/// Hermitian inner product  integral conj(f)*g dx.
cplx inner(const Field& f, const Field& g);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx s, const Field& a);

}  // namespace nrlab
