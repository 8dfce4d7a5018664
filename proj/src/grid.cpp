#include "nrlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nrlab {

namespace {

// FFTW planning is not thread-safe; execution through the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

}  // namespace

struct Grid::Impl {
    int dim = 1;
    int n = 0;
    double length = 0.0;
    std::int64_t size = 0;
    double cell = 0.0;
    std::vector<double> axis_xi;   // per-axis wavenumbers, FFT order
    std::vector<double> xi2;       // |xi|^2 per flattened index
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    double scale = 1.0;            // N^{-d/2}

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

Grid make_grid(int dim, int n, double length) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
    if (!is_pow2(n) || n < 8) throw std::invalid_argument("make_grid: n must be a power of two >= 8");
    if (!(length > 0.0)) throw std::invalid_argument("make_grid: length must be positive");

    auto impl = std::make_shared<Grid::Impl>();
    impl->dim = dim;
    impl->n = n;
    impl->length = length;
    impl->size = 1;
    for (int d = 0; d < dim; ++d) impl->size *= n;
    impl->cell = std::pow(length / n, dim);
    impl->scale = 1.0 / std::sqrt(static_cast<double>(impl->size));

    const double k0 = 2.0 * std::numbers::pi / length;
    impl->axis_xi.resize(n);
    for (int k = 0; k < n; ++k) {
        const int m = (k < n / 2) ? k : k - n;
        impl->axis_xi[k] = k0 * m;
    }

    impl->xi2.resize(impl->size);
    for (std::int64_t idx = 0; idx < impl->size; ++idx) {
        std::int64_t rest = idx;
        double s = 0.0;
        for (int d = dim - 1; d >= 0; --d) {
            const int k = static_cast<int>(rest % n);
            rest /= n;
            s += impl->axis_xi[k] * impl->axis_xi[k];
        }
        impl->xi2[idx] = s;
    }

    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        std::vector<cplx> a(impl->size), b(impl->size);
        int dims[3] = {n, n, n};
        impl->fwd = fftw_plan_dft(dim, dims,
                                  reinterpret_cast<fftw_complex*>(a.data()),
                                  reinterpret_cast<fftw_complex*>(b.data()),
                                  FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        impl->bwd = fftw_plan_dft(dim, dims,
                                  reinterpret_cast<fftw_complex*>(a.data()),
                                  reinterpret_cast<fftw_complex*>(b.data()),
                                  FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    Grid g;
    g.impl_ = std::move(impl);
    return g;
}

int Grid::dim() const { return impl_->dim; }
int Grid::n() const { return impl_->n; }
double Grid::length() const { return impl_->length; }
std::int64_t Grid::size() const { return impl_->size; }
double Grid::cell_volume() const { return impl_->cell; }
double Grid::volume() const { return std::pow(impl_->length, impl_->dim); }

const std::vector<double>& Grid::axis_wavenumbers() const { return impl_->axis_xi; }

double Grid::xi_squared(std::int64_t idx) const { return impl_->xi2[idx]; }

double Grid::xi_component(std::int64_t idx, int d) const {
    const int n = impl_->n;
    std::int64_t rest = idx;
    int ks[3] = {0, 0, 0};
    for (int dd = impl_->dim - 1; dd >= 0; --dd) {
        ks[dd] = static_cast<int>(rest % n);
        rest /= n;
    }
    return impl_->axis_xi[ks[d]];
}

bool Grid::is_nyquist(std::int64_t idx) const {
    const int n = impl_->n;
    std::int64_t rest = idx;
    for (int dd = impl_->dim - 1; dd >= 0; --dd) {
        if (static_cast<int>(rest % n) == n / 2) return true;
        rest /= n;
    }
    return false;
}

double Grid::coord_component(std::int64_t idx, int d) const {
    const int n = impl_->n;
    std::int64_t rest = idx;
    int ks[3] = {0, 0, 0};
    for (int dd = impl_->dim - 1; dd >= 0; --dd) {
        ks[dd] = static_cast<int>(rest % n);
        rest /= n;
    }
    return impl_->length * ks[d] / n;
}

void Grid::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(impl_->fwd,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    for (std::int64_t i = 0; i < impl_->size; ++i) out[i] *= impl_->scale;
}

void Grid::inverse(const cplx* in, cplx* out) const {
    fftw_execute_dft(impl_->bwd,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    for (std::int64_t i = 0; i < impl_->size; ++i) out[i] *= impl_->scale;
}

Field::Field(Grid g) : grid_(std::move(g)) {
    phys_.assign(grid_.size(), cplx(0.0));
    spec_.assign(grid_.size(), cplx(0.0));
    phys_valid_ = spec_valid_ = true;
}

Field Field::from_physical(Grid g, std::vector<cplx> values) {
    if (static_cast<std::int64_t>(values.size()) != g.size())
        throw std::invalid_argument("Field::from_physical: size mismatch");
    Field f;
    f.grid_ = std::move(g);
    f.phys_ = std::move(values);
    f.phys_valid_ = true;
    return f;
}

Field Field::from_spectral(Grid g, std::vector<cplx> coeffs) {
    if (static_cast<std::int64_t>(coeffs.size()) != g.size())
        throw std::invalid_argument("Field::from_spectral: size mismatch");
    Field f;
    f.grid_ = std::move(g);
    f.spec_ = std::move(coeffs);
    f.spec_valid_ = true;
    return f;
}

const std::vector<cplx>& Field::physical() const {
    if (!phys_valid_) {
        phys_.resize(grid_.size());
        grid_.inverse(spec_.data(), phys_.data());
        phys_valid_ = true;
    }
    return phys_;
}

const std::vector<cplx>& Field::spectral() const {
    if (!spec_valid_) {
        spec_.resize(grid_.size());
        grid_.forward(phys_.data(), spec_.data());
        spec_valid_ = true;
    }
    return spec_;
}

std::vector<cplx>& Field::mutable_physical() {
    physical();
    spec_valid_ = false;
    return phys_;
}

std::vector<cplx>& Field::mutable_spectral() {
    spectral();
    phys_valid_ = false;
    return spec_;
}

FieldPair::FieldPair(Field p, Field f) : psi(std::move(p)), phi(std::move(f)) {
    if (!(psi.grid() == phi.grid()))
        throw std::invalid_argument("FieldPair: components must share one Grid");
}

double norm_l2(const Field& f) {
    const auto& v = f.has_physical() || !f.has_spectral() ? f.physical() : f.spectral();
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s * f.grid().cell_volume());
}

double norm_hk(const Field& f, double k) {
    const auto& c = f.spectral();
    const Grid& g = f.grid();
    double s = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        const double w = std::exp(k * std::log1p(g.xi_squared(i)));  // <xi>^{2k}
        s += w * std::norm(c[i]);
    }
    return std::sqrt(s * g.cell_volume());
}

double norm_lp(const Field& f, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("norm_lp: need 1 < p < infinity");
    const auto& v = f.physical();
    double s = 0.0;
    for (const auto& z : v) s += std::pow(std::abs(z), p);
    return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double norm_linf(const Field& f) {
    const auto& v = f.physical();
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

cplx pair_bilinear(const Field& f, const Field& g) {
    const auto& a = f.physical();
    const auto& b = g.physical();
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * f.grid().cell_volume();
}

cplx inner(const Field& f, const Field& g) {
    const auto& a = f.physical();
    const auto& b = g.physical();
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s * f.grid().cell_volume();
}

Field operator+(const Field& a, const Field& b) {
    std::vector<cplx> v = a.physical();
    const auto& w = b.physical();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[i];
    return Field::from_physical(a.grid(), std::move(v));
}

Field operator-(const Field& a, const Field& b) {
    std::vector<cplx> v = a.physical();
    const auto& w = b.physical();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= w[i];
    return Field::from_physical(a.grid(), std::move(v));
}

Field operator*(cplx s, const Field& a) {
    std::vector<cplx> v = a.physical();
    for (auto& z : v) z *= s;
    return Field::from_physical(a.grid(), std::move(v));
}

}  // namespace nrlab
