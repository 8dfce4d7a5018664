#include "nrlab/multipliers.hpp"

#include <cmath>
#include <stdexcept>

namespace nrlab {

void PhysicalParams::validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("PhysicalParams: c must be positive");
    if (l < 2) throw std::invalid_argument("PhysicalParams: l must be >= 2");
}

Field apply(const Multiplier& m, const Field& f) {
    const Grid& g = f.grid();
    std::vector<cplx> out = f.spectral();
    for (std::int64_t i = 0; i < g.size(); ++i) {
        if (m.zero_nyquist && g.is_nyquist(i))
            out[i] = 0.0;
        else
            out[i] *= m.symbol(g.xi_squared(i));
    }
    return Field::from_spectral(g, std::move(out));
}

Field apply(const Multiplier& m1, const Multiplier& m2, const Field& f) {
    const Grid& g = f.grid();
    std::vector<cplx> out = f.spectral();
    for (std::int64_t i = 0; i < g.size(); ++i) {
        if ((m1.zero_nyquist || m2.zero_nyquist) && g.is_nyquist(i))
            out[i] = 0.0;
        else
            out[i] *= m1.symbol(g.xi_squared(i)) * m2.symbol(g.xi_squared(i));
    }
    return Field::from_spectral(g, std::move(out));
}

Multiplier japc_multiplier(double c, double k) {
    if (!(c > 0.0)) throw std::invalid_argument("japc: c must be positive");
    return {"japc", [c, k](double xi2) -> cplx {
                return std::pow(std::hypot(c, std::sqrt(xi2)), k);
            }};
}

Field japc_apply(const Field& f, double c, double k) {
    return apply(japc_multiplier(c, k), f);
}

double norm_hck(const Field& f, double c, double k) {
    if (!(c > 0.0)) throw std::invalid_argument("norm_hck: c must be positive");
    const auto& sp = f.spectral();
    const Grid& g = f.grid();
    double s = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        // (c^{-1} <xi>_c)^{2k} = (1+|xi|^2/c^2)^k, via log1p for accuracy
        const double w = std::exp(k * std::log1p(g.xi_squared(i) / (c * c)));
        s += w * std::norm(sp[i]);
    }
    return std::sqrt(s * g.cell_volume());
}

double norm_wckp(const Field& f, double c, double k, double p) {
    Multiplier m{"c^-k japc^k", [c, k](double xi2) -> cplx {
                     return std::exp(0.5 * k * std::log1p(xi2 / (c * c)));
                 }};
    return norm_lp(apply(m, f), p);
}

Multiplier smoothing_multiplier(double c, double k) {
    if (!(c > 0.0)) throw std::invalid_argument("smoothing: c must be positive");
    return {"smoothing", [c, k](double xi2) -> cplx {
                return std::exp(-0.5 * k * std::log1p(xi2 / (c * c)));
            }};
}

Field smoothing_apply(const Field& f, double c, double k) {
    return apply(smoothing_multiplier(c, k), f);
}

namespace {

// Smooth step: 0 for y <= 0, 1 for y >= 1, C^infty in between.
double smooth_step(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / y);
    const double b = std::exp(-1.0 / (1.0 - y));
    return a / (a + b);
}

}  // namespace

double lp_phi0(double abs_xi) { return smooth_step(2.0 * (1.0 - abs_xi)); }

double lp_phi(int j, double abs_xi) {
    if (j < 0) throw std::invalid_argument("lp_phi: j must be >= 0");
    if (j == 0) return lp_phi0(abs_xi);
    const double t = std::ldexp(abs_xi, 1 - j);  // 2^{1-j} |xi|
    return lp_phi0(t / 2.0) - lp_phi0(t);
}

Field lp_projector(const Field& f, int j) {
    Multiplier m{"lp_band", [j](double xi2) -> cplx { return lp_phi(j, std::sqrt(xi2)); }};
    return apply(m, f);
}

Field lp_cutoff(const Field& f, int N) {
    if (N < 0) throw std::invalid_argument("lp_cutoff: N must be >= 0");
    Multiplier m{"lp_cutoff", [N](double xi2) -> cplx {
                     return lp_phi0(std::ldexp(std::sqrt(xi2), -N));
                 }};
    return apply(m, f);
}

Field sharp_projector(const Field& f, double N) {
    if (N < 0.0) throw std::invalid_argument("sharp_projector: N must be >= 0");
    Multiplier m{"sharp", [N](double xi2) -> cplx {
                     return std::sqrt(xi2) > N ? 0.0 : 1.0;
                 }};
    return apply(m, f);
}

Field to_complex(const Field& u, const Field& v, double c) {
    Field a = japc_apply(u, c, 0.5);           // <nabla>_c^{1/2} u
    Field b = japc_apply(v, c, -0.5);          // <nabla>_c^{-1/2} v
    const Grid& g = u.grid();
    const double sc = std::sqrt(c);
    std::vector<cplx> out = a.spectral();
    const auto& bs = b.spectral();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        // (A u - i B v)/sqrt(2) with A = (japc/c)^{1/2}, B = (c/japc)^{1/2}
        out[i] = inv_sqrt2 * (out[i] / sc - cplx(0.0, 1.0) * sc * bs[i]);
    }
    return Field::from_spectral(g, std::move(out));
}

std::pair<Field, Field> from_complex(const Field& psi, double c) {
    const Grid& g = psi.grid();
    const auto& ps = psi.spectral();
    const double sc = std::sqrt(c);
    const double sqrt2 = std::sqrt(2.0);

    // conj(psi) in spectral space: conj and reverse modes; cheaper via physical view
    std::vector<cplx> u_sp(g.size()), v_sp(g.size());
    const auto& pphys = psi.physical();
    std::vector<cplx> conj_phys(pphys.size());
    for (std::size_t i = 0; i < pphys.size(); ++i) conj_phys[i] = std::conj(pphys[i]);
    Field psibar = Field::from_physical(g, std::move(conj_phys));
    const auto& pbs = psibar.spectral();

    for (std::int64_t i = 0; i < g.size(); ++i) {
        const cplx sum = ps[i] + pbs[i];
        const cplx dif = ps[i] - pbs[i];
        u_sp[i] = sum / sqrt2;                      // then apply A^{-1}
        v_sp[i] = cplx(0.0, 1.0) * dif / sqrt2;     // then apply B^{-1}
    }
    Field u = japc_apply(Field::from_spectral(g, std::move(u_sp)), c, -0.5);
    Field v = japc_apply(Field::from_spectral(g, std::move(v_sp)), c, 0.5);
    u = Field::from_spectral(g, [&] {
        auto s = u.spectral();
        for (auto& z : s) z *= sc;
        return s;
    }());
    v = Field::from_spectral(g, [&] {
        auto s = v.spectral();
        for (auto& z : s) z /= sc;
        return s;
    }());

    double imax = 0.0, scale = 0.0;
    for (const auto& z : u.physical()) {
        imax = std::max(imax, std::abs(z.imag()));
        scale = std::max(scale, std::abs(z));
    }
    for (const auto& z : v.physical()) {
        imax = std::max(imax, std::abs(z.imag()));
        scale = std::max(scale, std::abs(z));
    }
    if (scale > 0.0 && imax > 1e-10 * scale)
        throw std::domain_error("from_complex: non-real residue above tolerance");

    auto realpart = [&](const Field& f) {
        std::vector<cplx> v2(f.physical().size());
        for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = f.physical()[i].real();
        return Field::from_physical(g, std::move(v2));
    };
    return {realpart(u), realpart(v)};
}

}  // namespace nrlab
