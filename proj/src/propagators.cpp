#include "nrlab/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nrlab {

SystemTag system_from_string(const std::string& s) {
    static const std::map<std::string, SystemTag> m = {
        {"kg_linear", SystemTag::kg_linear},
        {"u_r_linear", SystemTag::u_r_linear},
        {"nlkg", SystemTag::nlkg},
        {"nf_order1", SystemTag::nf_order1},
        {"nf_order2", SystemTag::nf_order2},
        {"nlkg_complex", SystemTag::nlkg_complex},
        {"nf_complex_order1", SystemTag::nf_complex_order1},
    };
    auto it = m.find(s);
    if (it == m.end()) throw std::invalid_argument("unknown system tag: " + s);
    return it->second;
}

std::string system_to_string(SystemTag t) {
    switch (t) {
        case SystemTag::kg_linear: return "kg_linear";
        case SystemTag::u_r_linear: return "u_r_linear";
        case SystemTag::nlkg: return "nlkg";
        case SystemTag::nf_order1: return "nf_order1";
        case SystemTag::nf_order2: return "nf_order2";
        case SystemTag::nlkg_complex: return "nlkg_complex";
        case SystemTag::nf_complex_order1: return "nf_complex_order1";
    }
    return "?";
}

void EvolutionSpec::validate() const {
    params.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("EvolutionSpec: dt must be positive");
    if (t_end < 0.0) throw std::invalid_argument("EvolutionSpec: t_end must be >= 0");
    const double steps = t_end / dt;
    if (t_end > 0.0 && std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
        throw std::invalid_argument("EvolutionSpec: dt must divide t_end");
}

double kg_symbol(double c, double xi2) { return c * std::hypot(c, std::sqrt(xi2)); }

double ur_symbol(double c, int r, double xi2) {
    // c^2 * sum_{j=0}^r binom(1/2,j) y^j, y = |xi|^2/c^2
    const double y = xi2 / (c * c);
    double sum = 1.0, term = 1.0, half = 0.5;
    for (int j = 1; j <= r; ++j) {
        term *= (half - (j - 1)) / j * y;
        sum += term;
    }
    return c * c * sum;
}

double kg_ur_phase_gap(double c, int r, double xi2) {
    const double y = xi2 / (c * c);
    if (y < 0.5) {
        // tail of the binomial series: c^2 * sum_{j>r} binom(1/2,j) y^j
        long double term = 1.0L, yl = y;
        for (int j = 1; j <= r; ++j) term *= (0.5L - (j - 1)) / j * yl;
        long double sum = 0.0L;
        for (int j = r + 1; j <= r + 64; ++j) {
            term *= (0.5L - (j - 1)) / j * yl;
            sum += term;
            if (std::abs(static_cast<double>(term)) < 1e-30 * std::abs(static_cast<double>(sum)))
                break;
        }
        return static_cast<double>(static_cast<long double>(c) * c * sum);
    }
    const long double kg = static_cast<long double>(c) *
                           std::sqrt(static_cast<long double>(c) * c + static_cast<long double>(xi2));
    long double sum = 1.0L, term = 1.0L;
    for (int j = 1; j <= r; ++j) {
        term *= (0.5L - (j - 1)) / j * static_cast<long double>(y);
        sum += term;
    }
    return static_cast<double>(kg - static_cast<long double>(c) * c * sum);
}

namespace {

Field diagonal_flow(const Field& psi0, double t, const std::function<double(double)>& omega) {
    const Grid& g = psi0.grid();
    std::vector<cplx> sp = psi0.spectral();
    for (std::int64_t i = 0; i < g.size(); ++i)
        sp[i] *= std::polar(1.0, t * omega(g.xi_squared(i)));
    return Field::from_spectral(g, std::move(sp));
}

}  // namespace

Field kg_linear_flow(const Field& psi0, double c, double t) {
    return diagonal_flow(psi0, t, [c](double xi2) { return kg_symbol(c, xi2); });
}

Field ur_linear_flow(const Field& psi0, double c, int r, double t) {
    if (r < 1) throw std::invalid_argument("ur_linear_flow: r >= 1 required");
    return diagonal_flow(psi0, t, [c, r](double xi2) { return ur_symbol(c, r, xi2); });
}

// ---------------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------------

namespace {

// splits a normal-form Hamiltonian into its diagonal quadratic symbol and the
// higher-degree remainder
struct NfSplit {
    std::function<double(double)> quad_symbol;  // of |xi|^2
    HamPoly nonquad;
};

NfSplit split_quadratic(const HamPoly& h, int component) {
    std::vector<std::pair<double, int>> diag;  // (coeff, power) of |xi|^{2m}
    std::vector<Monomial> rest;
    for (const auto& m : h.monomials()) {
        bool quad = m.slots() == 2 && m.gauge_grade() == 0 && m.is_flat() &&
                    m.factors()[0].component == component &&
                    m.factors()[1].component == component && m.coeff().is_real() &&
                    m.coeff().lambda_deg == 0;
        if (quad) {
            const int power = m.kernel(0, 0) + m.kernel(1, 1);
            diag.push_back({boost::rational_cast<double>(m.coeff().re), power});
        } else {
            rest.push_back(m);
        }
    }
    NfSplit s;
    s.quad_symbol = [diag](double xi2) {
        double v = 0.0;
        for (const auto& [q, p] : diag) v += q * std::pow(xi2, p);
        return v;
    };
    s.nonquad = HamPoly(std::move(rest));
    return s;
}

void dealias_mask(const Grid& g, std::vector<cplx>& spec) {
    const double cutoff = std::abs(g.axis_wavenumbers()[g.n() / 3]);
    for (std::int64_t i = 0; i < g.size(); ++i)
        for (int d = 0; d < g.dim(); ++d)
            if (std::abs(g.xi_component(i, d)) > cutoff) {
                spec[i] = 0.0;
                break;
            }
}

}  // namespace

Stepper::Stepper(Grid g, const EvolutionSpec& spec) : grid_(std::move(g)), spec_(spec) {
    spec_.params.validate();
    const double c = spec_.params.c;
    const double lambda = spec_.params.lambda;
    const int l = spec_.params.l;
    const double peel = spec_.gauge_peeled ? c * c : 0.0;

    auto fill_omega = [&](const std::function<double(double)>& sym) {
        omega_.resize(grid_.size());
        for (std::int64_t i = 0; i < grid_.size(); ++i)
            omega_[i] = sym(grid_.xi_squared(i)) - peel;
    };

    switch (spec_.system) {
        case SystemTag::kg_linear:
            fill_omega([&](double xi2) { return kg_symbol(c, xi2); });
            break;
        case SystemTag::u_r_linear:
            fill_omega([&](double xi2) { return ur_symbol(c, spec_.r, xi2); });
            break;
        case SystemTag::nlkg: {
            if (spec_.gauge_peeled)
                throw std::invalid_argument("gauge peeling is supported for the normal-form systems only");
            fill_omega([&](double xi2) { return kg_symbol(c, xi2); });
            const double pref = lambda / std::pow(2.0, l);
            const Grid grid = grid_;
            const bool dealias = spec_.dealias;
            nonlin_ = [grid, c, l, pref, dealias](const Field& f) -> Field {
                const auto& ph = f.physical();
                std::vector<cplx> w(ph.size());
                for (std::size_t i = 0; i < ph.size(); ++i) w[i] = 2.0 * ph[i].real();
                Field wf = smoothing_apply(Field::from_physical(grid, std::move(w)), c, 0.5);
                if (dealias) dealias_mask(grid, wf.mutable_spectral());
                const auto& wp = wf.physical();
                std::vector<cplx> pw(wp.size());
                for (std::size_t i = 0; i < wp.size(); ++i)
                    pw[i] = std::pow(wp[i].real(), 2 * l - 1);
                Field out = smoothing_apply(Field::from_physical(grid, std::move(pw)), c, 0.5);
                if (dealias) dealias_mask(grid, out.mutable_spectral());
                auto& sp = out.mutable_spectral();
                for (auto& z : sp) z *= cplx(0.0, pref);  // i * N
                return Field::from_spectral(grid, std::move(sp));
            };
            // Hamiltonian (dsa1) nonlinear part
            const Grid grid2 = grid_;
            const double hpref = lambda / (std::pow(2.0, l + 1) * l);
            ham_nonquad_ = [grid2, c, l, hpref](const Field& f) -> cplx {
                const auto& ph = f.physical();
                std::vector<cplx> w(ph.size());
                for (std::size_t i = 0; i < ph.size(); ++i) w[i] = 2.0 * ph[i].real();
                Field wf = smoothing_apply(Field::from_physical(grid2, std::move(w)), c, 0.5);
                const auto& wp = wf.physical();
                double s = 0.0;
                for (const auto& z : wp) s += std::pow(z.real(), 2 * l);
                return hpref * s * grid2.cell_volume();
            };
            break;
        }
        case SystemTag::nf_order1:
        case SystemTag::nf_order2: {
            const int r = (spec_.system == SystemTag::nf_order1) ? 1 : 2;
            NormalForm nf = normal_form(l, r, false);
            if (spec_.nf_fault_term >= 0) {
                // sensitivity experiment: perturb one coefficient of Z_r
                auto monos = nf.Z[r - 1].monomials();
                if (spec_.nf_fault_term >= static_cast<int>(monos.size()))
                    throw std::invalid_argument("nf_fault_term out of range");
                const Rational fscale(std::llround(spec_.nf_fault_scale * 1048576.0), 1048576LL);
                monos[spec_.nf_fault_term].coeff() =
                    monos[spec_.nf_fault_term].coeff() * fscale;
                nf.Z[r - 1] = HamPoly(std::move(monos));
            }
            // physical time: omega = c^2 + sum_j c^{-2(j-1)} quad(Z_j),
            // nonlinearity  sum_j c^{-2(j-1)} X_{Z_j - quad}
            std::vector<NfSplit> splits;
            for (int j = 1; j <= r; ++j) splits.push_back(split_quadratic(nf.Z[j - 1], 1));
            fill_omega([&](double xi2) {
                double w = c * c;
                for (int j = 1; j <= r; ++j)
                    w += std::pow(c, -2.0 * (j - 1)) * splits[j - 1].quad_symbol(xi2);
                return w;
            });
            CompileOptions opt{spec_.dealias};
            std::vector<std::pair<double, std::function<Field(const Field&)>>> fields;
            std::vector<std::pair<double, std::function<cplx(const Field&)>>> values;
            for (int j = 1; j <= r; ++j) {
                if (splits[j - 1].nonquad.empty()) continue;
                const double scale = std::pow(c, -2.0 * (j - 1));
                fields.push_back({scale, compile_vector_field(splits[j - 1].nonquad, grid_,
                                                              spec_.params, opt)});
                values.push_back({scale, compile_hamiltonian(splits[j - 1].nonquad, grid_,
                                                             spec_.params, opt)});
            }
            const Grid grid = grid_;
            nonlin_ = [fields, grid](const Field& f) -> Field {
                Field acc(grid);
                for (const auto& [s, X] : fields) acc = acc + cplx(s, 0.0) * X(f);
                return acc;
            };
            ham_nonquad_ = [values](const Field& f) -> cplx {
                cplx acc = 0.0;
                for (const auto& [s, H] : values) acc += s * H(f);
                return acc;
            };
            break;
        }
        case SystemTag::nlkg_complex: {
            if (spec_.gauge_peeled)
                throw std::invalid_argument("gauge peeling is supported for the normal-form systems only");
            if (l != 2) throw std::invalid_argument("nlkg_complex supports l = 2");
            pair_ = true;
            fill_omega([&](double xi2) { return kg_symbol(c, xi2); });
            const Grid grid = grid_;
            const bool dealias = spec_.dealias;
            nonlin_pair_ = [grid, c, lambda, dealias](const FieldPair& f) -> FieldPair {
                auto smooth_sum = [&](const Field& x) {
                    const auto& ph = x.physical();
                    std::vector<cplx> w(ph.size());
                    for (std::size_t i = 0; i < ph.size(); ++i) w[i] = 2.0 * ph[i].real();
                    Field wf = smoothing_apply(Field::from_physical(grid, std::move(w)), c, 0.5);
                    if (dealias) dealias_mask(grid, wf.mutable_spectral());
                    return wf;
                };
                Field wpsi = smooth_sum(f.psi), wphi = smooth_sum(f.phi);
                const auto& a = wpsi.physical();
                const auto& b = wphi.physical();
                std::vector<cplx> qa(a.size()), qb(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) {
                    const double q = a[i].real() * a[i].real() + b[i].real() * b[i].real();
                    qa[i] = q * a[i].real();
                    qb[i] = q * b[i].real();
                }
                Field xa = smoothing_apply(Field::from_physical(grid, std::move(qa)), c, 0.5);
                Field xb = smoothing_apply(Field::from_physical(grid, std::move(qb)), c, 0.5);
                if (dealias) {
                    dealias_mask(grid, xa.mutable_spectral());
                    dealias_mask(grid, xb.mutable_spectral());
                }
                return {cplx(0.0, lambda / 4.0) * xa, cplx(0.0, -lambda / 4.0) * xb};
            };
            const Grid grid2 = grid_;
            ham_nonquad_pair_ = [grid2, c, lambda](const FieldPair& f) -> cplx {
                auto smooth_sum = [&](const Field& x) {
                    const auto& ph = x.physical();
                    std::vector<cplx> w(ph.size());
                    for (std::size_t i = 0; i < ph.size(); ++i) w[i] = 2.0 * ph[i].real();
                    return smoothing_apply(Field::from_physical(grid2, std::move(w)), c, 0.5);
                };
                Field wpsi = smooth_sum(f.psi), wphi = smooth_sum(f.phi);
                const auto& a = wpsi.physical();
                const auto& b = wphi.physical();
                double s = 0.0;
                for (std::size_t i = 0; i < a.size(); ++i) {
                    const double q = a[i].real() * a[i].real() + b[i].real() * b[i].real();
                    s += q * q;
                }
                return lambda / 16.0 * s * grid2.cell_volume();
            };
            break;
        }
        case SystemTag::nf_complex_order1: {
            if (l != 2) throw std::invalid_argument("nf_complex_order1 supports l = 2");
            pair_ = true;
            NormalForm nf = normal_form(l, 1, true);
            NfSplit spsi = split_quadratic(nf.Z[0], 1);
            // both components share the symbol c^2 + |xi|^2/2 (phi with e^{-i t omega})
            fill_omega([&](double xi2) { return c * c + spsi.quad_symbol(xi2); });
            CompileOptions opt{spec_.dealias};
            // nonquad of Z_1: quartic terms, shared by both components
            HamPoly quart = nf.Z[0];
            {
                std::vector<Monomial> rest;
                for (const auto& m : quart.monomials())
                    if (m.slots() > 2) rest.push_back(m);
                quart = HamPoly(std::move(rest));
            }
            auto X = compile_vector_field_pair(quart, grid_, spec_.params, opt);
            auto H = compile_hamiltonian_pair(quart, grid_, spec_.params, opt);
            nonlin_pair_ = [X](const FieldPair& f) -> FieldPair { return X(f); };
            ham_nonquad_pair_ = [H](const FieldPair& f) -> cplx { return H(f); };
            (void)sphi;
            break;
        }
    }
    if (!nonlin_ && !pair_) nonlin_ = nullptr;
}

Field Stepper::apply_phase(const Field& f, double s, int sign) const {
    std::vector<cplx> sp = f.spectral();
    for (std::int64_t i = 0; i < grid_.size(); ++i)
        sp[i] *= std::polar(1.0, sign * s * omega_[i]);
    return Field::from_spectral(grid_, std::move(sp));
}

Field Stepper::step(const Field& u) const {
    if (pair_) throw std::logic_error("pair system stepped with single field");
    const double h = spec_.dt;
    if (!nonlin_) return apply_phase(u, h, +1);

    // Lawson classical 4-stage scheme
    Field k1 = nonlin_(u);
    Field k2 = nonlin_(apply_phase(u + cplx(h / 2, 0.0) * k1, h / 2, +1));
    Field Eu2 = apply_phase(u, h / 2, +1);
    Field k3 = nonlin_(Eu2 + cplx(h / 2, 0.0) * k2);
    Field Eu = apply_phase(u, h, +1);
    Field k4 = nonlin_(Eu + cplx(h, 0.0) * apply_phase(k3, h / 2, +1));

    Field acc = apply_phase(k1, h, +1) + cplx(2.0, 0.0) * apply_phase(k2, h / 2, +1) +
                cplx(2.0, 0.0) * apply_phase(k3, h / 2, +1) + k4;
    return Eu + cplx(h / 6.0, 0.0) * acc;
}

namespace {

FieldPair axpy(const FieldPair& a, cplx s, const FieldPair& b) {
    return {a.psi + s * b.psi, a.phi + s * b.phi};
}

}  // namespace

FieldPair Stepper::step_pair(const FieldPair& u) const {
    if (!pair_) throw std::logic_error("single-field system stepped with pair");
    const double h = spec_.dt;
    // psi rotates with e^{+i t omega}, phi with e^{-i t omega}
    auto phase = [&](const FieldPair& f, double s) -> FieldPair {
        return {apply_phase(f.psi, s, +1), apply_phase(f.phi, s, -1)};
    };
    if (!nonlin_pair_) return phase(u, h);

    FieldPair k1 = nonlin_pair_(u);
    FieldPair k2 = nonlin_pair_(phase(axpy(u, h / 2, k1), h / 2));
    FieldPair Eu2 = phase(u, h / 2);
    FieldPair k3 = nonlin_pair_(axpy(Eu2, h / 2, k2));
    FieldPair Eu = phase(u, h);
    FieldPair k4 = nonlin_pair_(axpy(Eu, h, phase(k3, h / 2)));

    FieldPair acc = axpy(axpy(axpy(phase(k1, h), 2.0, phase(k2, h / 2)), 2.0, phase(k3, h / 2)),
                         1.0, k4);
    return axpy(Eu, h / 6.0, acc);
}

double Stepper::hamiltonian(const Field& state) const {
    // quadratic part via the exact symbol, non-quadratic by quadrature
    const auto& sp = state.spectral();
    double s = 0.0;
    const double peel = spec_.gauge_peeled ? spec_.params.c * spec_.params.c : 0.0;
    for (std::int64_t i = 0; i < grid_.size(); ++i)
        s += (omega_[i] + peel) * std::norm(sp[i]);
    double h = s * grid_.cell_volume();
    if (ham_nonquad_) h += ham_nonquad_(state).real();
    return h;
}

double Stepper::hamiltonian_pair(const FieldPair& state) const {
    const auto& sa = state.psi.spectral();
    const auto& sb = state.phi.spectral();
    double s = 0.0;
    const double peel = spec_.gauge_peeled ? spec_.params.c * spec_.params.c : 0.0;
    for (std::int64_t i = 0; i < grid_.size(); ++i)
        s += (omega_[i] + peel) * (std::norm(sa[i]) + std::norm(sb[i]));
    double h = s * grid_.cell_volume();
    if (ham_nonquad_pair_) h += ham_nonquad_pair_(state).real();
    return h;
}

namespace {

long long step_count(const EvolutionSpec& spec) {
    if (spec.t_end == 0.0) return 0;
    return std::llround(spec.t_end / spec.dt);
}

}  // namespace

Trajectory evolve(const EvolutionSpec& spec, const Field& psi0) {
    spec.validate();
    Stepper st(psi0.grid(), spec);
    const long long n = step_count(spec);
    const long long stride =
        spec.sample_stride > 0 ? spec.sample_stride : std::max<long long>(1, n / 200);

    Trajectory tr;
    Field u = psi0;
    double hprev = st.hamiltonian(u);
    const double href = std::max(std::abs(hprev), 1e-12);
    tr.times.push_back(0.0);
    tr.samples.push_back(u);
    tr.hamiltonian.push_back(hprev);
    tr.mass.push_back(norm_l2(u) * norm_l2(u));

    for (long long k = 1; k <= n; ++k) {
        u = st.step(u);
        const double hcur = st.hamiltonian(u);
        if (std::abs(hcur - hprev) > spec.drift_guard * href) throw StepRejected(k * spec.dt);
        hprev = hcur;
        if (k % stride == 0 || k == n) {
            tr.times.push_back(k * spec.dt);
            tr.samples.push_back(u);
            tr.hamiltonian.push_back(hcur);
            tr.mass.push_back(norm_l2(u) * norm_l2(u));
        }
    }
    return tr;
}

TrajectoryPair evolve_pair(const EvolutionSpec& spec, const FieldPair& psi0) {
    spec.validate();
    Stepper st(psi0.grid(), spec);
    const long long n = step_count(spec);
    const long long stride =
        spec.sample_stride > 0 ? spec.sample_stride : std::max<long long>(1, n / 200);

    TrajectoryPair tr;
    FieldPair u = psi0;
    double hprev = st.hamiltonian_pair(u);
    const double href = std::max(std::abs(hprev), 1e-12);
    tr.times.push_back(0.0);
    tr.samples.push_back(u);
    tr.hamiltonian.push_back(hprev);
    tr.mass.push_back(norm_l2(u.psi) * norm_l2(u.psi) + norm_l2(u.phi) * norm_l2(u.phi));

    for (long long k = 1; k <= n; ++k) {
        u = st.step_pair(u);
        const double hcur = st.hamiltonian_pair(u);
        if (std::abs(hcur - hprev) > spec.drift_guard * href) throw StepRejected(k * spec.dt);
        hprev = hcur;
        if (k % stride == 0 || k == n) {
            tr.times.push_back(k * spec.dt);
            tr.samples.push_back(u);
            tr.hamiltonian.push_back(hcur);
            tr.mass.push_back(norm_l2(u.psi) * norm_l2(u.psi) + norm_l2(u.phi) * norm_l2(u.phi));
        }
    }
    return tr;
}

Field lie_transform(const Field& f, const PhysicalParams& params, LieDirection dir,
                    std::optional<HamPoly> chi1_opt) {
    params.validate();
    HamPoly chi1;
    if (chi1_opt) {
        chi1 = *chi1_opt;
    } else {
        auto F = expand_nonlinearity(params.l, 1, false);
        chi1 = solve_homological(F[0]);
    }
    const double eps = 1.0 / (params.c * params.c);
    auto X = compile_vector_field(chi1, f.grid(), params, CompileOptions{true});
    const double tdir = (dir == LieDirection::forward) ? 1.0 : -1.0;

    auto integrate = [&](int substeps) -> Field {
        Field u = f;
        const double h = tdir / substeps;
        for (int s = 0; s < substeps; ++s) {
            Field k1 = cplx(eps, 0.0) * X(u);
            Field k2 = cplx(eps, 0.0) * X(u + cplx(h / 2, 0.0) * k1);
            Field k3 = cplx(eps, 0.0) * X(u + cplx(h / 2, 0.0) * k2);
            Field k4 = cplx(eps, 0.0) * X(u + cplx(h, 0.0) * k3);
            u = u + cplx(h / 6, 0.0) * (k1 + cplx(2.0, 0.0) * k2 + cplx(2.0, 0.0) * k3 + k4);
        }
        return u;
    };

    const double scale = std::max(norm_hk(f, 2.0), 1e-14);
    Field prev = integrate(4);
    for (int m = 8; m <= 1024; m *= 2) {
        Field cur = integrate(m);
        if (norm_hk(cur - prev, 2.0) / scale < 1e-13) return cur;
        prev = cur;
    }
    throw std::runtime_error("lie_transform: substep refinement did not converge");
}

}  // namespace nrlab
