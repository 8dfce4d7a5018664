#include "nrlab/hamalg.hpp"

#include <cmath>
#include <stdexcept>

namespace nrlab {

namespace {

Coeff times_i(const Coeff& c) { return {-c.im, c.re, c.lambda_deg}; }

// One summand of a compiled expression: a pointwise product over slots, each
// slot being a field (or its conjugate) acted on by |xi|^{2 diag} and by the
// directional factors of its gradient bonds.
struct Term {
    cplx coeff;
    struct Slot {
        int component;
        bool conjugated;
        int diag;
        std::vector<int> bond_ids;  // indices into bonds
    };
    std::vector<Slot> slots;
    struct Bond {
        int a, b, power;
    };
    std::vector<Bond> bonds;
};

Term make_term(const Monomial& m, double lambda) {
    Term t;
    t.coeff = m.coeff().value(lambda);
    const int s = m.slots();
    t.slots.resize(s);
    for (int i = 0; i < s; ++i) {
        t.slots[i].component = m.factors()[i].component;
        t.slots[i].conjugated = m.factors()[i].conjugated;
        t.slots[i].diag = m.kernel(i, i);
    }
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j)
            if (m.kernel(i, j) != 0) {
                const int id = static_cast<int>(t.bonds.size());
                t.bonds.push_back({i, j, m.kernel(i, j)});
                t.slots[i].bond_ids.push_back(id);
                t.slots[j].bond_ids.push_back(id);
            }
    return t;
}

struct Workspace {
    Grid grid;
    bool dealias;
    std::vector<cplx> base_spec[4];   // psi, psibar, phi, phibar spectra
    bool base_ok[4] = {false, false, false, false};
    const Field* psi = nullptr;
    const FieldPair* pair = nullptr;

    int base_index(int component, bool conjugated) const {
        return (component - 1) * 2 + (conjugated ? 1 : 0);
    }

    const std::vector<cplx>& base(int component, bool conjugated) {
        const int k = base_index(component, conjugated);
        if (!base_ok[k]) {
            const Field* f = nullptr;
            if (component == 1)
                f = pair ? &pair->psi : psi;
            else {
                if (!pair) throw std::logic_error("compile: component-2 factor on single field");
                f = &pair->phi;
            }
            if (!conjugated) {
                base_spec[k] = f->spectral();
            } else {
                const auto& ph = f->physical();
                std::vector<cplx> cj(ph.size());
                for (std::size_t i = 0; i < ph.size(); ++i) cj[i] = std::conj(ph[i]);
                base_spec[k].resize(cj.size());
                grid.forward(cj.data(), base_spec[k].data());
            }
            if (dealias) {
                const double cutoff = std::abs(grid.axis_wavenumbers()[grid.n() / 3]);
                for (std::int64_t i = 0; i < grid.size(); ++i) {
                    for (int d = 0; d < grid.dim(); ++d)
                        if (std::abs(grid.xi_component(i, d)) > cutoff) {
                            base_spec[k][i] = 0.0;
                            break;
                        }
                }
            }
            base_ok[k] = true;
        }
        return base_spec[k];
    }
};

// physical view of one slot under a given bond-direction assignment
std::vector<cplx> slot_physical(Workspace& ws, const Term& t, int slot,
                                const std::vector<std::vector<int>>& bond_dirs) {
    const Grid& g = ws.grid;
    const Term::Slot& sl = t.slots[slot];
    const auto& base = ws.base(sl.component, sl.conjugated);

    if (sl.diag == 0 && sl.bond_ids.empty()) {
        std::vector<cplx> out(g.size());
        g.inverse(base.data(), out.data());
        return out;
    }

    // directional orders for this slot
    int order[3] = {0, 0, 0};
    for (int id : sl.bond_ids) {
        const auto& dirs = bond_dirs[id];
        for (int d : dirs) order[d]++;
    }

    std::vector<cplx> spec(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i) {
        cplx v = base[i];
        if (v == cplx(0.0)) {
            spec[i] = 0.0;
            continue;
        }
        double w = 1.0;
        const double xi2 = g.xi_squared(i);
        for (int q = 0; q < sl.diag; ++q) w *= xi2;
        bool zero = false;
        for (int d = 0; d < g.dim(); ++d) {
            if (order[d] == 0) continue;
            const double xid = g.xi_component(i, d);
            // odd-order derivative-like symbol: drop the Nyquist plane
            if (order[d] % 2 == 1 && g.is_nyquist(i)) {
                zero = true;
                break;
            }
            for (int q = 0; q < order[d]; ++q) w *= xid;
        }
        spec[i] = zero ? cplx(0.0) : v * w;
    }
    std::vector<cplx> out(g.size());
    g.inverse(spec.data(), out.data());
    return out;
}

// evaluate the pointwise product of a term, summed over bond directions
std::vector<cplx> term_physical(Workspace& ws, const Term& t) {
    const Grid& g = ws.grid;
    std::vector<cplx> acc(g.size(), cplx(0.0));

    // enumerate direction tuples per bond (dim^power each)
    std::vector<std::vector<int>> bond_dirs(t.bonds.size());
    std::function<void(std::size_t)> rec = [&](std::size_t bi) {
        if (bi == t.bonds.size()) {
            std::vector<cplx> prod(g.size(), cplx(1.0));
            for (int s = 0; s < static_cast<int>(t.slots.size()); ++s) {
                const auto sp = slot_physical(ws, t, s, bond_dirs);
                for (std::int64_t i = 0; i < g.size(); ++i) prod[i] *= sp[i];
            }
            for (std::int64_t i = 0; i < g.size(); ++i) acc[i] += prod[i];
            return;
        }
        const int p = t.bonds[bi].power;
        std::vector<int> dirs(p, 0);
        std::function<void(int)> gen = [&](int pos) {
            if (pos == p) {
                bond_dirs[bi] = dirs;
                rec(bi + 1);
                return;
            }
            for (int d = 0; d < g.dim(); ++d) {
                dirs[pos] = d;
                gen(pos + 1);
            }
        };
        gen(0);
    };
    rec(0);

    if (t.slots.empty()) acc.assign(g.size(), cplx(1.0));
    return acc;
}

std::vector<Term> compile_terms(const std::vector<Monomial>& monos, double lambda) {
    std::vector<Term> out;
    out.reserve(monos.size());
    for (const auto& m : monos) out.push_back(make_term(m, lambda));
    return out;
}

cplx evaluate_value(Workspace& ws, const std::vector<Term>& terms) {
    const Grid& g = ws.grid;
    cplx total = 0.0;
    for (const auto& t : terms) {
        const auto prod = term_physical(ws, t);
        cplx s = 0.0;
        for (const auto& z : prod) s += z;
        total += t.coeff * s * g.cell_volume();
    }
    return total;
}

Field evaluate_field(Workspace& ws, const std::vector<Term>& terms) {
    const Grid& g = ws.grid;
    std::vector<cplx> acc(g.size(), cplx(0.0));
    for (const auto& t : terms) {
        const auto prod = term_physical(ws, t);
        for (std::int64_t i = 0; i < g.size(); ++i) acc[i] += t.coeff * prod[i];
    }
    Field out = Field::from_physical(g, std::move(acc));
    if (ws.dealias) {
        auto& sp = out.mutable_spectral();
        const double cutoff = std::abs(g.axis_wavenumbers()[g.n() / 3]);
        for (std::int64_t i = 0; i < g.size(); ++i)
            for (int d = 0; d < g.dim(); ++d)
                if (std::abs(g.xi_component(i, d)) > cutoff) {
                    sp[i] = 0.0;
                    break;
                }
    }
    return out;
}

void require_single_component(const HamPoly& h) {
    for (const auto& m : h.monomials())
        for (const auto& f : m.factors())
            if (f.component != 1)
                throw std::invalid_argument("compile: component-2 factor in single-field context");
}

// densities of i dH/dpsibar (component 1) or -i dH/dphibar (component 2)
std::vector<Monomial> vf_densities(const HamPoly& h, int component) {
    std::vector<Monomial> dens;
    for (const auto& m : h.monomials()) {
        for (auto& d : m.derivative(component, true)) {
            d.coeff() = times_i(d.coeff());
            if (component == 2) d.coeff() = -d.coeff();
            dens.push_back(std::move(d));
        }
    }
    // canonical merge of identical densities
    return HamPoly(std::move(dens)).monomials();
}

}  // namespace

std::function<cplx(const Field&)> compile_hamiltonian(const HamPoly& h, Grid g,
                                                      PhysicalParams p, CompileOptions opt) {
    require_single_component(h);
    auto terms = compile_terms(h.monomials(), p.lambda);
    return [terms, g, opt](const Field& f) -> cplx {
        Workspace ws{g, opt.dealias};
        ws.psi = &f;
        return evaluate_value(ws, terms);
    };
}

std::function<cplx(const FieldPair&)> compile_hamiltonian_pair(const HamPoly& h, Grid g,
                                                               PhysicalParams p,
                                                               CompileOptions opt) {
    auto terms = compile_terms(h.monomials(), p.lambda);
    return [terms, g, opt](const FieldPair& f) -> cplx {
        Workspace ws{g, opt.dealias};
        ws.pair = &f;
        return evaluate_value(ws, terms);
    };
}

std::function<Field(const Field&)> compile_vector_field(const HamPoly& h, Grid g,
                                                        PhysicalParams p, CompileOptions opt) {
    require_single_component(h);
    auto terms = compile_terms(vf_densities(h, 1), p.lambda);
    return [terms, g, opt](const Field& f) -> Field {
        Workspace ws{g, opt.dealias};
        ws.psi = &f;
        return evaluate_field(ws, terms);
    };
}

std::function<FieldPair(const FieldPair&)> compile_vector_field_pair(const HamPoly& h, Grid g,
                                                                     PhysicalParams p,
                                                                     CompileOptions opt) {
    auto terms_psi = compile_terms(vf_densities(h, 1), p.lambda);
    auto terms_phi = compile_terms(vf_densities(h, 2), p.lambda);
    return [terms_psi, terms_phi, g, opt](const FieldPair& f) -> FieldPair {
        Workspace ws1{g, opt.dealias};
        ws1.pair = &f;
        Field xpsi = evaluate_field(ws1, terms_psi);
        Workspace ws2{g, opt.dealias};
        ws2.pair = &f;
        Field xphi = evaluate_field(ws2, terms_phi);
        return {std::move(xpsi), std::move(xphi)};
    };
}

namespace {

Field rotated(const Field& f, cplx phase) {
    std::vector<cplx> v = f.physical();
    for (auto& z : v) z *= phase;
    return Field::from_physical(f.grid(), std::move(v));
}

}  // namespace

cplx numeric_gauge_average_oracle(const HamPoly& h, const Field& f, int Q,
                                  PhysicalParams p, CompileOptions opt) {
    if (Q < 2 * h.max_abs_grade() + 1)
        throw std::invalid_argument("numeric_gauge_average_oracle: Q too small");
    auto H = compile_hamiltonian(h, f.grid(), p, opt);
    cplx acc = 0.0;
    for (int q = 0; q < Q; ++q) {
        const double t = 2.0 * M_PI * q / Q;
        acc += H(rotated(f, std::polar(1.0, t)));
    }
    return acc / static_cast<double>(Q);
}

cplx numeric_gauge_average_oracle_pair(const HamPoly& h, const FieldPair& f, int Q,
                                       PhysicalParams p, CompileOptions opt) {
    if (Q < 2 * h.max_abs_grade() + 1)
        throw std::invalid_argument("numeric_gauge_average_oracle: Q too small");
    auto H = compile_hamiltonian_pair(h, f.grid(), p, opt);
    cplx acc = 0.0;
    for (int q = 0; q < Q; ++q) {
        const double t = 2.0 * M_PI * q / Q;
        // psi rotates e^{it}, phi rotates e^{-it}
        FieldPair rot{rotated(f.psi, std::polar(1.0, t)), rotated(f.phi, std::polar(1.0, -t))};
        acc += H(rot);
    }
    return acc / static_cast<double>(Q);
}

}  // namespace nrlab
