#include "nrlab/hamalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nrlab {

namespace {

Coeff times_i(const Coeff& c) { return {-c.im, c.re, c.lambda_deg}; }

Rational factorial(int n) {
    Rational f(1);
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// binom(x, j) for rational x
Rational rat_binom(const Rational& x, int j) {
    Rational b(1);
    for (int i = 0; i < j; ++i) b *= (x - i);
    return b / factorial(j);
}

}  // namespace

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

Monomial Monomial::raw(Coeff c, std::vector<Factor> f, std::vector<int> kernel) {
    Monomial m;
    m.coeff_ = std::move(c);
    m.factors_ = std::move(f);
    m.kernel_ = std::move(kernel);
    if (m.kernel_.size() != m.factors_.size() * m.factors_.size())
        throw std::logic_error("Monomial::raw: kernel size mismatch");
    m.canonicalize();
    return m;
}

Monomial Monomial::integral(Coeff c, const std::vector<FactorSpec>& specs) {
    const int s = static_cast<int>(specs.size());
    std::vector<Factor> f(s);
    std::vector<int> k(static_cast<std::size_t>(s) * s, 0);
    int lap_total = 0;
    for (int i = 0; i < s; ++i) {
        f[i] = {specs[i].component, specs[i].conjugated};
        k[i * s + i] = specs[i].lap_power;
        lap_total += specs[i].lap_power;
    }
    // Delta^m <-> (-1)^m (xi.xi)^m
    if (lap_total % 2 != 0) c = -c;
    return raw(std::move(c), std::move(f), std::move(k));
}

int Monomial::gauge_grade() const {
    int n = 0;
    for (const auto& f : factors_) {
        const int sgn = (f.component == 1) ? 1 : -1;
        n += sgn * (f.conjugated ? -1 : 1);
    }
    return n;
}

bool Monomial::is_flat() const {
    const int s = slots();
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j)
            if (kernel(i, j) != 0) return false;
    return true;
}

bool Monomial::same_shape(const Monomial& o) const {
    return factors_ == o.factors_ && kernel_ == o.kernel_ &&
           coeff_.lambda_deg == o.coeff_.lambda_deg;
}

Monomial Monomial::product(const Monomial& a, const Monomial& b) {
    const int sa = a.slots(), sb = b.slots(), s = sa + sb;
    std::vector<Factor> f;
    f.reserve(s);
    f.insert(f.end(), a.factors_.begin(), a.factors_.end());
    f.insert(f.end(), b.factors_.begin(), b.factors_.end());
    std::vector<int> k(static_cast<std::size_t>(s) * s, 0);
    for (int i = 0; i < sa; ++i)
        for (int j = 0; j < sa; ++j) k[i * s + j] = a.kernel_[i * sa + j];
    for (int i = 0; i < sb; ++i)
        for (int j = 0; j < sb; ++j) k[(sa + i) * s + (sa + j)] = b.kernel_[i * sb + j];
    return raw(a.coeff_ * b.coeff_, std::move(f), std::move(k));
}

void Monomial::canonicalize() {
    const int s = slots();
    if (s == 0) return;

    // sort slots by (component, conjugated), carry kernel along
    std::vector<int> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return factors_[i] < factors_[j];
    });

    auto permuted_kernel = [&](const std::vector<int>& ord) {
        std::vector<int> k(static_cast<std::size_t>(s) * s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) k[i * s + j] = kernel_[ord[i] * s + ord[j]];
        return k;
    };

    // group boundaries of equal (component, conjugated)
    std::vector<std::pair<int, int>> groups;
    {
        int start = 0;
        for (int i = 1; i <= s; ++i) {
            if (i == s || !(factors_[order[i]] == factors_[order[start]])) {
                groups.emplace_back(start, i);
                start = i;
            }
        }
    }

    // minimize the kernel lexicographically over within-group permutations
    std::vector<int> best = permuted_kernel(order);
    std::vector<int> cur = order;
    std::function<void(std::size_t)> rec = [&](std::size_t gi) {
        if (gi == groups.size()) {
            auto k = permuted_kernel(cur);
            if (k < best) best = k;
            return;
        }
        auto [a, b] = groups[gi];
        std::sort(cur.begin() + a, cur.begin() + b);
        do {
            rec(gi + 1);
        } while (std::next_permutation(cur.begin() + a, cur.begin() + b));
    };
    bool nontrivial = false;
    for (auto [a, b] : groups) nontrivial |= (b - a > 1);
    if (nontrivial && !is_flat_kernel_trivial())
        rec(0);

    std::vector<Factor> f(s);
    for (int i = 0; i < s; ++i) f[i] = factors_[order[i]];
    factors_ = std::move(f);
    kernel_ = std::move(best);
}

// whether within-group permutation can matter (all-zero kernel never does)
bool Monomial::is_flat_kernel_trivial() const {
    for (int v : kernel_)
        if (v != 0) return false;
    return true;
}

std::vector<Monomial> Monomial::derivative(int component, bool conjugated) const {
    std::vector<Monomial> out;
    const int s = slots();
    for (int i = 0; i < s; ++i) {
        if (factors_[i].component != component || factors_[i].conjugated != conjugated)
            continue;

        // remaining slots
        std::vector<int> rem;
        for (int j = 0; j < s; ++j)
            if (j != i) rem.push_back(j);
        const int t = static_cast<int>(rem.size());

        std::vector<Factor> f(t);
        std::vector<int> base(static_cast<std::size_t>(t) * t, 0);
        for (int a = 0; a < t; ++a) {
            f[a] = factors_[rem[a]];
            for (int b = 0; b < t; ++b) base[a * t + b] = kernel_[rem[a] * s + rem[b]];
        }

        // substitute xi_i = -(sum of remaining): expand the removed row.
        // Terms are indexed by unordered slot pairs (a<=b) of the remaining set.
        struct Expansion {
            Rational mult;
            std::vector<int> kadd;  // t x t additions
        };
        std::vector<Expansion> exps{{Rational(1), std::vector<int>(static_cast<std::size_t>(t) * t, 0)}};

        auto multinomial = [&](int power, const std::vector<std::pair<std::pair<int, int>, int>>& terms) {
            // (sum_k gamma_k T_k)^power: compositions of `power` over terms
            std::vector<Expansion> result;
            std::vector<int> e(terms.size(), 0);
            std::function<void(std::size_t, int)> gen = [&](std::size_t k, int left) {
                if (k + 1 == terms.size()) {
                    e[k] = left;
                    Rational mult = factorial(power);
                    std::vector<int> kadd(static_cast<std::size_t>(t) * t, 0);
                    for (std::size_t q = 0; q < terms.size(); ++q) {
                        mult /= factorial(e[q]);
                        for (int rep = 0; rep < e[q]; ++rep) {
                            auto [ab, gamma] = terms[q];
                            (void)gamma;
                            kadd[ab.first * t + ab.second] += 1;
                            if (ab.first != ab.second) kadd[ab.second * t + ab.first] += 1;
                        }
                        Rational g(terms[q].second);
                        for (int rep = 0; rep < e[q]; ++rep) mult *= g;
                    }
                    result.push_back({mult, std::move(kadd)});
                    return;
                }
                for (int v = 0; v <= left; ++v) {
                    e[k] = v;
                    gen(k + 1, left - v);
                }
            };
            if (terms.empty()) {
                if (power > 0) return std::vector<Expansion>{};  // (0)^power = 0
                return std::vector<Expansion>{{Rational(1), std::vector<int>(static_cast<std::size_t>(t) * t, 0)}};
            }
            gen(0, power);
            return result;
        };

        auto combine = [&](const std::vector<Expansion>& more) {
            std::vector<Expansion> merged;
            for (const auto& x : exps)
                for (const auto& y : more) {
                    Expansion z;
                    z.mult = x.mult * y.mult;
                    z.kadd = x.kadd;
                    for (std::size_t q = 0; q < z.kadd.size(); ++q) z.kadd[q] += y.kadd[q];
                    merged.push_back(std::move(z));
                }
            exps = std::move(merged);
        };

        int sign_pow = 0;
        bool vanished = false;

        // diagonal power: (xi_i.xi_i)^m -> (sum_j sum_j' xi_j.xi_j')^m
        const int m = kernel_[i * s + i];
        if (m > 0) {
            std::vector<std::pair<std::pair<int, int>, int>> terms;
            for (int a = 0; a < t; ++a) {
                terms.push_back({{a, a}, 1});
                for (int b = a + 1; b < t; ++b) terms.push_back({{a, b}, 2});
            }
            auto e = multinomial(m, terms);
            if (e.empty()) vanished = true;
            combine(e);
        }

        // off-diagonal powers: (xi_i.xi_j)^p -> (-1)^p (sum_j' xi_j'.xi_j)^p
        for (int a = 0; a < t && !vanished; ++a) {
            const int p = kernel_[i * s + rem[a]];
            if (p == 0) continue;
            sign_pow += p;
            std::vector<std::pair<std::pair<int, int>, int>> terms;
            for (int b = 0; b < t; ++b)
                terms.push_back({{std::min(a, b), std::max(a, b)}, 1});
            auto e = multinomial(p, terms);
            if (e.empty()) vanished = true;
            combine(e);
        }

        if (vanished) continue;

        for (const auto& ex : exps) {
            Coeff c = coeff_ * ex.mult;
            if (sign_pow % 2 != 0) c = -c;
            std::vector<int> k = base;
            for (std::size_t q = 0; q < k.size(); ++q) k[q] += ex.kadd[q];
            out.push_back(raw(std::move(c), f, std::move(k)));
        }
    }
    return out;
}

std::string Monomial::str() const {
    const int s = slots();
    // display sign convention: (xi.xi)^m prints as Delta^m with (-1)^m,
    // (xi_i.xi_j)^p prints as (grad.grad)^p with (-1)^p
    int flips = 0;
    for (int i = 0; i < s; ++i) flips += kernel(i, i);
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j) flips += kernel(i, j);
    Coeff shown = (flips % 2 != 0) ? -coeff_ : coeff_;

    std::ostringstream os;
    os << shown.str() << " * ∫ ";

    auto field_name = [](const Factor& f) {
        if (f.component == 1) return f.conjugated ? "ψ̄" : "ψ";
        return f.conjugated ? "φ̄" : "φ";
    };

    const bool flat = is_flat();
    if (flat) {
        // group identical (factor, lap) with exponents
        std::vector<std::pair<std::pair<Factor, int>, int>> groups;
        for (int i = 0; i < s; ++i) {
            std::pair<Factor, int> key{factors_[i], kernel(i, i)};
            if (!groups.empty() && groups.back().first == key)
                groups.back().second++;
            else
                groups.push_back({key, 1});
        }
        bool first = true;
        for (const auto& [key, count] : groups) {
            if (!first) os << " ";
            first = false;
            os << "[";
            if (key.second == 1)
                os << "Δ ";
            else if (key.second > 1)
                os << "Δ^" << key.second << " ";
            os << field_name(key.first) << "]";
            if (count > 1) os << "^" << count;
        }
    } else {
        for (int i = 0; i < s; ++i) {
            if (i) os << " ";
            os << "[";
            if (kernel(i, i) == 1)
                os << "Δ ";
            else if (kernel(i, i) > 1)
                os << "Δ^" << kernel(i, i) << " ";
            os << field_name(factors_[i]) << "]_" << (i + 1);
        }
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j)
                if (kernel(i, j) != 0) {
                    os << " (∇_" << (i + 1) << "·∇_" << (j + 1) << ")";
                    if (kernel(i, j) != 1) os << "^" << kernel(i, j);
                }
    }
    if (s == 0) os << "1";
    return os.str();
}

// ---------------------------------------------------------------------------
// HamPoly
// ---------------------------------------------------------------------------

namespace {

// strict weak order on monomial shape for canonical sorting
bool shape_less(const Monomial& a, const Monomial& b) {
    if (a.coeff().lambda_deg != b.coeff().lambda_deg)
        return a.coeff().lambda_deg < b.coeff().lambda_deg;
    if (a.slots() != b.slots()) return a.slots() < b.slots();
    if (a.factors() != b.factors()) return a.factors() < b.factors();
    return a.raw_kernel() < b.raw_kernel();
}

}  // namespace

HamPoly::HamPoly(std::vector<Monomial> m) : mono_(std::move(m)) { normalize(); }

HamPoly HamPoly::single(Monomial m) { return HamPoly(std::vector<Monomial>{std::move(m)}); }

void HamPoly::normalize() {
    for (auto& m : mono_) m.canonicalize();
    std::sort(mono_.begin(), mono_.end(), shape_less);
    std::vector<Monomial> out;
    for (auto& m : mono_) {
        if (!out.empty() && out.back().same_shape(m))
            out.back().coeff() += m.coeff();
        else
            out.push_back(std::move(m));
    }
    std::erase_if(out, [](const Monomial& m) { return m.coeff().is_zero(); });
    mono_ = std::move(out);
}

int HamPoly::max_abs_grade() const {
    int g = 0;
    for (const auto& m : mono_) g = std::max(g, std::abs(m.gauge_grade()));
    return g;
}

int HamPoly::max_degree() const {
    int d = 0;
    for (const auto& m : mono_) d = std::max(d, m.total_degree());
    return d;
}

HamPoly HamPoly::operator+(const HamPoly& o) const {
    std::vector<Monomial> m = mono_;
    m.insert(m.end(), o.mono_.begin(), o.mono_.end());
    return HamPoly(std::move(m));
}

HamPoly HamPoly::operator-(const HamPoly& o) const { return *this + (-o); }

HamPoly HamPoly::operator-() const {
    std::vector<Monomial> m = mono_;
    for (auto& x : m) x.coeff() = -x.coeff();
    HamPoly p;
    p.mono_ = std::move(m);
    return p;
}

HamPoly HamPoly::scaled(const Coeff& s) const {
    std::vector<Monomial> m = mono_;
    for (auto& x : m) x.coeff() = x.coeff() * s;
    return HamPoly(std::move(m));
}

HamPoly HamPoly::scaled(const Rational& s) const {
    std::vector<Monomial> m = mono_;
    for (auto& x : m) x.coeff() = x.coeff() * s;
    return HamPoly(std::move(m));
}

bool HamPoly::operator==(const HamPoly& o) const {
    if (mono_.size() != o.mono_.size()) return false;
    for (std::size_t i = 0; i < mono_.size(); ++i) {
        if (!mono_[i].same_shape(o.mono_[i])) return false;
        if (!(mono_[i].coeff() == o.mono_[i].coeff())) return false;
    }
    return true;
}

std::string HamPoly::str() const {
    if (mono_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < mono_.size(); ++i) {
        if (i) os << "  +  ";
        os << mono_[i].str();
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Gauge operations
// ---------------------------------------------------------------------------

HamPoly gauge_generator(bool complex_case) {
    std::vector<Monomial> m;
    m.push_back(Monomial::integral(Coeff(Rational(1)), {{1, false, 0}, {1, true, 0}}));
    if (complex_case)
        m.push_back(Monomial::integral(Coeff(Rational(1)), {{2, false, 0}, {2, true, 0}}));
    HamPoly h(std::move(m));
    h.origin = "h_0";
    return h;
}

HamPoly gauge_average(const HamPoly& f) {
    std::vector<Monomial> m;
    for (const auto& x : f.monomials())
        if (x.gauge_grade() == 0) m.push_back(x);
    return HamPoly(std::move(m));
}

HamPoly solve_homological(const HamPoly& f) {
    std::vector<Monomial> m;
    for (const auto& x : f.monomials()) {
        const int n = x.gauge_grade();
        if (n == 0) continue;
        Monomial y = x;
        y.coeff() = y.coeff().div_by_i_times(n);
        m.push_back(std::move(y));
    }
    return HamPoly(std::move(m));
}

HamPoly poisson_bracket(const HamPoly& f, const HamPoly& g) {
    // {F,G} = dG·X_F = i<∂ψG,∂ψ̄F> - i<∂ψ̄G,∂ψF> - i<∂φG,∂φ̄F> + i<∂φ̄G,∂φF>
    std::vector<Monomial> out;
    for (const auto& mf : f.monomials()) {
        const auto df_psibar = mf.derivative(1, true);
        const auto df_psi = mf.derivative(1, false);
        const auto df_phibar = mf.derivative(2, true);
        const auto df_phi = mf.derivative(2, false);
        for (const auto& mg : g.monomials()) {
            auto accumulate = [&](const std::vector<Monomial>& dg,
                                  const std::vector<Monomial>& df, bool plus_i) {
                for (const auto& a : dg)
                    for (const auto& b : df) {
                        Monomial p = Monomial::product(a, b);
                        p.coeff() = times_i(p.coeff());
                        if (!plus_i) p.coeff() = -p.coeff();
                        out.push_back(std::move(p));
                    }
            };
            accumulate(mg.derivative(1, false), df_psibar, true);
            accumulate(mg.derivative(1, true), df_psi, false);
            accumulate(mg.derivative(2, false), df_phibar, false);
            accumulate(mg.derivative(2, true), df_phi, true);
        }
    }
    return HamPoly(std::move(out));
}

// ---------------------------------------------------------------------------
// Expansions
// ---------------------------------------------------------------------------

DispersionCoeffs dispersion_coeffs(int r) {
    if (r < 1) throw std::invalid_argument("dispersion_coeffs: r >= 1 required");
    DispersionCoeffs dc;
    for (int j = 1; j <= r; ++j) {
        const Rational aj = rat_binom(Rational(1, 2), j) * ((j % 2) ? -1 : 1);
        const Rational bj = rat_binom(Rational(-1, 4), j) * ((j % 2) ? -1 : 1);
        dc.a.push_back(aj);
        dc.b.push_back(bj);
    }
    // verify against the generating Taylor series at a few points
    for (double x : {0.05, 0.2}) {
        double sa = 1.0, sb = 1.0, xp = 1.0;
        for (int j = 1; j <= r; ++j) {
            xp *= x;
            sa += boost::rational_cast<double>(dc.a[j - 1]) * ((j % 2) ? -1.0 : 1.0) * xp;
            sb += boost::rational_cast<double>(dc.b[j - 1]) * ((j % 2) ? -1.0 : 1.0) * xp;
        }
        const double ea = std::abs(std::sqrt(1.0 + x) - sa);
        const double eb = std::abs(std::pow(1.0 + x, -0.25) - sb);
        const double bound = 2.0 * std::pow(x, r + 1);
        if (ea > bound || eb > bound)
            throw std::logic_error("dispersion_coeffs: Taylor verification failed");
    }
    return dc;
}

std::vector<HamPoly> expand_dispersion(int r, bool complex_case) {
    const DispersionCoeffs dc = dispersion_coeffs(r);
    std::vector<HamPoly> h;
    for (int j = 1; j <= r; ++j) {
        std::vector<Monomial> m;
        m.push_back(Monomial::integral(Coeff(dc.a[j - 1]), {{1, false, j}, {1, true, 0}}));
        if (complex_case)
            m.push_back(Monomial::integral(Coeff(dc.a[j - 1]), {{2, false, j}, {2, true, 0}}));
        HamPoly p(std::move(m));
        p.origin = "h_" + std::to_string(j);
        p.eps_order = j;
        h.push_back(std::move(p));
    }
    return h;
}

std::vector<HamPoly> expand_nonlinearity(int l, int r, bool complex_case) {
    if (l < 2) throw std::invalid_argument("expand_nonlinearity: l >= 2 required");
    if (r < 1) throw std::invalid_argument("expand_nonlinearity: r >= 1 required");

    if (complex_case) {
        if (l != 2)
            throw std::invalid_argument("expand_nonlinearity: complex case supports l = 2");
        if (r != 1)
            throw std::invalid_argument("expand_nonlinearity: complex case supports r = 1");
        // lambda/16 ∫ [ (psi+psibar)^2 + (phi+phibar)^2 ]^2
        const Coeff pref(Rational(1, 16), 1);
        std::vector<Monomial> m;
        for (int c1 = 1; c1 <= 2; ++c1)
            for (int c2 = 1; c2 <= 2; ++c2)
                for (int mask = 0; mask < 16; ++mask) {
                    std::vector<FactorSpec> fs = {
                        {c1, (mask & 1) != 0, 0},
                        {c1, (mask & 2) != 0, 0},
                        {c2, (mask & 4) != 0, 0},
                        {c2, (mask & 8) != 0, 0},
                    };
                    m.push_back(Monomial::integral(pref, fs));
                }
        HamPoly F1(std::move(m));
        F1.origin = "F_1";
        F1.eps_order = 1;
        return {F1};
    }

    const DispersionCoeffs dc = dispersion_coeffs(std::max(1, r - 1) + 1);
    const int nf = 2 * l;
    const Coeff pref(Rational(1, (1LL << (l + 1)) * l), 1);

    std::vector<HamPoly> F;
    for (int j = 1; j <= r; ++j) {
        std::vector<Monomial> m;
        // compositions e_1..e_nf >= 0 summing to j-1 (smoothing orders per factor)
        std::vector<int> e(nf, 0);
        std::function<void(int, int)> gen = [&](int pos, int left) {
            if (pos == nf - 1) {
                e[pos] = left;
                // smoothing coefficient prod b_{e_i} (b_0 = 1)
                Rational bprod(1);
                for (int i = 0; i < nf; ++i)
                    if (e[i] > 0) bprod *= dc.b[e[i] - 1];
                for (int mask = 0; mask < (1 << nf); ++mask) {
                    std::vector<FactorSpec> fs(nf);
                    for (int i = 0; i < nf; ++i)
                        fs[i] = {1, (mask >> i & 1) != 0, e[i]};
                    m.push_back(Monomial::integral(pref * bprod, fs));
                }
                return;
            }
            for (int v = 0; v <= left; ++v) {
                e[pos] = v;
                gen(pos + 1, left - v);
            }
        };
        gen(0, j - 1);
        HamPoly Fj(std::move(m));
        Fj.origin = "F_" + std::to_string(j);
        Fj.eps_order = j;
        F.push_back(std::move(Fj));
    }
    return F;
}

// ---------------------------------------------------------------------------
// Normal form driver
// ---------------------------------------------------------------------------

NormalForm normal_form(int l, int r, bool complex_case) {
    if (r < 1 || r > 3) throw std::invalid_argument("normal_form: r outside supported range 1..3");
    if (complex_case && r != 1)
        throw std::invalid_argument("normal_form: complex case supports r = 1 only");

    const auto h = expand_dispersion(r, complex_case);
    const auto F = expand_nonlinearity(l, r, complex_case);

    std::vector<HamPoly> orders(r + 1);
    orders[0] = gauge_generator(complex_case);
    for (int j = 1; j <= r; ++j) orders[j] = h[j - 1] + F[j - 1];

    NormalForm nf;
    nf.certified = true;
    nf.Z.resize(r);
    nf.chi.resize(r);
    nf.residual.resize(r);

    for (int m = 1; m <= r; ++m) {
        const HamPoly G = orders[m];
        HamPoly Zm = gauge_average(G);
        HamPoly chim = solve_homological(G);

        // Lie pushforward: H -> H o Phi^1_{eps^m chi_m}, truncated at eps^r
        std::vector<HamPoly> out(r + 1);
        for (int s = 0; s <= r; ++s) {
            HamPoly term = orders[s];
            out[s] = out[s] + term;
            Rational fact(1);
            for (int k = 1; s + k * m <= r; ++k) {
                term = poisson_bracket(chim, term);
                fact *= k;
                out[s + k * m] = out[s + k * m] + term.scaled(Rational(1) / fact);
            }
        }
        orders = std::move(out);

        // the step must leave exactly the resonant part at order m
        nf.residual[m - 1] = orders[m] - Zm;
        if (!nf.residual[m - 1].empty()) nf.certified = false;
        orders[m] = Zm;

        // Z_j Poisson-commute with h_0
        if (!poisson_bracket(Zm, gauge_generator(complex_case)).empty())
            nf.certified = false;

        Zm.origin = "Z_" + std::to_string(m);
        Zm.eps_order = m;
        chim.origin = "chi_" + std::to_string(m);
        chim.eps_order = m;
        nf.Z[m - 1] = std::move(Zm);
        nf.chi[m - 1] = std::move(chim);
    }

    if (!nf.certified)
        throw std::logic_error("normal_form: homological bookkeeping failed certification");
    return nf;
}

}  // namespace nrlab
