#include <doctest.h>

#include "nrlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nrlab;

namespace {
const double pi = std::numbers::pi;

Field single_mode(const Grid& g, int k, cplx amp = 1.0) {
    std::vector<cplx> v(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i)
        v[i] = amp * std::polar(1.0, k * g.coord_component(i, 0));
    return Field::from_physical(g, std::move(v));
}
}  // namespace

TEST_CASE("make_grid wavenumber tables") {
    Grid g = make_grid(1, 8, 2.0 * pi);
    std::vector<double> xs = g.axis_wavenumbers();
    std::sort(xs.begin(), xs.end());
    const std::vector<double> expect = {-4, -3, -2, -1, 0, 1, 2, 3};
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i] == doctest::Approx(expect[i]));

    Grid h = make_grid(1, 8, pi);  // spacing 2*pi/length = 2
    std::vector<double> ys = h.axis_wavenumbers();
    std::sort(ys.begin(), ys.end());
    for (std::size_t i = 0; i < ys.size(); ++i) CHECK(ys[i] == doctest::Approx(2.0 * expect[i]));

    Grid g2 = make_grid(2, 16, 2.0 * pi);
    CHECK(g2.size() == 256);
    double lo = 0, hi = 0;
    for (std::int64_t i = 0; i < g2.size(); ++i) {
        lo = std::min(lo, g2.xi_component(i, 0));
        hi = std::max(hi, g2.xi_component(i, 1));
    }
    CHECK(lo == doctest::Approx(-8.0));
    CHECK(hi == doctest::Approx(7.0));
}

TEST_CASE("make_grid rejects bad arguments") {
    CHECK_THROWS_AS(make_grid(0, 16, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 16, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 12, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 16, 0.0), std::invalid_argument);
}

TEST_CASE("quadrature weight integrates 1 exactly") {
    Grid g = make_grid(2, 16, 3.0);
    std::vector<cplx> ones(g.size(), 1.0);
    Field f = Field::from_physical(g, std::move(ones));
    CHECK(pair_bilinear(f, f).real() == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("transform: constant and pure modes") {
    Grid g = make_grid(1, 16, 2.0 * pi);
    Field c = single_mode(g, 0, 2.5);
    int nonzero = 0;
    for (const auto& z : c.spectral())
        if (std::abs(z) > 1e-12) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(std::abs(c.spectral()[0]) > 0);

    Field e1 = single_mode(g, 1);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        const bool is_mode_one = g.xi_component(i, 0) == doctest::Approx(1.0);
        if (is_mode_one)
            CHECK(std::abs(e1.spectral()[i]) > 1.0);
        else
            CHECK(std::abs(e1.spectral()[i]) < 1e-12);
    }
}

TEST_CASE("transform roundtrip on random data") {
    Grid g = make_grid(3, 8, 1.7);
    std::vector<cplx> v(g.size());
    std::uint64_t s = 1234567;
    for (auto& z : v) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        z = {static_cast<double>(s >> 40) / (1 << 24), static_cast<double>(s >> 20 & 0xffffff) / (1 << 24)};
    }
    Field f = Field::from_physical(g, v);
    std::vector<cplx> tmp(g.size()), back(g.size());
    g.forward(v.data(), tmp.data());
    g.inverse(tmp.data(), back.data());
    double worst = 0;
    for (std::int64_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(back[i] - v[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("norms: spectral weights and Parseval") {
    Grid g = make_grid(1, 16, 2.0 * pi);
    Field e1 = single_mode(g, 1);
    CHECK(norm_hk(e1, 1.0) == doctest::Approx(std::sqrt(2.0) * norm_hk(e1, 0.0)).epsilon(1e-13));

    Field c = single_mode(g, 0, 0.3);
    CHECK(norm_hk(c, 0.0) == doctest::Approx(norm_hk(c, 3.7)).epsilon(1e-13));

    Field mixed = e1 + c;
    CHECK(norm_lp(mixed, 2.0) == doctest::Approx(norm_hk(mixed, 0.0)).epsilon(1e-12));
}

TEST_CASE("field pair requires one grid") {
    Grid a = make_grid(1, 16, 2.0 * pi);
    Grid b = make_grid(1, 16, 2.0 * pi);
    CHECK_NOTHROW(FieldPair(Field(a), Field(a)));
    CHECK_THROWS_AS(FieldPair(Field(a), Field(b)), std::invalid_argument);
}
