#include <doctest.h>

#include "nrlab/multipliers.hpp"

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

Field decaying_random(const Grid& g, std::uint64_t seed, double width = 5.0) {
    std::vector<cplx> sp(g.size());
    std::uint64_t s = seed;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        const double re = static_cast<double>(s >> 40) / (1 << 24) - 0.5;
        const double im = static_cast<double>(s >> 16 & 0xffffff) / (1 << 24) - 0.5;
        sp[i] = cplx(re, im) * std::exp(-g.xi_squared(i) / (2 * width * width));
    }
    return Field::from_spectral(g, std::move(sp));
}
}  // namespace

TEST_CASE("japc: symbol values and inverse pair") {
    Grid g = make_grid(1, 16, 2.0 * pi);
    Field c = single_mode(g, 0, 1.0);
    Field jc = japc_apply(c, 5.0, 1.0);
    CHECK(jc.physical()[3].real() == doctest::Approx(5.0).epsilon(1e-13));

    Field e1 = single_mode(g, 1);
    Field je = japc_apply(e1, 1.0, 2.0);
    CHECK(std::abs(je.physical()[5]) == doctest::Approx(2.0).epsilon(1e-13));

    Field f = decaying_random(g, 99);
    Field rt = japc_apply(japc_apply(f, 3.0, 1.0), 3.0, -1.0);
    CHECK(norm_l2(rt - f) / norm_l2(f) < 1e-12);
}

TEST_CASE("norm_hck: definition checks") {
    Grid g = make_grid(1, 32, 2.0 * pi);
    Field f = decaying_random(g, 7);

    // c = 1: equals the <xi>_1-weighted norm, i.e. norm_hk
    CHECK(norm_hck(f, 1.0, 1.5) == doctest::Approx(norm_hk(f, 1.5)).epsilon(1e-13));

    // constant field: equals its L2 norm for any c, k
    Field c = single_mode(g, 0, 0.4);
    CHECK(norm_hck(c, 17.0, 2.5) == doctest::Approx(norm_l2(c)).epsilon(1e-13));

    // decreases monotonically toward ||f||_L2 as c grows
    double prev = 1e300;
    for (double cc : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
        const double v = norm_hck(f, cc, 0.5);
        CHECK(v <= prev * (1 + 1e-12));
        prev = v;
    }
    CHECK(prev >= norm_l2(f) * (1 - 1e-12));
}

TEST_CASE("smoothing operator") {
    Grid g = make_grid(1, 16, 2.0 * pi);
    Field c = single_mode(g, 0, 1.3);
    Field sc = smoothing_apply(c, 2.0, 1.0);
    CHECK(norm_l2(sc - c) < 1e-14);  // xi=0 mode unchanged

    Field f = decaying_random(g, 5);
    Field lf = smoothing_apply(f, 1e6, 1.0);
    CHECK(norm_l2(lf - f) / norm_l2(f) < 1e-9);

    Field e1 = single_mode(g, 1);
    Field se = smoothing_apply(e1, 1.0, 2.0);
    CHECK(std::abs(se.physical()[1]) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("littlewood-paley family") {
    Grid g = make_grid(1, 64, 2.0 * pi);

    // partition of unity on every grid xi once 2^{J-1} > max|xi|
    for (std::int64_t i = 0; i < g.size(); ++i) {
        const double axi = std::sqrt(g.xi_squared(i));
        double s = 0.0;
        for (int j = 0; j <= 7; ++j) s += lp_phi(j, axi);
        CHECK(std::abs(s - 1.0) < 1e-12);
    }

    // diagonal action on a pure mode
    Field e1 = single_mode(g, 1);
    for (int j = 0; j <= 3; ++j) {
        Field p = lp_projector(e1, j);
        CHECK(std::abs(p.physical()[9] - lp_phi(j, 1.0) * e1.physical()[9]) < 1e-13);
    }

    // cutoff equals the telescoped band sum
    Field f = decaying_random(g, 31);
    for (int N : {1, 3, 5}) {
        Field sum(g);
        for (int j = 0; j <= N; ++j) sum = sum + lp_projector(f, j);
        CHECK(norm_l2(sum - lp_cutoff(f, N)) / norm_l2(f) < 1e-13);
    }

    // tail decay: || (id - Pi_N) f ||_{H^k} <= C 2^{-sigma(N+1)} ||f||_{H^{k+sigma}}
    // measured rate over N = 2..5 on a gaussian-decay datum
    Field gg = decaying_random(g, 77, 4.0);
    const double sigma = 2.0, k = 1.0;
    double prev_tail = 0.0;
    double min_rate = 1e300;
    for (int N = 2; N <= 5; ++N) {
        const double tail = norm_hk(gg - lp_cutoff(gg, N), k);
        if (N > 2) min_rate = std::min(min_rate, std::log2(prev_tail / tail));
        prev_tail = tail;
    }
    CHECK(min_rate >= sigma - 0.1);
}

TEST_CASE("sharp projector") {
    Grid g = make_grid(1, 32, 2.0 * pi);
    Field f = decaying_random(g, 13);
    CHECK(norm_l2(sharp_projector(f, 16.0) - f) == 0.0);
    Field mean = sharp_projector(f, 0.0);
    int nonzero = 0;
    for (const auto& z : mean.spectral())
        if (std::abs(z) > 0) ++nonzero;
    CHECK(nonzero <= 1);
    Field a = sharp_projector(f, 5.0);
    CHECK(norm_l2(sharp_projector(a, 5.0) - a) == 0.0);
}

TEST_CASE("to_complex / from_complex") {
    Grid g = make_grid(1, 32, 2.0 * pi);

    Field zero(g);
    Field psi0 = to_complex(zero, zero, 3.0);
    CHECK(norm_l2(psi0) == 0.0);

    auto realize = [&](std::uint64_t seed) {
        Field f = decaying_random(g, seed);
        std::vector<cplx> v(f.physical().size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.physical()[i].real();
        return Field::from_physical(g, std::move(v));
    };
    Field u = realize(3), v = realize(4);
    auto [u2, v2] = from_complex(to_complex(u, v, 7.0), 7.0);
    CHECK(norm_l2(u2 - u) / norm_l2(u) < 1e-12);
    CHECK(norm_l2(v2 - v) / norm_l2(v) < 1e-12);
}

TEST_CASE("nyquist zeroing flag on odd multipliers") {
    Grid g = make_grid(1, 16, 2.0 * pi);
    std::vector<cplx> sp(g.size(), 0.0);
    std::int64_t nyq = -1;
    for (std::int64_t i = 0; i < g.size(); ++i)
        if (g.is_nyquist(i)) nyq = i;
    REQUIRE(nyq >= 0);
    sp[nyq] = 1.0;
    Field f = Field::from_spectral(g, std::move(sp));
    Multiplier odd{"first_derivative_like", [](double xi2) -> cplx { return std::sqrt(xi2); },
                   true};
    CHECK(norm_l2(apply(odd, f)) == 0.0);
    Multiplier even{"laplacian_like", [](double xi2) -> cplx { return xi2; }, false};
    CHECK(norm_l2(apply(even, f)) > 0.0);
}
