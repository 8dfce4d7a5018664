#pragma once

#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nrlab {

using Rational = boost::rational<long long>;

/// Exact monomial coefficient: a Gaussian rational (re + im*i) times an
/// integer power of the coupling lambda. Imaginary parts appear in the
/// generators chi_j (divisors i*n) and in Poisson brackets; every physical
/// Hamiltonian produced by the normal form comes out with im == 0.
struct Coeff {
    Rational re{0};
    Rational im{0};
    int lambda_deg = 0;

    Coeff() = default;
    Coeff(Rational r, int ldeg = 0) : re(r), lambda_deg(ldeg) {}
    Coeff(Rational r, Rational i, int ldeg) : re(r), im(i), lambda_deg(ldeg) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    Coeff operator-() const { return {-re, -im, lambda_deg}; }

    Coeff& operator+=(const Coeff& o) {
        if (lambda_deg != o.lambda_deg)
            throw std::logic_error("Coeff: adding different lambda degrees");
        re += o.re;
        im += o.im;
        return *this;
    }

    Coeff operator*(const Coeff& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re,
                lambda_deg + o.lambda_deg};
    }

    Coeff operator*(const Rational& r) const { return {re * r, im * r, lambda_deg}; }

    /// Division by (i*n): used by the homological equation, n a nonzero integer.
    Coeff div_by_i_times(long long n) const {
        // 1/(i n) = -i/n
        return {im / n, -re / n, lambda_deg};
    }

    bool operator==(const Coeff& o) const {
        return re == o.re && im == o.im && lambda_deg == o.lambda_deg;
    }

    /// Numeric value at a given coupling.
    std::complex<double> value(double lambda) const;

    /// Canonical text: "3/8", "-17/64*i", "1/2+1/4*i", with "*lambda^k" suffix.
    std::string str() const;
};

std::string rational_str(const Rational& r);

}  // namespace nrlab
