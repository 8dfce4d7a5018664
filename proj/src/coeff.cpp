#include "nrlab/coeff.hpp"

#include <cmath>
#include <sstream>

namespace nrlab {

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

std::complex<double> Coeff::value(double lambda) const {
    const double lp = std::pow(lambda, lambda_deg);
    return {boost::rational_cast<double>(re) * lp,
            boost::rational_cast<double>(im) * lp};
}

std::string Coeff::str() const {
    std::string body;
    if (re != 0 && im != 0) {
        body = "(" + rational_str(re) + (im > 0 ? "+" : "-") +
               rational_str(boost::abs(im)) + "*i)";
    } else if (im != 0) {
        body = rational_str(im) + "*i";
    } else {
        body = rational_str(re);
    }
    if (lambda_deg == 1)
        body += "*λ";
    else if (lambda_deg > 1)
        body += "*λ^" + std::to_string(lambda_deg);
    return body;
}

}  // namespace nrlab
