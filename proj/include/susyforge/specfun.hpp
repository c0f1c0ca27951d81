#pragma once

// Special functions needed by the closed-form catalog and the adapters:
// the error function, physicists' Hermite polynomials, and the generalized
// exponential integral E_nu(z) of real (possibly fractional) order.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace susyforge {

// Error function. The C++ standard library implementation is correctly
// rounded to well below our tolerances, so it is simply re-exported under
// the library's namespace for uniform call sites.
inline double erf(double x) { return std::erf(x); }

// Physicists' Hermite polynomial H_k(x):
//   H_0 = 1, H_1 = 2x, H_{k+1} = 2x H_k - 2k H_{k-1}.
inline double hermite(int k, double x) {
    if (k < 0) throw std::invalid_argument("hermite: order must be nonnegative");
    if (k == 0) return 1.0;
    double hm = 1.0;
    double h = 2.0 * x;
    for (int j = 1; j < k; ++j) {
        double hp = 2.0 * x * h - 2.0 * static_cast<double>(j) * hm;
        hm = h;
        h = hp;
    }
    return h;
}

// Generalized exponential integral
//   E_nu(z) = int_1^inf e^{-z t} t^{-nu} dt,  z > 0,
// for real order nu. Two regimes:
//   * z < 1: the ascending series
//       E_nu(z) = Gamma(1-nu) z^{nu-1} - sum_{k>=0} (-z)^k / (k! (k+1-nu)),
//     valid when nu is not a positive integer;
//   * z >= 1: the continued fraction
//       E_nu(z) = e^{-z} / (z+nu - 1(nu)/ (z+nu+2 - 2(nu+1)/ (...)))
//     evaluated with the modified Lentz scheme.
// Useful identities (exercised by the tests):
//   d/dz E_nu(z) = -E_{nu-1}(z),   nu E_{nu+1}(z) = e^{-z} - z E_nu(z).
inline double expint(double nu, double z) {
    if (!(z > 0.0)) throw std::domain_error("expint requires z > 0");
    const double eps = 1e-16;

    if (z < 1.0) {
        const double one_minus_nu = 1.0 - nu;
        const double r = std::round(one_minus_nu);
        if (std::abs(one_minus_nu - r) < 1e-12 && r <= 0.0)
            throw std::domain_error("expint: positive integer order not supported for z < 1");
        double sum = 0.0;
        double p = 1.0;  // (-z)^k / k!
        for (int k = 0; k < 400; ++k) {
            if (k > 0) p *= -z / static_cast<double>(k);
            const double term = p / (static_cast<double>(k) + one_minus_nu);
            sum += term;
            if (std::abs(term) <= eps * (std::abs(sum) + 1.0)) {
                return std::tgamma(one_minus_nu) * std::pow(z, nu - 1.0) - sum;
            }
        }
        throw std::runtime_error("expint: series failed to converge");
    }

    const double fpmin = 1e-300;
    double b = z + nu;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        const double a = -static_cast<double>(i) * (nu - 1.0 + static_cast<double>(i));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) <= eps) return h * std::exp(-z);
    }
    throw std::runtime_error("expint: continued fraction failed to converge");
}

}  // namespace susyforge
