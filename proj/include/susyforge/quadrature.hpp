#pragma once

// Scalar quadrature and root bracketing helpers. These are deliberately
// simple, defensive routines: the oracle catalog uses them to evaluate the
// handful of closed-form expressions that carry an integral with no
// elementary antiderivative, and the tests use them as independent checks
// against the grid-based kernels.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace susyforge {

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw std::runtime_error("adaptive_simpson: recursion limit reached");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with Richardson correction. `tol` is an
// absolute tolerance on the result.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("adaptive_simpson: endpoints must be finite");
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return sign * detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Bisection on a bracketing interval. Returns the midpoint of the final
// bracket; requires a sign change on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int k = 0; k < iters; ++k) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * (1.0 + std::abs(lo) + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// Scan [lo, hi] with `steps` uniform probes and return the first bracketed
// root, if any.
template <class F>
std::optional<double> find_root_scan(F&& f, double lo, double hi, int steps = 2000) {
    double prev_x = lo;
    double prev_f = f(lo);
    if (prev_f == 0.0) return lo;
    for (int k = 1; k <= steps; ++k) {
        double x = lo + (hi - lo) * static_cast<double>(k) / steps;
        double fx = f(x);
        if (fx == 0.0) return x;
        if (std::isfinite(prev_f) && std::isfinite(fx) && std::signbit(prev_f) != std::signbit(fx))
            return bisect(f, prev_x, x);
        prev_x = x;
        prev_f = fx;
    }
    return std::nullopt;
}

}  // namespace susyforge
