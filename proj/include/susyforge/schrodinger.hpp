#pragma once

// Initial-value integration of the stationary Schrodinger equation
//   psi'' + (E - V(x)) psi = 0            (homogeneous, Numerov)
//   psi'' + (lambda - V(x)) psi = s(x)    (inhomogeneous, RK4)
// together with Wronskians and residual diagnostics.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "grid.hpp"

namespace susyforge {

namespace detail {

// 4-point Lagrange evaluation on a (possibly non-uniform) strictly
// increasing table.
inline double table_eval(const std::vector<double>& xs, const std::vector<double>& vs, double xq) {
    const double slack = 1e-12 * (1.0 + std::abs(xs.front()) + std::abs(xs.back()));
    if (xq < xs.front() - slack || xq > xs.back() + slack)
        throw std::domain_error("tabulated potential: point " + std::to_string(xq) +
                                " outside the tabulated range");
    auto it = std::upper_bound(xs.begin(), xs.end(), xq);
    long long cell = std::clamp<long long>(static_cast<long long>(it - xs.begin()) - 1, 0,
                                           static_cast<long long>(xs.size()) - 2);
    long long w = std::clamp<long long>(cell - 1, 0, static_cast<long long>(xs.size()) - 4);
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) {
        double lj = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m == j) continue;
            lj *= (xq - xs[w + m]) / (xs[w + j] - xs[w + m]);
        }
        acc += lj * vs[w + j];
    }
    return acc;
}

}  // namespace detail

// A 1D potential: a builtin analytic family or tabulated samples.
// Builtins:
//   constant(c)     V = c^2
//   quartic_dirac() V = x^4 - 2x
//   oscillator_fp() V = x^2 - 1
// Tabulated data carries its own abscissae; `transformed` is a tabulated
// potential produced by a transform (kept as a distinct label so outputs
// can be chained and still identified).
class PotentialSpec {
public:
    static PotentialSpec constant(double c) {
        PotentialSpec p;
        p.kind_ = Kind::constant;
        p.c_ = c;
        return p;
    }
    static PotentialSpec quartic_dirac() {
        PotentialSpec p;
        p.kind_ = Kind::quartic_dirac;
        return p;
    }
    static PotentialSpec oscillator_fp() {
        PotentialSpec p;
        p.kind_ = Kind::oscillator_fp;
        return p;
    }
    static PotentialSpec tabulated(std::vector<double> xs, std::vector<double> vs) {
        if (xs.size() != vs.size() || xs.size() < 4)
            throw std::invalid_argument("tabulated potential needs at least 4 samples");
        for (std::size_t i = 0; i + 1 < xs.size(); ++i)
            if (!(xs[i] < xs[i + 1]))
                throw std::invalid_argument("tabulated potential needs strictly increasing x");
        PotentialSpec p;
        p.kind_ = Kind::tabulated;
        p.xs_ = std::move(xs);
        p.vs_ = std::move(vs);
        return p;
    }
    static PotentialSpec tabulated(const GridFn& f) {
        std::vector<double> xs(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) xs[i] = f.x(i);
        return tabulated(std::move(xs), f.values);
    }
    // A tabulated potential coming out of a transform; behaves like
    // `tabulated` but keeps the provenance label.
    static PotentialSpec transformed(const GridFn& v3) {
        PotentialSpec p = tabulated(v3);
        p.kind_ = Kind::transformed;
        return p;
    }

    std::string_view label() const {
        switch (kind_) {
            case Kind::constant: return "constant";
            case Kind::quartic_dirac: return "quartic_dirac";
            case Kind::oscillator_fp: return "oscillator_fp";
            case Kind::tabulated: return "tabulated";
            case Kind::transformed: return "transformed";
        }
        return "?";
    }

    bool is_tabulated() const { return kind_ == Kind::tabulated || kind_ == Kind::transformed; }

    // Parameter c of the constant family (V = c^2).
    double param_c() const {
        if (kind_ != Kind::constant)
            throw std::logic_error("param_c is only defined for the constant family");
        return c_;
    }

    double operator()(double x) const {
        switch (kind_) {
            case Kind::constant: return c_ * c_;
            case Kind::quartic_dirac: return x * x * x * x - 2.0 * x;
            case Kind::oscillator_fp: return x * x - 1.0;
            case Kind::tabulated:
            case Kind::transformed: return detail::table_eval(xs_, vs_, x);
        }
        throw std::logic_error("unreachable");
    }

    GridFn sample_on(const Grid& g) const {
        GridFn out(g);
        for (std::size_t i = 0; i < g.n; ++i) out.values[i] = (*this)(g.x(i));
        return out;
    }

private:
    enum class Kind { constant, quartic_dirac, oscillator_fp, tabulated, transformed };
    PotentialSpec() = default;
    Kind kind_ = Kind::constant;
    double c_ = 0.0;
    std::vector<double> xs_, vs_;
};

// Initial data (value, slope) at an anchor abscissa that must coincide
// with a grid node.
struct CauchyData {
    double x0 = 0.0;
    double value = 0.0;
    double slope = 0.0;
};

// A solution sampled on a grid together with its derivative channel.
// `overflow_nodes` lists nodes where |psi| exceeded 1e300 during
// integration (exponential blowup is reported, not fatal).
struct SolutionPair {
    GridFn psi;
    GridFn dpsi;
    double energy = 0.0;
    PotentialSpec potential = PotentialSpec::constant(0.0);
    std::vector<std::size_t> overflow_nodes;
};

namespace detail {

inline void flag_overflow(std::vector<std::size_t>& nodes, std::size_t i, double v) {
    if (!(std::abs(v) <= 1e300)) nodes.push_back(i);
}

}  // namespace detail

// Homogeneous solve: psi'' = (V - E) psi, integrated by the Numerov
// recurrence in both directions from ic.x0 (which must be a grid node).
// The first step away from the anchor uses a 5th-order Taylor expansion
// whose f-derivatives come from the 4th-order stencils. The derivative
// channel is reconstructed from the value sequence with deriv1.
inline SolutionPair solve_ivp(const PotentialSpec& V, double E, const CauchyData& ic, const Grid& grid) {
    if (ic.value == 0.0 && ic.slope == 0.0)
        throw std::invalid_argument("solve_ivp: degenerate Cauchy data (0,0)");
    const std::size_t n = grid.n;
    const std::size_t i0 = grid.index_of(ic.x0);
    const double h = grid.h;

    GridFn f(grid);
    for (std::size_t i = 0; i < n; ++i) f.values[i] = V(grid.x(i)) - E;
    const GridFn f1 = deriv1(f);
    const GridFn f2 = deriv2(f);
    const GridFn f3 = deriv1(f2);

    GridFn psi(grid);
    std::vector<std::size_t> overflow;

    const double p0 = ic.value, q0 = ic.slope;
    const double g0 = f.values[i0], g1 = f1.values[i0], g2 = f2.values[i0], g3 = f3.values[i0];
    auto taylor = [&](double s) {
        return p0 + s * q0 + s * s / 2.0 * (g0 * p0) + s * s * s / 6.0 * (g1 * p0 + g0 * q0) +
               s * s * s * s / 24.0 * (g2 * p0 + 2.0 * g1 * q0 + g0 * g0 * p0) +
               s * s * s * s * s / 120.0 * (g3 * p0 + 3.0 * g2 * q0 + 4.0 * g0 * g1 * p0 + g0 * g0 * q0);
    };

    psi.values[i0] = p0;
    const double h2_12 = h * h / 12.0;
    auto sweep = [&](long long from, long long to, long long step) {
        // Numerov: (1 - w_{k+1}) psi_{k+1} = (2 + 10 w_k) psi_k - (1 - w_{k-1}) psi_{k-1},
        // w_i = -h^2 f_i / 12 with psi'' = f psi.
        for (long long i = from; i != to; i += step) {
            const auto k = static_cast<std::size_t>(i);
            const auto km = static_cast<std::size_t>(i - step);
            const auto kp = static_cast<std::size_t>(i + step);
            const double num = (2.0 + 10.0 * h2_12 * f.values[k]) * psi.values[k] -
                               (1.0 - h2_12 * f.values[km]) * psi.values[km];
            const double den = 1.0 - h2_12 * f.values[kp];
            psi.values[kp] = num / den;
            detail::flag_overflow(overflow, kp, psi.values[kp]);
        }
    };

    if (i0 + 1 < n) {
        psi.values[i0 + 1] = taylor(h);
        detail::flag_overflow(overflow, i0 + 1, psi.values[i0 + 1]);
        if (i0 + 2 < n) sweep(static_cast<long long>(i0) + 1, static_cast<long long>(n) - 1, 1);
    }
    if (i0 >= 1) {
        psi.values[i0 - 1] = taylor(-h);
        detail::flag_overflow(overflow, i0 - 1, psi.values[i0 - 1]);
        if (i0 >= 2) sweep(static_cast<long long>(i0) - 1, 0, -1);
    }

    SolutionPair out;
    out.psi = psi;
    out.dpsi = deriv1(psi);
    out.energy = E;
    out.potential = V;
    out.overflow_nodes = std::move(overflow);
    return out;
}

// Inhomogeneous solve: psi'' + (lambda - V) psi = source, i.e.
// psi'' = (V - lambda) psi + source, integrated by classical RK4 on the
// first-order system in both directions from ic.x0. Off-node values of
// the source are obtained by cubic interpolation; the derivative channel
// is carried by the stepper. Zero Cauchy data is legitimate here (it
// selects the pure particular solution).
inline SolutionPair solve_inhomogeneous(const PotentialSpec& V, double lambda, const GridFn& source,
                                        const CauchyData& ic, const Grid& grid) {
    if (source.grid != grid)
        throw std::invalid_argument("solve_inhomogeneous: source must be sampled on the working grid");
    const std::size_t n = grid.n;
    const std::size_t i0 = grid.index_of(ic.x0);

    auto src = [&](double x, std::size_t hint, bool on_node) {
        return on_node ? source.values[hint] : interp_cubic(source, x);
    };
    auto rhs = [&](double x, double p, double q, double s) {
        (void)q;
        return (V(x) - lambda) * p + s;
    };

    GridFn psi(grid), dpsi(grid);
    std::vector<std::size_t> overflow;
    psi.values[i0] = ic.value;
    dpsi.values[i0] = ic.slope;

    auto sweep = [&](long long from, long long to, long long step) {
        double p = ic.value, q = ic.slope;
        for (long long i = from; i != to; i += step) {
            const auto k = static_cast<std::size_t>(i);
            const auto kp = static_cast<std::size_t>(i + step);
            const double x = grid.x(k);
            const double hh = static_cast<double>(step) * grid.h;
            const double xm = x + 0.5 * hh;
            const double xp = grid.x(kp);
            const double s0 = src(x, k, true);
            const double sm = src(xm, k, false);
            const double s1 = src(xp, kp, true);

            const double k1p = q;
            const double k1q = rhs(x, p, q, s0);
            const double k2p = q + 0.5 * hh * k1q;
            const double k2q = rhs(xm, p + 0.5 * hh * k1p, k2p, sm);
            const double k3p = q + 0.5 * hh * k2q;
            const double k3q = rhs(xm, p + 0.5 * hh * k2p, k3p, sm);
            const double k4p = q + hh * k3q;
            const double k4q = rhs(xp, p + hh * k3p, k4p, s1);

            p += hh / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            q += hh / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            psi.values[kp] = p;
            dpsi.values[kp] = q;
            detail::flag_overflow(overflow, kp, p);
        }
    };

    if (i0 + 1 < n) sweep(static_cast<long long>(i0), static_cast<long long>(n) - 1, 1);
    if (i0 >= 1) sweep(static_cast<long long>(i0), 0, -1);

    SolutionPair out;
    out.psi = std::move(psi);
    out.dpsi = std::move(dpsi);
    out.energy = lambda;
    out.potential = V;
    out.overflow_nodes = std::move(overflow);
    return out;
}

// Nodewise Wronskian W = f g' - f' g.
inline GridFn wronskian2(const SolutionPair& f, const SolutionPair& g) {
    require_same_grid(f.psi, g.psi, "wronskian2");
    GridFn out(f.psi.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = f.psi.values[i] * g.dpsi.values[i] - f.dpsi.values[i] * g.psi.values[i];
    return out;
}

// Defect of psi as a solution at energy E: psi'' + (E - V) psi evaluated
// with the 4th-order second-derivative stencil. The four nodes at each
// boundary are masked (set to zero) because the one-sided stencil rows
// there have a larger error constant.
inline GridFn residual(const PotentialSpec& V, double E, const GridFn& psi) {
    GridFn res = deriv2(psi);
    for (std::size_t i = 0; i < psi.size(); ++i)
        res.values[i] += (E - V(psi.x(i))) * psi.values[i];
    const std::size_t band = 4;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (i < band || i + band >= psi.size()) res.values[i] = 0.0;
    return res;
}

}  // namespace susyforge
