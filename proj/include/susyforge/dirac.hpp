#pragma once

// Pseudoscalar Dirac adapter.
//
// A 1D Dirac system with mass m, energy E and pseudoscalar profile q(x)
// is handled in component form,
//
//     Phi1' =  q Phi1 - (E + m) Phi2,
//     Phi2' = -q Phi2 + (E - m) Phi1,
//
// whose upper component satisfies Phi1'' + (eps - V) Phi1 = 0 with
// V = q^2 + q' and eps = E^2 - m^2. Transformed potentials coming out of
// the confluent engine are re-parameterized as q1 = psi_hat'/psi_hat.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "confluent.hpp"
#include "grid.hpp"
#include "schrodinger.hpp"

namespace susyforge {

// Pseudoscalar profile plus the kinematic constants. The derivative
// channel is analytic for the builtin profile q = -x^2 and a stencil
// derivative for tabulated input.
struct PseudoscalarSystem {
    GridFn q;
    GridFn dq;
    double m = 1.0;
    double E = 1.0;
    bool builtin_inverted_parabola = false;

    // q(x) = -x^2, the inverted-parabola profile of the worked example.
    static PseudoscalarSystem builtin(const Grid& g, double m, double E) {
        check_mass(m);
        PseudoscalarSystem sys;
        sys.q = sample(g, [](double x) { return -x * x; });
        sys.dq = sample(g, [](double x) { return -2.0 * x; });
        sys.m = m;
        sys.E = E;
        sys.builtin_inverted_parabola = true;
        return sys;
    }

    static PseudoscalarSystem tabulated(GridFn q, double m, double E) {
        check_mass(m);
        PseudoscalarSystem sys;
        sys.dq = deriv1(q);
        sys.q = std::move(q);
        sys.m = m;
        sys.E = E;
        return sys;
    }

private:
    static void check_mass(double m) {
        if (!(m > 0.0)) throw std::invalid_argument("PseudoscalarSystem: mass must be positive");
    }
};

struct Spinor {
    GridFn phi1;
    GridFn phi2;
    double m = 1.0;
    double E = 1.0;
    bool degenerate = false;  // k1 = k2 = 0 produced the zero spinor
};

// Schrodinger reduction: V = q^2 + q', eps = E^2 - m^2. The builtin
// profile maps to the exact quartic potential x^4 - 2x.
inline std::pair<PotentialSpec, double> to_schrodinger(const PseudoscalarSystem& sys) {
    double eps = sys.E * sys.E - sys.m * sys.m;
    if (sys.builtin_inverted_parabola) return {PotentialSpec::quartic_dirac(), eps};
    GridFn V = zip(sys.q, sys.dq, [](double qv, double dqv) { return qv * qv + dqv; });
    return {PotentialSpec::tabulated(V), eps};
}

// Closed-form spinor on the mass shell |E| = m. For E = +m:
//
//     Phi2 = k2 e^{-Q},   Phi1 = e^{Q} [k1 - 2m int_a^x Phi2 e^{-Q}],
//
// with Q = int_a^x q; all integrals are left-anchored on the grid, so
// the normalization is Phi1(a) = k1, Phi2(a) = k2. E = -m uses the
// mirrored formula. k1 = k2 = 0 yields the zero spinor, flagged
// degenerate rather than rejected.
inline Spinor spinor_at_Em(const PseudoscalarSystem& sys, double k1, double k2) {
    if (std::abs(std::abs(sys.E) - sys.m) > 1e-12 * (1.0 + sys.m))
        throw std::invalid_argument("spinor_at_Em: closed form requires |E| = m");
    const Grid& g = sys.q.grid;
    GridFn Q = cumint(sys.q, 0);

    Spinor sp;
    sp.m = sys.m;
    sp.E = sys.E;
    sp.degenerate = (k1 == 0.0 && k2 == 0.0);
    sp.phi1 = GridFn(g);
    sp.phi2 = GridFn(g);

    if (sys.E > 0.0) {
        // Phi2' = -q Phi2 exactly; Phi1 by variation of constants.
        GridFn integrand = map(Q, [k2](double qv) { return k2 * std::exp(-2.0 * qv); });
        GridFn R = cumint(integrand, 0);
        for (std::size_t i = 0; i < g.n; ++i) {
            double eq = std::exp(Q.values[i]);
            sp.phi2.values[i] = k2 * std::exp(-Q.values[i]);
            sp.phi1.values[i] = eq * (k1 - 2.0 * sys.m * R.values[i]);
        }
    } else {
        // E = -m: Phi1' = q Phi1 exactly; Phi2 by variation of constants.
        GridFn integrand = map(Q, [k1](double qv) { return k1 * std::exp(2.0 * qv); });
        GridFn R = cumint(integrand, 0);
        for (std::size_t i = 0; i < g.n; ++i) {
            double eq = std::exp(-Q.values[i]);
            sp.phi1.values[i] = k1 * std::exp(Q.values[i]);
            sp.phi2.values[i] = eq * (k2 - 2.0 * sys.m * R.values[i]);
        }
    }
    return sp;
}

// First-order residuals of the component system, for validation:
// r1 = Phi1' - q Phi1 + (E+m) Phi2, r2 = Phi2' + q Phi2 - (E-m) Phi1,
// with the derivative channels reconstructed by deriv1.
inline std::pair<GridFn, GridFn> spinor_residual(const PseudoscalarSystem& sys, const Spinor& sp) {
    require_same_grid(sys.q, sp.phi1, "spinor_residual");
    GridFn d1 = deriv1(sp.phi1);
    GridFn d2 = deriv1(sp.phi2);
    const std::size_t n = sys.q.grid.n;
    GridFn r1(sys.q.grid), r2(sys.q.grid);
    for (std::size_t i = 0; i < n; ++i) {
        double qv = sys.q.values[i];
        r1.values[i] = d1.values[i] - qv * sp.phi1.values[i] + (sp.E + sp.m) * sp.phi2.values[i];
        r2.values[i] = d2.values[i] + qv * sp.phi2.values[i] - (sp.E - sp.m) * sp.phi1.values[i];
    }
    return {std::move(r1), std::move(r2)};
}

// Transformed pseudoscalar profile q1 = psi_hat'/psi_hat. The state must
// be nodeless on the working domain; a sign change or exact zero is a
// hard error naming the location.
inline GridFn transformed_q(const TransformOutput& out) {
    const GridFn& p = out.psi_hat;
    const Grid& g = p.grid;
    for (std::size_t i = 0; i < g.n; ++i) {
        bool zero = p.values[i] == 0.0;
        bool flip = i + 1 < g.n && p.values[i] * p.values[i + 1] < 0.0;
        if (zero || flip) {
            std::ostringstream msg;
            msg << "transformed_q: psi_hat has a node near x = " << g.x(i)
                << "; the profile q1 = psi_hat'/psi_hat needs a nodeless state";
            throw NodeObstructionError(msg.str());
        }
    }
    return zip(out.dpsi_hat, p, [](double d, double v) { return d / v; });
}

// Seed state for transforms of the builtin profile: u = e^{-x^3/3} with
// its analytic derivative, a zero-energy solution of the quartic
// potential. Sampled analytically so that the engine's left-anchored
// cumulative integrals are the only quadrature in the pipeline.
inline SolutionPair cubic_seed(const Grid& g) {
    SolutionPair u;
    u.psi = sample(g, [](double x) { return std::exp(-x * x * x / 3.0); });
    u.dpsi = sample(g, [](double x) { return -x * x * std::exp(-x * x * x / 3.0); });
    u.energy = 0.0;
    u.potential = PotentialSpec::quartic_dirac();
    return u;
}

}  // namespace susyforge
