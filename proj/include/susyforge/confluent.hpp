#pragma once

// Second-order confluent Darboux transformations.
//
// Given a seed solution u of psi'' + (lambda - V1) psi = 0 and a real
// parameter gamma, the transformed potential is
//
//     V3 = V1 - 2 (log D)''  with  D(x) = gamma + I(x),  I(x) = int_a^x u^2,
//
// which expands to V3 = V1 - 4 u u'/D + 2 u^4/D^2. The anchor a is the
// left endpoint of the working grid, so gamma here is the *engine*
// normalization: closed forms quoted with an indefinite antiderivative F
// of u^2 correspond to gamma_engine = gamma_reference + F(a).
//
// Three state constructions are provided:
//   * missing_state: the solution at the doubled energy lambda itself,
//       psi_hat = (u/D) (C1 + C2 J),  J(x) = int_a^x D^2/u^2,
//   * transform_at_energy: maps a solution Psi at a different energy eps,
//       psi_hat = (lambda - eps) Psi - (u/D) (u Psi' - u' Psi),
//   * chained_darboux: the same map realized as two first-order Darboux
//     steps through the intermediate superpartner, usable only away from
//     the nodes of u. Provided for cross-validation.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "schrodinger.hpp"

namespace susyforge {

// gamma makes D = gamma + I vanish somewhere on the grid, so the
// transformation is singular there.
class SingularGammaError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The requested construction needs 1/u^2 integrable, but u changes sign
// (or vanishes) inside the working window.
class NodeObstructionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Seed state u together with the cumulative quantities the transformation
// reuses. gamma is the engine normalization (see header comment).
struct ConfluentSeed {
    SolutionPair u;
    double gamma = 0.0;
    GridFn I;   // int_a^x u^2
    GridFn D;   // gamma + I
    double delta_sing = 0.0;
    std::vector<std::size_t> singular_nodes;  // |D| < delta_sing
    double i_min = 0.0;
    double i_max = 0.0;
};

// Everything a transformation produces. `energy` is the energy of
// psi_hat in the transformed potential. The residual channel is
// psi_hat'' + (energy - V3) psi_hat with four boundary nodes at each end
// masked to zero, plus an 8-node dilation around every singular node.
// C1/C2 are NaN unless the state came from missing_state. w_drift is a
// diagnostic for transform_at_energy (sup |W(u, u1) - D| for the
// auxiliary inhomogeneous solution u1), zero otherwise.
struct TransformOutput {
    GridFn V3;
    GridFn psi_hat;
    GridFn dpsi_hat;
    double energy = 0.0;
    std::vector<std::size_t> singular_nodes;
    GridFn residual;
    double residual_sup = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    double C1 = std::numeric_limits<double>::quiet_NaN();
    double C2 = std::numeric_limits<double>::quiet_NaN();
    double w_drift = 0.0;
};

namespace detail {

inline double sanitize_huge(double v, double sign_hint) {
    if (std::isfinite(v)) return v;
    double s = sign_hint;
    if (s == 0.0 || !std::isfinite(s)) s = 1.0;
    return std::copysign(DBL_MAX, s);
}

inline int sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

// Precompute I, D and the singularity classification for a seed.
// delta_sing = 1e-8 * (1 + |gamma| + max I) is the threshold below which
// |D| counts as a zero crossing.
inline ConfluentSeed build_seed(const SolutionPair& u, double gamma) {
    const GridFn& uv = u.psi;
    double umax = sup_abs(uv);
    if (umax == 0.0)
        throw std::invalid_argument("build_seed: seed state is identically zero");

    ConfluentSeed seed;
    seed.u = u;
    seed.gamma = gamma;
    seed.I = cumint(zip(uv, uv, [](double a, double b) { return a * b; }), 0);
    seed.D = map(seed.I, [gamma](double v) { return gamma + v; });
    seed.i_min = *std::min_element(seed.I.values.begin(), seed.I.values.end());
    seed.i_max = *std::max_element(seed.I.values.begin(), seed.I.values.end());
    seed.delta_sing = 1e-8 * (1.0 + std::abs(gamma) + seed.i_max);
    const std::size_t n = seed.D.values.size();
    std::vector<char> flagged(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(seed.D.values[i]) < seed.delta_sing) flagged[i] = 1;
    // a sign change between adjacent nodes is a zero crossing even when
    // neither nodal value is small by itself
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (detail::sgn(seed.D.values[i]) * detail::sgn(seed.D.values[i + 1]) < 0)
            flagged[i] = flagged[i + 1] = 1;
    for (std::size_t i = 0; i < n; ++i)
        if (flagged[i]) seed.singular_nodes.push_back(i);
    return seed;
}

// Group flagged node indices into closed abscissa intervals [x_lo, x_hi].
inline std::vector<std::pair<double, double>> singular_intervals(
        const Grid& g, const std::vector<std::size_t>& nodes) {
    std::vector<std::pair<double, double>> out;
    std::size_t k = 0;
    while (k < nodes.size()) {
        std::size_t j = k;
        while (j + 1 < nodes.size() && nodes[j + 1] == nodes[j] + 1) ++j;
        out.emplace_back(g.x(nodes[k]), g.x(nodes[j]));
        k = j + 1;
    }
    return out;
}

// Residual of the transformed state with boundary and singular masks
// applied (see TransformOutput).
inline GridFn masked_residual(const GridFn& V3, double energy, const GridFn& psi,
                              const std::vector<std::size_t>& singular_nodes) {
    require_same_grid(V3, psi, "masked_residual");
    GridFn r = deriv2(psi);
    const std::size_t n = r.values.size();
    for (std::size_t i = 0; i < n; ++i)
        r.values[i] += (energy - V3.values[i]) * psi.values[i];
    const std::size_t band = 4;
    for (std::size_t i = 0; i < n; ++i)
        if (i < band || i + band >= n) r.values[i] = 0.0;
    for (std::size_t s : singular_nodes) {
        std::size_t lo = s >= 8 ? s - 8 : 0;
        std::size_t hi = std::min(n - 1, s + 8);
        for (std::size_t i = lo; i <= hi; ++i) r.values[i] = 0.0;
    }
    return r;
}

// V3 = V1 - 4 u u'/D + 2 u^4/D^2 on the seed's grid. Nodes where D
// crosses zero receive the sentinel copysign(DBL_MAX, 2u^4 - 4 u u' D)
// instead of an overflowing quotient.
inline GridFn transformed_potential(const PotentialSpec& V1, const ConfluentSeed& seed) {
    const Grid& g = seed.u.psi.grid;
    GridFn v3(g);
    std::vector<bool> is_sing(g.n, false);
    for (std::size_t s : seed.singular_nodes) is_sing[s] = true;
    for (std::size_t i = 0; i < g.n; ++i) {
        double x = g.x(i);
        double u = seed.u.psi.values[i];
        double du = seed.u.dpsi.values[i];
        double D = seed.D.values[i];
        if (is_sing[i]) {
            double num = 2.0 * u * u * u * u - 4.0 * u * du * D;
            v3.values[i] = std::copysign(DBL_MAX, num == 0.0 ? 1.0 : num);
            continue;
        }
        double u2 = u * u;
        v3.values[i] = V1(x) - 4.0 * u * du / D + 2.0 * u2 * u2 / (D * D);
    }
    return v3;
}

namespace detail {

inline void finish_output(TransformOutput& out, const ConfluentSeed& seed) {
    out.singular_nodes = seed.singular_nodes;
    out.gamma = seed.gamma;
    out.lambda = seed.u.energy;
    out.residual = masked_residual(out.V3, out.energy, out.psi_hat, out.singular_nodes);
    out.residual_sup = sup_abs(out.residual);
}

}  // namespace detail

// State of the transformed potential at the seed energy itself:
// psi_hat = (u/D)(C1 + C2 J) with J = int_a^x D^2/u^2. The C2 branch
// requires u to keep a fixed sign on the grid; a sign change or an exact
// interior zero raises NodeObstructionError naming the offending
// interval. C1 = C2 = 0 is rejected.
inline TransformOutput missing_state(const PotentialSpec& V1, const ConfluentSeed& seed,
                                     double C1, double C2) {
    if (C1 == 0.0 && C2 == 0.0)
        throw std::invalid_argument("missing_state: C1 and C2 cannot both vanish");
    const Grid& g = seed.u.psi.grid;
    const GridFn& u = seed.u.psi;
    const GridFn& du = seed.u.dpsi;
    const GridFn& D = seed.D;

    GridFn bracket(g, std::vector<double>(g.n, C1));
    if (C2 != 0.0) {
        for (std::size_t i = 0; i + 1 < g.n; ++i) {
            bool zero_node = (u.values[i] == 0.0) || (u.values[i + 1] == 0.0);
            bool sign_flip = u.values[i] * u.values[i + 1] < 0.0;
            if (zero_node || sign_flip) {
                std::ostringstream msg;
                msg << "missing_state: C2 branch needs a nodeless seed, but u changes sign in ["
                    << g.x(i) << ", " << g.x(i + 1) << "]";
                throw NodeObstructionError(msg.str());
            }
        }
        GridFn integrand = zip(D, u, [](double d, double uv) {
            double q = d / uv;
            return q * q;
        });
        GridFn J = cumint(integrand, 0);
        for (std::size_t i = 0; i < g.n; ++i) bracket.values[i] += C2 * J.values[i];
    }

    TransformOutput out;
    out.V3 = transformed_potential(V1, seed);
    out.psi_hat = GridFn(g);
    out.dpsi_hat = GridFn(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        double uv = u.values[i], duv = du.values[i], Dv = D.values[i], br = bracket.values[i];
        double ph = uv / Dv * br;
        double dph = (duv / Dv - uv * uv * uv / (Dv * Dv)) * br;
        if (C2 != 0.0) dph += C2 * Dv / uv;
        out.psi_hat.values[i] = detail::sanitize_huge(ph, uv * br * Dv);
        out.dpsi_hat.values[i] = detail::sanitize_huge(dph, -uv * br);
    }
    out.energy = seed.u.energy;
    out.C1 = C1;
    out.C2 = C2;
    detail::finish_output(out, seed);
    return out;
}

// Map a solution Psi at energy eps != lambda into the transformed
// potential:
//
//   psi_hat  = (lambda - eps) Psi - (u/D) W,          W = u Psi' - u' Psi,
//   psi_hat' = (lambda - eps) (Psi' - u^2 Psi / D) - (u'/D - u^3/D^2) W.
//
// The auxiliary state u1 solving u1'' + (lambda - V1) u1 = u with
// W(u, u1) = D is also constructed (Cauchy data u1 = 0,
// u1' = D/u at the anchor, which is the grid's left endpoint unless
// u vanishes there, in which case the largest |u| node in the first
// tenth of the grid is used); its Wronskian drift sup |W(u,u1) - D| is
// stored as the w_drift diagnostic.
inline TransformOutput transform_at_energy(const PotentialSpec& V1, const ConfluentSeed& seed,
                                           const SolutionPair& psi) {
    require_same_grid(seed.u.psi, psi.psi, "transform_at_energy");
    const double lambda = seed.u.energy;
    const double eps = psi.energy;
    if (std::abs(lambda - eps) <= 1e-12 * (1.0 + std::abs(lambda)))
        throw std::invalid_argument(
            "transform_at_energy: energies coincide; use missing_state for the seed energy");

    const Grid& g = psi.psi.grid;
    const GridFn& u = seed.u.psi;
    const GridFn& du = seed.u.dpsi;
    const GridFn& D = seed.D;

    // Auxiliary inhomogeneous solution and its Wronskian drift. The ic
    // sits at the seed's largest node: anchoring at a decayed endpoint
    // would blow the homogeneous coefficient up to D/u ~ 1/u(a) and the
    // diagnostic would measure that mode's amplified integration error
    // instead of the identity it is meant to track.
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < g.n; ++i)
        if (std::abs(u.values[i]) > std::abs(u.values[anchor])) anchor = i;
    if (u.values[anchor] == 0.0)
        throw std::invalid_argument("transform_at_energy: seed vanishes on the anchor window");
    CauchyData ic{g.x(anchor), 0.0, D.values[anchor] / u.values[anchor]};
    SolutionPair u1 = solve_inhomogeneous(V1, lambda, u, ic, g);
    double drift = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double w = u.values[i] * u1.dpsi.values[i] - du.values[i] * u1.psi.values[i];
        drift = std::max(drift, std::abs(w - D.values[i]));
    }

    TransformOutput out;
    out.V3 = transformed_potential(V1, seed);
    out.psi_hat = GridFn(g);
    out.dpsi_hat = GridFn(g);
    const double dl = lambda - eps;
    for (std::size_t i = 0; i < g.n; ++i) {
        double uv = u.values[i], duv = du.values[i], Dv = D.values[i];
        double p = psi.psi.values[i], dp = psi.dpsi.values[i];
        double W = uv * dp - duv * p;
        double ph = dl * p - uv / Dv * W;
        double dph = dl * (dp - uv * uv * p / Dv) - (duv / Dv - uv * uv * uv / (Dv * Dv)) * W;
        out.psi_hat.values[i] = detail::sanitize_huge(ph, -uv * W * Dv);
        out.dpsi_hat.values[i] = detail::sanitize_huge(dph, uv * W);
    }
    out.energy = eps;
    out.w_drift = drift;
    detail::finish_output(out, seed);
    return out;
}

// Optional diagnostics for chained_darboux: the intermediate potential
// V2 = lambda - u''/u + 2 (u'/u)^2 (computed with the numerical second
// derivative of the seed) and the sign-stable subdomain actually used.
struct ChainDiagnostics {
    GridFn V2;
    double lo = 0.0, hi = 0.0;
    std::size_t i_lo = 0, i_hi = 0;
};

// The same confluent map factored through two first-order Darboux steps:
//
//   step 1 (seed u):      Psi_bar = Psi' - (u'/u) Psi
//   step 2 (seed D/u):    psi_hat = Psi_bar' - ((D/u)'/(D/u)) Psi_bar
//
// The first-step derivative is evaluated analytically,
// Psi_bar' = (lambda - eps) Psi - (u'/u) Psi_bar. The chain is only
// meaningful where u is safely nodeless, so the result is restricted to
// the longest contiguous run of nodes with |u| > 1e-2 max|u| and a fixed
// sign; outside that window the output is zero. An empty window is an
// error. Numerator/denominator forms are used so that psi = u at
// eps = lambda collapses to exact floating-point zeros.
inline GridFn chained_darboux(const SolutionPair& u, double gamma, const SolutionPair& psi,
                              ChainDiagnostics* diag = nullptr) {
    require_same_grid(u.psi, psi.psi, "chained_darboux");
    const Grid& g = u.psi.grid;
    const double umax = sup_abs(u.psi);
    if (umax == 0.0) throw std::invalid_argument("chained_darboux: seed is identically zero");
    const double thr = 1e-2 * umax;

    // Longest run of same-signed nodes with |u| above the threshold.
    std::size_t best_lo = 0, best_len = 0;
    std::size_t run_lo = 0, run_len = 0;
    int run_sign = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double v = u.psi.values[i];
        int s = detail::sgn(v);
        bool ok = std::abs(v) > thr;
        if (ok && (run_len == 0 || s == run_sign)) {
            if (run_len == 0) { run_lo = i; run_sign = s; }
            ++run_len;
        } else {
            if (run_len > best_len) { best_len = run_len; best_lo = run_lo; }
            run_len = ok ? 1 : 0;
            run_lo = i;
            run_sign = s;
        }
    }
    if (run_len > best_len) { best_len = run_len; best_lo = run_lo; }
    if (best_len < 2)
        throw std::domain_error("chained_darboux: no sign-stable subdomain with |u| above threshold");
    const std::size_t i_lo = best_lo, i_hi = best_lo + best_len - 1;

    GridFn I = cumint(zip(u.psi, u.psi, [](double a, double b) { return a * b; }), 0);
    const double dl = u.energy - psi.energy;

    GridFn out(g);
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
        double uv = u.psi.values[i], duv = u.dpsi.values[i];
        double p = psi.psi.values[i], dp = psi.dpsi.values[i];
        double Dv = gamma + I.values[i];
        // First Darboux step in Wronskian form (exact zero for psi = u).
        double bar = (dp * uv - duv * p) / uv;
        double dbar = dl * p - duv / uv * bar;
        // Second step through ubar = D/u, again numerator/denominator form.
        double ubar = Dv / uv;
        double dubar = uv - Dv * duv / (uv * uv);
        out.values[i] = (dbar * ubar - dubar * bar) / ubar;
    }

    if (diag) {
        diag->V2 = GridFn(g);
        GridFn ddu = deriv2(u.psi);
        for (std::size_t i = i_lo; i <= i_hi; ++i) {
            double uv = u.psi.values[i], duv = u.dpsi.values[i];
            double r = duv / uv;
            diag->V2.values[i] = u.energy - ddu.values[i] / uv + 2.0 * r * r;
        }
        diag->lo = g.x(i_lo);
        diag->hi = g.x(i_hi);
        diag->i_lo = i_lo;
        diag->i_hi = i_hi;
    }
    return out;
}

// Admissible gamma classification for a seed: D = gamma + I never
// vanishes iff gamma lies outside the closed interval [-i_max, -i_min],
// where [i_min, i_max] is the range of I over the grid (i_min = 0 with
// the left-endpoint anchor). `paper_offset` carries F(a) when the caller
// wants to classify reference-normalized gammas as well.
struct GammaRegularity {
    double i_min = 0.0;
    double i_max = 0.0;
    std::optional<double> paper_offset;

    bool admissible(double gamma_engine) const {
        return gamma_engine < -i_max || gamma_engine > -i_min;
    }
    bool admissible_reference(double gamma_reference) const {
        if (!paper_offset)
            throw std::logic_error("GammaRegularity: no reference offset available");
        return admissible(gamma_reference + *paper_offset);
    }
};

inline GammaRegularity gamma_regularity(const SolutionPair& u,
                                        std::optional<double> reference_offset = std::nullopt) {
    GridFn I = cumint(zip(u.psi, u.psi, [](double a, double b) { return a * b; }), 0);
    GammaRegularity r;
    r.i_min = *std::min_element(I.values.begin(), I.values.end());
    r.i_max = *std::max_element(I.values.begin(), I.values.end());
    r.paper_offset = reference_offset;
    return r;
}

}  // namespace susyforge
