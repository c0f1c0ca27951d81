#pragma once

// Fokker-Planck adapter (constant diffusion 1/2).
//
// The drift system  dg/dt = 1/2 g'' + (U' g)'  separates with
// g = e^{-U - k t} Psi into a Schrodinger problem
//
//     Psi'' + (eps - V1) Psi = 0,   V1 = (U')^2 - U'',   eps = 2k.
//
// Transformed outputs of the confluent engine are converted back into a
// new drift Vdrift = -log psi_hat and the stationary density
// g = psi_hat^2 (time factor e^{-kt} carried symbolically as
// `time_factor_rate`, never sampled).

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "confluent.hpp"
#include "grid.hpp"
#include "schrodinger.hpp"
#include "specfun.hpp"

namespace susyforge {

// The transformed state is nonpositive over the whole working domain,
// so no drift orientation exists.
class NonpositiveStateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Drift function plus separation rate. Derivative channels are analytic
// for the builtin parabolic drift U = x^2/2 and stencil-based otherwise.
struct DriftSystem {
    GridFn U;
    GridFn dU;
    GridFn d2U;
    double k = 0.0;
    bool builtin_parabolic = false;

    static DriftSystem builtin(const Grid& g, double k) {
        DriftSystem sys;
        sys.U = sample(g, [](double x) { return x * x / 2.0; });
        sys.dU = sample(g, [](double x) { return x; });
        sys.d2U = sample(g, [](double) { return 1.0; });
        sys.k = k;
        sys.builtin_parabolic = true;
        return sys;
    }

    static DriftSystem tabulated(GridFn U, double k) {
        DriftSystem sys;
        sys.dU = deriv1(U);
        sys.d2U = deriv2(U);
        sys.U = std::move(U);
        sys.k = k;
        return sys;
    }
};

// Transformed drift and stationary density. When built from a transform
// the state channels are kept so that the residual can be evaluated in
// its smooth product form; `sentinel_nodes` lists exact zeros of
// psi_hat, where Vdrift carries a +DBL_MAX sentinel.
struct FPStationary {
    GridFn Vdrift;
    GridFn g;
    GridFn psi_hat;
    GridFn dpsi_hat;
    bool has_state = false;
    std::vector<std::size_t> sentinel_nodes;
    double time_factor_rate = 0.0;
};

// V1 = (U')^2 - U'', eps = 2k. The builtin drift maps to the exact
// shifted-oscillator potential x^2 - 1.
inline std::pair<PotentialSpec, double> drift_to_potential(const DriftSystem& sys) {
    double eps = 2.0 * sys.k;
    if (sys.builtin_parabolic) return {PotentialSpec::oscillator_fp(), eps};
    GridFn V = zip(sys.dU, sys.d2U, [](double d1, double d2) { return d1 * d1 - d2; });
    return {PotentialSpec::tabulated(V), eps};
}

// Seed u = e^{-x^2/2} H_k(x), an eigenstate of V1 = x^2 - 1 at energy
// 2k, with the analytic derivative u' = e^{-x^2/2} (2k H_{k-1} - x H_k).
inline SolutionPair seed_from_hermite(int k, const Grid& g) {
    if (k < 0) throw std::invalid_argument("seed_from_hermite: k must be nonnegative");
    SolutionPair u;
    u.psi = sample(g, [k](double x) { return std::exp(-x * x / 2.0) * hermite(k, x); });
    u.dpsi = sample(g, [k](double x) {
        double lower = k > 0 ? 2.0 * k * hermite(k - 1, x) : 0.0;
        return std::exp(-x * x / 2.0) * (lower - x * hermite(k, x));
    });
    u.energy = 2.0 * k;
    u.potential = PotentialSpec::oscillator_fp();
    return u;
}

// Convert a transformed state into a drift system: Vdrift = -log|psi_hat|,
// g = psi_hat^2. Hard errors: gamma made D vanish somewhere
// (SingularGammaError listing the intervals), or the state has no
// positive part at all (NonpositiveStateError). Isolated sign changes
// inherited from seed nodes are allowed; the drift uses |psi_hat| and
// exact zeros get a +DBL_MAX sentinel.
inline FPStationary transformed_drift(const TransformOutput& out) {
    const Grid& g = out.psi_hat.grid;
    if (!out.singular_nodes.empty()) {
        std::ostringstream msg;
        msg << "transformed_drift: gamma = " << out.gamma
            << " is singular; D = gamma + I vanishes in";
        for (auto [lo, hi] : singular_intervals(g, out.singular_nodes))
            msg << " [" << lo << ", " << hi << "]";
        throw SingularGammaError(msg.str());
    }
    double pmax = *std::max_element(out.psi_hat.values.begin(), out.psi_hat.values.end());
    if (!(pmax > 0.0)) {
        std::ostringstream msg;
        msg << "transformed_drift: psi_hat has no positive part on [" << g.a << ", " << g.b
            << "]; no drift orientation exists";
        throw NonpositiveStateError(msg.str());
    }

    FPStationary st;
    st.Vdrift = GridFn(g);
    st.g = GridFn(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        double v = out.psi_hat.values[i];
        st.g.values[i] = v * v;
        if (v == 0.0) {
            st.Vdrift.values[i] = DBL_MAX;
            st.sentinel_nodes.push_back(i);
        } else {
            st.Vdrift.values[i] = -std::log(std::abs(v));
        }
    }
    st.psi_hat = out.psi_hat;
    st.dpsi_hat = out.dpsi_hat;
    st.has_state = true;
    st.time_factor_rate = out.energy / 2.0;
    return st;
}

// Pair a drift with its density without a transform backing it (used by
// tests and file-driven flows). No state channels are attached.
inline FPStationary stationary_from_drift(const GridFn& Vdrift, const GridFn& g) {
    require_same_grid(Vdrift, g, "stationary_from_drift");
    FPStationary st;
    st.Vdrift = Vdrift;
    st.g = g;
    return st;
}

// Stationary residual -1/2 g'' - (Vdrift' g)'. With state channels
// present the identity Vdrift' g = -psi_hat psi_hat' turns it into the
// smooth product form -1/2 g'' + (psi_hat psi_hat')', which stays
// regular across seed nodes; only the four boundary nodes at each end
// are masked. Without channels the drift is differentiated directly and
// an 8-node dilation around sentinel or non-finite drift nodes is
// masked as well.
inline GridFn fp_residual(const FPStationary& st) {
    const Grid& grid = st.g.grid;
    const std::size_t n = grid.n;
    GridFn res(grid);

    if (st.has_state) {
        GridFn flux = zip(st.psi_hat, st.dpsi_hat, [](double p, double dp) { return p * dp; });
        GridFn dflux = deriv1(flux);
        GridFn d2g = deriv2(st.g);
        for (std::size_t i = 0; i < n; ++i)
            res.values[i] = -0.5 * d2g.values[i] + dflux.values[i];
    } else {
        GridFn vp = deriv1(st.Vdrift);
        GridFn flux = zip(vp, st.g, [](double a, double b) { return a * b; });
        GridFn dflux = deriv1(flux);
        GridFn d2g = deriv2(st.g);
        std::vector<bool> bad(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            res.values[i] = -0.5 * d2g.values[i] - dflux.values[i];
            if (!std::isfinite(st.Vdrift.values[i]) || std::abs(st.Vdrift.values[i]) == DBL_MAX ||
                !std::isfinite(vp.values[i]))
                bad[i] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!bad[i]) continue;
            std::size_t lo = i >= 8 ? i - 8 : 0;
            std::size_t hi = std::min(n - 1, i + 8);
            for (std::size_t j = lo; j <= hi; ++j) res.values[j] = 0.0;
        }
    }

    const std::size_t band = 4;
    for (std::size_t i = 0; i < n; ++i)
        if (i < band || i + band >= n) res.values[i] = 0.0;
    for (std::size_t s : st.sentinel_nodes) {
        std::size_t lo = s >= 8 ? s - 8 : 0;
        std::size_t hi = std::min(n - 1, s + 8);
        for (std::size_t i = lo; i <= hi; ++i) res.values[i] = 0.0;
    }
    return res;
}

}  // namespace susyforge
