#pragma once

// Closed-form reference catalog.
//
// Each entry evaluates a published closed-form expression exactly as it
// appears in the source text, typographical slips included; the catalog
// is the record of what the reference says, not of what the engine
// computes. Known divergences between the two are listed in README.md
// and show up as DISCREPANCY findings in the pair self-consistency
// tests, never as silently "fixed" formulas.
//
// Reference normalization: closed forms are quoted with indefinite
// antiderivatives, so their `gamma` parameter follows the reference
// normalization D(x) = gamma + F(x), with F a fixed antiderivative of
// u^2 (0-anchored where the reference pins values at the origin). The
// engine anchors its cumulative integral at the grid's left endpoint a;
// gamma_engine_for() converts via gamma_engine = gamma + F(a) for the
// entries that carry an offset function.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace susyforge {

using OracleParams = std::map<std::string, double>;

struct OracleReport {
    std::string name;
    double sup_abs = 0.0;
    double sup_rel = 0.0;
    double scale = 0.0;  // max |reference| over the comparison window
    std::size_t worst_node = 0;
    double worst_x = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct OracleEntry {
    std::string name;
    std::string role;    // what the closed form describes
    std::string domain;  // validity window, human readable
    double tol = 1e-8;   // default comparison tolerance
    std::function<double(double, const OracleParams&)> eval;
    // Antiderivative F of the seed's u^2 in the reference normalization;
    // absent when the entry has no seed-gamma calibration.
    std::function<double(double, const OracleParams&)> offset;
};

namespace detail {

inline double req(const OracleParams& p, const char* key, const char* entry) {
    auto it = p.find(key);
    if (it == p.end()) {
        std::ostringstream msg;
        msg << "oracle '" << entry << "': missing parameter '" << key << "'";
        throw std::invalid_argument(msg.str());
    }
    return it->second;
}

inline double kappa_of(const OracleParams& p, const char* entry) {
    double c = req(p, "c", entry);
    double eps = req(p, "eps", entry);
    if (!(eps < c * c)) {
        std::ostringstream msg;
        msg << "oracle '" << entry << "': requires eps < c^2";
        throw std::domain_error(msg.str());
    }
    return std::sqrt(c * c - eps);
}

inline double omega_of(const OracleParams& p, const char* entry) {
    double c = req(p, "c", entry);
    double eps = req(p, "eps", entry);
    if (!(eps > c * c)) {
        std::ostringstream msg;
        msg << "oracle '" << entry << "': requires eps > c^2";
        throw std::domain_error(msg.str());
    }
    return std::sqrt(eps - c * c);
}

inline int int_param(const OracleParams& p, const char* key, const char* entry) {
    double v = req(p, key, entry);
    int k = static_cast<int>(std::lround(v));
    if (std::abs(v - k) > 1e-9 || k < 0) {
        std::ostringstream msg;
        msg << "oracle '" << entry << "': parameter '" << key << "' must be a nonnegative integer";
        throw std::invalid_argument(msg.str());
    }
    return k;
}

// 3 + 10 x E_{2/3}(2 x^3 / 3), the denominator of the cubic-seed example
// family; only defined for x > 0.
inline double cubic_den(double x) {
    return 3.0 + 10.0 * x * expint(2.0 / 3.0, 2.0 * x * x * x / 3.0);
}

}  // namespace detail

// Antiderivative of u^2 for the canonical seed families, 0-anchored
// where a closed form exists.
inline double exp_decay_offset(double c, double x) {
    return -std::exp(-2.0 * c * x) / (2.0 * c);
}

inline double exp_grow_offset(double kappa, double x) {
    return std::exp(2.0 * kappa * x) / (2.0 * kappa);
}

inline double cosh_offset(double kappa, double x) {
    // u = 2 cosh(kappa x)
    return 2.0 * x + std::sinh(2.0 * kappa * x) / kappa;
}

inline double sin_offset(double omega, double x) {
    // u = sin(omega x)
    return 0.5 * x - std::sin(2.0 * omega * x) / (4.0 * omega);
}

inline double mixed_exp_offset(double kappa, double k1, double k2, double x) {
    // u = k1 e^{kappa x} + k2 e^{-kappa x}
    return k1 * k1 * std::exp(2.0 * kappa * x) / (2.0 * kappa) + 2.0 * k1 * k2 * x -
           k2 * k2 * std::exp(-2.0 * kappa * x) / (2.0 * kappa);
}

inline double cubic_seed_offset(double x) {
    // u = e^{-x^3/3}, x > 0: F(x) = -(x/3) E_{2/3}(2 x^3/3), F(0+) -> -Gamma(1/3)/(2^{1/3} 3^{2/3}) ... 0-anchored up to
    // the constant absorbed in gamma; the reference normalization uses exactly this form.
    return -(x / 3.0) * expint(2.0 / 3.0, 2.0 * x * x * x / 3.0);
}

// 0-anchored antiderivative of u_k^2 for u_k = e^{-x^2/2} H_k(x):
// closed erf-based forms for k <= 3, adaptive quadrature otherwise.
inline double hermite_seed_offset(int k, double x) {
    if (k < 0) throw std::invalid_argument("hermite_seed_offset: k must be nonnegative");
    const double rp = std::sqrt(M_PI);
    double e = std::exp(-x * x);
    switch (k) {
        case 0: return rp / 2.0 * susyforge::erf(x);
        case 1: return rp * susyforge::erf(x) - 2.0 * x * e;
        case 2: return 4.0 * rp * susyforge::erf(x) - e * (8.0 * x * x * x + 4.0 * x);
        case 3: {
            double x2 = x * x;
            return 24.0 * rp * susyforge::erf(x) -
                   e * (32.0 * x2 * x2 * x - 16.0 * x2 * x + 48.0 * x);
        }
        default:
            return adaptive_simpson(
                [k](double t) {
                    double h = hermite(k, t);
                    return std::exp(-t * t) * h * h;
                },
                0.0, x, 1e-13);
    }
}

namespace detail {

inline std::map<std::string, OracleEntry> make_catalog() {
    std::map<std::string, OracleEntry> cat;
    auto add = [&cat](OracleEntry e) { cat.emplace(e.name, std::move(e)); };

    // --- constant-potential family -------------------------------------

    add({"solcon",
         "general solution of psi'' + (eps - c^2) psi = 0 below the barrier",
         "x in R, eps < c^2",
         1e-8,
         [](double x, const OracleParams& p) {
             double k = kappa_of(p, "solcon");
             double k1 = req(p, "k1", "solcon"), k2 = req(p, "k2", "solcon");
             return k1 * std::exp(k * x) + k2 * std::exp(-k * x);
         },
         [](double x, const OracleParams& p) {
             double k = kappa_of(p, "solcon");
             return mixed_exp_offset(k, req(p, "k1", "solcon"), req(p, "k2", "solcon"), x);
         }});

    add({"v3rosu",
         "transformed constant potential from the decaying zero-mode seed u = e^{-cx}",
         "x in R away from the zero of 2 c gamma e^{2cx} - 1",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "v3rosu");
             if (c == 0.0) throw std::domain_error("oracle 'v3rosu': c must be nonzero");
             double g = req(p, "gamma", "v3rosu");
             double den = 2.0 * c * g * std::exp(2.0 * c * x) - 1.0;
             return c * c + 8.0 * c * c / den + 8.0 * c * c / (den * den);
         },
         [](double x, const OracleParams& p) {
             return exp_decay_offset(req(p, "c", "v3rosu"), x);
         }});

    add({"solrosucon",
         "bound state of the v3rosu potential at the seed energy",
         "same window as v3rosu",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "solrosucon");
             if (c == 0.0) throw std::domain_error("oracle 'solrosucon': c must be nonzero");
             double g = req(p, "gamma", "solrosucon");
             double den = 2.0 * c * g * std::exp(2.0 * c * x) - 1.0;
             return 2.0 * c * std::exp(c * x) / den;
         },
         [](double x, const OracleParams& p) {
             return exp_decay_offset(req(p, "c", "solrosucon"), x);
         }});

    add({"V3gen",
         "transformed constant potential from the general two-exponential seed (as printed; "
         "see README for the known coefficient discrepancy)",
         "x in R, eps < c^2, away from denominator zeros",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "V3gen");
             double eps = req(p, "eps", "V3gen");
             double k = kappa_of(p, "V3gen");
             double k1 = req(p, "k1", "V3gen"), k2 = req(p, "k2", "V3gen");
             double g = req(p, "gamma", "V3gen");
             double ep = std::exp(2.0 * k * x), em = std::exp(-2.0 * k * x);
             double den = 2.0 * g * k + k1 * k1 * ep + 4.0 * k1 * k2 * k * x - k2 * k2 * em;
             double t1 = 4.0 * (c * c - eps) * (k1 * k1 * ep - k2 * k2 * em) / den;
             double s = k1 * k1 * ep + k2 * k2 * em + 2.0 * k1 * k2;
             double t2 = 4.0 * (c * c - eps) * s * s / (den * den);
             return c * c - t1 + t2;
         },
         [](double x, const OracleParams& p) {
             double k = kappa_of(p, "V3gen");
             return mixed_exp_offset(k, req(p, "k1", "V3gen"), req(p, "k2", "V3gen"), x);
         }});

    add({"PSI",
         "state of the V3gen potential at the seed energy (as printed; the C2 branch "
         "does not satisfy the transformed equation, see README)",
         "x in R, eps < c^2, away from denominator zeros",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "PSI");
             double eps = req(p, "eps", "PSI");
             double k = kappa_of(p, "PSI");
             double k1 = req(p, "k1", "PSI"), k2 = req(p, "k2", "PSI");
             double g = req(p, "gamma", "PSI");
             double C1 = req(p, "C1", "PSI"), C2 = req(p, "C2", "PSI");
             double ep = std::exp(2.0 * k * x), em = std::exp(-2.0 * k * x);
             double den = 2.0 * g * k + k1 * k1 * ep + 4.0 * k1 * k2 * k * x - k2 * k2 * em;
             double u = k1 * std::exp(k * x) + k2 * std::exp(-k * x);
             double bracket = C1;
             if (C2 != 0.0) {
                 double c3 = 1.0 / (8.0 * k * k * k);
                 double last_den = k1 * k2 + k2 * k2 * std::exp(-k * x);
                 double t = k1 * k1 * ep - k2 * k2 * em -
                            8.0 * k1 * k2 * (c * c - eps) * x * x -
                            4.0 * k * (k1 * k2 + 2.0 * g * k) * x +
                            4.0 * (c * c - eps) * (2.0 * k1 * k2 * x + g) * (2.0 * k1 * k2 * x + g) /
                                last_den;
                 bracket += C2 * c3 * t;
             }
             return 2.0 * k * u / den * bracket;
         },
         [](double x, const OracleParams& p) {
             double k = kappa_of(p, "PSI");
             return mixed_exp_offset(k, req(p, "k1", "PSI"), req(p, "k2", "PSI"), x);
         }});

    add({"conbound-V3",
         "one-bound-state potential from the growing seed u = e^{kappa x}",
         "x in R; regular for gamma > 0",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "conbound-V3");
             double k = kappa_of(p, "conbound-V3");
             double g = req(p, "gamma", "conbound-V3");
             double d = 2.0 * g * k * std::exp(-2.0 * k * x) + 1.0;
             double k2 = k * k;
             return c * c - 8.0 * k2 / d + 8.0 * k2 / (d * d);
         },
         [](double x, const OracleParams& p) {
             return exp_grow_offset(kappa_of(p, "conbound-V3"), x);
         }});

    add({"conbound-psi",
         "the single bound state of conbound-V3",
         "x in R; regular for gamma > 0",
         1e-8,
         [](double x, const OracleParams& p) {
             double k = kappa_of(p, "conbound-psi");
             double g = req(p, "gamma", "conbound-psi");
             return 2.0 * k * std::exp(k * x) / (2.0 * g * k + std::exp(2.0 * k * x));
         },
         [](double x, const OracleParams& p) {
             return exp_grow_offset(kappa_of(p, "conbound-psi"), x);
         }});

    add({"hyperbolic-V3",
         "transformed constant potential from the seed u = 2 cosh(kappa x) (as printed; "
         "see README for the known coefficient discrepancy)",
         "x in R away from the denominator zero; singular for every gamma",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "hyperbolic-V3");
             double eps = req(p, "eps", "hyperbolic-V3");
             double k = kappa_of(p, "hyperbolic-V3");
             double g = req(p, "gamma", "hyperbolic-V3");
             double dh = k * (g + 2.0 * x) + std::sinh(2.0 * k * x);
             double ch = std::cosh(k * x), sh = std::sinh(k * x);
             double c2e = c * c - eps;
             return c * c - 16.0 * c2e * ch * sh / dh + 16.0 * c2e * ch * ch * ch * ch / (dh * dh);
         },
         [](double x, const OracleParams& p) {
             return cosh_offset(kappa_of(p, "hyperbolic-V3"), x);
         }});

    add({"hyperbolic-psi",
         "state of the hyperbolic-V3 potential at the seed energy",
         "x in R away from the denominator zero",
         1e-8,
         [](double x, const OracleParams& p) {
             double k = kappa_of(p, "hyperbolic-psi");
             double g = req(p, "gamma", "hyperbolic-psi");
             double dh = k * (g + 2.0 * x) + std::sinh(2.0 * k * x);
             return 2.0 * k * std::cosh(k * x) / dh;
         },
         [](double x, const OracleParams& p) {
             return cosh_offset(kappa_of(p, "hyperbolic-psi"), x);
         }});

    add({"trig-V3",
         "transformed constant potential above the barrier, seed u = sin(omega x) with "
         "omega = sqrt(eps - c^2) (printed with the below-barrier root symbol; implemented "
         "under the real omega reading)",
         "x in R away from denominator zeros; eps > c^2",
         1e-8,
         [](double x, const OracleParams& p) {
             double c = req(p, "c", "trig-V3");
             double w = omega_of(p, "trig-V3");
             double g = req(p, "gamma", "trig-V3");
             double dt = 2.0 * w * (2.0 * g + x) - std::sin(2.0 * w * x);
             double s = std::sin(w * x);
             double w2 = w * w;
             return c * c - 8.0 * w2 * std::sin(2.0 * w * x) / dt +
                    32.0 * w2 * s * s * s * s / (dt * dt);
         },
         [](double x, const OracleParams& p) {
             return sin_offset(omega_of(p, "trig-V3"), x);
         }});

    add({"trig-psi",
         "state of the trig-V3 potential at the seed energy",
         "x in R away from denominator zeros; eps > c^2",
         1e-8,
         [](double x, const OracleParams& p) {
             double w = omega_of(p, "trig-psi");
             double g = req(p, "gamma", "trig-psi");
             double dt = 2.0 * w * (2.0 * g + x) - std::sin(2.0 * w * x);
             return 4.0 * w * std::sin(w * x) / dt;
         },
         [](double x, const OracleParams& p) {
             return sin_offset(omega_of(p, "trig-psi"), x);
         }});

    // --- quartic / Dirac family ----------------------------------------

    add({"phi1",
         "first spinor component at E = m for the pseudoscalar seed q = -x^2, evaluated "
         "through its quadrature form e^{-x^3/3} [k1 - 2 m k2 int_0^x e^{2t^3/3} dt]",
         "x >= 0",
         1e-6,
         [](double x, const OracleParams& p) {
             if (x < 0.0) throw std::domain_error("oracle 'phi1': requires x >= 0");
             double m = req(p, "m", "phi1");
             double k1 = req(p, "k1", "phi1"), k2 = req(p, "k2", "phi1");
             double Q = (x == 0.0 || k2 == 0.0)
                            ? 0.0
                            : adaptive_simpson(
                                  [](double t) { return std::exp(2.0 * t * t * t / 3.0); }, 0.0,
                                  x, 1e-13);
             return std::exp(-x * x * x / 3.0) * (k1 - 2.0 * m * k2 * Q);
         },
         nullptr});

    add({"hatpsiex",
         "missing state of the transformed quartic system at the worked parameter point "
         "(k1 = 1, C1 = gamma = -1/10, k2 = C2 = 0)",
         "x > 0",
         1e-6,
         [](double x, const OracleParams&) {
             return 3.0 * std::exp(-x * x * x / 3.0) / cubic_den(x);
         },
         [](double x, const OracleParams&) { return cubic_seed_offset(x); }});

    add({"v3ex",
         "transformed quartic potential at the worked parameter point",
         "x > 0",
         1e-6,
         [](double x, const OracleParams&) {
             double den = cubic_den(x);
             double e2 = std::exp(-2.0 * x * x * x / 3.0);
             double e4 = std::exp(-4.0 * x * x * x / 3.0);
             return x * x * x * x - 2.0 * x - 120.0 * x * x * e2 / den +
                    1800.0 * e4 / (den * den);
         },
         [](double x, const OracleParams&) { return cubic_seed_offset(x); }});

    add({"q1",
         "transformed pseudoscalar profile q1 = psi_hat'/psi_hat at the worked parameter point",
         "x > 0",
         1e-6,
         [](double x, const OracleParams&) {
             return -x * x + 30.0 * std::exp(-2.0 * x * x * x / 3.0) / cubic_den(x);
         },
         [](double x, const OracleParams&) { return cubic_seed_offset(x); }});

    // --- Fokker-Planck family ------------------------------------------

    add({"v3fok",
         "transformed oscillator potential from the Hermite seed u = e^{-x^2/2} H_k",
         "x in R away from zeros of gamma + F_k",
         1e-6,
         [](double x, const OracleParams& p) {
             int k = int_param(p, "k", "v3fok");
             double g = req(p, "gamma", "v3fok");
             double D = g + hermite_seed_offset(k, x);
             double Hk = hermite(k, x);
             double Hkm = k > 0 ? hermite(k - 1, x) : 0.0;
             double e1 = std::exp(-x * x), e2 = std::exp(-2.0 * x * x);
             double t2 = 2.0 * e2 * Hk * Hk * Hk * Hk / (D * D);
             double t1 = (4.0 * e1 * x * Hk * Hk - 8.0 * k * e1 * Hkm * Hk) / D;
             return x * x - 1.0 + t2 + t1;
         },
         [](double x, const OracleParams& p) {
             return hermite_seed_offset(int_param(p, "k", "v3fok"), x);
         }});

    add({"solzerofok",
         "missing state of the v3fok potential (as printed; the inner integrand's "
         "exponential sign disagrees with the transformed equation for C2 != 0, see README)",
         "x in R away from zeros of gamma + F_k; C2 branch needs a nodeless H_k",
         1e-6,
         [](double x, const OracleParams& p) {
             int k = int_param(p, "k", "solzerofok");
             double g = req(p, "gamma", "solzerofok");
             double C1 = req(p, "C1", "solzerofok"), C2 = req(p, "C2", "solzerofok");
             double D = g + hermite_seed_offset(k, x);
             double bracket = C1;
             if (C2 != 0.0 && x != 0.0) {
                 double inner = adaptive_simpson(
                     [k, g](double t) {
                         double h = hermite(k, t);
                         double Dp = g + hermite_seed_offset(k, t);
                         return std::exp(-t * t) / (h * h) * Dp * Dp;
                     },
                     0.0, x, 1e-12);
                 bracket += C2 * inner;
             }
             return std::exp(-x * x / 2.0) * hermite(k, x) / D * bracket;
         },
         [](double x, const OracleParams& p) {
             return hermite_seed_offset(int_param(p, "k", "solzerofok"), x);
         }});

    add({"v0",
         "transformed Fokker-Planck drift at the worked k = 0 point "
         "(gamma = -0.9, C1 = -0.25, C2 = 0)",
         "x in R",
         1e-6,
         [](double x, const OracleParams&) {
             double den = 18.0 - 10.0 * std::sqrt(M_PI) * susyforge::erf(x);
             return -std::log(5.0 * std::exp(-x * x / 2.0) / den);
         },
         nullptr});

    add({"v1",
         "transformed Fokker-Planck drift at the worked k = 1 point "
         "(gamma = 0.1, C1 = 1, C2 = 0)",
         "x > 0",
         1e-6,
         [](double x, const OracleParams&) {
             if (x <= 0.0) throw std::domain_error("oracle 'v1': requires x > 0");
             double den = -20.0 * x +
                          std::exp(x * x) * (1.0 + 10.0 * std::sqrt(M_PI) * susyforge::erf(x));
             return -std::log(20.0 * x * std::exp(x * x / 2.0) / den);
         },
         nullptr});

    return cat;
}

}  // namespace detail

inline const std::map<std::string, OracleEntry>& oracle_catalog() {
    static const std::map<std::string, OracleEntry> cat = detail::make_catalog();
    return cat;
}

inline const OracleEntry& oracle_entry(const std::string& name) {
    const auto& cat = oracle_catalog();
    auto it = cat.find(name);
    if (it == cat.end()) {
        std::ostringstream msg;
        msg << "unknown oracle entry '" << name << "'; known entries:";
        for (const auto& [k, v] : cat) msg << ' ' << k;
        throw std::invalid_argument(msg.str());
    }
    return it->second;
}

inline double oracle_eval(const std::string& name, const OracleParams& params, double x) {
    return oracle_entry(name).eval(x, params);
}

inline GridFn oracle_sample(const std::string& name, const OracleParams& params, const Grid& g) {
    const OracleEntry& e = oracle_entry(name);
    GridFn out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.values[i] = e.eval(g.x(i), params);
    return out;
}

// Convert the entry's reference-normalized gamma parameter to the engine
// normalization for a grid anchored at a: gamma_engine = gamma + F(a).
// Entries without an offset function cannot be calibrated.
inline double gamma_engine_for(const std::string& name, const OracleParams& params, double a) {
    const OracleEntry& e = oracle_entry(name);
    if (!e.offset) {
        std::ostringstream msg;
        msg << "oracle '" << name << "': calibration impossible, no seed antiderivative attached";
        throw std::invalid_argument(msg.str());
    }
    double g = detail::req(params, "gamma", name.c_str());
    return g + e.offset(a, params);
}

// Compare an engine-produced grid function against a catalog entry over
// [xlo, xhi]. Both the absolute and the scale-relative sup deviation are
// reported; the entry passes when either one is within tolerance.
inline OracleReport oracle_compare(const GridFn& engine, const std::string& name,
                                   const OracleParams& params, double xlo, double xhi,
                                   std::optional<double> tol_override = std::nullopt) {
    const OracleEntry& e = oracle_entry(name);
    auto [ilo, ihi] = index_window(engine.grid, xlo, xhi);
    OracleReport rep;
    rep.name = name;
    rep.tol = tol_override.value_or(e.tol);
    for (std::size_t i = ilo; i <= ihi; ++i) {
        double x = engine.grid.x(i);
        double ref = e.eval(x, params);
        rep.scale = std::max(rep.scale, std::abs(ref));
        double d = std::abs(engine.values[i] - ref);
        if (d > rep.sup_abs) {
            rep.sup_abs = d;
            rep.worst_node = i;
            rep.worst_x = x;
        }
    }
    rep.sup_rel = rep.scale > 0.0 ? rep.sup_abs / rep.scale : rep.sup_abs;
    rep.pass = rep.sup_abs <= rep.tol || rep.sup_rel <= rep.tol;
    return rep;
}

}  // namespace susyforge
