// susy-forge: confluent Darboux transformations of 1D Schrodinger
// operators, with Dirac and Fokker-Planck adapters and a closed-form
// verification suite. See README.md for the full CLI reference.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <susyforge/susyforge.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace susyforge;

namespace {

// ----------------------------------------------------------------------
// shared run configuration

struct RunCfg {
    std::string system = "constant";
    double c = 1.0;
    double xmin = 0.0, xmax = 0.0;
    long n = 4001;
    double lambda = 0.0;
    double epsilon = 0.0;
    double gamma = 0.0;
    std::string gamma_convention = "engine";
    double C1 = 1.0, C2 = 0.0;
    std::string seed;
    std::vector<double> seed_ic;  // x0 value slope
    std::vector<double> psi_ic;   // x0 value slope
    std::string output;

    // option handles for presence checks
    CLI::Option* opt_system = nullptr;
    CLI::Option* opt_domain = nullptr;
    CLI::Option* opt_lambda = nullptr;
    CLI::Option* opt_epsilon = nullptr;
    CLI::Option* opt_output = nullptr;
};

void add_common_options(CLI::App* cmd, RunCfg& cfg, bool need_domain) {
    cfg.opt_system = cmd->add_option("--system", cfg.system,
                                     "builtin potential (constant | quartic_dirac | oscillator_fp) "
                                     "or a two-column table file");
    cmd->add_option("--c", cfg.c, "parameter c of the constant potential V = c^2");
    auto* xmin = cmd->add_option("--xmin", cfg.xmin, "left endpoint of the working domain");
    auto* xmax = cmd->add_option("--xmax", cfg.xmax, "right endpoint of the working domain");
    xmin->needs(xmax);
    xmax->needs(xmin);
    cfg.opt_domain = xmin;
    cmd->add_option("--n", cfg.n, "grid size (uniform, endpoints included)")->capture_default_str();
    cfg.opt_lambda = cmd->add_option("--lambda", cfg.lambda, "seed (factorization) energy");
    cfg.opt_epsilon =
        cmd->add_option("--epsilon", cfg.epsilon,
                        "state energy; equal to lambda (default) selects the missing state");
    cmd->add_option("--gamma", cfg.gamma, "transformation parameter")->capture_default_str();
    cmd->add_option("--gamma-convention", cfg.gamma_convention,
                    "normalization of --gamma: 'engine' (left-anchored cumulative integral) or "
                    "'paper' (reference antiderivative)")
        ->check(CLI::IsMember({"engine", "paper"}))
        ->capture_default_str();
    cmd->add_option("--C1", cfg.C1, "missing-state coefficient C1")->capture_default_str();
    cmd->add_option("--C2", cfg.C2, "missing-state coefficient C2")->capture_default_str();
    cmd->add_option("--seed", cfg.seed,
                    "builtin seed: exp-decay | exp-grow | cubic-decay | hermite:<k>");
    cmd->add_option("--seed-ic", cfg.seed_ic,
                    "seed Cauchy data x0 value slope (for custom systems)")
        ->expected(3);
    cmd->add_option("--psi-ic", cfg.psi_ic,
                    "Cauchy data x0 value slope of the state mapped at --epsilon")
        ->expected(3);
    cfg.opt_output = cmd->add_option("-o,--output", cfg.output, "output directory");
    if (need_domain) {
        xmin->required();
        xmax->required();
    }
}

// flag > environment > config > default "."
fs::path resolve_output(const RunCfg& cfg, int argc, char** argv) {
    bool on_cli = false;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "-o" || a == "--output" || a.rfind("--output=", 0) == 0 || a.rfind("-o", 0) == 0) {
            if (a == "-o" || a == "--output" || a.rfind("--output=", 0) == 0 ||
                (a.size() > 2 && a[0] == '-' && a[1] == 'o'))
                on_cli = true;
        }
    }
    if (on_cli && cfg.opt_output->count() > 0) return cfg.output;
    if (const char* env = std::getenv("SUSY_FORGE_OUT"); env && *env) return env;
    if (cfg.opt_output->count() > 0 && !cfg.output.empty()) return cfg.output;
    return ".";
}

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] void bail(const std::string& msg) { throw ConfigError(msg); }

std::pair<std::vector<double>, std::vector<double>> read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) bail("cannot read table file: " + path);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream row(line);
        double x, v;
        if (row >> x >> v) {
            xs.push_back(x);
            vs.push_back(v);
        }
    }
    if (xs.size() < 4) bail("table file needs at least 4 numeric rows: " + path);
    return {std::move(xs), std::move(vs)};
}

// ----------------------------------------------------------------------
// seed assembly

struct SeedBundle {
    SolutionPair u;
    PotentialSpec V = PotentialSpec::constant(0.0);
    std::function<double(double)> offset;  // reference antiderivative F, if known
    double lambda = 0.0;
};

bool parse_hermite(const std::string& name, int& k) {
    if (name.rfind("hermite:", 0) != 0) return false;
    try {
        std::size_t pos = 0;
        std::string tail = name.substr(8);
        int v = std::stoi(tail, &pos);
        if (pos != tail.size()) return false;
        k = v;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

PotentialSpec system_from_name(const RunCfg& cfg) {
    if (cfg.system == "constant") return PotentialSpec::constant(cfg.c);
    if (cfg.system == "quartic_dirac") return PotentialSpec::quartic_dirac();
    if (cfg.system == "oscillator_fp") return PotentialSpec::oscillator_fp();
    auto [xs, vs] = read_table(cfg.system);
    return PotentialSpec::tabulated(std::move(xs), std::move(vs));
}

void check_system_consistency(const RunCfg& cfg, const std::string& implied) {
    if (cfg.opt_system->count() > 0 && cfg.system != implied)
        bail("seed '" + cfg.seed + "' belongs to system '" + implied + "', but --system " +
             cfg.system + " was given");
}

SeedBundle make_seed(const RunCfg& cfg, const Grid& grid) {
    SeedBundle b;
    if (!cfg.seed.empty()) {
        int hk = 0;
        if (cfg.seed == "exp-decay" || cfg.seed == "exp-grow") {
            check_system_consistency(cfg, "constant");
            double lam = cfg.opt_lambda->count() > 0 ? cfg.lambda : 0.0;
            double kap2 = cfg.c * cfg.c - lam;
            if (!(kap2 > 0.0)) bail("seed '" + cfg.seed + "' needs lambda < c^2");
            double kap = std::sqrt(kap2);
            double s = cfg.seed == "exp-decay" ? -kap : kap;
            b.u.psi = sample(grid, [s](double x) { return std::exp(s * x); });
            b.u.dpsi = sample(grid, [s](double x) { return s * std::exp(s * x); });
            b.offset = [s, kap](double x) {
                return (s < 0.0 ? -1.0 : 1.0) * std::exp(2.0 * s * x) / (2.0 * kap);
            };
            b.lambda = lam;
            b.V = PotentialSpec::constant(cfg.c);
        } else if (cfg.seed == "cubic-decay") {
            check_system_consistency(cfg, "quartic_dirac");
            if (cfg.opt_lambda->count() > 0 && cfg.lambda != 0.0)
                bail("seed 'cubic-decay' is a zero-energy solution; --lambda must be 0");
            b.u = cubic_seed(grid);
            b.offset = [](double x) { return cubic_seed_offset(x); };
            b.lambda = 0.0;
            b.V = PotentialSpec::quartic_dirac();
        } else if (parse_hermite(cfg.seed, hk)) {
            check_system_consistency(cfg, "oscillator_fp");
            if (hk < 0) bail("hermite seed index must be nonnegative");
            if (cfg.opt_lambda->count() > 0 && cfg.lambda != 2.0 * hk)
                bail("seed 'hermite:< k >' has energy 2k; --lambda disagrees");
            b.u = seed_from_hermite(hk, grid);
            b.offset = [hk](double x) { return hermite_seed_offset(hk, x); };
            b.lambda = 2.0 * hk;
            b.V = PotentialSpec::oscillator_fp();
        } else {
            bail("unknown builtin seed '" + cfg.seed +
                 "' (expected exp-decay | exp-grow | cubic-decay | hermite:<k>)");
        }
        b.u.energy = b.lambda;
        b.u.potential = b.V;
        return b;
    }

    if (cfg.seed_ic.size() != 3)
        bail("either --seed <builtin> or --seed-ic x0 value slope is required");
    b.V = system_from_name(cfg);
    b.lambda = cfg.opt_lambda->count() > 0 ? cfg.lambda : 0.0;
    CauchyData ic{cfg.seed_ic[0], cfg.seed_ic[1], cfg.seed_ic[2]};
    b.u = solve_ivp(b.V, b.lambda, ic, grid);
    return b;
}

double engine_gamma(const RunCfg& cfg, const SeedBundle& b, double a) {
    if (cfg.gamma_convention == "engine") return cfg.gamma;
    if (!b.offset)
        bail("--gamma-convention paper needs a builtin seed with a known antiderivative; "
             "calibration impossible for custom seeds");
    return cfg.gamma + b.offset(a);
}

json gamma_sidecar(const RunCfg& cfg, const SeedBundle& b, double ge, double a) {
    json j;
    j["gamma_engine"] = ge;
    if (b.offset)
        j["gamma_paper"] = ge - b.offset(a);
    else if (cfg.gamma_convention == "paper")
        j["gamma_paper"] = cfg.gamma;
    else
        j["gamma_paper"] = nullptr;
    return j;
}

json intervals_json(const Grid& g, const std::vector<std::size_t>& nodes) {
    json arr = json::array();
    for (auto [lo, hi] : singular_intervals(g, nodes)) arr.push_back({lo, hi});
    return arr;
}

void write_json_atomic(const fs::path& path, const json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

// ----------------------------------------------------------------------
// transform

int cmd_transform(const RunCfg& cfg, bool allow_singular, const fs::path& outdir) {
    Grid grid = make_grid(cfg.xmin, cfg.xmax, static_cast<std::size_t>(cfg.n));
    SeedBundle b = make_seed(cfg, grid);
    double ge = engine_gamma(cfg, b, grid.a);
    ConfluentSeed seed = build_seed(b.u, ge);

    if (!seed.singular_nodes.empty() && !allow_singular) {
        std::ostringstream msg;
        msg << "gamma = " << fmt17(ge) << " (engine) is singular: D = gamma + I vanishes in";
        for (auto [lo, hi] : singular_intervals(grid, seed.singular_nodes))
            msg << " [" << fmt17(lo) << ", " << fmt17(hi) << "]";
        msg << "; rerun with --allow-singular to emit sentinel output";
        throw SingularGammaError(msg.str());
    }

    TransformOutput out;
    bool at_other_energy =
        cfg.opt_epsilon->count() > 0 &&
        std::abs(cfg.epsilon - b.lambda) > 1e-12 * (1.0 + std::abs(b.lambda));
    if (at_other_energy) {
        CauchyData pic{grid.a, 0.0, 1.0};
        if (cfg.psi_ic.size() == 3) pic = CauchyData{cfg.psi_ic[0], cfg.psi_ic[1], cfg.psi_ic[2]};
        SolutionPair psi = solve_ivp(b.V, cfg.epsilon, pic, grid);
        out = transform_at_energy(b.V, seed, psi);
    } else {
        out = missing_state(b.V, seed, cfg.C1, cfg.C2);
    }

    GridFn V1 = b.V.sample_on(grid);
    fs::create_directories(outdir);
    write_csv(outdir / "transform.csv", {"x", "V1", "V3", "psi_hat", "residual"}, grid,
              {&V1.values, &out.V3.values, &out.psi_hat.values, &out.residual.values});

    json j = gamma_sidecar(cfg, b, ge, grid.a);
    j["C1"] = out.C1;
    j["C2"] = out.C2;
    j["lambda"] = out.lambda;
    j["epsilon"] = out.energy;
    j["singular_intervals"] = intervals_json(grid, out.singular_nodes);
    j["residual_sup"] = out.residual_sup;
    write_json_atomic(outdir / "transform.json", j);

    std::cout << "transform: wrote " << (outdir / "transform.csv").string()
              << " (residual_sup = " << fmt17(out.residual_sup) << ")\n";
    return 0;
}

// ----------------------------------------------------------------------
// gamma-scan

int cmd_gamma_scan(const RunCfg& cfg, double gmin, double gmax, long count,
                   const fs::path& outdir) {
    if (count < 1 || gmin > gmax) bail("empty gamma range");
    Grid grid = make_grid(cfg.xmin, cfg.xmax, static_cast<std::size_t>(cfg.n));
    SeedBundle b = make_seed(cfg, grid);

    std::vector<double> col_gamma, col_regular, col_mind, col_res;
    for (long i = 0; i < count; ++i) {
        double g = count == 1 ? gmin : gmin + (gmax - gmin) * static_cast<double>(i) / (count - 1);
        double ge = cfg.gamma_convention == "paper"
                        ? (b.offset ? g + b.offset(grid.a)
                                    : (bail("--gamma-convention paper needs a builtin seed"), 0.0))
                        : g;
        ConfluentSeed seed = build_seed(b.u, ge);
        double mind = std::abs(seed.D.values[0]);
        for (double v : seed.D.values) mind = std::min(mind, std::abs(v));
        bool regular = seed.singular_nodes.empty();
        double res = std::numeric_limits<double>::quiet_NaN();
        if (regular) res = missing_state(b.V, seed, cfg.C1, cfg.C2).residual_sup;
        col_gamma.push_back(g);
        col_regular.push_back(regular ? 1.0 : 0.0);
        col_mind.push_back(mind);
        col_res.push_back(res);
    }

    fs::create_directories(outdir);
    // scan.csv is keyed by gamma, not by grid abscissa, so it is written
    // directly rather than through the grid-aligned writer.
    std::string s = "gamma,regular,min_abs_D,residual_sup\n";
    for (std::size_t i = 0; i < col_gamma.size(); ++i) {
        s += fmt17(col_gamma[i]);
        s += ',';
        s += col_regular[i] != 0.0 ? '1' : '0';
        s += ',';
        s += fmt17(col_mind[i]);
        s += ',';
        s += fmt17(col_res[i]);
        s += '\n';
    }
    write_text_atomic(outdir / "scan.csv", s);
    std::cout << "gamma-scan: wrote " << (outdir / "scan.csv").string() << " (" << count
              << " rows)\n";
    return 0;
}

// ----------------------------------------------------------------------
// dirac

int cmd_dirac(const RunCfg& cfg, double m, double E, double k1, double k2,
              bool allow_singular, const fs::path& outdir) {
    double xmin = cfg.opt_domain->count() > 0 ? cfg.xmin : 0.05;
    double xmax = cfg.opt_domain->count() > 0 ? cfg.xmax : 3.0;
    Grid grid = make_grid(xmin, xmax, static_cast<std::size_t>(cfg.n));

    if (k1 == 0.0 && k2 == 0.0) bail("k1 = k2 = 0 selects the zero spinor (degenerate)");

    bool builtin = cfg.opt_system->count() == 0 || cfg.system == "quartic_dirac";
    PseudoscalarSystem sys =
        builtin ? PseudoscalarSystem::builtin(grid, m, E)
                : [&] {
                      auto [xs, vs] = read_table(cfg.system);
                      return PseudoscalarSystem::tabulated(
                          resample_cubic(xs, vs, grid), m, E);
                  }();

    Spinor sp = spinor_at_Em(sys, k1, k2);  // rejects |E| != m

    auto [V, eps] = to_schrodinger(sys);
    SeedBundle b;
    b.V = V;
    b.lambda = eps;
    if (builtin) {
        b.u = cubic_seed(grid);
        b.offset = [](double x) { return cubic_seed_offset(x); };
    } else {
        // Phi1 at k1=1, k2=0 solves the reduced equation at eps = 0.
        GridFn Q = cumint(sys.q, 0);
        b.u.psi = map(Q, [](double q) { return std::exp(q); });
        b.u.dpsi = zip(sys.q, b.u.psi, [](double q, double p) { return q * p; });
        b.u.energy = eps;
        b.u.potential = V;
    }
    b.u.energy = eps;

    double ge = engine_gamma(cfg, b, grid.a);
    ConfluentSeed seed = build_seed(b.u, ge);
    if (!seed.singular_nodes.empty() && !allow_singular) {
        std::ostringstream msg;
        msg << "gamma = " << fmt17(ge) << " (engine) is singular for the Dirac seed";
        throw SingularGammaError(msg.str());
    }
    TransformOutput out = missing_state(b.V, seed, cfg.C1, cfg.C2);
    GridFn q1 = transformed_q(out);

    fs::create_directories(outdir);
    write_csv(outdir / "dirac.csv", {"x", "q0", "q1", "phi1", "phi2"}, grid,
              {&sys.q.values, &q1.values, &sp.phi1.values, &sp.phi2.values});

    json j = gamma_sidecar(cfg, b, ge, grid.a);
    j["m"] = m;
    j["E"] = E;
    j["k1"] = k1;
    j["k2"] = k2;
    j["C1"] = out.C1;
    j["C2"] = out.C2;
    write_json_atomic(outdir / "dirac.json", j);

    std::cout << "dirac: wrote " << (outdir / "dirac.csv").string()
              << " (residual_sup = " << fmt17(out.residual_sup) << ")\n";
    return 0;
}

// ----------------------------------------------------------------------
// fokker-planck

int cmd_fokker_planck(const RunCfg& cfg, long k, const fs::path& outdir) {
    if (k < 0) bail("separation index k must be a nonnegative integer");
    double xmin = cfg.opt_domain->count() > 0 ? cfg.xmin : (k % 2 == 0 ? -4.0 : 0.05);
    double xmax = cfg.opt_domain->count() > 0 ? cfg.xmax : 4.0;
    Grid grid = make_grid(xmin, xmax, static_cast<std::size_t>(cfg.n));

    bool builtin = cfg.opt_system->count() == 0 || cfg.system == "oscillator_fp";
    DriftSystem sys = builtin ? DriftSystem::builtin(grid, static_cast<double>(k))
                              : [&] {
                                    auto [xs, vs] = read_table(cfg.system);
                                    return DriftSystem::tabulated(
                                        resample_cubic(xs, vs, grid), static_cast<double>(k));
                                }();
    auto [V1, eps] = drift_to_potential(sys);

    SeedBundle b;
    b.V = V1;
    b.lambda = eps;
    if (builtin) {
        b.u = seed_from_hermite(static_cast<int>(k), grid);
        b.offset = [k](double x) { return hermite_seed_offset(static_cast<int>(k), x); };
    } else {
        if (cfg.seed_ic.size() != 3) bail("custom drift systems need --seed-ic x0 value slope");
        CauchyData ic{cfg.seed_ic[0], cfg.seed_ic[1], cfg.seed_ic[2]};
        b.u = solve_ivp(V1, eps, ic, grid);
    }

    double ge = engine_gamma(cfg, b, grid.a);
    ConfluentSeed seed = build_seed(b.u, ge);
    TransformOutput out = missing_state(b.V, seed, cfg.C1, cfg.C2);
    FPStationary st = transformed_drift(out);  // throws on singular gamma / nonpositive state
    GridFn res = fp_residual(st);

    fs::create_directories(outdir);
    write_csv(outdir / "fp.csv", {"x", "U", "Vdrift", "g", "residual"}, grid,
              {&sys.U.values, &st.Vdrift.values, &st.g.values, &res.values});

    json j = gamma_sidecar(cfg, b, ge, grid.a);
    j["k"] = k;
    j["C1"] = out.C1;
    j["C2"] = out.C2;
    j["time_factor_rate"] = st.time_factor_rate;
    write_json_atomic(outdir / "fp.json", j);

    std::cout << "fokker-planck: wrote " << (outdir / "fp.csv").string()
              << " (residual sup = " << fmt17(sup_abs(res)) << ")\n";
    return 0;
}

// ----------------------------------------------------------------------
// verify

struct VerifyRow {
    std::string section;  // "engine" or "pair"
    std::string name;
    std::string params;
    double sup_abs = 0.0;
    double sup_rel = 0.0;
    std::string status;  // ok | FAIL | DISCREPANCY
};

std::string params_str(const OracleParams& p) {
    std::ostringstream s;
    bool first = true;
    for (const auto& [k, v] : p) {
        if (!first) s << ' ';
        first = false;
        s << k << '=' << v;
    }
    return s.str();
}

// Residual of an oracle (V3, psi, energy) pair sampled on g, boundary
// bands masked; the defining-equation self-consistency check.
double pair_residual_sup(const std::string& v3_name, const OracleParams& v3p,
                         const std::string& psi_name, const OracleParams& psip, double energy,
                         const Grid& g) {
    GridFn V3 = oracle_sample(v3_name, v3p, g);
    GridFn psi = oracle_sample(psi_name, psip, g);
    GridFn r = masked_residual(V3, energy, psi, {});
    return sup_abs(r);
}

// Scale-aware pair tolerance: 1e-6 * (1 + sup |psi''|).
double pair_tol(const std::string& psi_name, const OracleParams& psip, const Grid& g) {
    GridFn psi = oracle_sample(psi_name, psip, g);
    return 1e-6 * (1.0 + sup_abs(deriv2(psi)));
}

int cmd_verify(const std::vector<std::string>& entries, bool as_json) {
    // validate selection first: unknown entries are a usage error
    bool all = entries.empty() || (entries.size() == 1 && entries[0] == "all");
    if (!all)
        for (const auto& e : entries) oracle_entry(e);  // throws on unknown name

    auto selected = [&](const std::string& name) {
        if (all) return true;
        for (const auto& e : entries)
            if (name.find(e) != std::string::npos) return true;
        return false;
    };

    std::vector<VerifyRow> rows;
    auto engine_row = [&rows](const std::string& name, const OracleReport& rep,
                              bool known_discrepancy) {
        VerifyRow r{"engine", name, "", rep.sup_abs, rep.sup_rel, "ok"};
        if (!rep.pass) r.status = known_discrepancy ? "DISCREPANCY" : "FAIL";
        rows.push_back(r);
    };
    auto pair_row = [&rows](const std::string& name, const std::string& params, double sup,
                            double tol) {
        VerifyRow r{"pair", name, params, sup, 0.0, sup <= tol ? "ok" : "DISCREPANCY"};
        rows.push_back(r);
    };

    const std::size_t N = 2001;

    // ---- constant potential family ----
    {
        Grid g = make_grid(0.0, 3.0, N);
        double c = 1.0, eps = 0.6, k1 = 1.0, k2 = 0.3;
        OracleParams sp{{"c", c}, {"eps", eps}, {"k1", k1}, {"k2", k2}};
        if (selected("solcon")) {
            double kap = std::sqrt(c * c - eps);
            CauchyData ic{0.0, k1 + k2, kap * (k1 - k2)};
            SolutionPair u = solve_ivp(PotentialSpec::constant(c), eps, ic, g);
            engine_row("solcon", oracle_compare(u.psi, "solcon", sp, 0.0, 3.0), false);
            GridFn uo = oracle_sample("solcon", sp, g);
            GridFn cv = sample(g, [c](double) { return c * c; });
            pair_row("solcon-ode", params_str(sp),
                     sup_abs(masked_residual(cv, eps, uo, {})), pair_tol("solcon", sp, g));
        }

        if (selected("v3rosu") || selected("solrosucon")) {
            OracleParams p{{"c", 1.0}, {"gamma", 200.0}};
            double ge = gamma_engine_for("v3rosu", p, 0.0);
            SolutionPair u;
            u.psi = sample(g, [](double x) { return std::exp(-x); });
            u.dpsi = sample(g, [](double x) { return -std::exp(-x); });
            u.energy = 0.0;
            ConfluentSeed seed = build_seed(u, ge);
            TransformOutput out = missing_state(PotentialSpec::constant(1.0), seed, 1.0, 0.0);
            engine_row("v3rosu", oracle_compare(out.V3, "v3rosu", p, 0.0, 3.0), false);
            engine_row("solrosucon", oracle_compare(out.psi_hat, "solrosucon", p, 0.0, 3.0),
                       false);
            pair_row("v3rosu+solrosucon", params_str(p),
                     pair_residual_sup("v3rosu", p, "solrosucon", p, 0.0, g),
                     pair_tol("solrosucon", p, g));
        }

        if (selected("conbound-V3") || selected("conbound-psi")) {
            OracleParams p{{"c", c}, {"eps", eps}, {"gamma", 200.0}};
            double kap = std::sqrt(c * c - eps);
            double ge = gamma_engine_for("conbound-psi", p, 0.0);
            SolutionPair u;
            u.psi = sample(g, [kap](double x) { return std::exp(kap * x); });
            u.dpsi = sample(g, [kap](double x) { return kap * std::exp(kap * x); });
            u.energy = eps;
            ConfluentSeed seed = build_seed(u, ge);
            TransformOutput out = missing_state(PotentialSpec::constant(c), seed, 1.0, 0.0);
            engine_row("conbound-V3", oracle_compare(out.V3, "conbound-V3", p, 0.0, 3.0), false);
            engine_row("conbound-psi", oracle_compare(out.psi_hat, "conbound-psi", p, 0.0, 3.0),
                       false);
            pair_row("conbound-V3+psi", params_str(p),
                     pair_residual_sup("conbound-V3", p, "conbound-psi", p, eps, g),
                     pair_tol("conbound-psi", p, g));
        }

        if (selected("V3gen") || selected("PSI")) {
            OracleParams p{{"c", c},  {"eps", eps}, {"gamma", 50.0}, {"k1", k1},
                           {"k2", k2}, {"C1", 1.0},  {"C2", 0.0}};
            double kap = std::sqrt(c * c - eps);
            double ge = gamma_engine_for("V3gen", p, 0.0);
            CauchyData ic{0.0, k1 + k2, kap * (k1 - k2)};
            SolutionPair u = solve_ivp(PotentialSpec::constant(c), eps, ic, g);
            ConfluentSeed seed = build_seed(u, ge);
            TransformOutput out = missing_state(PotentialSpec::constant(c), seed, 1.0, 0.0);
            // V3gen as printed disagrees with the transformed equation
            // (coefficient slip); the pair row adjudicates.
            engine_row("V3gen", oracle_compare(out.V3, "V3gen", p, 0.0, 3.0), true);
            engine_row("PSI", oracle_compare(out.psi_hat, "PSI", p, 0.0, 3.0), false);
            pair_row("V3gen+PSI", params_str(p),
                     pair_residual_sup("V3gen", p, "PSI", p, eps, g), pair_tol("PSI", p, g));
        }

        if (selected("hyperbolic-V3") || selected("hyperbolic-psi")) {
            OracleParams p{{"c", c}, {"eps", eps}, {"gamma", 7.3}};
            double kap = std::sqrt(c * c - eps);
            double ge = gamma_engine_for("hyperbolic-psi", p, 0.0);
            SolutionPair u;
            u.psi = sample(g, [kap](double x) { return 2.0 * std::cosh(kap * x); });
            u.dpsi = sample(g, [kap](double x) { return 2.0 * kap * std::sinh(kap * x); });
            u.energy = eps;
            ConfluentSeed seed = build_seed(u, ge);
            TransformOutput out = missing_state(PotentialSpec::constant(c), seed, 1.0, 0.0);
            // hyperbolic-V3 as printed has a coefficient slip; pair row adjudicates.
            engine_row("hyperbolic-V3", oracle_compare(out.V3, "hyperbolic-V3", p, 0.0, 3.0),
                       true);
            engine_row("hyperbolic-psi",
                       oracle_compare(out.psi_hat, "hyperbolic-psi", p, 0.0, 3.0), false);
            pair_row("hyperbolic-V3+psi", params_str(p),
                     pair_residual_sup("hyperbolic-V3", p, "hyperbolic-psi", p, eps, g),
                     pair_tol("hyperbolic-psi", p, g));
        }

        if (selected("trig-V3") || selected("trig-psi")) {
            OracleParams p{{"c", c}, {"eps", 2.0}, {"gamma", 7.3}};
            double om = std::sqrt(2.0 - c * c);
            double ge = gamma_engine_for("trig-psi", p, 0.0);
            SolutionPair u;
            u.psi = sample(g, [om](double x) { return std::sin(om * x); });
            u.dpsi = sample(g, [om](double x) { return om * std::cos(om * x); });
            u.energy = 2.0;
            ConfluentSeed seed = build_seed(u, ge);
            TransformOutput out = missing_state(PotentialSpec::constant(c), seed, 1.0, 0.0);
            engine_row("trig-V3", oracle_compare(out.V3, "trig-V3", p, 0.0, 3.0), false);
            engine_row("trig-psi", oracle_compare(out.psi_hat, "trig-psi", p, 0.0, 3.0), false);
            pair_row("trig-V3+psi", params_str(p),
                     pair_residual_sup("trig-V3", p, "trig-psi", p, 2.0, g),
                     pair_tol("trig-psi", p, g));
        }
    }

    // ---- quartic / Dirac family ----
    {
        if (selected("phi1")) {
            Grid g = make_grid(0.0, 2.0, N);
            OracleParams p{{"m", 1.0}, {"k1", 1.0}, {"k2", 1.0}};
            PseudoscalarSystem sys = PseudoscalarSystem::builtin(g, 1.0, 1.0);
            Spinor sp = spinor_at_Em(sys, 1.0, 1.0);
            engine_row("phi1", oracle_compare(sp.phi1, "phi1", p, 0.1, 2.0), false);
            GridFn po = oracle_sample("phi1", p, g);
            GridFn qv = sample(g, [](double x) { return x * x * x * x - 2.0 * x; });
            pair_row("phi1-ode", params_str(p), sup_abs(masked_residual(qv, 0.0, po, {})),
                     pair_tol("phi1", p, g));
        }

        if (selected("hatpsiex") || selected("v3ex") || selected("q1")) {
            Grid g = make_grid(0.05, 3.0, N);
            OracleParams none;
            double ge = -0.1 + cubic_seed_offset(g.a);
            ConfluentSeed seed = build_seed(cubic_seed(g), ge);
            TransformOutput out =
                missing_state(PotentialSpec::quartic_dirac(), seed, -0.1, 0.0);
            GridFn q1 = transformed_q(out);
            engine_row("hatpsiex", oracle_compare(out.psi_hat, "hatpsiex", none, 0.1, 3.0),
                       false);
            engine_row("v3ex", oracle_compare(out.V3, "v3ex", none, 0.1, 3.0), false);
            engine_row("q1", oracle_compare(q1, "q1", none, 0.1, 3.0), false);
            pair_row("v3ex+hatpsiex", "worked parameter point",
                     pair_residual_sup("v3ex", none, "hatpsiex", none, 0.0, g),
                     pair_tol("hatpsiex", none, g));
            // q1^2 + q1' = v3ex, first-order closure of the re-parameterization
            GridFn q1o = oracle_sample("q1", none, g);
            GridFn v3o = oracle_sample("v3ex", none, g);
            GridFn dq1 = deriv1(q1o);
            double worst = 0.0;
            for (std::size_t i = 4; i + 4 < g.n; ++i)
                worst = std::max(worst, std::abs(q1o.values[i] * q1o.values[i] + dq1.values[i] -
                                                 v3o.values[i]));
            pair_row("q1-closure", "worked parameter point", worst, 1e-5);
        }
    }

    // ---- Fokker-Planck family ----
    {
        if (selected("v3fok") || selected("solzerofok")) {
            Grid g = make_grid(-4.0, 4.0, N);
            OracleParams p0{{"k", 0.0}, {"gamma", -0.9}};
            OracleParams s0{{"k", 0.0}, {"gamma", -0.9}, {"C1", -0.25}, {"C2", 0.0}};
            double ge = gamma_engine_for("v3fok", p0, g.a);
            ConfluentSeed seed = build_seed(seed_from_hermite(0, g), ge);
            TransformOutput out = missing_state(PotentialSpec::oscillator_fp(), seed, -0.25, 0.0);
            engine_row("v3fok", oracle_compare(out.V3, "v3fok", p0, -4.0, 4.0), false);
            engine_row("solzerofok", oracle_compare(out.psi_hat, "solzerofok", s0, -4.0, 4.0),
                       false);
            pair_row("v3fok+solzerofok[C2=0]", params_str(s0),
                     pair_residual_sup("v3fok", p0, "solzerofok", s0, 0.0, g),
                     pair_tol("solzerofok", s0, g));
            // the C2 branch as printed disagrees with the transformed equation
            OracleParams s1{{"k", 0.0}, {"gamma", -0.9}, {"C1", -0.25}, {"C2", 1.0}};
            Grid gs = make_grid(-2.0, 2.0, 401);  // quadrature-heavy entry, small window
            pair_row("v3fok+solzerofok[C2=1]", params_str(s1),
                     pair_residual_sup("v3fok", p0, "solzerofok", s1, 0.0, gs),
                     pair_tol("solzerofok", s1, gs));
        }

        if (selected("v0")) {
            Grid g = make_grid(-4.0, 4.0, N);
            OracleParams none;
            double ge = -0.9 + hermite_seed_offset(0, g.a);
            ConfluentSeed seed = build_seed(seed_from_hermite(0, g), ge);
            TransformOutput out = missing_state(PotentialSpec::oscillator_fp(), seed, -0.25, 0.0);
            FPStationary st = transformed_drift(out);
            engine_row("v0", oracle_compare(st.Vdrift, "v0", none, -4.0, 4.0), false);
            // e^{-v0} must solve the k=0 transformed equation
            GridFn vo = oracle_sample("v0", none, g);
            GridFn psio = map(vo, [](double v) { return std::exp(-v); });
            OracleParams p0{{"k", 0.0}, {"gamma", -0.9}};
            GridFn V3o = oracle_sample("v3fok", p0, g);
            pair_row("v0-state", "set k=0", sup_abs(masked_residual(V3o, 0.0, psio, {})),
                     pair_tol("v0", none, g));
        }

        if (selected("v1")) {
            Grid g = make_grid(0.05, 4.0, N);
            OracleParams none;
            double ge = 0.1 + hermite_seed_offset(1, g.a);
            ConfluentSeed seed = build_seed(seed_from_hermite(1, g), ge);
            TransformOutput out = missing_state(PotentialSpec::oscillator_fp(), seed, 1.0, 0.0);
            FPStationary st = transformed_drift(out);
            engine_row("v1", oracle_compare(st.Vdrift, "v1", none, 0.1, 4.0), false);
            GridFn vo = oracle_sample("v1", none, g);
            GridFn psio = map(vo, [](double v) { return std::exp(-v); });
            OracleParams p1{{"k", 1.0}, {"gamma", 0.1}};
            GridFn V3o = oracle_sample("v3fok", p1, g);
            pair_row("v1-state", "set k=1", sup_abs(masked_residual(V3o, 2.0, psio, {})),
                     pair_tol("v1", none, g));
        }
    }

    bool pass = true;
    for (const auto& r : rows)
        if (r.status == "FAIL") pass = false;

    if (as_json) {
        json j;
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"section", r.section},
                                 {"name", r.name},
                                 {"params", r.params},
                                 {"sup_abs", r.sup_abs},
                                 {"sup_rel", r.sup_rel},
                                 {"status", r.status}});
        j["pass"] = pass;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "section  entry                          sup_abs       sup_rel       status\n";
        std::cout << "-------  -----------------------------  ------------  ------------  ------\n";
        for (const auto& r : rows) {
            char line[160];
            std::snprintf(line, sizeof line, "%-7s  %-29s  %-12.4e  %-12.4e  %s\n",
                          r.section.c_str(), r.name.c_str(), r.sup_abs, r.sup_rel,
                          r.status.c_str());
            std::cout << line;
        }
        std::cout << (pass ? "verify: PASS" : "verify: FAIL") << "\n";
    }
    return pass ? 0 : 1;
}

}  // namespace

// ----------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"susy-forge: confluent Darboux transformations of 1D Schrodinger operators"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    RunCfg tcfg, scfg, dcfg, fcfg;
    bool t_strict = false, t_allow = false, d_strict = false, d_allow = false;
    double s_gmin = 0.0, s_gmax = 0.0;
    long s_count = 0, f_k = 0;
    double d_m = 1.0, d_E = 1.0, d_k1 = 1.0, d_k2 = 0.0;
    std::vector<std::string> v_entries;
    bool v_json = false;

    CLI::App* t = app.add_subcommand("transform", "confluent transformation of a 1D system");
    add_common_options(t, tcfg, true);
    auto* t_s = t->add_flag("--strict", t_strict, "fail on singular gamma (default)");
    auto* t_a = t->add_flag("--allow-singular", t_allow,
                            "emit sentinel values at singular nodes instead of failing");
    t_s->excludes(t_a);
    t_a->excludes(t_s);

    CLI::App* s = app.add_subcommand("gamma-scan", "regularity/residual scan over gamma");
    add_common_options(s, scfg, true);
    s->add_option("--gamma-min", s_gmin, "scan start")->required();
    s->add_option("--gamma-max", s_gmax, "scan end")->required();
    s->add_option("--count", s_count, "number of scan points")->required();

    CLI::App* d = app.add_subcommand("dirac", "pseudoscalar Dirac adapter");
    add_common_options(d, dcfg, false);
    d->add_option("--m", d_m, "mass")->capture_default_str();
    d->add_option("--E", d_E, "energy (|E| = m required)")->capture_default_str();
    d->add_option("--k1", d_k1, "spinor constant k1")->capture_default_str();
    d->add_option("--k2", d_k2, "spinor constant k2")->capture_default_str();
    auto* d_s = d->add_flag("--strict", d_strict, "fail on singular gamma (default)");
    auto* d_a = d->add_flag("--allow-singular", d_allow,
                            "emit sentinel values at singular nodes instead of failing");
    d_s->excludes(d_a);
    d_a->excludes(d_s);

    CLI::App* f = app.add_subcommand("fokker-planck", "Fokker-Planck drift adapter");
    add_common_options(f, fcfg, false);
    f->add_option("--k", f_k, "separation index (eps = 2k)")->required();

    CLI::App* v = app.add_subcommand("verify", "closed-form catalog verification suite");
    v->add_option("--entry", v_entries, "entries to check (default: all)");
    v->add_flag("--json", v_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (t->parsed()) {
            return cmd_transform(tcfg, t_allow, resolve_output(tcfg, argc, argv));
        } else if (s->parsed()) {
            return cmd_gamma_scan(scfg, s_gmin, s_gmax, s_count,
                                  resolve_output(scfg, argc, argv));
        } else if (d->parsed()) {
            return cmd_dirac(dcfg, d_m, d_E, d_k1, d_k2, d_allow,
                             resolve_output(dcfg, argc, argv));
        } else if (f->parsed()) {
            return cmd_fokker_planck(fcfg, f_k, resolve_output(fcfg, argc, argv));
        } else if (v->parsed()) {
            return cmd_verify(v_entries, v_json);
        }
    } catch (const SingularGammaError& e) {
        std::cerr << "error (singular gamma): " << e.what() << "\n";
        return 2;
    } catch (const NonpositiveStateError& e) {
        std::cerr << "error (nonpositive state): " << e.what() << "\n";
        return 2;
    } catch (const NodeObstructionError& e) {
        std::cerr << "error (node obstruction): " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error (domain): " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error (filesystem): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error (runtime): " << e.what() << "\n";
        return 2;
    }
    return 0;
}
