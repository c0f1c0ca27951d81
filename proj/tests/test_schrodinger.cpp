#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <susyforge/grid.hpp>
#include <susyforge/schrodinger.hpp>

using namespace susyforge;

TEST_CASE("potential builtins and labels") {
    PotentialSpec vc = PotentialSpec::constant(2.0);
    CHECK(vc(17.3) == Catch::Approx(4.0));
    CHECK(vc.label() == "constant");
    CHECK(vc.param_c() == Catch::Approx(2.0));
    CHECK_FALSE(vc.is_tabulated());

    PotentialSpec vd = PotentialSpec::quartic_dirac();
    CHECK(vd(2.0) == Catch::Approx(16.0 - 4.0));
    CHECK(vd.label() == "quartic_dirac");
    CHECK_THROWS_AS(vd.param_c(), std::logic_error);

    PotentialSpec vf = PotentialSpec::oscillator_fp();
    CHECK(vf(3.0) == Catch::Approx(8.0));
}

TEST_CASE("tabulated potentials evaluate by interpolation and guard their range") {
    Grid g = make_grid(0.0, 2.0, 41);
    GridFn vals = sample(g, [](double x) { return x * x * x; });
    PotentialSpec vt = PotentialSpec::tabulated(vals);
    CHECK(vt.is_tabulated());
    CHECK(vt(0.77) == Catch::Approx(0.77 * 0.77 * 0.77).margin(1e-12));
    CHECK_THROWS_AS(vt(2.5), std::domain_error);

    PotentialSpec vtr = PotentialSpec::transformed(vals);
    CHECK(vtr.label() == "transformed");

    CHECK_THROWS_AS(PotentialSpec::tabulated({0.0, 1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("solve_ivp reproduces the constant-potential closed form") {
    // psi'' = (c^2 - eps) psi with c = 1, eps = 0.6, kappa = sqrt(0.4)
    const double c = 1.0, eps = 0.6;
    const double kap = std::sqrt(c * c - eps);
    const double k1 = 0.7, k2 = -0.4;
    auto exact = [&](double x) { return k1 * std::exp(kap * x) + k2 * std::exp(-kap * x); };
    auto dexact = [&](double x) {
        return kap * (k1 * std::exp(kap * x) - k2 * std::exp(-kap * x));
    };

    Grid g = make_grid(0.0, 3.0, 1501);
    // anchor mid-grid so both integration directions are exercised
    double x0 = 1.5;
    CauchyData ic{x0, exact(x0), dexact(x0)};
    SolutionPair sol = solve_ivp(PotentialSpec::constant(c), eps, ic, g);

    CHECK(sup_diff(sol.psi, sample(g, exact)) <= 1e-8);
    CHECK(sup_diff(sol.dpsi, sample(g, dexact)) <= 1e-7);
    CHECK(sol.energy == Catch::Approx(eps));
    CHECK(sol.overflow_nodes.empty());
}

TEST_CASE("solve_ivp converges at fourth order") {
    // Oscillatory case (eps > c^2) so truncation dominates: the decaying
    // exponential's truncation error sits at the roundoff floor on these
    // grids and its halving ratio is noise. Exact solution sin(3x)/3.
    auto exact = [](double x) { return std::sin(3.0 * x) / 3.0; };
    auto err = [&](std::size_t n) {
        Grid g = make_grid(0.0, 3.0, n);
        CauchyData ic{0.0, 0.0, 1.0};
        SolutionPair s = solve_ivp(PotentialSpec::constant(1.0), 10.0, ic, g);
        return sup_diff(s.psi, sample(g, exact));
    };
    CHECK(err(401) / err(801) >= 12.0);
}

TEST_CASE("solve_ivp input validation") {
    Grid g = make_grid(0.0, 1.0, 101);
    CHECK_THROWS_AS(solve_ivp(PotentialSpec::constant(1.0), 0.0, {0.0, 0.0, 0.0}, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_ivp(PotentialSpec::constant(1.0), 0.0, {0.5005, 1.0, 0.0}, g),
                    std::invalid_argument);
}

TEST_CASE("solve_ivp flags overflowing nodes instead of failing") {
    // psi'' = 100 psi grows like e^{10 x}; from x = 0 to 70 that passes 1e300
    Grid g = make_grid(0.0, 70.0, 1401);
    SolutionPair s = solve_ivp(PotentialSpec::constant(0.0), -100.0, {0.0, 1.0, 10.0}, g);
    CHECK_FALSE(s.overflow_nodes.empty());
    bool any_finite_tail = false;
    for (std::size_t i : s.overflow_nodes) CHECK(i > 900);
    for (std::size_t i = 0; i < 100; ++i)
        any_finite_tail = any_finite_tail || std::isfinite(s.psi.values[i]);
    CHECK(any_finite_tail);
}

TEST_CASE("solve_inhomogeneous matches a frozen variation-of-parameters value") {
    // w'' - w = -e^{-x}, w(0) = w'(0) = 0, exact w = (e^x - e^{-x}(1 + 2x)) / 4
    Grid g = make_grid(0.0, 2.0, 2001);
    GridFn src = sample(g, [](double x) { return -std::exp(-x); });
    SolutionPair w =
        solve_inhomogeneous(PotentialSpec::constant(1.0), 0.0, src, {0.0, 0.0, 0.0}, g);

    CHECK(w.psi.values[g.index_of(1.0)] ==
          Catch::Approx(-0.4036608762361795676).margin(1e-9));
    auto exact = [](double x) {
        return (std::exp(x) - std::exp(-x) * (1.0 + 2.0 * x)) / 4.0;
    };
    CHECK(sup_diff(w.psi, sample(g, [&](double x) { return -exact(x); })) <= 1e-9);
    // carried derivative agrees with numerical differentiation of the solution
    CHECK(sup_diff(w.dpsi, deriv1(w.psi)) <= 1e-8);
}

TEST_CASE("solve_inhomogeneous with zero source reduces to solve_ivp") {
    Grid g = make_grid(0.0, 3.0, 601);
    GridFn zero(g);
    CauchyData ic{0.0, 1.0, -0.5};
    SolutionPair a = solve_inhomogeneous(PotentialSpec::constant(1.0), 0.6, zero, ic, g);
    SolutionPair b = solve_ivp(PotentialSpec::constant(1.0), 0.6, ic, g);
    CHECK(sup_diff(a.psi, b.psi) <= 1e-9);

    Grid other = make_grid(0.0, 3.0, 51);
    GridFn bad(other);
    CHECK_THROWS_AS(solve_inhomogeneous(PotentialSpec::constant(1.0), 0.6, bad, ic, g),
                    std::invalid_argument);
}

TEST_CASE("wronskian2 uses the f g' - f' g convention") {
    Grid g = make_grid(-1.0, 1.0, 201);
    SolutionPair f;
    f.psi = sample(g, [](double x) { return std::exp(x); });
    f.dpsi = sample(g, [](double x) { return std::exp(x); });
    SolutionPair h;
    h.psi = sample(g, [](double x) { return std::exp(-x); });
    h.dpsi = sample(g, [](double x) { return -std::exp(-x); });
    GridFn w = wronskian2(f, h);
    CHECK(sup_abs(w) == Catch::Approx(2.0).margin(1e-12));
    for (std::size_t i = 0; i < g.n; i += 40)
        CHECK(w.values[i] == Catch::Approx(-2.0).margin(1e-12));
}

TEST_CASE("residual vanishes on true solutions and masks boundary stencils") {
    Grid g = make_grid(0.0, 3.0, 1501);
    const double eps = 0.6;
    const double kap = std::sqrt(1.0 - eps);
    SolutionPair s = solve_ivp(PotentialSpec::constant(1.0), eps, {0.0, 1.0, kap}, g);
    GridFn r = residual(PotentialSpec::constant(1.0), eps, s.psi);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.values[i] == 0.0);
        CHECK(r.values[g.n - 1 - i] == 0.0);
    }
    CHECK(sup_abs(r) <= 1e-7);
}
