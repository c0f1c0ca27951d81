#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <susyforge/confluent.hpp>
#include <susyforge/dirac.hpp>
#include <susyforge/grid.hpp>
#include <susyforge/oracles.hpp>

using namespace susyforge;

TEST_CASE("pseudoscalar systems: builtin and tabulated construction") {
    Grid g = make_grid(0.0, 2.0, 401);
    PseudoscalarSystem b = PseudoscalarSystem::builtin(g, 1.0, 1.0);
    CHECK(b.builtin_inverted_parabola);
    CHECK(b.q.values[g.index_of(1.5)] == Catch::Approx(-2.25));
    CHECK(b.dq.values[g.index_of(1.5)] == Catch::Approx(-3.0));

    PseudoscalarSystem t = PseudoscalarSystem::tabulated(
        sample(g, [](double x) { return -x * x; }), 1.0, 1.0);
    CHECK_FALSE(t.builtin_inverted_parabola);
    CHECK(sup_diff(t.dq, b.dq) <= 1e-10);

    CHECK_THROWS_AS(PseudoscalarSystem::builtin(g, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PseudoscalarSystem::tabulated(GridFn(g), -1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("to_schrodinger reduces q to V = q^2 + q' at eps = E^2 - m^2") {
    Grid g = make_grid(0.0, 2.0, 401);
    auto [Vb, epsb] = to_schrodinger(PseudoscalarSystem::builtin(g, 1.0, 1.0));
    CHECK(Vb.label() == "quartic_dirac");
    CHECK(epsb == Catch::Approx(0.0).margin(1e-15));
    CHECK(Vb(1.3) == Catch::Approx(std::pow(1.3, 4) - 2.6));

    PseudoscalarSystem t = PseudoscalarSystem::tabulated(
        sample(g, [](double x) { return -x * x; }), 2.0, 1.0);
    auto [Vt, epst] = to_schrodinger(t);
    CHECK(Vt.is_tabulated());
    CHECK(epst == Catch::Approx(1.0 - 4.0));
    CHECK(Vt(1.3) == Catch::Approx(std::pow(1.3, 4) - 2.6).margin(1e-9));
}

TEST_CASE("spinor_at_Em requires the mass shell") {
    Grid g = make_grid(0.0, 2.0, 401);
    PseudoscalarSystem sys = PseudoscalarSystem::builtin(g, 1.0, 1.5);
    CHECK_THROWS_AS(spinor_at_Em(sys, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spinor at E = m: pure upper component") {
    Grid g = make_grid(0.0, 2.0, 2001);
    PseudoscalarSystem sys = PseudoscalarSystem::builtin(g, 1.0, 1.0);
    Spinor sp = spinor_at_Em(sys, 1.0, 0.0);
    CHECK_FALSE(sp.degenerate);
    // Q = -x^3/3 is integrated exactly by the fourth-order rule
    GridFn ref = sample(g, [](double x) { return std::exp(-x * x * x / 3.0); });
    CHECK(sup_diff(sp.phi1, ref) <= 1e-12);
    CHECK(sup_abs(sp.phi2) == 0.0);
}

TEST_CASE("spinor at E = m with both constants matches the quadrature oracle") {
    Grid g = make_grid(0.0, 2.0, 2001);
    PseudoscalarSystem sys = PseudoscalarSystem::builtin(g, 1.0, 1.0);
    Spinor sp = spinor_at_Em(sys, 1.0, 1.0);

    OracleParams p{{"m", 1.0}, {"k1", 1.0}, {"k2", 1.0}};
    OracleReport rep = oracle_compare(sp.phi1, "phi1", p, 0.0, 2.0);
    CAPTURE(rep.sup_abs, rep.sup_rel, rep.worst_x);
    CHECK(rep.pass);
    GridFn ref2 = sample(g, [](double x) { return std::exp(x * x * x / 3.0); });
    CHECK(sup_diff(sp.phi2, ref2) <= 1e-10);

    auto [r1, r2] = spinor_residual(sys, sp);
    CHECK(sup_abs(r1, 4, g.n - 5) <= 1e-6);
    CHECK(sup_abs(r2, 4, g.n - 5) <= 1e-6);
}

TEST_CASE("spinor at E = -m uses the mirrored closed form") {
    Grid g = make_grid(0.0, 2.0, 2001);
    PseudoscalarSystem sys = PseudoscalarSystem::builtin(g, 1.0, -1.0);
    Spinor sp = spinor_at_Em(sys, 1.0, 0.5);
    GridFn ref1 = sample(g, [](double x) { return std::exp(-x * x * x / 3.0); });
    CHECK(sup_diff(sp.phi1, ref1) <= 1e-12);

    auto [r1, r2] = spinor_residual(sys, sp);
    CHECK(sup_abs(r1, 4, g.n - 5) <= 1e-6);
    CHECK(sup_abs(r2, 4, g.n - 5) <= 1e-6);

    Spinor zero = spinor_at_Em(sys, 0.0, 0.0);
    CHECK(zero.degenerate);
    CHECK(sup_abs(zero.phi1) == 0.0);
    CHECK(sup_abs(zero.phi2) == 0.0);
}

TEST_CASE("cubic seed is a zero mode of the quartic potential") {
    Grid g = make_grid(0.05, 3.0, 2001);
    SolutionPair u = cubic_seed(g);
    CHECK(u.energy == 0.0);
    CHECK(u.potential.label() == "quartic_dirac");
    GridFn r = residual(PotentialSpec::quartic_dirac(), 0.0, u.psi);
    CHECK(sup_abs(r) <= 1e-6);
    CHECK(sup_diff(u.dpsi, deriv1(u.psi)) <= 1e-7);
}

TEST_CASE("worked quartic pipeline reproduces the q1 profile") {
    Grid g = make_grid(0.05, 3.0, 2001);
    SolutionPair u = cubic_seed(g);
    double gamma_e = -0.1 + cubic_seed_offset(0.05);
    ConfluentSeed seed = build_seed(u, gamma_e);
    REQUIRE(seed.singular_nodes.empty());
    TransformOutput out = missing_state(PotentialSpec::quartic_dirac(), seed, -0.1, 0.0);

    OracleReport hp = oracle_compare(out.psi_hat, "hatpsiex", {}, 0.1, 3.0);
    CAPTURE(hp.sup_abs, hp.sup_rel, hp.worst_x);
    CHECK(hp.pass);
    OracleReport v3 = oracle_compare(out.V3, "v3ex", {}, 0.1, 3.0);
    CAPTURE(v3.sup_abs, v3.sup_rel, v3.worst_x);
    CHECK(v3.pass);

    GridFn q1 = transformed_q(out);
    OracleReport rq = oracle_compare(q1, "q1", {}, 0.1, 3.0);
    CAPTURE(rq.sup_abs, rq.sup_rel, rq.worst_x);
    CHECK(rq.pass);

    // closure: q1^2 + q1' must rebuild the transformed potential
    GridFn dq1 = deriv1(q1);
    GridFn closure = zip(q1, dq1, [](double a, double b) { return a * a + b; });
    double worst = 0.0;
    for (std::size_t i = 4; i + 4 < g.n; ++i)
        worst = std::max(worst, std::abs(closure.values[i] - out.V3.values[i]));
    CHECK(worst <= 1e-5);
}

TEST_CASE("transformed_q rejects states with nodes") {
    Grid g = make_grid(0.05, 3.0, 1001);
    SolutionPair u = cubic_seed(g);
    // gamma inside the inadmissible band: D crosses zero, psi_hat has a pole
    ConfluentSeed seed = build_seed(u, -0.5);
    REQUIRE_FALSE(seed.singular_nodes.empty());
    TransformOutput out = missing_state(PotentialSpec::quartic_dirac(), seed, -0.1, 0.0);
    CHECK_THROWS_MATCHES(transformed_q(out), NodeObstructionError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("node near x")));
}
