#include <catch2/catch_amalgamated.hpp>

#include <cfloat>
#include <cmath>

#include <susyforge/confluent.hpp>
#include <susyforge/fokker_planck.hpp>
#include <susyforge/grid.hpp>
#include <susyforge/oracles.hpp>

using namespace susyforge;

TEST_CASE("drift systems and their Schrodinger reduction") {
    Grid g = make_grid(-2.0, 2.0, 801);
    DriftSystem b = DriftSystem::builtin(g, 2.0);
    CHECK(b.builtin_parabolic);
    CHECK(b.k == 2.0);
    CHECK(b.dU.values[g.index_of(1.5)] == Catch::Approx(1.5));
    CHECK(b.d2U.values[g.index_of(1.5)] == Catch::Approx(1.0));

    auto [Vb, epsb] = drift_to_potential(b);
    CHECK(Vb.label() == "oscillator_fp");
    CHECK(epsb == Catch::Approx(4.0));
    CHECK(Vb(1.5) == Catch::Approx(1.25));

    // tabulated quartic drift: V = (U')^2 - U'' = x^6 - 3 x^2
    DriftSystem t = DriftSystem::tabulated(
        sample(g, [](double x) { return x * x * x * x / 4.0; }), 0.5);
    CHECK_FALSE(t.builtin_parabolic);
    auto [Vt, epst] = drift_to_potential(t);
    CHECK(epst == Catch::Approx(1.0));
    for (double x : {-1.7, -0.4, 0.9, 1.6})
        CHECK(Vt(x) == Catch::Approx(std::pow(x, 6) - 3.0 * x * x).margin(1e-8));
}

TEST_CASE("Hermite seeds are oscillator eigenstates") {
    Grid g = make_grid(-4.0, 4.0, 2001);
    CHECK_THROWS_AS(seed_from_hermite(-1, g), std::invalid_argument);

    for (int k : {0, 3}) {
        CAPTURE(k);
        SolutionPair u = seed_from_hermite(k, g);
        CHECK(u.energy == Catch::Approx(2.0 * k));
        CHECK(u.potential.label() == "oscillator_fp");
        GridFn r = residual(PotentialSpec::oscillator_fp(), 2.0 * k, u.psi);
        CHECK(sup_abs(r) <= 1e-8);
        CHECK(sup_diff(u.dpsi, deriv1(u.psi)) <= 1e-8);
    }
}

TEST_CASE("worked k = 0 point: drift, density and residual") {
    Grid g = make_grid(-4.0, 4.0, 2001);
    SolutionPair u = seed_from_hermite(0, g);
    double gamma_e = -0.9 + hermite_seed_offset(0, -4.0);
    ConfluentSeed seed = build_seed(u, gamma_e);
    REQUIRE(seed.singular_nodes.empty());
    TransformOutput out = missing_state(PotentialSpec::oscillator_fp(), seed, -0.25, 0.0);
    FPStationary st = transformed_drift(out);

    CHECK(st.has_state);
    CHECK(st.time_factor_rate == 0.0);
    CHECK(st.sentinel_nodes.empty());

    OracleReport rep = oracle_compare(st.Vdrift, "v0", {}, -4.0, 4.0);
    CAPTURE(rep.sup_abs, rep.sup_rel, rep.worst_x);
    CHECK(rep.pass);
    CHECK(st.Vdrift.values[g.index_of(0.0)] ==
          Catch::Approx(std::log(18.0 / 5.0)).margin(1e-9));

    double gmax = sup_abs(st.g);
    CHECK(st.g.values.front() <= 1e-5 * gmax);
    CHECK(st.g.values.back() <= 1e-5 * gmax);
    CHECK(sup_abs(fp_residual(st)) <= 1e-5);
}

TEST_CASE("worked k = 1 point on the half line") {
    Grid g = make_grid(0.05, 4.0, 2001);
    SolutionPair u = seed_from_hermite(1, g);
    double gamma_e = 0.1 + hermite_seed_offset(1, 0.05);
    ConfluentSeed seed = build_seed(u, gamma_e);
    REQUIRE(seed.singular_nodes.empty());
    TransformOutput out = missing_state(PotentialSpec::oscillator_fp(), seed, 1.0, 0.0);
    FPStationary st = transformed_drift(out);

    CHECK(st.time_factor_rate == Catch::Approx(1.0));
    OracleReport rep = oracle_compare(st.Vdrift, "v1", {}, 0.1, 4.0);
    CAPTURE(rep.sup_abs, rep.sup_rel, rep.worst_x);
    CHECK(rep.pass);
    CHECK(sup_abs(fp_residual(st)) <= 1e-5);

    // drift closure: (Vdrift')^2 - Vdrift'' = V3 - eps, checked away from
    // the left edge where the log-type drift inflates the stencil error
    GridFn d1 = deriv1(st.Vdrift);
    GridFn d2 = deriv2(st.Vdrift);
    double worst = 0.0;
    auto [wlo, whi] = index_window(g, 0.3, 4.0);
    (void)whi;
    for (std::size_t i = wlo; i + 4 < g.n; ++i) {
        double lhs = d1.values[i] * d1.values[i] - d2.values[i];
        worst = std::max(worst, std::abs(lhs - (out.V3.values[i] - out.energy)));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("transformed_drift error channels") {
    Grid g = make_grid(-4.0, 4.0, 2001);
    SolutionPair u = seed_from_hermite(0, g);

    // gamma inside the inadmissible band: D vanishes, hard error
    ConfluentSeed singular = build_seed(u, -0.5);
    REQUIRE_FALSE(singular.singular_nodes.empty());
    TransformOutput bad = missing_state(PotentialSpec::oscillator_fp(), singular, 1.0, 0.0);
    CHECK_THROWS_MATCHES(transformed_drift(bad), SingularGammaError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("singular")));

    // regular gamma with D < 0 and C1 > 0: psi_hat < 0 everywhere
    double gamma_e = -0.9 + hermite_seed_offset(0, -4.0);
    ConfluentSeed seed = build_seed(u, gamma_e);
    TransformOutput flipped = missing_state(PotentialSpec::oscillator_fp(), seed, 0.25, 0.0);
    CHECK_THROWS_MATCHES(transformed_drift(flipped), NonpositiveStateError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("no positive part")));
}

TEST_CASE("seed node at the origin becomes a drift sentinel") {
    Grid g = make_grid(-4.0, 4.0, 2001);
    SolutionPair u = seed_from_hermite(1, g);
    ConfluentSeed seed = build_seed(u, 1.0);
    REQUIRE(seed.singular_nodes.empty());
    TransformOutput out = missing_state(PotentialSpec::oscillator_fp(), seed, 1.0, 0.0);
    FPStationary st = transformed_drift(out);

    std::size_t origin = g.index_of(0.0);
    REQUIRE(st.sentinel_nodes.size() == 1);
    CHECK(st.sentinel_nodes.front() == origin);
    CHECK(st.Vdrift.values[origin] == DBL_MAX);
    CHECK(st.g.values[origin] == 0.0);

    GridFn r = fp_residual(st);
    for (std::size_t i = origin - 8; i <= origin + 8; ++i) CHECK(r.values[i] == 0.0);
    CHECK(sup_abs(r) <= 1e-5);
}

TEST_CASE("stationary_from_drift covers drift-density pairs without state channels") {
    Grid g = make_grid(-4.0, 4.0, 2001);
    GridFn vd = oracle_sample("v0", {}, g);
    GridFn dens = sample(g, [](double x) {
        double den = 18.0 - 10.0 * std::sqrt(M_PI) * susyforge::erf(x);
        double p = 5.0 * std::exp(-x * x / 2.0) / den;
        return p * p;
    });
    FPStationary st = stationary_from_drift(vd, dens);
    CHECK_FALSE(st.has_state);
    CHECK(st.sentinel_nodes.empty());
    CHECK(sup_abs(fp_residual(st)) <= 1e-5);

    Grid other = make_grid(-4.0, 4.0, 101);
    CHECK_THROWS_AS(stationary_from_drift(vd, GridFn(other)), std::invalid_argument);
}
