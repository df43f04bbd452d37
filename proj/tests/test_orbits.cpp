#include "blowup/errors.hpp"
#include "blowup/orbits.hpp"
#include "blowup/phase_field.hpp"

#include <doctest.h>

#include <cmath>

using namespace blowup;

namespace {

const Params kBase = validate_params(1.5, 3.0);

} // namespace

TEST_CASE("launch from P2 follows the unstable eigenvector into Z > 0")
{
    const PhasePoint s = launch_from_P2(kBase, 1e-6);
    // e3 proportional to (-25, -150, 21) at m = 1.5, sigma = 3.
    const double n = std::sqrt(25.0 * 25.0 + 150.0 * 150.0 + 21.0 * 21.0);
    CHECK(s.x == doctest::Approx(0.01 - 1e-6 * 25.0 / n).epsilon(1e-14));
    CHECK(s.y == doctest::Approx(0.04 - 1e-6 * 150.0 / n).epsilon(1e-14));
    CHECK(s.z == doctest::Approx(1e-6 * 21.0 / n).epsilon(1e-14));
    CHECK(s.z > 0.0);
    CHECK_THROWS_AS(launch_from_P2(kBase, 0.0), DomainError);
    CHECK_THROWS_AS(launch_from_P2(kBase, 1e-3), DomainError);
}

TEST_CASE("P2 orbit at sigma = 3 enters the parabola")
{
    const OrbitRun run = run_from_P2(kBase);
    CHECK(run.fate.kind == FateKind::EntersParabola);
    REQUIRE(run.fate.lambda_hat);
    const double lam = *run.fate.lambda_hat;
    CHECK(lam > -0.1);
    CHECK(lam < 0.0);
    CHECK(run.fate.entry_point.x < 1e-4);
    CHECK(parabola_distance(run.fate.entry_point, kBase) < 1e-4);
    CHECK(interface_xi_of_lambda(lam, kBase) <= derive_exponents(kBase).xi_max + 1e-6);

    SUBCASE("X never increases and Y never increases while positive")
    {
        const auto& s = run.trajectory.samples;
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s[i].point.x - s[i - 1].point.x <= 1e-9);
            if (s[i - 1].point.y >= 0.0)
                CHECK(s[i].point.y - s[i - 1].point.y <= 1e-9);
            CHECK(s[i - 1].point.z - s[i].point.z <= 1e-9);
        }
    }
}

TEST_CASE("P2 orbit at sigma = 3.4 escapes towards Q3")
{
    const Params p = validate_params(1.5, 3.4);
    const OrbitRun run = run_from_P2(p);
    CHECK(run.fate.kind == FateKind::EntersQ3);
    CHECK(run.fate.entry_point.z > derive_exponents(p).z_max);
    CHECK(run.fate.entry_point.y <= vertex_lambda(p) + 1e-10);

    SUBCASE("the orbit never returns across the midplane")
    {
        const Field f = [p](const PhasePoint& q) { return vector_field(q, p); };
        const std::vector<EventSpec> floor{
            {"floor", [](const PhasePoint& q) { return q.y + 1e3; }, Direction::Falling, true}};
        const Trajectory after = integrate(f, run.fate.entry_point, floor, {});
        CHECK(after.termination == Termination::Event);
        for (const auto& s : after.samples) {
            CHECK(s.point.y <= vertex_lambda(p) + 1e-10);
            CHECK(s.point.z > derive_exponents(p).z_max);
        }
    }
}

TEST_CASE("P2 orbit close to the critical sigma lands near the vertex")
{
    const Params p = validate_params(1.5, 3.285);
    const OrbitRun run = run_from_P2(p);
    REQUIRE(run.fate.on_parabola());
    const double far = std::abs(*run_from_P2(kBase).fate.lambda_hat - vertex_lambda(kBase));
    const double near = std::abs(*run.fate.lambda_hat - vertex_lambda(p));
    CHECK(near < 0.01);
    CHECK(near < far / 5.0);
}

TEST_CASE("fates are stable under tighter tolerances and a smaller offset")
{
    for (double s : {3.0, 3.275, 3.4}) {
        const Params p = validate_params(1.5, s);
        const FateKind base = run_from_P2(p).fate.kind;
        CHECK(base != FateKind::Inconclusive);
        CHECK(run_from_P2(p, IntegrationControls{}.tightened(10.0)).fate.kind == base);
        CHECK(run_from_P2(p, {}, default_delta / 2.0).fate.kind == base);
    }
}

TEST_CASE("lambda of sigma")
{
    const LambdaOfSigma a = lambda_of_sigma(1.5, 3.0);
    CHECK(a.kind == LambdaOfSigma::Kind::Value);
    CHECK(a.lambda > -0.1);
    CHECK(a.lambda < 0.0);
    CHECK(lambda_of_sigma(1.5, 3.4).kind == LambdaOfSigma::Kind::NotEntering);

    const LambdaOfSigma near2 = lambda_of_sigma(1.5, 2.05);
    REQUIRE(near2.kind == LambdaOfSigma::Kind::Value);
    CHECK(std::abs(near2.lambda) < std::abs(a.lambda));

    const double l22 = lambda_of_sigma(1.5, 2.2).lambda;
    const double l25 = lambda_of_sigma(1.5, 2.5).lambda;
    CHECK(l22 > l25);
    CHECK(l25 > a.lambda);
}

TEST_CASE("sigma star bisection")
{
    SUBCASE("brackets with equal fates are rejected")
    {
        CHECK_THROWS_AS(sigma_star(1.5, {3.0, 3.1}, 1e-3), BracketError);
    }
    SUBCASE("a coarse tolerance gives one step")
    {
        const ShootResult r = sigma_star(1.5, {3.0, 3.4}, 0.2);
        CHECK(r.iterations == 1);
        CHECK(r.bracket.first == doctest::Approx(3.2));
        CHECK(r.bracket.second == doctest::Approx(3.4));
    }
    SUBCASE("the critical sigma at m = 1.5")
    {
        const ShootResult r = sigma_star(1.5, {3.0, 3.4}, 1e-3);
        CHECK(r.bracket.second - r.bracket.first <= 1e-3);
        CHECK(r.sigma_star > 3.235);
        CHECK(r.sigma_star < 3.335);
        CHECK(r.fate_at_ends.first.on_parabola());
        CHECK(r.fate_at_ends.second.kind == FateKind::EntersQ3);
        // Deterministic.
        CHECK(sigma_star(1.5, {3.0, 3.4}, 1e-3).sigma_star == r.sigma_star);
    }
}

TEST_CASE("launch from P0 on the center family")
{
    const PhasePoint s = launch_from_P0(0.1, 1e-6, kBase);
    CHECK(s.x == doctest::Approx(9.5e-5).epsilon(1e-12));
    CHECK(s.y == doctest::Approx(4.7e-4).epsilon(1e-12));
    CHECK(s.z == 1e-6);
    CHECK(norm(launch_from_P0(0.1, 1e-10, kBase)) < 1e-5);
    CHECK_THROWS_AS(launch_from_P0(0.004, 1e-6, kBase), DomainError);
    CHECK_THROWS_AS(launch_from_P0(0.1, 1e-4, kBase), DomainError);
    CHECK_THROWS_AS(launch_from_P0(-1.0, 1e-6, kBase), DomainError);
}

TEST_CASE("orbits out of P0 can enter the parabola")
{
    const OrbitRun run = run_orbit(kBase, launch_from_P0(10.0, 1e-6, kBase), {});
    CHECK(run.fate.kind == FateKind::EntersParabola);
    REQUIRE(run.fate.lambda_hat);
    CHECK(*run.fate.lambda_hat > vertex_lambda(kBase));
}

TEST_CASE("chart around Q1")
{
    CHECK(launch_from_Q1_chart(Q1Mode::TangentV1, 1e-5, kBase) == ChartPoint{1e-5, 1e-5, 0.0});
    CHECK(launch_from_Q1_chart(Q1Mode::TangentV2Minus, 1e-5, kBase) == ChartPoint{0.0, -1e-5, 0.0});

    SUBCASE("the plane z = 0 connects Q1 to P2")
    {
        const ChartRun run = run_from_Q1(kBase, launch_from_Q1_chart(Q1Mode::TangentV1, 1e-5, kBase), {}, 0.0);
        const PhasePoint end = run.chart.back().point;
        CHECK(end.x == doctest::Approx(100.0).epsilon(1e-3));
        CHECK(end.y == doctest::Approx(4.0).epsilon(1e-3));
        CHECK(end.z == 0.0);
        CHECK_FALSE(run.phase);
    }
    SUBCASE("handoff to the finite chart preserves the point")
    {
        const ChartRun run = run_from_Q1(kBase, launch_from_Q1_chart(Q1Mode::TangentV1, 1e-5, kBase), {}, 1e-2);
        REQUIRE(run.phase);
        const PhasePoint c = run.chart.back().point;
        CHECK(c.x == doctest::Approx(1e-2).epsilon(1e-9));
        const PhasePoint x = run.phase->trajectory.samples.front().point;
        CHECK(x.x == doctest::Approx(1.0 / c.x).epsilon(1e-14));
        CHECK(x.y == doctest::Approx(c.y / c.x).epsilon(1e-14));
        // Inside z = 0 the continuation settles on P2.
        CHECK(norm(run.phase->trajectory.back().point - p2_coordinates(kBase)) < 1e-6);
    }
}
