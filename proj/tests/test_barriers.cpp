#include "blowup/barriers.hpp"
#include "blowup/errors.hpp"
#include "blowup/orbits.hpp"
#include "blowup/phase_field.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace blowup;

namespace {

const Params kBase = validate_params(1.5, 3.0);

const BarrierSpec& find(const std::vector<BarrierSpec>& cat, const std::string& id)
{
    for (const auto& b : cat)
        if (b.id == id)
            return b;
    throw std::runtime_error("missing barrier " + id);
}

} // namespace

TEST_CASE("barrier constants at m = 1.5, sigma = 3")
{
    const BarrierConstants k = barrier_constants(kBase);
    CHECK(k.c1 == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(k.d1 == doctest::Approx(0.005).epsilon(1e-14));
    CHECK(k.y_star == doctest::Approx(-0.5 / 57.0).epsilon(1e-14));
    CHECK(k.x_star == doctest::Approx(1.0 / 900.0).epsilon(1e-14));
    CHECK(k.x3_star == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(k.a4 == doctest::Approx(0.6).epsilon(1e-14));
    // P2 lies on plane3, and k (sigma - 1) X(P2) = 1.
    CHECK(k.A3 * k.x_p2 + k.B3 * k.y_p2 == doctest::Approx(k.C3).epsilon(1e-14));
    CHECK(k.k * 2.0 * k.x_p2 == doctest::Approx(1.0).epsilon(1e-13));
    // r2 passes through (0, Y*).
    CHECK(-k.f2 == doctest::Approx(k.y_star).epsilon(1e-14));
}

TEST_CASE("catalog ids are stable and unique")
{
    const auto ids = barrier_ids();
    CHECK(ids.size() == 14);
    std::map<std::string, int> seen;
    for (const auto& id : ids)
        CHECK(++seen[id] == 1);
    CHECK(ids.front() == "midplane");
}

TEST_CASE("single-point sign values")
{
    const auto cat = barrier_catalog(kBase);
    const BarrierSpec& cyl = find(cat, "cylinder");
    const double y = -0.05;
    const Vec3 p{0.01, y, -y * y - 0.2 * y};
    CHECK(cyl.sign_expression(p) == doctest::Approx(0.01 * -0.1125).epsilon(1e-13));
    CHECK(cyl.flux(p) == doctest::Approx(0.01 * -0.1125).epsilon(1e-13));

    // The vertex saturates the midplane inequality.
    const BarrierSpec& mid = find(cat, "midplane");
    CHECK(std::abs(mid.sign_expression({0.0, -0.1, 0.01})) < 1e-16);
    CHECK(std::abs(mid.flux({0.0, -0.1, 0.01})) < 1e-16);
}

TEST_CASE("closed forms agree with the scalar product against the field")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double m : {1.2, 1.5, 1.8}) {
        for (double s : {2.5, 3.0, 4.0, 7.0}) {
            const Params p = validate_params(m, s);
            for (const auto& b : barrier_catalog(p)) {
                int hits = 0;
                for (int i = 0; i < 400; ++i) {
                    const auto pt = b.sample(U(gen), U(gen), U(gen));
                    if (!pt)
                        continue;
                    ++hits;
                    const double f = b.flux(*pt);
                    CHECK(std::abs(b.sign_expression(*pt) - f) <= 1e-10 * (1.0 + std::abs(f)));
                    if (b.id != "plane_y0")
                        CHECK(std::abs(b.surface(*pt)) <= 1e-12 * (1.0 + std::abs((*pt)[0]) + std::abs((*pt)[1])));
                }
                if (b.id != "plane3")
                    CHECK_MESSAGE(hits > 0, b.id);
            }
        }
    }
}

TEST_CASE("second-order center manifold of P0 is invariant to third order")
{
    for (double m : {1.2, 1.5, 1.8}) {
        for (double s : {2.5, 3.0, 4.0}) {
            const Params p = validate_params(m, s);
            // d/dt [Y - h(X, Z)] on the graph must be O(|X, Z|^3).
            auto defect = [&](double eps) {
                const double x = 0.3 * eps, z = 0.7 * eps;
                const PhasePoint q{x, center_manifold_y(x, z, p), z};
                const PhasePoint f = vector_field(q, p);
                const BarrierConstants k = barrier_constants(p);
                const double hx = 1.0 / k.r + 2.0 * k.q1 * x + k.q2 * z;
                const double hz = -1.0 / k.r + k.q2 * x + 2.0 * k.q3 * z;
                return std::abs(f.y - hx * f.x - hz * f.z);
            };
            const double d1 = defect(1e-3), d2 = defect(5e-4);
            CHECK(d2 / d1 < 0.15);
            CHECK(d2 / d1 > 0.1);
        }
    }
}

TEST_CASE("every barrier passes on the parameter grid")
{
    for (double m : {1.2, 1.5, 1.8}) {
        for (double s : {2.5, 3.0, 4.0}) {
            const auto reports = verify_catalog(validate_params(m, s), 10000, 42);
            CHECK(reports.size() == 14);
            for (const auto& r : reports) {
                CAPTURE(m);
                CAPTURE(s);
                CAPTURE(r.id);
                CHECK(r.violation_count == 0);
                CHECK(r.oracle_gap < 1e-10);
                if (r.id == "plane3") {
                    // X* >= X(P2) throughout this grid.
                    CHECK_FALSE(r.applicable);
                    CHECK(r.samples_tested == 0);
                } else {
                    CHECK(r.samples_tested == 10000);
                    CHECK(r.worst_margin < 0.0);
                }
            }
            CHECK(catalog_passed(reports));
        }
    }
}

TEST_CASE("plane3 is sampled once its sign region opens")
{
    const Params p = validate_params(1.5, 10.0);
    CHECK(plane3_certificate(p));
    const auto r = verify_barrier(find(barrier_catalog(p), "plane3"), 5000, 42);
    CHECK(r.applicable);
    CHECK(r.passed());
    CHECK(r.worst_margin < 0.0);
}

TEST_CASE("verification is deterministic in the seed and rejects bad input")
{
    const auto& b = find(barrier_catalog(kBase), "surface_t");
    const auto r1 = verify_barrier(b, 2000, 42);
    const auto r2 = verify_barrier(b, 2000, 42);
    const auto r3 = verify_barrier(b, 2000, 43);
    CHECK(r1.worst_margin == r2.worst_margin);
    CHECK(r1.samples_tested == r2.samples_tested);
    CHECK(r1.worst_margin != r3.worst_margin);
    CHECK_THROWS_AS(verify_barrier(b, 99, 42), ConstraintError);
    CHECK_THROWS_AS(verify_barrier(find(barrier_catalog(kBase), "plane3"), 1000, 42), ConstraintError);
}

TEST_CASE("a false claim is reported with its violations")
{
    BarrierSpec b = find(barrier_catalog(kBase), "cylinder");
    b.expected = ExpectedSign::Positive;
    const auto r = verify_barrier(b, 500, 42);
    CHECK_FALSE(r.passed());
    CHECK(r.violation_count == 500);
    CHECK(r.violations.size() == max_recorded_violations);
    CHECK(r.worst_margin > 0.0);
}

TEST_CASE("region membership")
{
    const PhasePoint p2 = p2_coordinates(kBase);
    CHECK_FALSE(region_membership(Region::D1, p2.as_vec(), kBase));
    CHECK(region_membership(Region::D1, {0.0, 0.0, 0.0}, kBase));
    CHECK(region_membership(Region::D4, p2.as_vec(), kBase));
    CHECK_FALSE(region_membership(Region::D4, {0.011, 0.01, 0.0}, kBase));
    // R is empty at sigma = 3 since X* = 0.16 > X(P2) = 0.01.
    CHECK_FALSE(region_membership(Region::R, p2.as_vec(), kBase));

    // Chart: the line is y = w/25 and the curve y + w - 1.5y^2 - 0.2yw = 0.
    CHECK(region_membership(Region::S, {1.0, 1.0, 0.0}, kBase));
    CHECK_FALSE(region_membership(Region::S, {1.0, 0.01, 0.0}, kBase));
    CHECK_FALSE(region_membership(Region::S, {1.0, 3.0, 0.0}, kBase));
    CHECK_FALSE(region_membership(Region::S, {1.0, 1.0, 0.1}, kBase));

    // D0 at the vertex roof 3 r^2/16 = 0.0075.
    CHECK(region_membership(Region::D0, {0.001, -0.01, 0.005}, kBase));
    CHECK_FALSE(region_membership(Region::D0, {0.001, -0.01, 0.008}, kBase));
    CHECK_FALSE(region_membership(Region::D0, {0.001, 0.01, 0.005}, kBase));
    CHECK(region_membership(Region::D0, {0.001, -0.01, 0.008}, kBase, -0.2));
    CHECK_THROWS_AS(region_membership(Region::D0, {0.0, 0.0, 0.0}, kBase, 0.1), DomainError);

    CHECK(to_string(region_from_string("D3")) == "D3");
    CHECK_THROWS_AS(region_from_string("D9"), ConstraintError);
}

TEST_CASE("D2 and D3 follow the line r2 and the curve g")
{
    // Close to sigma = 2 the small-sigma configuration is realized.
    const Params p = validate_params(1.5, 2.001);
    const BarrierConstants k = barrier_constants(p);
    const double x = 0.5 * k.x_star;
    const double y_line = k.e2 * x - k.f2;
    const double y2 = 0.5 * y_line;
    CHECK(region_membership(Region::D2, {x, y2, -y2 * y2 - k.r * y2 + 1e-9}, p));
    CHECK_FALSE(region_membership(Region::D2, {x, y2, -y2 * y2 - k.r * y2 - 1e-9}, p));
    // Just left of r2 and above the cylinder.
    const double y3 = y_line - 1e-6;
    CHECK(region_membership(Region::D3, {x, y3, -y3 * y3 - k.r * y3 + 1e-12}, p));
    CHECK_FALSE(region_membership(Region::D2, {x, y3, -y3 * y3 - k.r * y3 + 1e-12}, p));
}

TEST_CASE("empirical sigma0 and sigma1")
{
    // r2 right of r1 needs (sigma - 2)/(m - 1) < (m - 1)/(6(2 sigma + 5 - m)), i.e. sigma - 2 < ~0.0055 at m = 1.5.
    const auto s0 = empirical_sigma0(1.5, {2.001, 2.005, 2.01, 2.1, 3.0});
    REQUIRE(s0);
    CHECK(*s0 == 2.005);
    CHECK_FALSE(empirical_sigma0(1.5, {2.5, 3.0, 4.0}));
    CHECK(small_sigma_hypotheses(validate_params(1.5, 2.005)).all());
    CHECK_FALSE(small_sigma_hypotheses(validate_params(1.5, 2.006)).r2_right_of_r1);

    // X* < X(P2) first holds between sigma = 8 and 10 at m = 1.5.
    CHECK_FALSE(plane3_certificate(validate_params(1.5, 8.0)));
    const auto s1 = empirical_sigma1(1.5, {12.0, 3.4, 8.0, 10.0});
    REQUIRE(s1);
    CHECK(*s1 == 10.0);
}

TEST_CASE("orbit out of P2 at sigma = 3.4 does not come back across the midplane")
{
    const Params p = validate_params(1.5, 3.4);
    IntegrationControls c;
    c.max_step = 0.05;
    const OrbitRun run = run_from_P2(p, c);
    REQUIRE(run.fate.kind == FateKind::EntersQ3);
    // Continue past the terminal certificate to look for a return.
    IntegrationControls longer = c;
    longer.max_time = 50.0;
    const Trajectory tail = integrate([&](const PhasePoint& q) { return vector_field(q, p); },
                                      run.trajectory.samples.back().point, {}, longer);
    Trajectory joined = run.trajectory;
    const double t0 = joined.samples.back().eta;
    for (std::size_t i = 1; i < tail.samples.size(); ++i)
        joined.samples.push_back({t0 + tail.samples[i].eta, tail.samples[i].point});

    const OrbitBarrierCheck chk = check_orbit_barriers(joined, p);
    CHECK(chk.crossed_midplane);
    CHECK_FALSE(chk.re_entered);
    CHECK(chk.certificate_held);
}

TEST_CASE("X decreases and Z increases along orbits in Y <= 0")
{
    for (double s : {3.0, 3.4}) {
        const Params p = validate_params(1.5, s);
        const OrbitRun run = run_from_P2(p);
        const OrbitBarrierCheck chk = check_orbit_barriers(run.trajectory, p);
        CAPTURE(s);
        CHECK(chk.monotone_pairs > 50);
        CHECK(chk.monotone_violations == 0);
    }
}
