#pragma once

#include "blowup/orbits.hpp"
#include "blowup/parameters.hpp"
#include "blowup/phase_point.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

enum class ExpectedSign { Negative, Positive, Nonpositive, Nonnegative };

std::string to_string(ExpectedSign s);

/// Coefficients of the planes, lines and curves used as barriers.
struct BarrierConstants {
    double r = 0.0;        ///< beta/alpha
    double x_p2 = 0.0;
    double y_p2 = 0.0;
    // plane1: cY + Z = d and the bounds Y > y_star, X < x_star
    double c1 = 0.0, d1 = 0.0, y_star = 0.0, x_star = 0.0;
    // plane2: aX + Z = b; line r2: Y = eX - f
    double a2 = 0.0, b2 = 0.0, e2 = 0.0, f2 = 0.0;
    // plane3: AX + BY + Z = C, positive for x3_star < X < X(P2)
    double A3 = 0.0, B3 = 0.0, C3 = 0.0, x3_star = 0.0;
    // plane Y + kZ = 1
    double k = 0.0;
    // plane4: aX + Z = c on the center manifold of P0
    double a4 = 0.0;
    // second-order center manifold of P0: Y = (X - Z)/r + q1 X^2 + q2 XZ + q3 Z^2
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

BarrierConstants barrier_constants(const Params& params);

/// Y on the second-order center manifold of P0 through (X, Z).
double center_manifold_y(double x, double z, const Params& params);

/// A surface with a closed-form sign claim for the flow through it.
///
/// Points are phase coordinates (X, Y, Z), or chart coordinates (w, y, z) when `chart` is set.
/// `sample` maps the unit cube onto the surface and may reject (nullopt); accepted points lie
/// in the validity region. `boundary_slack` is the distance to the set where the claim
/// degenerates to equality; samples with slack <= boundary_band are not counted.
struct BarrierSpec {
    std::string id;
    std::string description;
    ExpectedSign expected = ExpectedSign::Negative;
    bool chart = false;
    std::function<std::optional<Vec3>(double, double, double)> sample;
    std::function<double(const Vec3&)> surface;        ///< implicit s(pt), zero on the surface
    std::function<double(const Vec3&)> sign_expression; ///< the closed form being verified
    std::function<double(const Vec3&)> flux;            ///< normal . vector field, computed independently
    std::function<double(const Vec3&)> boundary_slack;
    /// Whether the hypotheses under which the claim is used hold at these parameters.
    bool applicable = true;
    std::string gate_reason;
};

inline constexpr double boundary_band = 1e-12;

std::vector<BarrierSpec> barrier_catalog(const Params& params);

/// Ids of `barrier_catalog`, in catalog order.
std::vector<std::string> barrier_ids();

struct Violation {
    Vec3 point{};
    double value = 0.0;
};

struct VerificationReport {
    std::string id;
    bool applicable = true;
    std::string gate_reason;
    std::size_t samples_tested = 0;
    std::size_t boundary_samples = 0;
    std::size_t violation_count = 0;
    std::vector<Violation> violations; ///< the first `max_recorded_violations`
    /// Largest sign value on interior samples, oriented so that negative means the claim holds.
    double worst_margin = 0.0;
    /// Largest |sign_expression - flux| / (1 + |flux|) over the samples.
    double oracle_gap = 0.0;
    std::uint64_t seed = 0;

    bool passed() const { return violation_count == 0 && samples_tested > 0; }
};

inline constexpr std::size_t max_recorded_violations = 32;

/// Scrambled Halton points (bases 2, 3, 5) with a Cranley-Patterson shift drawn from `seed`.
/// Rejected points are redrawn up to 50 n times; no accepted point at all is a ConstraintError.
/// Requires n_samples >= 100.
VerificationReport verify_barrier(const BarrierSpec& spec, std::size_t n_samples, std::uint64_t seed = 42);

/// Every catalog barrier at `params`. A barrier whose hypotheses fail and whose sign region is
/// empty is reported with samples_tested = 0 instead of raising.
std::vector<VerificationReport> verify_catalog(const Params& params, std::size_t n_samples, std::uint64_t seed = 42);

/// Applicable barriers passed and no sampled barrier has a violation.
bool catalog_passed(const std::vector<VerificationReport>& reports);

enum class Region { D0, D1, D2, D3, D4, R, S };

std::string to_string(Region region);
Region region_from_string(const std::string& name);

/// Exact inequality test. S takes chart coordinates (w, y, z). D0 is capped by the horizontal
/// plane through P0^(lambda0/2); `lambda0` defaults to the vertex.
bool region_membership(Region region, const Vec3& pt, const Params& params,
                       std::optional<double> lambda0 = std::nullopt);

/// The inequalities used for small sigma: X(P2) < X*, Y(P2) < 1/2, r2 right of r1 on [0, X*].
struct SmallSigmaHypotheses {
    bool p2_x_below_x_star = false;
    bool p2_y_below_half = false;
    bool r2_right_of_r1 = false;
    bool all() const { return p2_x_below_x_star && p2_y_below_half && r2_right_of_r1; }
};

SmallSigmaHypotheses small_sigma_hypotheses(const Params& params);

/// The plane3 certificate: x3_star < X(P2) (so its sign region is not empty).
bool plane3_certificate(const Params& params);

/// Largest grid sigma where all small-sigma hypotheses hold, if any.
std::optional<double> empirical_sigma0(double m, const std::vector<double>& sigma_grid);

/// Smallest grid sigma where the plane3 certificate holds and the P2 orbit enters Q3.
std::optional<double> empirical_sigma1(double m, const std::vector<double>& sigma_grid,
                                       const IntegrationControls& controls = {});

/// Checks along a computed orbit.
struct OrbitBarrierCheck {
    bool crossed_midplane = false;
    bool re_entered = false;        ///< Y > -r/2 again after the first crossing
    bool certificate_held = false;  ///< Z > z_max at and after the crossing
    std::size_t monotone_violations = 0; ///< in {Y <= 0, X > 0}: X not decreasing or Z not increasing
    std::size_t monotone_pairs = 0;
};

OrbitBarrierCheck check_orbit_barriers(const Trajectory& traj, const Params& params);

} // namespace blowup
