#pragma once

#include "blowup/integrator.hpp"
#include "blowup/parameters.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

struct ProfileSample {
    double xi = 0.0;
    double f = 0.0;
    double df = 0.0;
    /// g' = m f^(m-2) f', the derivative of the pressure (m/(m-1)) f^(m-1), where f > 0.
    std::optional<double> g_slope;
};

struct ReconstructedProfile {
    std::vector<ProfileSample> samples;
    std::size_t dropped = 0; ///< points with x <= 0, z <= 0 or non-increasing xi
};

/// Inverse of the phase variables: xi = (alpha^2 z/m)^(1/(sigma-2)), f = (alpha xi^2 x/m)^(1/(m-1)),
/// f' = alpha xi f^(2-m) y / m.
ReconstructedProfile reconstruct_profile(const Trajectory& traj, const Params& params);

ProfileSample phase_to_profile(const PhasePoint& pt, const Params& params);
PhasePoint profile_to_phase(const ProfileSample& s, const Params& params);

/// Max over interior samples of |(f^m)'' - alpha f + beta xi f' + xi^sigma f^(2-m)|, with (f^m)''
/// from three-point differences on the nonuniform grid, divided by max(1, max |alpha f|).
/// Throws ConstraintError for fewer than 5 samples or f <= 0 at an interior sample.
double ssode_residual(const std::vector<ProfileSample>& samples, const Params& params);

struct InterfaceReport {
    double xi0 = 0.0;
    double discriminant = 0.0;
    std::optional<double> slope_minus; ///< (-beta xi0 - sqrt(D))/2
    std::optional<double> slope_plus;  ///< (-beta xi0 + sqrt(D))/2
    std::optional<double> matched_slope;
};

/// Roots of (g')^2 + beta xi0 g' + m xi0^sigma = 0.
InterfaceReport interface_slopes(double xi0, const Params& params);

/// |(g')^2 + beta xi0 g' + m xi0^sigma|.
double interface_residual(double xi0, double g_slope, const Params& params);

enum class OriginKind { P1, P2Behavior, P0Behavior };

struct ProfileOrigin {
    OriginKind kind = OriginKind::P2Behavior;
    double value = 0.0; ///< a = f(0) for P1, K for P0Behavior

    static ProfileOrigin p1(double a) { return {OriginKind::P1, a}; }
    static ProfileOrigin p2() { return {OriginKind::P2Behavior, 0.0}; }
    static ProfileOrigin p0(double K) { return {OriginKind::P0Behavior, K}; }
};

std::string to_string(OriginKind kind);

/// At the vanishing point the pressure slope is compared with the roots h- <= h+ of
/// h^2 + beta xi0 h + m xi0^sigma. Within slope_tol of a root, or above h- (where the flow
/// drives g' to h+), the fate is Interface; below h- or without real roots it is SignChange.
enum class ProfileFateKind { Interface, SignChange, Positive, Inconclusive };

std::string to_string(ProfileFateKind kind);

struct ProfileFate {
    ProfileFateKind kind = ProfileFateKind::Inconclusive;
    double xi0 = 0.0;      ///< vanishing point, when f vanishes
    double g_slope = 0.0;  ///< g' at the vanishing point
    std::optional<InterfaceReport> report;
    std::string reason;
};

struct ProfileOptions {
    double xi_start = 1e-4;
    /// Vanishing threshold, relative to the reference size of the profile.
    double f_floor = 1e-20;
    /// Upper end of the integration; non-positive means 4 xi_max.
    double xi_cap = 0.0;
    /// Switch to the pressure variable below this fraction of the reference pressure.
    double g_switch = 1e-2;
    double slope_tol = 1e-2;
    double delta_tol = 1e-6;
    /// Uniform xi spacing of the output; non-positive keeps the accepted steps.
    double output_step = 0.0;
    /// Growth beyond this multiple of max(reference size, P2 size at xi_max) counts as Positive.
    double growth_cap = 1e8;
};

struct ProfileRun {
    std::vector<ProfileSample> samples;
    ProfileFate fate;
    double f_ref = 0.0;
};

/// Starting values at xi_start from the asymptotics at the origin:
/// P1: f = a, f' = alpha a^(2-m) xi / m;
/// P2: f = ((m-1)/(2m(m+1)))^(1/(m-1)) xi^(2/(m-1)) at leading order; the start point is taken on
/// the unstable direction of P2, which adds the first correction;
/// P0: f = K xi^((sigma+2)/(2(m-1))) at leading order; the start point is taken on the center
/// family X = sqrt(m) K^(m-1) sqrt(Z) - (m-1) alpha Z, Y = (X - Z) alpha/beta, which adds the first correction.
ProfileSample origin_data(const ProfileOrigin& origin, double xi, const Params& params);

/// Integrates the profile equation from the chosen origin until the profile vanishes, grows
/// without bound, or reaches xi_cap. The origin point xi = 0 is the first sample and a vanishing
/// profile ends with a sample at (xi0, 0, 0).
ProfileRun integrate_ssode(const ProfileOrigin& origin, const Params& params, const IntegrationControls& controls = {},
                           const ProfileOptions& options = {});

struct ScanPoint {
    double a = 0.0;
    ProfileFateKind kind = ProfileFateKind::Inconclusive;
};

/// Fates of P1 profiles on a logarithmic grid of n points between a_lo and a_hi.
std::vector<ScanPoint> scan_P1(const Params& params, double a_lo, double a_hi, int n,
                               const IntegrationControls& controls = {}, const ProfileOptions& options = {});

/// First adjacent pair of a scan where the fate switches between SignChange and a conclusive other fate.
std::optional<std::pair<double, double>> coarse_bracket_P1(const std::vector<ScanPoint>& scan);

struct GoodProfile {
    double a_star = 0.0;
    std::pair<double, double> bracket{};
    int iterations = 0;
    ProfileRun run;
    ProfileFateKind fate_lo = ProfileFateKind::Inconclusive;
    ProfileFateKind fate_hi = ProfileFateKind::Inconclusive;
};

/// Bisection on a = f(0) across the SignChange boundary until (hi - lo) <= tol * hi. Midpoints are
/// geometric while the bracket spans more than a factor 4. a_star is the end without a sign change.
GoodProfile find_good_profile_P1(const Params& params, std::pair<double, double> a_bracket, double tol,
                                 const IntegrationControls& controls = {}, const ProfileOptions& options = {});

struct SelfSimilarEval {
    double T = 0.0;
    double t = 0.0;
    double x = 0.0;
    double u = 0.0;
};

/// Linear interpolation of f in xi; zero beyond the last sample.
double interpolate_profile(const std::vector<ProfileSample>& samples, double xi);

/// Cubic Hermite interpolation of f using f'; zero beyond the last sample.
double interpolate_profile_hermite(const std::vector<ProfileSample>& samples, double xi);

/// u = (T-t)^(-alpha) f(|x| (T-t)^beta).
SelfSimilarEval evaluate_solution(const std::vector<ProfileSample>& samples, double T, double x, double t,
                                  const Params& params);

} // namespace blowup
