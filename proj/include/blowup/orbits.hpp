#pragma once

#include "blowup/integrator.hpp"
#include "blowup/parameters.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

enum class FateKind { EntersParabola, EntersVertexNeighborhood, EntersQ3, Inconclusive };

std::string to_string(FateKind kind);

struct OrbitFate {
    FateKind kind = FateKind::Inconclusive;
    std::optional<double> lambda_hat;
    PhasePoint entry_point{};
    std::vector<EventRecord> diagnostics;
    /// Short description of the rule that decided the fate.
    std::string reason;

    /// Parabola entry in either form; the side of the sigma* dichotomy opposite to Q3.
    bool on_parabola() const
    {
        return kind == FateKind::EntersParabola || kind == FateKind::EntersVertexNeighborhood;
    }
};

struct FateOptions {
    double stagnation_norm = 1e-11;
    double stagnation_distance = 1e-4;
    double y_floor = -1e3;
    double vertex_tol = 5e-3;
    /// X threshold for the trapping test near the parabola.
    double lock_x = 1e-8;
    /// Required ratio between the distance to the vertex level and the remaining Z growth.
    double lock_margin = 10.0;
    /// max_time is raised to this many e-folding times of the P2 instability for orbits out of P2.
    double p2_time_scale = 60.0;
};

inline constexpr double default_delta = 1e-6;

/// Distance bound from pt to the critical parabola, through the point of the parabola at Y clamped to [-beta/alpha, 0].
double parabola_distance(const PhasePoint& pt, const Params& params);

/// Right root of -Y^2 - (beta/alpha)Y - z = 0, i.e. the parabola point at level z on the side of P0.
double parabola_right_root(double z, const Params& params);

/// Terminal events: "stagnation", "midplane_q3", "y_floor", and (optionally) "parabola_lock".
std::vector<EventSpec> standard_fate_events(const Params& params, const FateOptions& options = {}, bool with_lock = true);

/// Fate of a trajectory produced with `standard_fate_events`.
OrbitFate classify_fate(const Trajectory& traj, const Params& params, const FateOptions& options = {});

struct OrbitRun {
    Trajectory trajectory;
    OrbitFate fate;
};

/// Integrates from `start` with the standard events. After a "parabola_lock" the run continues
/// without the lock event in search of stagnation; the lock remains in the event log.
OrbitRun run_orbit(const Params& params, const PhasePoint& start, const IntegrationControls& controls,
                   const FateOptions& options = {});

/// P2 + delta * e3 / |e3|, with e3 oriented into {Z > 0}.
PhasePoint launch_from_P2(const Params& params, double delta = default_delta);

/// Orbit out of P2 with max_time raised for slow instabilities.
OrbitRun run_from_P2(const Params& params, const IntegrationControls& controls = {}, double delta = default_delta,
                     const FateOptions& options = {});

struct LambdaOfSigma {
    enum class Kind { Value, NotEntering, Inconclusive } kind = Kind::Inconclusive;
    double lambda = 0.0;
    OrbitFate fate;
};

LambdaOfSigma lambda_of_sigma(double m, double sigma, const IntegrationControls& controls = {},
                              const FateOptions& options = {});

struct ShootResult {
    double sigma_star = 0.0;
    std::pair<double, double> bracket{};
    int iterations = 0;
    std::pair<OrbitFate, OrbitFate> fate_at_ends;
    int retries = 0;
};

/// Bisection on sigma between a parabola-side fate and EntersQ3. An Inconclusive
/// midpoint is replaced by a nearby point inside the bracket, at most `max_retries` times in total.
ShootResult sigma_star(double m, std::pair<double, double> bracket, double tol,
                       const IntegrationControls& controls = {}, const FateOptions& options = {},
                       int max_retries = 6);

/// Point of the center family out of P0 on the tangent plane (beta/alpha)Y = X - Z.
PhasePoint launch_from_P0(double K, double z0, const Params& params);

enum class Q1Mode { TangentV1, TangentV2Plus, TangentV2Minus };

/// delta (1,1,0) or delta (0,+-1,0) in the chart around Q1.
ChartPoint launch_from_Q1_chart(Q1Mode mode, double delta, const Params& params);

struct ChartRun {
    Trajectory chart;          ///< (w, y, z) stored in PhasePoint slots
    std::optional<OrbitRun> phase; ///< continuation after the handoff, if reached
};

/// Integrates the chart field until w reaches `handoff_w`, then continues in (X, Y, Z) with the
/// standard fate events. A non-positive handoff_w keeps the whole run in the chart, stopping on
/// stagnation of the chart field.
ChartRun run_from_Q1(const Params& params, const ChartPoint& start, const IntegrationControls& controls = {},
                     double handoff_w = 1e-2, const FateOptions& options = {});

} // namespace blowup
