#pragma once

#include "blowup/phase_point.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

/// Any autonomous field on three coordinates. Chart integrations reuse PhasePoint as (w, y, z).
using Field = std::function<PhasePoint(const PhasePoint&)>;

struct IntegrationControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double max_time = 1e4;
    long max_steps = 10'000'000;
    /// Keep every k-th accepted step in the sample list (start and end are always kept).
    long sample_stride = 1;
    /// When positive, samples are taken from the interpolant every `output_step` in eta
    /// instead of at accepted steps (start and end are always kept).
    double output_step = 0.0;
    /// First trial step; clipped to max_step.
    double initial_step = 1e-4;

    /// Throws ConstraintError when a field is non-positive or rel_tol < 1e-13.
    void validate() const;

    /// Same controls with both tolerances divided by `factor`.
    IntegrationControls tightened(double factor) const;
};

enum class Direction { Rising, Falling, Either };

struct EventSpec {
    std::string id;
    std::function<double(const PhasePoint&)> guard;
    Direction direction = Direction::Either;
    bool terminal = true;
};

struct Sample {
    double eta = 0.0;
    PhasePoint point{};
};

struct EventRecord {
    std::string id;
    double eta = 0.0;
    PhasePoint point{};
    bool terminal = false;
};

enum class Termination { Event, MaxTime, MaxSteps, StepUnderflow };

std::string to_string(Termination t);

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<EventRecord> events;
    Termination termination = Termination::MaxTime;
    long steps = 0;

    const Sample& back() const { return samples.back(); }
    /// The event that stopped the run, if any.
    std::optional<EventRecord> terminal_event() const;
};

/// Located roots satisfy |guard| < event_guard_tol or lie in an eta bracket narrower than event_eta_tol.
inline constexpr double event_guard_tol = 1e-10;
inline constexpr double event_eta_tol = 1e-12;
inline constexpr double min_step = 1e-14;

/// Forward integration with a Dormand-Prince 5(4) pair and dense output.
/// Guards are checked on every accepted step; crossings are refined on the
/// interpolant. The earliest crossing in a step wins, ties go to declaration order.
Trajectory integrate(const Field& field, const PhasePoint& start, const std::vector<EventSpec>& events,
                     const IntegrationControls& controls);

struct FateRun {
    Trajectory trajectory;
    std::optional<EventRecord> fired;
};

/// Runs `integrate` with terminal events only and returns the first one hit.
FateRun flow_until_fate(const Field& field, const PhasePoint& start, const std::vector<EventSpec>& fate_events,
                        const IntegrationControls& controls);

} // namespace blowup
