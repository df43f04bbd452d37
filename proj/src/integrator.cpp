#include "blowup/integrator.hpp"

#include "blowup/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace blowup {

namespace odeint = boost::numeric::odeint;

void IntegrationControls::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0) || !(max_time > 0.0))
        throw ConstraintError("integration tolerances, max_step and max_time must be positive");
    if (rel_tol < 1e-13)
        throw ConstraintError("rel_tol must be at least 1e-13");
    if (!(initial_step > 0.0))
        throw ConstraintError("initial_step must be positive");
    if (max_steps <= 0 || sample_stride <= 0)
        throw ConstraintError("max_steps and sample_stride must be positive");
    if (output_step < 0.0)
        throw ConstraintError("output_step must be non-negative");
}

IntegrationControls IntegrationControls::tightened(double factor) const
{
    IntegrationControls c = *this;
    c.rel_tol = std::max(1e-13, rel_tol / factor);
    c.abs_tol = abs_tol / factor;
    return c;
}

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::Event: return "event";
    case Termination::MaxTime: return "max_time";
    case Termination::MaxSteps: return "max_steps";
    case Termination::StepUnderflow: return "step_underflow";
    }
    return "unknown";
}

std::optional<EventRecord> Trajectory::terminal_event() const
{
    if (termination != Termination::Event || events.empty())
        return std::nullopt;
    return events.back();
}

namespace {

using State = std::array<double, 3>;

bool crosses(Direction dir, double g0, double g1)
{
    const bool rising = g0 < 0.0 && g1 >= 0.0;
    const bool falling = g0 > 0.0 && g1 <= 0.0;
    switch (dir) {
    case Direction::Rising: return rising;
    case Direction::Falling: return falling;
    case Direction::Either: return rising || falling;
    }
    return false;
}

bool finite(const State& x)
{
    return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

struct Hit {
    std::size_t index;
    double eta;
    PhasePoint point;
};

} // namespace

Trajectory integrate(const Field& field, const PhasePoint& start, const std::vector<EventSpec>& events,
                     const IntegrationControls& controls)
{
    controls.validate();

    auto rhs = [&field](const State& x, State& dxdt, double) { dxdt = field(PhasePoint::from_vec(x)).as_vec(); };
    auto stepper = odeint::make_dense_output(controls.abs_tol, controls.rel_tol, controls.max_step,
                                             odeint::runge_kutta_dopri5<State>());

    Trajectory traj;
    traj.samples.push_back({0.0, start});

    const std::size_t n_events = events.size();
    std::vector<double> g_prev(n_events);
    std::vector<bool> armed(n_events, true);
    for (std::size_t i = 0; i < n_events; ++i) {
        g_prev[i] = events[i].guard(start);
        if (std::abs(g_prev[i]) <= event_guard_tol)
            armed[i] = false;
    }

    stepper.initialize(start.as_vec(), 0.0, std::min(controls.max_step, controls.initial_step));

    auto finish = [&](Termination why, double eta, const PhasePoint& pt) {
        traj.termination = why;
        if (traj.samples.back().eta < eta)
            traj.samples.push_back({eta, pt});
        else
            traj.samples.back().point = pt;
    };

    State interp{};
    auto state_at = [&](double t) {
        stepper.calc_state(t, interp);
        return PhasePoint::from_vec(interp);
    };

    long n_out = 1;
    double next_out = controls.output_step;

    while (true) {
        if (traj.steps >= controls.max_steps) {
            finish(Termination::MaxSteps, stepper.current_time(), PhasePoint::from_vec(stepper.current_state()));
            return traj;
        }
        const double t_good = stepper.current_time();
        const State x_good = stepper.current_state();
        std::pair<double, double> span;
        try {
            span = stepper.do_step(rhs);
        } catch (const odeint::odeint_error&) {
            finish(Termination::StepUnderflow, t_good, PhasePoint::from_vec(x_good));
            return traj;
        }
        ++traj.steps;
        const double t0 = span.first;
        const double t1 = span.second;
        if (!finite(stepper.current_state())) {
            finish(Termination::StepUnderflow, t_good, PhasePoint::from_vec(x_good));
            return traj;
        }

        const bool past_end = t1 >= controls.max_time;
        const double te = past_end ? controls.max_time : t1;
        const PhasePoint xe = past_end ? state_at(te) : PhasePoint::from_vec(stepper.current_state());

        std::vector<Hit> hits;
        for (std::size_t i = 0; i < n_events; ++i) {
            const double g1 = events[i].guard(xe);
            if (!std::isfinite(g1))
                continue;
            if (!armed[i]) {
                if (std::abs(g1) > event_guard_tol) {
                    armed[i] = true;
                    g_prev[i] = g1;
                }
                continue;
            }
            const double g0 = g_prev[i];
            g_prev[i] = g1;
            if (!crosses(events[i].direction, g0, g1))
                continue;

            double eta = te;
            if (g1 != 0.0) {
                const auto& guard = events[i].guard;
                auto h = [&](double t) { return guard(state_at(t)); };
                auto tol = [](double a, double b) {
                    return std::abs(b - a) <= std::max(event_eta_tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b));
                };
                std::uintmax_t iters = 200;
                const auto root = boost::math::tools::toms748_solve(h, t0, te, g0, g1, tol, iters);
                // Take the end that has already crossed, unless the other end is closer to zero within tolerance.
                eta = root.second;
                if (std::abs(h(root.first)) <= event_guard_tol && std::abs(h(root.second)) > event_guard_tol)
                    eta = root.first;
            }
            hits.push_back({i, eta, state_at(eta)});
        }

        std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.eta < b.eta; });
        for (const Hit& hit : hits) {
            const EventSpec& spec = events[hit.index];
            traj.events.push_back({spec.id, hit.eta, hit.point, spec.terminal});
            if (spec.terminal) {
                finish(Termination::Event, hit.eta, hit.point);
                return traj;
            }
        }

        if (past_end) {
            finish(Termination::MaxTime, te, xe);
            return traj;
        }
        if (controls.output_step > 0.0) {
            for (; next_out <= t1; next_out = controls.output_step * static_cast<double>(++n_out))
                traj.samples.push_back({next_out, state_at(next_out)});
        } else if (traj.steps % controls.sample_stride == 0) {
            traj.samples.push_back({t1, xe});
        }
        if (stepper.current_time_step() < min_step) {
            finish(Termination::StepUnderflow, t1, xe);
            return traj;
        }
    }
}

FateRun flow_until_fate(const Field& field, const PhasePoint& start, const std::vector<EventSpec>& fate_events,
                        const IntegrationControls& controls)
{
    for (const auto& e : fate_events)
        if (!e.terminal)
            throw ConstraintError("fate event '" + e.id + "' must be terminal");
    FateRun run;
    run.trajectory = integrate(field, start, fate_events, controls);
    run.fired = run.trajectory.terminal_event();
    return run;
}

} // namespace blowup
