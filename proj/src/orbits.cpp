#include "blowup/orbits.hpp"

#include "blowup/errors.hpp"
#include "blowup/phase_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blowup {

std::string to_string(FateKind kind)
{
    switch (kind) {
    case FateKind::EntersParabola: return "EntersParabola";
    case FateKind::EntersVertexNeighborhood: return "EntersVertexNeighborhood";
    case FateKind::EntersQ3: return "EntersQ3";
    case FateKind::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

double parabola_distance(const PhasePoint& pt, const Params& params)
{
    const double r = beta_over_alpha(params);
    const double lam = std::clamp(pt.y, -r, 0.0);
    const double zp = -lam * (lam + r);
    return std::sqrt(pt.x * pt.x + (pt.y - lam) * (pt.y - lam) + (pt.z - zp) * (pt.z - zp));
}

double parabola_right_root(double z, const Params& params)
{
    const double r = beta_over_alpha(params);
    const double disc = std::max(0.0, r * r - 4.0 * z);
    return 0.5 * (-r + std::sqrt(disc));
}

namespace {

constexpr const char* kStagnation = "stagnation";
constexpr const char* kMidplane = "midplane_q3";
constexpr const char* kFloor = "y_floor";
constexpr const char* kLock = "parabola_lock";

double left_root(double z, double r)
{
    return 0.5 * (-r - std::sqrt(r * r - 4.0 * z));
}

OrbitFate parabola_fate(double lambda, const PhasePoint& entry, const Params& params, const FateOptions& options,
                        std::string reason)
{
    OrbitFate f;
    f.lambda_hat = lambda;
    f.entry_point = entry;
    f.reason = std::move(reason);
    f.kind = std::abs(lambda - vertex_lambda(params)) < options.vertex_tol ? FateKind::EntersVertexNeighborhood
                                                                           : FateKind::EntersParabola;
    return f;
}

} // namespace

std::vector<EventSpec> standard_fate_events(const Params& params, const FateOptions& options, bool with_lock)
{
    const double r = beta_over_alpha(params);
    const double z_max = derive_exponents(params).z_max;
    const double m = params.m;
    const double s = params.sigma;

    std::vector<EventSpec> ev;
    ev.push_back({kStagnation,
                  [params, options](const PhasePoint& p) {
                      // Relative form keeps the guard O(1), well above the event tolerances.
                      return std::max(norm(vector_field(p, params)) / options.stagnation_norm - 1.0,
                                      parabola_distance(p, params) / options.stagnation_distance - 1.0);
                  },
                  Direction::Falling, true});
    // Past the midplane with Z above the crossing level, Y' < 0 on the midplane from then on.
    ev.push_back({kMidplane,
                  [r, z_max](const PhasePoint& p) {
                      return std::max(p.y + 0.5 * r, z_max + p.x * (1.0 + 0.5 * r) - p.z);
                  },
                  Direction::Falling, true});
    ev.push_back({kFloor, [options](const PhasePoint& p) { return p.y - options.y_floor; }, Direction::Falling, true});
    if (with_lock) {
        // Trapped near X = 0 between the two roots at level Z, with Z unable to reach the vertex level.
        ev.push_back({kLock,
                      [r, z_max, m, s, options, params](const PhasePoint& p) {
                          if (p.z >= z_max || p.y >= 0.0)
                              return 1.0;
                          const double rho = std::min(std::abs(p.y), std::abs(parabola_right_root(p.z, params)));
                          const double dz = (s - 2.0) * p.z * std::max(p.x, 0.0) / ((m - 1.0) * std::max(rho, 1e-300));
                          const double c = std::max({p.x - options.lock_x, p.x - p.z,
                                                     options.lock_margin * dz - (z_max - p.z), left_root(p.z, r) - p.y});
                          return std::min(c, 1.0);
                      },
                      Direction::Falling, true});
    }
    return ev;
}

OrbitFate classify_fate(const Trajectory& traj, const Params& params, const FateOptions& options)
{
    OrbitFate fate;
    fate.diagnostics = traj.events;
    fate.entry_point = traj.back().point;

    if (const auto hit = traj.terminal_event()) {
        if (hit->id == kStagnation) {
            const double r = beta_over_alpha(params);
            if (hit->point.x < 1e-4 && hit->point.y >= -r && hit->point.y <= 0.0) {
                OrbitFate f = parabola_fate(hit->point.y, hit->point, params, options, "stagnation near the parabola");
                f.diagnostics = traj.events;
                return f;
            }
            fate.reason = "stagnation away from the admissible parabola";
            return fate;
        }
        if (hit->id == kMidplane || hit->id == kFloor) {
            fate.kind = FateKind::EntersQ3;
            fate.entry_point = hit->point;
            fate.reason = hit->id == kMidplane ? "crossed the midplane above the vertex level" : "Y fell below the floor";
            return fate;
        }
        if (hit->id == kLock) {
            OrbitFate f = parabola_fate(parabola_right_root(hit->point.z, params), hit->point, params, options,
                                        "trapped near the parabola");
            f.diagnostics = traj.events;
            return f;
        }
    }
    for (auto it = traj.events.rbegin(); it != traj.events.rend(); ++it) {
        if (it->id == kLock) {
            const PhasePoint& last = traj.back().point;
            OrbitFate f = parabola_fate(parabola_right_root(last.z, params), last, params, options,
                                        "trapped near the parabola, still converging at " + to_string(traj.termination));
            f.diagnostics = traj.events;
            return f;
        }
    }
    fate.reason = "no fate event before " + to_string(traj.termination);
    return fate;
}

OrbitRun run_orbit(const Params& params, const PhasePoint& start, const IntegrationControls& controls,
                   const FateOptions& options)
{
    const Field field = [params](const PhasePoint& p) { return vector_field(p, params); };
    OrbitRun run;
    run.trajectory = integrate(field, start, standard_fate_events(params, options, true), controls);
    const auto hit = run.trajectory.terminal_event();
    if (hit && hit->id == kLock && standard_fate_events(params, options, false)[0].guard(hit->point) <= 0.0) {
        // Stagnation already holds at the lock point; a continuation would never see its guard fall.
        run.trajectory.events.back().terminal = false;
        run.trajectory.events.push_back({kStagnation, hit->eta, hit->point, true});
    } else if (hit && hit->id == kLock && controls.max_time - hit->eta > 0.0) {
        IntegrationControls rest = controls;
        rest.max_time = controls.max_time - hit->eta;
        const Trajectory more = integrate(field, hit->point, standard_fate_events(params, options, false), rest);
        Trajectory& t = run.trajectory;
        t.events.back().terminal = false;
        const double shift = hit->eta;
        for (std::size_t i = 1; i < more.samples.size(); ++i)
            t.samples.push_back({more.samples[i].eta + shift, more.samples[i].point});
        for (EventRecord e : more.events) {
            e.eta += shift;
            t.events.push_back(e);
        }
        t.termination = more.termination;
        t.steps += more.steps;
    }
    run.fate = classify_fate(run.trajectory, params, options);
    return run;
}

PhasePoint launch_from_P2(const Params& params, double delta)
{
    if (!(delta > 0.0 && delta <= 1e-4))
        throw DomainError("delta must lie in (0, 1e-4]");
    const PhasePoint e = p2_unstable_direction(params);
    const double n = norm(e);
    if (!(n > 0.0) || !std::isfinite(n))
        throw NumericalError("unstable direction at P2 is degenerate");
    const double sign = e.z > 0.0 ? 1.0 : -1.0;
    return p2_coordinates(params) + (sign * delta / n) * e;
}

OrbitRun run_from_P2(const Params& params, const IntegrationControls& controls, double delta,
                     const FateOptions& options)
{
    IntegrationControls c = controls;
    const double needed = options.p2_time_scale / p2_unstable_eigenvalue(params);
    if (needed > c.max_time) {
        const double factor = needed / c.max_time;
        c.max_time = needed;
        c.max_step *= factor;
    }
    return run_orbit(params, launch_from_P2(params, delta), c, options);
}

LambdaOfSigma lambda_of_sigma(double m, double sigma, const IntegrationControls& controls, const FateOptions& options)
{
    const Params p = validate_params(m, sigma);
    LambdaOfSigma out;
    out.fate = run_from_P2(p, controls, default_delta, options).fate;
    if (out.fate.on_parabola()) {
        out.kind = LambdaOfSigma::Kind::Value;
        out.lambda = *out.fate.lambda_hat;
    } else if (out.fate.kind == FateKind::EntersQ3) {
        out.kind = LambdaOfSigma::Kind::NotEntering;
    }
    return out;
}

ShootResult sigma_star(double m, std::pair<double, double> bracket, double tol, const IntegrationControls& controls,
                       const FateOptions& options, int max_retries)
{
    auto [lo, hi] = bracket;
    if (!(lo < hi) || !(tol > 0.0))
        throw ConstraintError("sigma bracket must satisfy lo < hi and tol > 0");
    auto fate_at = [&](double s) { return run_from_P2(validate_params(m, s), controls, default_delta, options).fate; };

    OrbitFate f_lo = fate_at(lo);
    OrbitFate f_hi = fate_at(hi);
    const bool straddles = (f_lo.on_parabola() && f_hi.kind == FateKind::EntersQ3)
                        || (f_hi.on_parabola() && f_lo.kind == FateKind::EntersQ3);
    if (!straddles) {
        std::ostringstream msg;
        msg << "fates at the bracket ends do not differ: sigma=" << lo << " -> " << to_string(f_lo.kind)
            << ", sigma=" << hi << " -> " << to_string(f_hi.kind);
        throw BracketError(msg.str());
    }
    const bool lo_parabola = f_lo.on_parabola();

    ShootResult res;
    while (hi - lo > tol) {
        const double width = hi - lo;
        double probe = 0.5 * (lo + hi);
        OrbitFate f = fate_at(probe);
        for (int k = 1; f.kind == FateKind::Inconclusive; ++k) {
            if (res.retries >= max_retries || k > 6)
                throw NumericalError("inconclusive fate near sigma=" + std::to_string(probe) + " after retries");
            ++res.retries;
            const double step = ((k + 1) / 2) * width / 8.0;
            probe = 0.5 * (lo + hi) + (k % 2 == 1 ? -step : step);
            f = fate_at(probe);
        }
        if (f.on_parabola() == lo_parabola) {
            lo = probe;
            f_lo = f;
        } else {
            hi = probe;
            f_hi = f;
        }
        ++res.iterations;
    }
    res.bracket = {lo, hi};
    res.sigma_star = 0.5 * (lo + hi);
    res.fate_at_ends = {f_lo, f_hi};
    return res;
}

PhasePoint launch_from_P0(double K, double z0, const Params& params)
{
    if (!(K > 0.0))
        throw DomainError("K must be positive");
    if (!(z0 > 0.0 && z0 <= 1e-5))
        throw DomainError("z0 must lie in (0, 1e-5]");
    const CenterFamilyValue c = center_family_P0(K, z0, params);
    if (!c.physical)
        throw DomainError("center family point has X <= 0; increase K or decrease z0");
    const double y = (c.x - z0) / beta_over_alpha(params);
    return {c.x, y, z0};
}

ChartPoint launch_from_Q1_chart(Q1Mode mode, double delta, const Params&)
{
    if (!(delta > 0.0 && delta <= 1e-4))
        throw DomainError("delta must lie in (0, 1e-4]");
    switch (mode) {
    case Q1Mode::TangentV1: return {delta, delta, 0.0};
    case Q1Mode::TangentV2Plus: return {0.0, delta, 0.0};
    case Q1Mode::TangentV2Minus: return {0.0, -delta, 0.0};
    }
    return {};
}

ChartRun run_from_Q1(const Params& params, const ChartPoint& start, const IntegrationControls& controls,
                     double handoff_w, const FateOptions& options)
{
    const Field chart = [params](const PhasePoint& p) {
        return PhasePoint::from_vec(infinity_chart_field(ChartPoint::from_vec(p.as_vec()), params).as_vec());
    };
    std::vector<EventSpec> ev;
    ev.push_back({"chart_stagnation",
                  [chart](const PhasePoint& p) { return norm(chart(p)) - 1e-9 * (1.0 + std::abs(p.x)); },
                  Direction::Falling, true});
    ev.push_back({"chart_escape",
                  [](const PhasePoint& p) { return std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}) - 1e8; },
                  Direction::Rising, true});
    if (handoff_w > 0.0)
        ev.push_back({"handoff", [handoff_w](const PhasePoint& p) { return p.x - handoff_w; }, Direction::Rising, true});

    ChartRun out;
    out.chart = integrate(chart, PhasePoint::from_vec(start.as_vec()), ev, controls);
    const auto hit = out.chart.terminal_event();
    if (hit && hit->id == "handoff") {
        const PhasePoint x = chart_to_phase(ChartPoint::from_vec(hit->point.as_vec()));
        out.phase = run_orbit(params, x, controls, options);
    }
    return out;
}

} // namespace blowup
