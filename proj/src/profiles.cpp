#include "blowup/profiles.hpp"

#include "blowup/errors.hpp"
#include "blowup/phase_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blowup {

std::string to_string(OriginKind kind)
{
    switch (kind) {
    case OriginKind::P1: return "p1";
    case OriginKind::P2Behavior: return "p2";
    case OriginKind::P0Behavior: return "p0";
    }
    return "unknown";
}

std::string to_string(ProfileFateKind kind)
{
    switch (kind) {
    case ProfileFateKind::Interface: return "Interface";
    case ProfileFateKind::SignChange: return "SignChange";
    case ProfileFateKind::Positive: return "Positive";
    case ProfileFateKind::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

ProfileSample phase_to_profile(const PhasePoint& pt, const Params& params)
{
    const double m = params.m;
    const double alpha = derive_exponents(params).alpha;
    ProfileSample s;
    s.xi = std::pow(alpha * alpha * pt.z / m, 1.0 / (params.sigma - 2.0));
    s.f = std::pow(alpha * s.xi * s.xi * pt.x / m, 1.0 / (m - 1.0));
    s.df = alpha * s.xi * std::pow(s.f, 2.0 - m) * pt.y / m;
    s.g_slope = m * std::pow(s.f, m - 2.0) * s.df;
    return s;
}

PhasePoint profile_to_phase(const ProfileSample& s, const Params& params)
{
    const double m = params.m;
    const double alpha = derive_exponents(params).alpha;
    return {
        (m / alpha) * std::pow(s.xi, -2.0) * std::pow(s.f, m - 1.0),
        (m / alpha) * std::pow(s.xi, -1.0) * std::pow(s.f, m - 2.0) * s.df,
        (m / (alpha * alpha)) * std::pow(s.xi, params.sigma - 2.0),
    };
}

ReconstructedProfile reconstruct_profile(const Trajectory& traj, const Params& params)
{
    ReconstructedProfile out;
    for (const auto& sample : traj.samples) {
        const PhasePoint& p = sample.point;
        if (!(p.x > 0.0) || !(p.z > 0.0)) {
            ++out.dropped;
            continue;
        }
        const ProfileSample s = phase_to_profile(p, params);
        if (!out.samples.empty() && !(s.xi > out.samples.back().xi)) {
            ++out.dropped;
            continue;
        }
        out.samples.push_back(s);
    }
    return out;
}

double ssode_residual(const std::vector<ProfileSample>& samples, const Params& params)
{
    if (samples.size() < 5)
        throw ConstraintError("residual needs at least 5 samples");
    const double m = params.m;
    const Exponents e = derive_exponents(params);
    double scale = 1.0;
    for (const auto& s : samples)
        scale = std::max(scale, std::abs(e.alpha * s.f));

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const ProfileSample& a = samples[i - 1];
        const ProfileSample& b = samples[i];
        const ProfileSample& c = samples[i + 1];
        if (!(b.f > 0.0))
            throw ConstraintError("residual needs f > 0 at interior samples");
        const double h1 = b.xi - a.xi;
        const double h2 = c.xi - b.xi;
        if (!(h1 > 0.0) || !(h2 > 0.0))
            throw ConstraintError("residual needs strictly increasing xi");
        const double fa = std::pow(std::max(a.f, 0.0), m);
        const double fb = std::pow(b.f, m);
        const double fc = std::pow(std::max(c.f, 0.0), m);
        const double d2 = 2.0 * (h1 * fc - (h1 + h2) * fb + h2 * fa) / (h1 * h2 * (h1 + h2));
        const double r = d2 - e.alpha * b.f + e.beta * b.xi * b.df + std::pow(b.xi, params.sigma) * std::pow(b.f, 2.0 - m);
        worst = std::max(worst, std::abs(r));
    }
    return worst / scale;
}

InterfaceReport interface_slopes(double xi0, const Params& params)
{
    if (!(xi0 > 0.0))
        throw DomainError("interface point must be positive");
    const double beta = derive_exponents(params).beta;
    InterfaceReport rep;
    rep.xi0 = xi0;
    const double lead = beta * beta * xi0 * xi0;
    rep.discriminant = lead - 4.0 * params.m * std::pow(xi0, params.sigma);
    // Roundoff at xi_max leaves a tiny discriminant of either sign; that is the double root.
    if (std::abs(rep.discriminant) <= 64.0 * std::numeric_limits<double>::epsilon() * lead)
        rep.discriminant = 0.0;
    if (rep.discriminant >= 0.0) {
        const double sq = std::sqrt(rep.discriminant);
        rep.slope_minus = 0.5 * (-beta * xi0 - sq);
        rep.slope_plus = 0.5 * (-beta * xi0 + sq);
    }
    return rep;
}

double interface_residual(double xi0, double g_slope, const Params& params)
{
    const double beta = derive_exponents(params).beta;
    return std::abs(g_slope * g_slope + beta * xi0 * g_slope + params.m * std::pow(xi0, params.sigma));
}

ProfileSample origin_data(const ProfileOrigin& origin, double xi, const Params& params)
{
    const double m = params.m;
    const double alpha = derive_exponents(params).alpha;
    ProfileSample s;
    s.xi = xi;
    switch (origin.kind) {
    case OriginKind::P1:
        if (!(origin.value > 0.0))
            throw DomainError("P1 origin needs a > 0");
        s.f = origin.value;
        s.df = alpha * std::pow(origin.value, 2.0 - m) * xi / m;
        break;
    case OriginKind::P2Behavior: {
        // Leading behavior corrected along the unstable direction of P2.
        const double z = m / (alpha * alpha) * std::pow(xi, params.sigma - 2.0);
        const PhasePoint e = p2_unstable_direction(params);
        const ProfileSample ps = phase_to_profile(p2_coordinates(params) + (z / e.z) * e, params);
        s.f = ps.f;
        s.df = ps.df;
        break;
    }
    case OriginKind::P0Behavior: {
        if (!(origin.value > 0.0))
            throw DomainError("P0 origin needs K > 0");
        // Leading behavior plus the first correction, read off the center family out of P0.
        const double z = m / (alpha * alpha) * std::pow(xi, params.sigma - 2.0);
        const CenterFamilyValue c = center_family_P0(std::sqrt(m) * std::pow(origin.value, m - 1.0), z, params);
        if (!c.physical)
            throw DomainError("P0 start point has f <= 0; decrease xi_start");
        const PhasePoint pt{c.x, (c.x - z) / beta_over_alpha(params), z};
        const ProfileSample ps = phase_to_profile(pt, params);
        s.f = ps.f;
        s.df = ps.df;
        break;
    }
    }
    if (s.f > 0.0)
        s.g_slope = m * std::pow(s.f, m - 2.0) * s.df;
    return s;
}

namespace {

double reference_size(const ProfileOrigin& origin, const Params& params)
{
    if (origin.kind == OriginKind::P1)
        return origin.value;
    // Size of the leading asymptotic at xi_max.
    const double m = params.m;
    const double xi_max = derive_exponents(params).xi_max;
    if (origin.kind == OriginKind::P2Behavior)
        return std::pow((m - 1.0) / (2.0 * m * (m + 1.0)), 1.0 / (m - 1.0)) * std::pow(xi_max, 2.0 / (m - 1.0));
    return origin.value * std::pow(xi_max, (params.sigma + 2.0) / (2.0 * (m - 1.0)));
}

ProfileFate classify_vanishing(double xi0, double g_slope, const Params& params, const ProfileOptions& options)
{
    ProfileFate fate;
    fate.xi0 = xi0;
    fate.g_slope = g_slope;
    if (!(xi0 > 0.0)) {
        fate.reason = "vanishing point is not positive";
        return fate;
    }
    InterfaceReport rep = interface_slopes(xi0, params);
    if (rep.discriminant < 0.0 && rep.discriminant >= -options.delta_tol) {
        // Within tolerance of the double root.
        const double beta = derive_exponents(params).beta;
        rep.slope_minus = rep.slope_plus = -0.5 * beta * xi0;
    }
    if (rep.slope_minus) {
        const double dm = std::abs(g_slope - *rep.slope_minus);
        const double dp = std::abs(g_slope - *rep.slope_plus);
        const double nearest = dm < dp ? *rep.slope_minus : *rep.slope_plus;
        if (std::min(dm, dp) <= options.slope_tol) {
            rep.matched_slope = nearest;
            fate.kind = ProfileFateKind::Interface;
            fate.reason = "pressure slope matches an interface root";
        } else if (g_slope < *rep.slope_minus - options.slope_tol) {
            fate.kind = ProfileFateKind::SignChange;
            fate.reason = "pressure slope below the steeper interface root";
        } else {
            // Q(g') < 0 between the roots and Q(g') > 0 above them, so g'' = -Q/((m-1) g) drives g' to the upper root.
            rep.matched_slope = *rep.slope_plus;
            fate.kind = ProfileFateKind::Interface;
            fate.reason = "pressure slope attracted to the upper interface root";
        }
    } else {
        fate.kind = ProfileFateKind::SignChange;
        fate.reason = "no interface slope exists at the vanishing point";
    }
    fate.report = rep;
    return fate;
}

} // namespace

ProfileRun integrate_ssode(const ProfileOrigin& origin, const Params& params, const IntegrationControls& controls,
                           const ProfileOptions& options)
{
    const double m = params.m;
    const double s = params.sigma;
    const Exponents ex = derive_exponents(params);
    const double alpha = ex.alpha;
    const double beta = ex.beta;
    const double xi_start = options.xi_start;
    const double xi_cap = options.xi_cap > 0.0 ? options.xi_cap : 4.0 * ex.xi_max;
    if (!(xi_start > 0.0) || !(xi_cap > xi_start))
        throw ConstraintError("profile integration needs 0 < xi_start < xi_cap");

    ProfileRun run;
    run.f_ref = reference_size(origin, params);
    const double f_ref = run.f_ref;
    // Growth is measured against the larger of f_ref and the P2 scale, so tiny P1 data may grow into it.
    const double grow_at = options.growth_cap * std::max(f_ref, reference_size(ProfileOrigin::p2(), params)) / f_ref;
    const double q = std::pow(f_ref, m - 1.0);
    const double g_ref = m / (m - 1.0) * q;

    IntegrationControls c = controls;
    c.max_time = xi_cap - xi_start + 1.0;
    c.output_step = options.output_step > 0.0 ? options.output_step : 0.0;
    c.initial_step = std::min(c.initial_step, 0.01 * xi_start);

    const ProfileSample start = origin_data(origin, xi_start, params);
    run.samples.push_back(origin.kind == OriginKind::P1 ? ProfileSample{0.0, origin.value, 0.0, 0.0}
                                                        : ProfileSample{0.0, 0.0, 0.0, std::nullopt});

    const EventSpec cap{"cap", [xi_cap](const PhasePoint& p) { return p.z - xi_cap; }, Direction::Rising, true};

    // Stage one: (F, F', xi) with F = f / f_ref.
    PhasePoint pressure_start{};
    bool in_pressure = origin.kind != OriginKind::P1;
    if (in_pressure) {
        const double G = std::pow(start.f / f_ref, m - 1.0);
        pressure_start = {G, m * std::pow(start.f, m - 2.0) * start.df / g_ref, xi_start};
    } else {
        const Field field = [=](const PhasePoint& p) {
            const double F = std::max(std::abs(p.x), 1e-300);
            const double num = alpha * F - beta * p.z * p.y - std::pow(p.z, s) * std::pow(F, 2.0 - m) / q
                             - m * (m - 1.0) * q * std::pow(F, m - 2.0) * p.y * p.y;
            return PhasePoint{p.y, num / (m * q * std::pow(F, m - 1.0)), 1.0};
        };
        const std::vector<EventSpec> events{
            {"switch",
             [&options, m](const PhasePoint& p) {
                 return std::copysign(std::pow(std::abs(p.x), m - 1.0), p.x) - options.g_switch;
             },
             Direction::Falling, true},
            cap,
            {"grow", [grow_at](const PhasePoint& p) { return p.x - grow_at; }, Direction::Rising, true},
        };
        const Trajectory t = integrate(field, {start.f / f_ref, start.df / f_ref, xi_start}, events, c);
        for (const auto& smp : t.samples) {
            const double f = f_ref * smp.point.x;
            const double df = f_ref * smp.point.y;
            run.samples.push_back({smp.point.z, f, df, f > 0.0 ? std::optional<double>(m * std::pow(f, m - 2.0) * df)
                                                              : std::nullopt});
        }
        const auto hit = t.terminal_event();
        if (!hit) {
            const PhasePoint end = t.back().point;
            if (t.termination == Termination::StepUnderflow && end.y < 0.0 && end.x > 0.0 && end.x < -1e-6 * end.y * end.z) {
                // Collapse before the switch: f reaches zero with a finite slope.
                const double f = f_ref * end.x;
                const double df = f_ref * end.y;
                run.fate = classify_vanishing(end.z + end.x / (-end.y), m * std::pow(f, m - 2.0) * df, params, options);
                return run;
            }
            run.fate.reason = "profile integration stopped at " + to_string(t.termination);
            return run;
        }
        if (hit->id != "switch") {
            run.fate.kind = ProfileFateKind::Positive;
            run.fate.reason = hit->id == "cap" ? "reached xi_cap with f > 0" : "profile grows without bound";
            return run;
        }
        const double F = hit->point.x;
        pressure_start = {std::pow(F, m - 1.0), (m - 1.0) * std::pow(F, m - 2.0) * hit->point.y, hit->point.z};
        in_pressure = true;
        c.max_time = xi_cap - hit->point.z + 1.0;
        run.samples.pop_back();
    }

    // Stage two: (G, G', xi) with G = g / g_ref.
    const Field pfield = [=](const PhasePoint& p) {
        const double G = std::max(p.x, 1e-300);
        const double num = (m - 1.0) * alpha * G - beta * p.z * p.y - g_ref * p.y * p.y - m * std::pow(p.z, s) / g_ref;
        return PhasePoint{p.y, num / ((m - 1.0) * g_ref * G), 1.0};
    };
    const double g_stop = std::pow(options.f_floor, m - 1.0);
    const std::vector<EventSpec> pevents{
        {"floor", [g_stop](const PhasePoint& p) { return p.x / g_stop - 1.0; }, Direction::Falling, true},
        cap,
        {"grow", [grow_at, m](const PhasePoint& p) { return p.x - std::pow(grow_at, m - 1.0); },
         Direction::Rising, true},
    };
    const Trajectory t = integrate(pfield, pressure_start, pevents, c);
    for (const auto& smp : t.samples) {
        const double G = std::max(smp.point.x, 0.0);
        const double f = f_ref * std::pow(G, 1.0 / (m - 1.0));
        const double gs = g_ref * smp.point.y;
        const double df = f > 0.0 ? gs * std::pow(f, 2.0 - m) / m : 0.0;
        run.samples.push_back({smp.point.z, f, df, f > 0.0 ? std::optional<double>(gs) : std::nullopt});
    }

    const auto hit = t.terminal_event();
    const PhasePoint end = t.back().point;
    if (hit && hit->id != "floor") {
        run.fate.kind = ProfileFateKind::Positive;
        run.fate.reason = hit->id == "cap" ? "reached xi_cap with f > 0" : "profile grows without bound";
        return run;
    }
    if (!hit && !(t.termination == Termination::StepUnderflow && end.y < 0.0)) {
        run.fate.reason = "pressure integration stopped at " + to_string(t.termination);
        return run;
    }
    // Linear extrapolation of the pressure to its zero.
    const double xi0 = end.y < 0.0 ? end.z + std::max(end.x, 0.0) / (-end.y) : end.z;
    run.fate = classify_vanishing(xi0, g_ref * end.y, params, options);
    if (run.fate.kind == ProfileFateKind::Interface && xi0 > run.samples.back().xi)
        run.samples.push_back({xi0, 0.0, 0.0, std::nullopt});
    return run;
}

std::vector<ScanPoint> scan_P1(const Params& params, double a_lo, double a_hi, int n,
                               const IntegrationControls& controls, const ProfileOptions& options)
{
    if (!(a_lo > 0.0) || !(a_hi > a_lo) || n < 2)
        throw ConstraintError("scan needs 0 < a_lo < a_hi and n >= 2");
    std::vector<ScanPoint> out;
    const double step = std::log(a_hi / a_lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double a = i == n - 1 ? a_hi : a_lo * std::exp(step * i);
        out.push_back({a, integrate_ssode(ProfileOrigin::p1(a), params, controls, options).fate.kind});
    }
    return out;
}

std::optional<std::pair<double, double>> coarse_bracket_P1(const std::vector<ScanPoint>& scan)
{
    for (std::size_t i = 1; i < scan.size(); ++i) {
        const auto& a = scan[i - 1];
        const auto& b = scan[i];
        if (a.kind == ProfileFateKind::Inconclusive || b.kind == ProfileFateKind::Inconclusive)
            continue;
        if ((a.kind == ProfileFateKind::SignChange) != (b.kind == ProfileFateKind::SignChange))
            return std::make_pair(a.a, b.a);
    }
    return std::nullopt;
}

GoodProfile find_good_profile_P1(const Params& params, std::pair<double, double> a_bracket, double tol,
                                 const IntegrationControls& controls, const ProfileOptions& options)
{
    auto [lo, hi] = a_bracket;
    if (!(lo > 0.0) || !(hi > lo) || !(tol > 0.0))
        throw ConstraintError("a bracket must satisfy 0 < lo < hi and tol > 0");
    auto run_at = [&](double a) { return integrate_ssode(ProfileOrigin::p1(a), params, controls, options); };

    ProfileRun r_lo = run_at(lo);
    ProfileRun r_hi = run_at(hi);
    auto sign_change = [](const ProfileRun& r) { return r.fate.kind == ProfileFateKind::SignChange; };
    auto conclusive = [](const ProfileRun& r) { return r.fate.kind != ProfileFateKind::Inconclusive; };
    if (!conclusive(r_lo) || !conclusive(r_hi) || sign_change(r_lo) == sign_change(r_hi))
        throw BracketError("fates at the a bracket ends do not differ: a=" + std::to_string(lo) + " -> "
                           + to_string(r_lo.fate.kind) + ", a=" + std::to_string(hi) + " -> "
                           + to_string(r_hi.fate.kind));

    GoodProfile res;
    while (hi - lo > tol * hi) {
        const double mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        ProfileRun r = run_at(mid);
        if (!conclusive(r))
            throw NumericalError("inconclusive profile fate at a=" + std::to_string(mid));
        if (sign_change(r) == sign_change(r_lo)) {
            lo = mid;
            r_lo = std::move(r);
        } else {
            hi = mid;
            r_hi = std::move(r);
        }
        ++res.iterations;
    }
    res.bracket = {lo, hi};
    res.fate_lo = r_lo.fate.kind;
    res.fate_hi = r_hi.fate.kind;
    const bool lo_good = !sign_change(r_lo);
    res.a_star = lo_good ? lo : hi;
    res.run = lo_good ? std::move(r_lo) : std::move(r_hi);
    return res;
}

namespace {

std::size_t segment(const std::vector<ProfileSample>& samples, double xi)
{
    const auto it = std::upper_bound(samples.begin(), samples.end(), xi,
                                     [](double v, const ProfileSample& s) { return v < s.xi; });
    return static_cast<std::size_t>(it - samples.begin());
}

} // namespace

double interpolate_profile(const std::vector<ProfileSample>& samples, double xi)
{
    if (samples.empty())
        throw ConstraintError("no profile samples");
    if (xi <= samples.front().xi)
        return samples.front().f;
    if (xi > samples.back().xi)
        return 0.0;
    const std::size_t k = segment(samples, xi);
    if (k >= samples.size())
        return samples.back().f;
    const ProfileSample& a = samples[k - 1];
    const ProfileSample& b = samples[k];
    const double t = (xi - a.xi) / (b.xi - a.xi);
    return (1.0 - t) * a.f + t * b.f;
}

double interpolate_profile_hermite(const std::vector<ProfileSample>& samples, double xi)
{
    if (samples.empty())
        throw ConstraintError("no profile samples");
    if (xi <= samples.front().xi)
        return samples.front().f;
    if (xi > samples.back().xi)
        return 0.0;
    const std::size_t k = segment(samples, xi);
    if (k >= samples.size())
        return samples.back().f;
    const ProfileSample& a = samples[k - 1];
    const ProfileSample& b = samples[k];
    const double h = b.xi - a.xi;
    const double t = (xi - a.xi) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a.f + (t3 - 2 * t2 + t) * h * a.df + (-2 * t3 + 3 * t2) * b.f
         + (t3 - t2) * h * b.df;
}

SelfSimilarEval evaluate_solution(const std::vector<ProfileSample>& samples, double T, double x, double t,
                                  const Params& params)
{
    if (!(t < T))
        throw DomainError("evaluation time must precede the blow-up time");
    const Exponents e = derive_exponents(params);
    const double tau = T - t;
    const double xi = std::abs(x) * std::pow(tau, e.beta);
    return {T, t, x, std::pow(tau, -e.alpha) * interpolate_profile(samples, xi)};
}

} // namespace blowup
