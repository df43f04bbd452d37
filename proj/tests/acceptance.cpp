// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "blowup/barriers.hpp"
#include "blowup/errors.hpp"
#include "blowup/orbits.hpp"
#include "blowup/parameters.hpp"
#include "blowup/phase_field.hpp"
#include "blowup/profiles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace blowup;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Verdict()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool ok = v.pass && in_time;
    if (!ok)
        ++failures;
    std::printf("Criterion %d %s: %s | %s | %.2f s (budget %.0f s)%s\n", id, ok ? "PASS" : "FAIL", name,
                v.detail.c_str(), secs, budget_s, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const std::vector<double> kMs{1.2, 1.5, 1.8};
const std::vector<double> kSigmas{2.5, 3.0, 4.0};

Verdict closed_forms()
{
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> um(1.01, 1.99), us(2.1, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double m = um(gen), s = us(gen);
        const Params p = validate_params(m, s);
        const Exponents ex = derive_exponents(p);
        const double alpha = (s + 2.0) / ((s - 2.0) * (m - 1.0));
        const double beta = 2.0 / (s - 2.0);
        const double r = beta / alpha;
        worst = std::max({worst, rel(ex.alpha, alpha), rel(ex.beta, beta), rel(p.p, 2.0 - m),
                          std::abs((m - 1.0) * ex.alpha - 2.0 * ex.beta - 1.0),
                          rel(ex.z_max, r * r / 4.0)});
        // xi_max is the double root of beta^2 xi^2 - 4 m xi^sigma.
        const double disc = beta * beta * ex.xi_max * ex.xi_max - 4.0 * m * std::pow(ex.xi_max, s);
        worst = std::max(worst, std::abs(disc) / (beta * beta * ex.xi_max * ex.xi_max));
        worst = std::max(worst, rel(xi_of_z(ex.z_max, p), ex.xi_max));
        const PhasePoint p2 = p2_coordinates(p);
        worst = std::max({worst, rel(p2.x, (m - 1.0) * p2.y / 2.0), rel(p2.y, 1.0 / ((m + 1.0) * alpha))});
        worst = std::max(worst, norm(vector_field(p2, p)) / (p2.x + p2.y));
        const double r_lib = beta_over_alpha(p);
        worst = std::max(worst, rel(r_lib, r));
        for (double lam : {-r_lib, -0.75 * r_lib, -r_lib / 2.0, -0.2 * r_lib, 0.0}) {
            const PhasePoint q = parabola_point(lam, p);
            worst = std::max(worst, std::abs(q.z - (-lam * lam - r * lam)) / (r * r));
            worst = std::max(worst, norm(vector_field(q, p)) / (r * r));
        }
        worst = std::max(worst, rel(vertex_lambda(p), -r / 2.0));
        worst = std::max(worst, rel(xi_of_z(parabola_point(vertex_lambda(p), p).z, p), ex.xi_max));
    }
    return {worst < 1e-10, "worst relative error " + fmt("%.2e", worst) + " over 1000 draws"};
}

Verdict eigen_suite()
{
    double worst_l = 0.0, worst_dir = 0.0, worst_l3 = 0.0;
    bool counts = true;
    for (double m : kMs) {
        for (double s : kSigmas) {
            const Params p = validate_params(m, s);
            const double r = beta_over_alpha(p);
            for (double lam : default_lambda_grid(p, 101)) {
                const EigenData e = eigen_decompose(jacobian(parabola_point(lam, p), p));
                std::vector<double> got, want{(m - 1.0) * lam, -2.0 * lam - r, 0.0};
                for (const auto& v : e.values)
                    got.push_back(v.real());
                std::sort(got.begin(), got.end());
                std::sort(want.begin(), want.end());
                for (int k = 0; k < 3; ++k)
                    worst_l = std::max({worst_l, std::abs(got[k] - want[k]), std::abs(e.values[k].imag())});
            }
            const EigenData e = eigen_decompose(jacobian(p2_coordinates(p), p));
            int neg = 0, pos = 0, pos_idx = -1;
            for (int k = 0; k < 3; ++k) {
                if (e.values[k].real() < 0.0)
                    ++neg;
                if (e.values[k].real() > 0.0) {
                    ++pos;
                    pos_idx = k;
                }
            }
            counts = counts && neg == 2 && pos == 1;
            if (pos_idx < 0)
                continue;
            const double l3 = (s - 2.0) * (m - 1.0) / (2.0 * (m + 1.0) * derive_exponents(p).alpha);
            worst_l3 = std::max(worst_l3, std::abs(e.values[pos_idx].real() - l3));
            // Corrected closed form: (-2(m-1)(m+1)alpha, -2(m+1)sigma alpha, D) / D.
            const double a = derive_exponents(p).alpha;
            const double D = (m - 1.0) * s * s + (5.0 - m) * s + 4.0 * m;
            Eigen::Vector3d want(-2.0 * (m - 1.0) * (m + 1.0) * a / D, -2.0 * (m + 1.0) * s * a / D, 1.0);
            Eigen::Vector3d got = e.vectors[pos_idx].real();
            want.normalize();
            got.normalize();
            worst_dir = std::max(worst_dir, want.cross(got).norm());
        }
    }
    const bool ok = worst_l < 1e-9 && worst_l3 < 1e-9 && worst_dir < 1e-8 && counts;
    std::ostringstream d;
    d << "parabola eigenvalue error " << fmt("%.2e", worst_l) << ", lambda3 error " << fmt("%.2e", worst_l3)
      << ", e3 angle " << fmt("%.2e", worst_dir) << (counts ? ", P2 signature (2 negative, 1 positive)" : ", wrong P2 signature");
    return {ok, d.str()};
}

Verdict orbit_sigma3()
{
    const Params p = validate_params(1.5, 3.0);
    const OrbitRun base = run_from_P2(p);
    const OrbitRun tight = run_from_P2(p, IntegrationControls{}.tightened(10));
    const OrbitRun half = run_from_P2(p, {}, default_delta / 2.0);
    if (base.fate.kind != FateKind::EntersParabola || !base.fate.lambda_hat)
        return {false, "fate " + to_string(base.fate.kind)};
    const double lam = *base.fate.lambda_hat;
    const double xi0 = interface_xi_of_lambda(lam, p);
    const bool stable = tight.fate.kind == base.fate.kind && half.fate.kind == base.fate.kind;
    const bool ok = lam > -0.1 && lam < 0.0 && xi0 <= 2.0 / 3.0 + 1e-4 && stable;
    return {ok, "EntersParabola, lambda_hat=" + fmt("%.6f", lam) + ", xi0=" + fmt("%.6f", xi0)
                    + (stable ? ", unchanged under 10x tolerance and delta/2" : ", fate changed under refinement")};
}

Verdict orbit_sigma34()
{
    const Params p = validate_params(1.5, 3.4);
    const OrbitRun run = run_from_P2(p);
    if (run.fate.kind != FateKind::EntersQ3)
        return {false, "fate " + to_string(run.fate.kind)};
    IntegrationControls c;
    c.max_time = 50.0;
    const Trajectory tail = integrate([&](const PhasePoint& q) { return vector_field(q, p); },
                                      run.trajectory.samples.back().point, {}, c);
    Trajectory joined = run.trajectory;
    const double t0 = joined.samples.back().eta;
    for (std::size_t i = 1; i < tail.samples.size(); ++i)
        joined.samples.push_back({t0 + tail.samples[i].eta, tail.samples[i].point});
    const OrbitBarrierCheck chk = check_orbit_barriers(joined, p);
    const double zmax = derive_exponents(p).z_max;
    const bool entry_ok = run.fate.entry_point.z > zmax;
    const bool ok = chk.crossed_midplane && chk.certificate_held && !chk.re_entered && entry_ok;
    return {ok, "EntersQ3, Z at crossing " + fmt("%.6f", run.fate.entry_point.z) + " > z_max " + fmt("%.6f", zmax)
                    + (chk.certificate_held && !chk.re_entered ? ", certificate holds after crossing" : ", certificate broken")};
}

Verdict sigma_star_check()
{
    const ShootResult r = sigma_star(1.5, {3.0, 3.4}, 1e-3);
    const bool ok = r.sigma_star >= 3.235 && r.sigma_star <= 3.335;
    return {ok, "sigma*=" + fmt("%.4f", r.sigma_star) + " in [3.235, 3.335], " + std::to_string(r.iterations) + " bisections"};
}

Verdict q1_chart()
{
    const Params p = validate_params(1.5, 3.0);
    const ChartRun run = run_from_Q1(p, launch_from_Q1_chart(Q1Mode::TangentV1, 1e-5, p), {}, 0.0);
    const PhasePoint end = run.chart.samples.back().point;
    const bool ok = rel(end.x, 100.0) < 1e-3 && rel(end.y, 4.0) < 1e-3 && end.z == 0.0;
    return {ok, "chart end (w, y)=(" + fmt("%.6f", end.x) + ", " + fmt("%.6f", end.y) + ")"};
}

Verdict barriers()
{
    std::size_t checked = 0, gated = 0, violations = 0;
    bool all = true;
    for (double m : kMs) {
        for (double s : kSigmas) {
            const auto reps = verify_catalog(validate_params(m, s), 10000, 42);
            all = all && catalog_passed(reps);
            for (const auto& r : reps) {
                violations += r.violation_count;
                if (r.samples_tested == 0)
                    ++gated;
                else
                    ++checked;
            }
        }
    }
    return {all && violations == 0, std::to_string(checked) + " barrier checks x 1e4 samples, "
                                        + std::to_string(violations) + " violations, " + std::to_string(gated)
                                        + " gated out (empty sign region)"};
}

Verdict profile_cross()
{
    const Params p = validate_params(1.5, 3.0);
    const OrbitRun orbit = run_from_P2(p);
    const ReconstructedProfile rec = reconstruct_profile(orbit.trajectory, p);
    const ProfileRun direct = integrate_ssode(ProfileOrigin::p2(), p);
    if (direct.fate.kind != ProfileFateKind::Interface)
        return {false, "direct profile fate " + to_string(direct.fate.kind)};
    double worst = 0.0;
    int compared = 0;
    for (const ProfileSample& s : rec.samples) {
        if (s.xi < 1e-3 || s.xi > 0.9 * direct.fate.xi0)
            continue;
        worst = std::max(worst, std::abs(interpolate_profile_hermite(direct.samples, s.xi) - s.f) / s.f);
        ++compared;
    }
    ProfileOptions coarse;
    coarse.output_step = 2e-3;
    ProfileOptions fine = coarse;
    fine.output_step = 1e-3;
    const double ra = ssode_residual(integrate_ssode(ProfileOrigin::p2(), p, {}, coarse).samples, p);
    const double rb = ssode_residual(integrate_ssode(ProfileOrigin::p2(), p, {}, fine).samples, p);
    const bool ok = compared > 100 && worst < 1e-4 && ra < 1e-4 && rb < 1e-4 && rb <= 0.6 * ra;
    return {ok, "max relative gap " + fmt("%.2e", worst) + " on " + std::to_string(compared) + " points, residual "
                    + fmt("%.2e", ra) + " -> " + fmt("%.2e", rb) + " (ratio " + fmt("%.2f", rb / ra) + ")"};
}

Verdict interface_quadratic()
{
    double worst = 0.0;
    int count = 0;
    auto take = [&](const ProfileRun& run, const Params& p) {
        if (run.fate.kind != ProfileFateKind::Interface)
            return;
        worst = std::max(worst, interface_residual(run.fate.xi0, run.fate.g_slope, p));
        ++count;
    };
    const Params base = validate_params(1.5, 3.0);
    take(integrate_ssode(ProfileOrigin::p2(), base), base);
    for (double s : {2.5, 3.0})
        for (double K : {0.05, 1.0}) {
            const Params p = validate_params(1.5, s);
            take(integrate_ssode(ProfileOrigin::p0(K), p), p);
        }
    const auto bracket = coarse_bracket_P1(scan_P1(base, 1e-14, 1e2, 17));
    if (bracket)
        take(find_good_profile_P1(base, *bracket, 1e-6).run, base);

    double worst_double = 0.0;
    for (double m : kMs)
        for (double s : kSigmas) {
            const Params p = validate_params(m, s);
            const Exponents ex = derive_exponents(p);
            const InterfaceReport rep = interface_slopes(ex.xi_max, p);
            const double want = -ex.beta * ex.xi_max / 2.0;
            for (const auto& v : {rep.slope_minus, rep.slope_plus})
                worst_double = std::max(worst_double, v ? std::abs(*v - want) : 1.0);
        }
    const bool ok = count >= 3 && bracket.has_value() && worst < 1e-3 && worst_double < 1e-6;
    return {ok, std::to_string(count) + " interfaces, worst |Q(g')| " + fmt("%.2e", worst)
                    + ", double root error " + fmt("%.2e", worst_double)};
}

Verdict p0_evidence()
{
    IntegrationControls c;
    c.max_time = 1e5;
    std::ostringstream d;
    bool all = true;
    for (double s : {2.5, 3.0, 4.0, 6.0}) {
        const Params p = validate_params(1.5, s);
        std::optional<double> hit;
        for (int i = 0; i <= 16 && !hit; ++i) {
            const double K = std::pow(10.0, -2.0 + 0.25 * i);
            const OrbitRun run = run_orbit(p, launch_from_P0(K, 1e-6, p), c);
            if (run.fate.kind == FateKind::EntersParabola)
                hit = K;
        }
        all = all && hit.has_value();
        d << "sigma=" << s << (hit ? " K=" + fmt("%.4g", *hit) : std::string(" none")) << "; ";
    }
    return {all, d.str() + "z0=1e-6, K in 10^[-2,2]"};
}

} // namespace

int main()
{
    criterion(1, "closed-form suite", 1.0, closed_forms);
    criterion(2, "eigen suite", 1.0, eigen_suite);
    criterion(3, "P2 orbit at sigma=3", 30.0, orbit_sigma3);
    criterion(4, "P2 orbit at sigma=3.4", 30.0, orbit_sigma34);
    criterion(5, "sigma* bisection", 600.0, sigma_star_check);
    criterion(6, "Q1 -> P2 in the chart", 10.0, q1_chart);
    criterion(7, "barrier suite", 10.0, barriers);
    criterion(8, "profile cross-validation", 60.0, profile_cross);
    criterion(9, "interface quadratic", 5.0, interface_quadratic);
    criterion(10, "P0-origin orbits enter the parabola", 300.0, p0_evidence);
    std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
