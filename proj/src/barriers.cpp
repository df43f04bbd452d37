#include "blowup/barriers.hpp"

#include "blowup/errors.hpp"
#include "blowup/phase_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace blowup {

std::string to_string(ExpectedSign s)
{
    switch (s) {
    case ExpectedSign::Negative: return "negative";
    case ExpectedSign::Positive: return "positive";
    case ExpectedSign::Nonpositive: return "nonpositive";
    case ExpectedSign::Nonnegative: return "nonnegative";
    }
    return "unknown";
}

BarrierConstants barrier_constants(const Params& params)
{
    const Exponents ex = derive_exponents(params);
    const double m = params.m;
    const double s = params.sigma;
    const double m1 = m - 1.0;
    const double s2 = s + 2.0;
    const double w = 2.0 * s + 5.0 - m;

    BarrierConstants k;
    k.r = beta_over_alpha(params);
    const PhasePoint p2 = p2_coordinates(params);
    k.x_p2 = p2.x;
    k.y_p2 = p2.y;

    k.c1 = m1 * m1 / (s2 * s2);
    k.d1 = k.c1 / 2.0;
    k.y_star = -m1 / (6.0 * w);
    k.x_star = m1 * m1 / (3.0 * s * s2 * s2);

    k.a2 = m1 * m1 * (3.0 * s + 7.0 - m) / (3.0 * s2 * s2 * w);
    k.b2 = k.a2;
    k.e2 = (3.0 * s + 7.0 - m) / (3.0 * w);
    k.f2 = m1 / (6.0 * w);

    k.A3 = (s - 1.0) * (2.0 * m + s) / (s2 * (m + 1.0));
    k.B3 = m1 * (2.0 * m + s) / (s2 * (m + 1.0));
    k.C3 = k.A3 * k.x_p2 + k.B3 * k.y_p2;
    k.x3_star = m1 * (s + 1.0) * (2.0 * m + s) / (s * (s - 1.0) * s2 * (m + 1.0));

    k.k = 2.0 * (m + 1.0) * ex.alpha / (m1 * (s - 1.0));
    k.a4 = 3.0 / (m1 * ex.alpha);

    const double den = 8.0 * m1 * m1 * m1;
    k.q1 = -s2 * s2 * (m * s + 2.0) / den;
    k.q2 = s2 * s2 * (3.0 * m * s - s + 4.0) / den;
    k.q3 = -s2 * s2 * s2 / den;
    return k;
}

double center_manifold_y(double x, double z, const Params& params)
{
    const BarrierConstants k = barrier_constants(params);
    return (x - z) / k.r + k.q1 * x * x + k.q2 * x * z + k.q3 * z * z;
}

namespace {

PhasePoint P(const Vec3& v) { return PhasePoint::from_vec(v); }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double phase_flux(const Vec3& normal, const Vec3& pt, const Params& params)
{
    return dot(normal, vector_field(P(pt), params).as_vec());
}

double chart_flux(const Vec3& normal, const Vec3& pt, const Params& params)
{
    return dot(normal, infinity_chart_field(ChartPoint::from_vec(pt), params).as_vec());
}

// Box of the unit cube mapped to [lo, hi].
double lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

} // namespace

std::vector<BarrierSpec> barrier_catalog(const Params& params)
{
    const Exponents ex = derive_exponents(params);
    const BarrierConstants k = barrier_constants(params);
    const double m = params.m;
    const double s = params.sigma;
    const double m1 = m - 1.0;
    const double r = k.r;
    const double zmax = ex.z_max;
    const SmallSigmaHypotheses small = small_sigma_hypotheses(params);
    const std::string small_reason = small.all() ? std::string("small-sigma hypotheses hold")
                                                 : std::string("small-sigma hypotheses fail:")
                                                       + (small.p2_x_below_x_star ? "" : " X(P2)>=X*")
                                                       + (small.p2_y_below_half ? "" : " Y(P2)>=1/2")
                                                       + (small.r2_right_of_r1 ? "" : " r2 not right of r1");

    std::vector<BarrierSpec> out;
    auto Ydot = [r](const Vec3& p) { return -p[1] * p[1] - r * p[1] + p[0] - p[0] * p[1] - p[2]; };

    {
        BarrierSpec b;
        b.id = "midplane";
        b.description = "Y = -r/2 is crossed leftwards only where Z >= z_max + X(1 + r/2)";
        b.expected = ExpectedSign::Nonpositive;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double x = u;
            return Vec3{x, -r / 2.0, zmax + x * (1.0 + r / 2.0) + v};
        };
        b.surface = [=](const Vec3& p) { return p[1] + r / 2.0; };
        b.sign_expression = [=](const Vec3& p) { return r * r / 4.0 + p[0] * (1.0 + r / 2.0) - p[2]; };
        b.flux = [=](const Vec3& p) { return phase_flux({0.0, 1.0, 0.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return p[2] - zmax - p[0] * (1.0 + r / 2.0); };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "cylinder";
        b.description = "parabolic cylinder Z = -Y^2 - rY over -r/2 <= Y <= 0 is crossed outwards only";
        b.expected = ExpectedSign::Nonpositive;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double y = -r / 2.0 * v;
            return Vec3{u, y, -y * y - r * y};
        };
        b.surface = [=](const Vec3& p) { return -p[1] * p[1] - r * p[1] - p[2]; };
        b.sign_expression = [=](const Vec3& p) {
            const double y = p[1];
            return p[0] * (y * (s * y + (s - 1.0) * r) - (2.0 * y + r));
        };
        b.flux = [=](const Vec3& p) { return phase_flux({0.0, -2.0 * p[1] - r, -1.0}, p, params); };
        b.boundary_slack = [](const Vec3& p) { return p[0]; };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "plane_x_eq_z";
        b.description = "X = Z cannot be crossed towards X > Z in Y < 0";
        b.expected = ExpectedSign::Negative;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double y = -2.0 * v;
            if (!(y < 0.0))
                return std::nullopt;
            return Vec3{u, y, u};
        };
        b.surface = [](const Vec3& p) { return p[0] - p[2]; };
        b.sign_expression = [=](const Vec3& p) { return p[0] * (m1 * p[1] - s * p[0]); };
        b.flux = [=](const Vec3& p) { return phase_flux({1.0, 0.0, -1.0}, p, params); };
        b.boundary_slack = [](const Vec3& p) { return p[0]; };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "plane1";
        b.description = "cY + Z = d is crossed downwards for Y > Y*, 0 < X < X*";
        b.expected = ExpectedSign::Negative;
        b.applicable = small.all();
        b.gate_reason = small_reason;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double y = lerp(k.y_star, 0.5, v);
            const double x = k.x_star * u;
            if (!(y > k.y_star) || !(x < k.x_star))
                return std::nullopt;
            return Vec3{x, y, k.d1 - k.c1 * y};
        };
        b.surface = [=](const Vec3& p) { return k.c1 * p[1] + p[2] - k.d1; };
        b.sign_expression = [=](const Vec3& p) {
            const double x = p[0], y = p[1];
            const double s24 = std::pow(s + 2.0, 4.0);
            return -k.c1 * y * y - k.c1 * (s - 1.0) * x * y + s * k.c1 * x / 2.0
                   - (2.0 * s + 5.0 - m) * m1 * m1 * m1 / s24 * y - m1 * m1 * m1 * m1 / (2.0 * s24);
        };
        b.flux = [=](const Vec3& p) { return phase_flux({0.0, k.c1, 1.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return std::min(p[1] - k.y_star, k.x_star - p[0]); };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "plane2";
        b.description = "aX + Z = b is crossed downwards where -sigma X + (m-1)Y + sigma - 2 < 0";
        b.expected = ExpectedSign::Negative;
        b.applicable = small.all();
        b.gate_reason = small_reason;
        const double y_hi = 2.0 / m1;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double x = u * k.b2 / k.a2;
            const double y = lerp(-2.0, y_hi, v);
            if (!(-s * x + m1 * y + s - 2.0 < 0.0))
                return std::nullopt;
            return Vec3{x, y, k.b2 - k.a2 * x};
        };
        b.surface = [=](const Vec3& p) { return k.a2 * p[0] + p[2] - k.b2; };
        b.sign_expression = [=](const Vec3& p) {
            return k.a2 * p[0] * (-s * p[0] + m1 * p[1] + s - 2.0);
        };
        b.flux = [=](const Vec3& p) { return phase_flux({k.a2, 0.0, 1.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return std::min(p[0], -(-s * p[0] + m1 * p[1] + s - 2.0)); };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "d4_wall_x";
        b.description = "X = X(P2) is crossed leftwards only, for 0 <= Y <= Y(P2)";
        b.expected = ExpectedSign::Nonpositive;
        b.applicable = small.all();
        b.gate_reason = small_reason;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            return Vec3{k.x_p2, k.y_p2 * u, 4.0 * zmax * v};
        };
        b.surface = [=](const Vec3& p) { return p[0] - k.x_p2; };
        b.sign_expression = [=](const Vec3& p) { return k.x_p2 * (m1 * p[1] - 2.0 * k.x_p2); };
        b.flux = [=](const Vec3& p) { return phase_flux({1.0, 0.0, 0.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return k.y_p2 - p[1]; };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "d4_wall_y";
        b.description = "Y = Y(P2) is crossed downwards only, for 0 <= X <= X(P2), Z >= 0";
        b.expected = ExpectedSign::Negative;
        b.applicable = small.all();
        b.gate_reason = small_reason;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            return Vec3{k.x_p2 * u, k.y_p2, 4.0 * zmax * v};
        };
        b.surface = [=](const Vec3& p) { return p[1] - k.y_p2; };
        b.sign_expression = [=](const Vec3& p) {
            const double y = k.y_p2;
            return -y * y - r * y + p[0] * (1.0 - y) - p[2];
        };
        b.flux = [=](const Vec3& p) { return phase_flux({0.0, 1.0, 0.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return std::max(k.x_p2 - p[0], p[2]); };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "plane3";
        b.description = "AX + BY + Z = C through P2 is crossed upwards for 0 <= Y < Y(P2), X* < X < X(P2)";
        b.expected = ExpectedSign::Positive;
        b.applicable = plane3_certificate(params);
        b.gate_reason = b.applicable ? "X* < X(P2)" : "X* >= X(P2): sign region empty";
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            if (!(k.x3_star < k.x_p2))
                return std::nullopt;
            const double x = lerp(k.x3_star, k.x_p2, u);
            const double y = k.y_p2 * v;
            const double z = k.C3 - k.A3 * x - k.B3 * y;
            if (!(x > k.x3_star && x < k.x_p2 && y < k.y_p2) || z < 0.0)
                return std::nullopt;
            return Vec3{x, y, z};
        };
        b.surface = [=](const Vec3& p) { return k.A3 * p[0] + k.B3 * p[1] + p[2] - k.C3; };
        b.sign_expression = [=](const Vec3& p) {
            return k.B3 * (k.y_p2 - p[1]) * p[1] + k.A3 * s * (k.x_p2 - p[0]) * (p[0] - k.x3_star);
        };
        b.flux = [=](const Vec3& p) { return phase_flux({k.A3, k.B3, 1.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) {
            return std::min({k.y_p2 - p[1], k.x_p2 - p[0], p[0] - k.x3_star});
        };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "surface_t";
        b.description = "the surface Y' = 0 is crossed into {Y' < 0} only, in Y < 0";
        b.expected = ExpectedSign::Negative;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double x = u;
            const double y = -2.0 * v;
            const double z = -y * y - r * y + x - x * y;
            if (!(y < 0.0) || z < 0.0)
                return std::nullopt;
            return Vec3{x, y, z};
        };
        b.surface = Ydot;
        b.sign_expression = [=](const Vec3& p) {
            const double x = p[0], y = p[1];
            return x * ((1.0 - y) * m1 * y - 2.0 * (1.0 - y) * x - (s - 2.0) * p[2]);
        };
        b.flux = [=](const Vec3& p) { return phase_flux({1.0 - p[1], -2.0 * p[1] - r - p[0], -1.0}, p, params); };
        b.boundary_slack = [](const Vec3& p) { return p[0]; };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "plane_y_kz";
        b.description = "Y + kZ = 1 is crossed downwards for 0 < X < X(P2), 0 < Y <= 1";
        b.expected = ExpectedSign::Negative;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double x = k.x_p2 * u;
            const double y = v;
            if (!(y > 0.0))
                return std::nullopt;
            return Vec3{x, y, (1.0 - y) / k.k};
        };
        b.surface = [=](const Vec3& p) { return p[1] + k.k * p[2] - 1.0; };
        b.sign_expression = [=](const Vec3& p) {
            return -p[1] * p[1] - r * p[1] + k.k * (s - 1.0) * p[0] * p[2] - p[2];
        };
        b.flux = [=](const Vec3& p) { return phase_flux({0.0, 1.0, k.k}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return std::max(p[1], k.x_p2 - p[0]); };
        out.push_back(std::move(b));
    }
    {
        // The sign is dominated by 2aX - c only while the second-order term 3T stays smaller;
        // sampling stops at X = c/(4a) with c well inside the quadratic range of the manifold.
        BarrierSpec b;
        b.id = "plane4";
        b.description = "aX + Z = c is crossed downwards on the center manifold of P0, 0 < X <= c/(4a)";
        b.expected = ExpectedSign::Negative;
        const double c_max = 1e-2 * zmax;
        b.sample = [=](double u, double v, double) -> std::optional<Vec3> {
            const double c = c_max * v;
            const double x = c / (4.0 * k.a4) * u;
            if (!(x > 0.0))
                return std::nullopt;
            const double z = c - k.a4 * x;
            return Vec3{x, center_manifold_y(x, z, params), z};
        };
        b.surface = [=](const Vec3& p) {
            return p[1] - center_manifold_y(p[0], p[2], params);
        };
        b.sign_expression = [=](const Vec3& p) {
            const double c = k.a4 * p[0] + p[2];
            const double t = r * p[1] - p[0] + p[2];
            return p[0] / ex.beta * (2.0 * k.a4 * p[0] - c + 3.0 * t);
        };
        b.flux = [=](const Vec3& p) { return phase_flux({k.a4, 0.0, 1.0}, p, params); };
        b.boundary_slack = [](const Vec3& p) { return p[0]; };
        out.push_back(std::move(b));
    }
    {
        BarrierSpec b;
        b.id = "plane_y0";
        b.description = "Y = y0 with y0 > 1 is crossed leftwards only";
        b.expected = ExpectedSign::Negative;
        b.sample = [=](double u, double v, double w) -> std::optional<Vec3> {
            const double y0 = 1.0 + 4.0 * w;
            if (!(y0 > 1.0))
                return std::nullopt;
            return Vec3{u, y0, 4.0 * zmax * v};
        };
        b.surface = [](const Vec3&) { return 0.0; };
        b.sign_expression = [=](const Vec3& p) {
            const double y0 = p[1];
            return -y0 * y0 - r * y0 + p[0] * (1.0 - y0) - p[2];
        };
        b.flux = [=](const Vec3& p) { return phase_flux({0.0, 1.0, 0.0}, p, params); };
        b.boundary_slack = [](const Vec3& p) { return p[1] - 1.0; };
        out.push_back(std::move(b));
    }
    {
        const double am = ex.alpha * (m + 1.0);
        const double w_p2 = 2.0 * (m + 1.0) * ex.alpha / m1;
        BarrierSpec b;
        b.id = "chart_line";
        b.description = "chart line y = w/(alpha(m+1)) is crossed upwards for 0 < w < w(P2)";
        b.expected = ExpectedSign::Positive;
        b.chart = true;
        b.sample = [=](double u, double, double) -> std::optional<Vec3> {
            const double w = w_p2 * u;
            if (!(w > 0.0 && w < w_p2))
                return std::nullopt;
            return Vec3{w, w / am, 0.0};
        };
        b.surface = [=](const Vec3& p) { return p[1] - p[0] / am; };
        b.sign_expression = [=](const Vec3& p) {
            const double w = p[0];
            return w * (am - 1.0 - (1.0 + ex.beta * (m + 1.0)) * w / am);
        };
        b.flux = [=](const Vec3& p) { return chart_flux({-1.0, am, 0.0}, p, params); };
        b.boundary_slack = [=](const Vec3& p) { return std::min(p[0], w_p2 - p[0]); };
        out.push_back(std::move(b));
    }
    {
        const double y_p2 = 2.0 / m1;
        BarrierSpec b;
        b.id = "chart_curve";
        b.description = "chart curve y + w - m y^2 - r y w = 0 is crossed towards S for y < y(P2)";
        b.expected = ExpectedSign::Positive;
        b.chart = true;
        b.sample = [=](double u, double, double) -> std::optional<Vec3> {
            const double y = lerp(1.0 / m, y_p2, u);
            const double w = y * (m * y - 1.0) / (1.0 - r * y);
            if (!(w > 0.0 && y < y_p2))
                return std::nullopt;
            return Vec3{w, y, 0.0};
        };
        b.surface = [=](const Vec3& p) { return p[1] + p[0] - m * p[1] * p[1] - r * p[1] * p[0]; };
        b.sign_expression = [=](const Vec3& p) {
            const double w = p[0], y = p[1];
            return w * (2.0 - m1 * y) * (1.0 - 2.0 * m1 * y / (s + 2.0));
        };
        b.flux = [=](const Vec3& p) {
            return chart_flux({1.0 - r * p[1], 1.0 - 2.0 * m * p[1] - r * p[0], 0.0}, p, params);
        };
        b.boundary_slack = [=](const Vec3& p) { return std::min(p[0], y_p2 - p[1]); };
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<std::string> barrier_ids()
{
    std::vector<std::string> ids;
    for (const auto& b : barrier_catalog(validate_params(1.5, 3.0)))
        ids.push_back(b.id);
    return ids;
}

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double x = 0.0;
    while (i > 0) {
        x += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return x;
}

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

} // namespace

VerificationReport verify_barrier(const BarrierSpec& spec, std::size_t n_samples, std::uint64_t seed)
{
    if (n_samples < 100)
        throw ConstraintError("verify_barrier needs at least 100 samples");

    std::mt19937_64 gen(seed);
    const std::array<double, 3> shift{unit(gen), unit(gen), unit(gen)};

    VerificationReport rep;
    rep.id = spec.id;
    rep.applicable = spec.applicable;
    rep.gate_reason = spec.gate_reason;
    rep.seed = seed;
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    const bool want_negative = spec.expected == ExpectedSign::Negative || spec.expected == ExpectedSign::Nonpositive;
    const bool strict = spec.expected == ExpectedSign::Negative || spec.expected == ExpectedSign::Positive;
    const std::uint64_t max_draws = 50 * static_cast<std::uint64_t>(n_samples);

    for (std::uint64_t i = 1; i <= max_draws && rep.samples_tested < n_samples; ++i) {
        const double u = std::fmod(radical_inverse(i, 2) + shift[0], 1.0);
        const double v = std::fmod(radical_inverse(i, 3) + shift[1], 1.0);
        const double w = std::fmod(radical_inverse(i, 5) + shift[2], 1.0);
        const auto pt = spec.sample(u, v, w);
        if (!pt)
            continue;
        ++rep.samples_tested;

        const double value = spec.sign_expression(*pt);
        const double flux = spec.flux(*pt);
        rep.oracle_gap = std::max(rep.oracle_gap, std::abs(value - flux) / (1.0 + std::abs(flux)));

        if (spec.boundary_slack(*pt) <= boundary_band) {
            ++rep.boundary_samples;
            continue;
        }
        const double margin = want_negative ? value : -value;
        rep.worst_margin = std::max(rep.worst_margin, margin);
        const bool bad = !std::isfinite(margin) || (strict ? margin >= 0.0 : margin > 0.0);
        if (bad) {
            ++rep.violation_count;
            if (rep.violations.size() < max_recorded_violations)
                rep.violations.push_back({*pt, value});
        }
    }
    if (rep.samples_tested == 0)
        throw ConstraintError("validity region of barrier '" + spec.id + "' is empty after rejection sampling");
    return rep;
}

std::vector<VerificationReport> verify_catalog(const Params& params, std::size_t n_samples, std::uint64_t seed)
{
    std::vector<VerificationReport> out;
    for (const BarrierSpec& spec : barrier_catalog(params)) {
        try {
            out.push_back(verify_barrier(spec, n_samples, seed));
        } catch (const ConstraintError&) {
            if (spec.applicable)
                throw;
            VerificationReport rep;
            rep.id = spec.id;
            rep.applicable = false;
            rep.gate_reason = spec.gate_reason;
            rep.seed = seed;
            out.push_back(rep);
        }
    }
    return out;
}

bool catalog_passed(const std::vector<VerificationReport>& reports)
{
    for (const auto& r : reports) {
        if (r.violation_count > 0)
            return false;
        if (r.applicable && !r.passed())
            return false;
    }
    return true;
}

std::string to_string(Region region)
{
    switch (region) {
    case Region::D0: return "D0";
    case Region::D1: return "D1";
    case Region::D2: return "D2";
    case Region::D3: return "D3";
    case Region::D4: return "D4";
    case Region::R: return "R";
    case Region::S: return "S";
    }
    return "unknown";
}

Region region_from_string(const std::string& name)
{
    for (Region r : {Region::D0, Region::D1, Region::D2, Region::D3, Region::D4, Region::R, Region::S})
        if (to_string(r) == name)
            return r;
    throw ConstraintError("unknown region '" + name + "'");
}

bool region_membership(Region region, const Vec3& pt, const Params& params, std::optional<double> lambda0)
{
    const BarrierConstants k = barrier_constants(params);
    const double r = k.r;
    const double x = pt[0], y = pt[1], z = pt[2];
    const double cyl = -y * y - r * y;

    switch (region) {
    case Region::D0: {
        const double l0 = lambda0.value_or(-r / 2.0);
        if (!(l0 >= -r && l0 <= 0.0))
            throw DomainError("lambda0 must lie in [-beta/alpha, 0]");
        const double half = l0 / 2.0;
        const double roof = -half * half - r * half;
        const double ydot = cyl + x - x * y - z;
        return x >= 0.0 && y <= 0.0 && ydot <= 0.0 && z >= 0.0 && z <= roof;
    }
    case Region::D1:
        return x >= 0.0 && x <= k.x_star && y >= 0.0 && y <= 0.5 && z >= 0.0 && z <= -k.c1 * y + k.d1;
    case Region::D2:
        return x >= 0.0 && x <= k.x_star && y >= k.e2 * x - k.f2 && y <= 0.0 && z >= cyl && z <= -k.c1 * y + k.d1;
    case Region::D3: {
        // Right branch of the intersection of plane2 with the cylinder, solved for Y.
        const double disc = r * r - 4.0 * (k.b2 - k.a2 * x);
        const double g_inv = disc >= 0.0 ? (-r + std::sqrt(disc)) / 2.0 : -r / 2.0;
        return x >= 0.0 && x <= k.x_star && y >= g_inv && y <= k.e2 * x - k.f2 && z >= cyl && z <= -k.a2 * x + k.b2;
    }
    case Region::D4:
        return x >= 0.0 && x <= k.x_p2 && y >= 0.0 && y <= k.y_p2 && z >= 0.0;
    case Region::R:
        return x >= k.x3_star && x <= k.x_p2 && y >= 0.0 && y <= k.y_p2 && z >= 0.0
               && z >= k.C3 - k.A3 * x - k.B3 * y;
    case Region::S: {
        const Exponents ex = derive_exponents(params);
        const double w = pt[0], cy = pt[1];
        const double m = params.m;
        return pt[2] == 0.0 && w >= 0.0 && cy >= w / (ex.alpha * (m + 1.0)) && cy <= 2.0 / (m - 1.0)
               && cy + w - m * cy * cy - r * cy * w >= 0.0;
    }
    }
    return false;
}

SmallSigmaHypotheses small_sigma_hypotheses(const Params& params)
{
    const BarrierConstants k = barrier_constants(params);
    const double m1 = params.m - 1.0;
    const double s = params.sigma;
    SmallSigmaHypotheses h;
    h.p2_x_below_x_star = k.x_p2 < k.x_star;
    h.p2_y_below_half = k.y_p2 < 0.5;
    // Y(r2) - Y(r1) is affine in X, so checking the ends of [0, X*] suffices.
    auto gap = [&](double x) { return (k.e2 - s / m1) * x - k.f2 + (s - 2.0) / m1; };
    h.r2_right_of_r1 = gap(0.0) < 0.0 && gap(k.x_star) < 0.0;
    return h;
}

bool plane3_certificate(const Params& params)
{
    const BarrierConstants k = barrier_constants(params);
    return k.x3_star < k.x_p2;
}

std::optional<double> empirical_sigma0(double m, const std::vector<double>& sigma_grid)
{
    std::optional<double> best;
    for (double s : sigma_grid) {
        const Params p = validate_params(m, s);
        if (small_sigma_hypotheses(p).all() && (!best || s > *best))
            best = s;
    }
    return best;
}

std::optional<double> empirical_sigma1(double m, const std::vector<double>& sigma_grid,
                                       const IntegrationControls& controls)
{
    std::vector<double> grid = sigma_grid;
    std::sort(grid.begin(), grid.end());
    for (double s : grid) {
        const Params p = validate_params(m, s);
        if (!plane3_certificate(p))
            continue;
        if (run_from_P2(p, controls).fate.kind == FateKind::EntersQ3)
            return s;
    }
    return std::nullopt;
}

OrbitBarrierCheck check_orbit_barriers(const Trajectory& traj, const Params& params)
{
    const double half = beta_over_alpha(params) / 2.0;
    const double zmax = derive_exponents(params).z_max;
    OrbitBarrierCheck out;
    const auto& s = traj.samples;

    for (std::size_t i = 0; i < s.size(); ++i) {
        const PhasePoint& q = s[i].point;
        if (!out.crossed_midplane && q.y < -half && i > 0 && s[i - 1].point.y >= -half) {
            out.crossed_midplane = true;
            out.certificate_held = true;
        }
        if (out.crossed_midplane) {
            if (q.y > -half)
                out.re_entered = true;
            if (!(q.z > zmax))
                out.certificate_held = false;
        }
        if (i == 0)
            continue;
        const PhasePoint& p = s[i - 1].point;
        if (s[i].eta <= s[i - 1].eta || p.y > 0.0 || q.y > 0.0 || !(p.x > 0.0) || !(q.x > 0.0))
            continue;
        ++out.monotone_pairs;
        if (!(q.x < p.x) || !(q.z > p.z))
            ++out.monotone_violations;
    }
    return out;
}

} // namespace blowup
