#include "blowup/phase_field.hpp"

#include "blowup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace blowup {

PhasePoint vector_field(const PhasePoint& pt, const Params& params)
{
    const double m = params.m;
    const double r = beta_over_alpha(params);
    const auto [x, y, z] = pt;
    return {
        x * ((m - 1.0) * y - 2.0 * x),
        -y * y - r * y + x - x * y - z,
        (params.sigma - 2.0) * x * z,
    };
}

Eigen::Matrix3d jacobian(const PhasePoint& pt, const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    const double r = beta_over_alpha(params);
    const auto [x, y, z] = pt;
    Eigen::Matrix3d j;
    j << (m - 1.0) * y - 4.0 * x, (m - 1.0) * x, 0.0,
         1.0 - y, -2.0 * y - r - x, -1.0,
         (s - 2.0) * z, 0.0, (s - 2.0) * x;
    return j;
}

std::string to_string(CriticalKind kind)
{
    switch (kind) {
    case CriticalKind::P0Lambda: return "P0_lambda";
    case CriticalKind::P2: return "P2";
    case CriticalKind::Q1: return "Q1";
    case CriticalKind::Q2: return "Q2";
    case CriticalKind::Q3: return "Q3";
    case CriticalKind::Q4: return "Q4";
    case CriticalKind::Q5: return "Q5";
    }
    return "unknown";
}

void count_dimensions(EigenData& data, double tol)
{
    data.stable_dim = data.unstable_dim = data.center_dim = 0;
    for (const auto& v : data.values) {
        if (v.real() < -tol)
            ++data.stable_dim;
        else if (v.real() > tol)
            ++data.unstable_dim;
        else
            ++data.center_dim;
    }
}

namespace {

// Diagonal of P^T A P when some symmetric permutation makes A exactly triangular. The QR
// iteration loses about half the digits at a Jordan block; a triangular form gives them exactly.
std::optional<std::array<double, 3>> triangular_diagonal(const Eigen::Matrix3d& a)
{
    std::array<int, 3> perm{0, 1, 2};
    do {
        bool lower = true;
        bool upper = true;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = a(perm[i], perm[j]);
                if (j > i && v != 0.0)
                    lower = false;
                if (j < i && v != 0.0)
                    upper = false;
            }
        if (lower || upper)
            return std::array<double, 3>{a(0, 0), a(1, 1), a(2, 2)};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

} // namespace

EigenData eigen_decompose(const Eigen::Matrix3d& matrix, double center_tol)
{
    Eigen::EigenSolver<Eigen::Matrix3d> solver(matrix, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigen decomposition did not converge");
    EigenData data;
    for (int i = 0; i < 3; ++i) {
        data.values[i] = solver.eigenvalues()(i);
        Eigen::Vector3cd v = solver.eigenvectors().col(i);
        data.vectors[i] = v / v.norm();
    }
    if (const auto diag = triangular_diagonal(matrix)) {
        std::array<bool, 3> used{false, false, false};
        for (int i = 0; i < 3; ++i) {
            int best = -1;
            for (int k = 0; k < 3; ++k)
                if (!used[k] && (best < 0 || std::abs(data.values[i] - (*diag)[k]) < std::abs(data.values[i] - (*diag)[best])))
                    best = k;
            used[best] = true;
            data.values[i] = (*diag)[best];
        }
    }
    count_dimensions(data, center_tol);
    return data;
}

double eigen_residual(const Eigen::Matrix3d& matrix, std::complex<double> value, const Eigen::Vector3cd& vector)
{
    const Eigen::Vector3cd r = matrix.cast<std::complex<double>>() * vector - value * vector;
    return r.norm() / vector.norm();
}

namespace {

// Right null space of a real matrix, from the SVD.
std::vector<Eigen::Vector3d> null_space(const Eigen::Matrix3d& a, double tol)
{
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(1.0, sv(0));
    std::vector<Eigen::Vector3d> basis;
    for (int i = 2; i >= 0; --i) {
        if (sv(i) <= tol * scale)
            basis.push_back(svd.matrixV().col(i));
    }
    return basis;
}

} // namespace

EigenData p0_lambda_eigen(double lambda, const Params& params)
{
    const double r = beta_over_alpha(params);
    const PhasePoint pt = parabola_point(lambda, params);
    const Eigen::Matrix3d j = jacobian(pt, params);
    const std::array<double, 3> values{(params.m - 1.0) * lambda, -2.0 * lambda - r, 0.0};
    constexpr double cluster_tol = 1e-12;

    EigenData data;
    std::array<bool, 3> done{false, false, false};
    for (int i = 0; i < 3; ++i) {
        if (done[i])
            continue;
        std::vector<int> cluster{i};
        for (int k = i + 1; k < 3; ++k)
            if (!done[k] && std::abs(values[k] - values[i]) <= cluster_tol)
                cluster.push_back(k);
        const auto basis = null_space(j - values[i] * Eigen::Matrix3d::Identity(), 1e-10);
        if (basis.empty())
            throw NumericalError("no eigenvector found on the critical parabola");
        if (basis.size() < cluster.size())
            data.defective = true;
        for (std::size_t c = 0; c < cluster.size(); ++c) {
            const int slot = cluster[c];
            data.values[slot] = values[slot];
            data.vectors[slot] = basis[std::min(c, basis.size() - 1)].cast<std::complex<double>>();
            done[slot] = true;
        }
    }
    count_dimensions(data, cluster_tol);
    return data;
}

EigenData p2_eigen(const Params& params)
{
    return eigen_decompose(jacobian(p2_coordinates(params), params));
}

double p2_unstable_eigenvalue(const Params& params)
{
    const double alpha = derive_exponents(params).alpha;
    return (params.sigma - 2.0) * (params.m - 1.0) / (2.0 * (params.m + 1.0) * alpha);
}

PhasePoint p2_unstable_direction(const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    const double alpha = derive_exponents(params).alpha;
    const double d = (m - 1.0) * s * s + (5.0 - m) * s + 4.0 * m;
    // The Y component carries a factor alpha; without it J e3 = lambda3 e3 fails.
    return {-2.0 * (m - 1.0) * (m + 1.0) * alpha / d, -2.0 * (m + 1.0) * s * alpha / d, 1.0};
}

std::vector<double> default_lambda_grid(const Params& params, int n)
{
    const double r = beta_over_alpha(params);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Endpoints are pinned so that rounding never leaves [-r, 0].
        if (i == 0)
            grid.push_back(-r);
        else if (i == n - 1)
            grid.push_back(0.0);
        else
            grid.push_back(-r + r * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return grid;
}

std::vector<CriticalPoint> classify_critical_points(const Params& params, const std::vector<double>& lambda_grid)
{
    std::vector<CriticalPoint> out;
    out.reserve(lambda_grid.size() + 6);
    for (double lambda : lambda_grid) {
        CriticalPoint cp;
        cp.kind = CriticalKind::P0Lambda;
        cp.lambda = lambda;
        cp.location = parabola_point(lambda, params);
        cp.eigen = p0_lambda_eigen(lambda, params);
        out.push_back(cp);
    }

    CriticalPoint p2;
    p2.kind = CriticalKind::P2;
    p2.location = p2_coordinates(params);
    p2.eigen = p2_eigen(params);
    out.push_back(p2);

    const double m = params.m;
    const double q5 = std::sqrt(1.0 + m * m);
    const std::array<std::pair<CriticalKind, std::array<double, 4>>, 5> infinity{{
        {CriticalKind::Q1, {1.0, 0.0, 0.0, 0.0}},
        {CriticalKind::Q2, {0.0, 1.0, 0.0, 0.0}},
        {CriticalKind::Q3, {0.0, -1.0, 0.0, 0.0}},
        {CriticalKind::Q4, {0.0, 0.0, 1.0, 0.0}},
        {CriticalKind::Q5, {m / q5, 1.0 / q5, 0.0, 0.0}},
    }};
    for (const auto& [kind, sphere] : infinity) {
        CriticalPoint cp;
        cp.kind = kind;
        cp.sphere_location = sphere;
        if (kind == CriticalKind::Q1)
            cp.eigen = eigen_decompose(infinity_chart_jacobian(ChartPoint{}, params));
        out.push_back(cp);
    }
    return out;
}

ChartPoint infinity_chart_field(const ChartPoint& cp, const Params& params)
{
    const double m = params.m;
    const double r = beta_over_alpha(params);
    const auto [w, y, z] = cp;
    return {
        w * (2.0 - (m - 1.0) * y),
        y + w - m * y * y - r * y * w - z * w,
        z * (params.sigma - (m - 1.0) * y),
    };
}

Eigen::Matrix3d infinity_chart_jacobian(const ChartPoint& cp, const Params& params)
{
    const double m = params.m;
    const double r = beta_over_alpha(params);
    const auto [w, y, z] = cp;
    Eigen::Matrix3d j;
    j << 2.0 - (m - 1.0) * y, -(m - 1.0) * w, 0.0,
         1.0 - r * y - z, 1.0 - 2.0 * m * y - r * w, -w,
         0.0, -(m - 1.0) * z, params.sigma - (m - 1.0) * y;
    return j;
}

ChartPoint phase_to_chart(const PhasePoint& pt)
{
    return {1.0 / pt.x, pt.y / pt.x, pt.z / pt.x};
}

PhasePoint chart_to_phase(const ChartPoint& cp)
{
    return {1.0 / cp.w, cp.y / cp.w, cp.z / cp.w};
}

ChartPoint p2_chart_coordinates(const Params& params)
{
    const double alpha = derive_exponents(params).alpha;
    return {2.0 * (params.m + 1.0) * alpha / (params.m - 1.0), 2.0 / (params.m - 1.0), 0.0};
}

CenterFamilyValue center_family_P0(double K, double z, const Params& params)
{
    const double alpha = derive_exponents(params).alpha;
    const double x = K * std::sqrt(z) - (params.m - 1.0) * alpha * z;
    return {x, x > 0.0};
}

double stable_family_exponent(double lambda, const Params& params)
{
    return -2.0 / (params.m - 1.0) - 2.0 / ((params.sigma + 2.0) * lambda);
}

double stable_family_slope(double lambda, const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    const double den = (m - 1.0) * ((s + 2.0) * (m + 1.0) * lambda + 2.0 * (m - 1.0));
    if (den == 0.0)
        throw DomainError("stable family slope is singular at this lambda");
    return -((s + 2.0) * (m - s + 1.0) * lambda - (3.0 * s - 2.0) * (m - 1.0)) / den;
}

double stable_family_P0lambda(double K1, double x, double lambda, const Params& params)
{
    if (!(x > 0.0))
        throw DomainError("stable family requires x > 0");
    if (!(lambda > vertex_lambda(params) && lambda < 0.0))
        throw DomainError("stable family requires -beta/(2 alpha) < lambda < 0");
    const double expo = stable_family_exponent(lambda, params);
    if (!(expo > 0.0))
        throw DomainError("stable family exponent is not positive");
    return K1 * std::pow(x, expo) + stable_family_slope(lambda, params) * x;
}

VertexNormalForm vertex_normal_form_coefficients(const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    const Exponents e = derive_exponents(params);
    const double a = e.alpha;
    const double b = e.beta;
    VertexNormalForm nf;
    nf.A = (s - 2.0) * b * b / (a * a);
    nf.B = 2.0 * b * (m - 1.0) / a;
    nf.C = (2.0 * a * (m - 1.0) + b * (m + s - 3.0)) / (m - 1.0);
    nf.D = (m - 1.0) * b;
    nf.E = (2.0 * a * m * m + b * s * (m + 1.0) - 2.0 * a - 4.0 * b) / ((m - 1.0) * (m - 1.0) * b);
    nf.F = (m * b * (s - 2.0) + (2.0 * m * b + 2.0 * m * a - b) * (m - 1.0))
         * ((2.0 * a + b) * (m - 1.0) + b * (s - 2.0))
         / ((m - 1.0) * (m - 1.0) * (m - 1.0) * b);
    return nf;
}

NormalFormPoint vertex_normal_form(const PhasePoint& pt, const Params& params)
{
    const VertexNormalForm nf = vertex_normal_form_coefficients(params);
    const double z_max = derive_exponents(params).z_max;
    const double y1 = pt.y - vertex_lambda(params);
    const double z1 = pt.z - z_max;
    return {pt.x, nf.C * pt.x + nf.D * y1, nf.A * pt.x + nf.B * z1};
}

NormalFormPoint vertex_normal_form_field(const NormalFormPoint& q, const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    const Exponents e = derive_exponents(params);
    const double a = e.alpha;
    const double b = e.beta;
    const VertexNormalForm nf = vertex_normal_form_coefficients(params);
    const auto [x, y, z] = q;
    const double dx = -(m - 1.0) * b / (2.0 * a) * x
                    - ((2.0 * a + 3.0 * b) * (m - 1.0) + b * (s - 2.0)) / (b * (m - 1.0)) * x * x
                    + x * y / b;
    const double dy = -0.5 * a * z - y * y / ((m - 1.0) * b) + nf.E * x * y - nf.F * x * x;
    const double dz = (s - 2.0)
                    * (b / (a * a) * x * y + x * z
                       - b * (b * m * s + 2.0 * a * (m - 1.0) + b * m - 3.0 * b) / ((m - 1.0) * a * a) * x * x);
    return {dx, dy, dz};
}

double vertex_center_family_slope(const Params& params)
{
    const Exponents e = derive_exponents(params);
    const double k = (params.m - 1.0) * e.beta;
    return -k * k / (2.0 * e.alpha);
}

double vertex_center_family(double K, double y2, const Params& params)
{
    if (!(y2 > 0.0))
        throw DomainError("vertex center family requires Y2 > 0");
    return K * std::exp(vertex_center_family_slope(params) / y2);
}

} // namespace blowup
