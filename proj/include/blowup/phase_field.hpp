#pragma once

#include "blowup/parameters.hpp"
#include "blowup/phase_point.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

// ---------------------------------------------------------------------------
// The quadratic field
//
//   X' = X[(m-1)Y - 2X]
//   Y' = -Y^2 - (beta/alpha)Y + X - XY - Z
//   Z' = (sigma-2) X Z
//
// obtained from the profile equation by the change of variables in PhasePoint.
// ---------------------------------------------------------------------------

PhasePoint vector_field(const PhasePoint& pt, const Params& params);

/// Analytic Jacobian of `vector_field`.
Eigen::Matrix3d jacobian(const PhasePoint& pt, const Params& params);

// ---------------------------------------------------------------------------
// Critical points and their linearization
// ---------------------------------------------------------------------------

struct EigenData {
    std::array<std::complex<double>, 3> values{};
    std::array<Eigen::Vector3cd, 3> vectors{};
    int stable_dim = 0;
    int unstable_dim = 0;
    int center_dim = 0;
    /// Set when a repeated eigenvalue has fewer independent eigenvectors than its
    /// multiplicity; the missing slot repeats the available eigenvector.
    bool defective = false;
};

enum class CriticalKind { P0Lambda, P2, Q1, Q2, Q3, Q4, Q5 };

std::string to_string(CriticalKind kind);

struct CriticalPoint {
    CriticalKind kind = CriticalKind::P2;
    double lambda = 0.0;       ///< only meaningful for P0Lambda
    PhasePoint location{};     ///< finite points; zero for points at infinity
    /// Poincare hypersphere coordinates (Xbar, Ybar, Zbar, W) for Q1..Q5.
    std::optional<std::array<double, 4>> sphere_location;
    /// Absent for Q2..Q5, which are only used as classification targets.
    std::optional<EigenData> eigen;
};

/// Splits eigenvalues by sign of the real part; |Re| <= tol counts as center.
void count_dimensions(EigenData& data, double tol);

/// Numerical eigen-decomposition of a real 3x3 matrix.
EigenData eigen_decompose(const Eigen::Matrix3d& matrix, double center_tol = 1e-12);

/// Residual ||J v - l v|| / ||v|| of an eigenpair.
double eigen_residual(const Eigen::Matrix3d& matrix, std::complex<double> value, const Eigen::Vector3cd& vector);

/// Linearization at P0^lambda: eigenvalues {(m-1)lambda, -2lambda-beta/alpha, 0}.
EigenData p0_lambda_eigen(double lambda, const Params& params);

/// Linearization at P2, computed numerically from the analytic matrix.
EigenData p2_eigen(const Params& params);

/// Positive eigenvalue at P2, (sigma-2)(m-1)/(2(m+1)alpha).
double p2_unstable_eigenvalue(const Params& params);

/// Closed-form unstable eigenvector at P2 with unit Z component:
/// (-2(m-1)(m+1)alpha, -2(m+1)sigma alpha, D) / D, D = (m-1)sigma^2 + (5-m)sigma + 4m.
PhasePoint p2_unstable_direction(const Params& params);

/// Uniform grid of n points over [-beta/alpha, 0].
std::vector<double> default_lambda_grid(const Params& params, int n = 101);

/// Parabola points on `lambda_grid`, followed by P2 and Q1..Q5.
std::vector<CriticalPoint> classify_critical_points(const Params& params, const std::vector<double>& lambda_grid);

// ---------------------------------------------------------------------------
// Chart around Q1: (w, y, z) = (1/X, Y/X, Z/X)
// ---------------------------------------------------------------------------

ChartPoint infinity_chart_field(const ChartPoint& cp, const Params& params);
Eigen::Matrix3d infinity_chart_jacobian(const ChartPoint& cp, const Params& params);

ChartPoint phase_to_chart(const PhasePoint& pt);
PhasePoint chart_to_phase(const ChartPoint& cp);

/// P2 expressed in chart coordinates, (2(m+1)alpha/(m-1), 2/(m-1), 0).
ChartPoint p2_chart_coordinates(const Params& params);

// ---------------------------------------------------------------------------
// Explicit local families
// ---------------------------------------------------------------------------

struct CenterFamilyValue {
    double x = 0.0;
    bool physical = false; ///< false when x <= 0, i.e. outside {X > 0}
};

/// Center family out of P0: X = K sqrt(z) - (m-1) alpha z.
CenterFamilyValue center_family_P0(double K, double z, const Params& params);

/// Exponent -2/(m-1) - 2/((sigma+2) lambda) of the free term of the stable family at P0^lambda.
double stable_family_exponent(double lambda, const Params& params);

/// Coefficient of the linear term of the stable family at P0^lambda.
double stable_family_slope(double lambda, const Params& params);

/// Y1 = Y - lambda along the stable family of P0^lambda with parameter K1.
/// Requires x > 0 and -beta/(2alpha) < lambda < 0, otherwise DomainError.
double stable_family_P0lambda(double K1, double x, double lambda, const Params& params);

/// Coordinates of the normal form at the parabola vertex.
struct NormalFormPoint {
    double x2 = 0.0;
    double y2 = 0.0;
    double z2 = 0.0;
};

struct VertexNormalForm {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double E = 0.0, F = 0.0; ///< quadratic coefficients of the Y2 equation
};

VertexNormalForm vertex_normal_form_coefficients(const Params& params);

/// X2 = X, Y2 = C X + D (Y + beta/2alpha), Z2 = A X + B (Z - beta^2/4alpha^2).
NormalFormPoint vertex_normal_form(const PhasePoint& pt, const Params& params);

/// The field in normal-form coordinates; equals the pushed-forward `vector_field`.
NormalFormPoint vertex_normal_form_field(const NormalFormPoint& q, const Params& params);

/// Slope of log X2 against 1/Y2 along the exponential center family, -(m-1)^2 beta^2/(2alpha).
double vertex_center_family_slope(const Params& params);

/// X2 = K exp(slope / Y2) for Y2 > 0.
double vertex_center_family(double K, double y2, const Params& params);

} // namespace blowup
