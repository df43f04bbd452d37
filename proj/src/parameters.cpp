#include "blowup/parameters.hpp"

#include "blowup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blowup {

Params validate_params(double m, double sigma)
{
    if (!std::isfinite(m) || !std::isfinite(sigma))
        throw ConstraintError("m and sigma must be finite");
    if (!(m > 1.0))
        throw ConstraintError("m must exceed 1");
    if (!(m < 2.0))
        throw ConstraintError("m must be below 2 (so that p = 2 - m > 0)");
    if (!(sigma > 2.0))
        throw ConstraintError("sigma must exceed 2");
    return Params{m, 2.0 - m, sigma};
}

Exponents derive_exponents(const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    Exponents e;
    e.alpha = (s + 2.0) / ((s - 2.0) * (m - 1.0));
    e.beta = 2.0 / (s - 2.0);
    e.xi_max = std::pow(1.0 / (m * (s - 2.0) * (s - 2.0)), 1.0 / (s - 2.0));
    const double half = beta_over_alpha(params) / 2.0;
    e.z_max = half * half;
    return e;
}

double beta_over_alpha(const Params& params)
{
    return 2.0 * (params.m - 1.0) / (params.sigma + 2.0);
}

double vertex_lambda(const Params& params)
{
    return -0.5 * beta_over_alpha(params);
}

PhasePoint p2_coordinates(const Params& params)
{
    const double m = params.m;
    const double s = params.sigma;
    const double y = (m - 1.0) * (s - 2.0) / ((m + 1.0) * (s + 2.0));
    const double x = (m - 1.0) * (m - 1.0) * (s - 2.0) / (2.0 * (m + 1.0) * (s + 2.0));
    return {x, y, 0.0};
}

PhasePoint parabola_point(double lambda, const Params& params)
{
    const double r = beta_over_alpha(params);
    if (!(lambda >= -r && lambda <= 0.0))
        throw DomainError("lambda must lie in [-beta/alpha, 0], got " + std::to_string(lambda));
    // lambda * (lambda + r) is <= 0 on the admissible range; clamp the rounding at the ends.
    const double z = std::max(0.0, -lambda * (lambda + r));
    return {0.0, lambda, z};
}

double interface_xi_of_lambda(double lambda, const Params& params)
{
    const double r = beta_over_alpha(params);
    if (!(lambda > -r && lambda < 0.0))
        throw DomainError("lambda must lie in (-beta/alpha, 0), got " + std::to_string(lambda));
    return xi_of_z(-lambda * (lambda + r), params);
}

double xi_of_z(double z, const Params& params)
{
    const Exponents e = derive_exponents(params);
    return std::pow(e.alpha * e.alpha * z / params.m, 1.0 / (params.sigma - 2.0));
}

} // namespace blowup
