#pragma once

#include "blowup/phase_point.hpp"

namespace blowup {

/// Exponent triple of u_t = (u^m)_xx + |x|^sigma u^p in the critical case m + p = 2.
///
/// Only `validate_params` produces instances; p is always recomputed as 2 - m.
struct Params {
    double m = 1.5;
    double p = 0.5;
    double sigma = 3.0;
};

/// Closed-form constants derived from a Params.
struct Exponents {
    double alpha = 0.0;  ///< amplitude exponent (sigma+2)/((sigma-2)(m-1))
    double beta = 0.0;   ///< spatial exponent 2/(sigma-2)
    double xi_max = 0.0; ///< largest admissible interface point
    double z_max = 0.0;  ///< height of the critical parabola vertex, (beta/2alpha)^2
};

/// Checks 1 < m < 2 and sigma > 2 and returns the triple with p = 2 - m.
/// Throws ConstraintError naming the failed bound.
Params validate_params(double m, double sigma);

Exponents derive_exponents(const Params& params);

/// beta/alpha = 2(m-1)/(sigma+2), the width of the critical parabola in Y.
double beta_over_alpha(const Params& params);

/// Y coordinate of the parabola vertex, -beta/(2 alpha).
double vertex_lambda(const Params& params);

/// The finite critical point P2 = (X(P2), Y(P2), 0).
PhasePoint p2_coordinates(const Params& params);

/// Point P0^lambda = (0, lambda, -lambda^2 - (beta/alpha) lambda) of the critical parabola.
/// Requires -beta/alpha <= lambda <= 0, otherwise DomainError.
PhasePoint parabola_point(double lambda, const Params& params);

/// Interface position xi0 of profiles entering P0^lambda, for -beta/alpha < lambda < 0.
double interface_xi_of_lambda(double lambda, const Params& params);

/// Inverse of the Z map: xi = (alpha^2 z / m)^(1/(sigma-2)).
double xi_of_z(double z, const Params& params);

} // namespace blowup
