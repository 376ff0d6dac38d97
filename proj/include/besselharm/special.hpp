#pragma once

#include "besselharm/numerics.hpp"

namespace bh {

// Bessel order attached to lambda: nu = lambda - 1/2.
struct BesselOrder {
    double lambda;
    double nu;
    static BesselOrder from_lambda(double lambda);
};

// J_nu(z), nu > -1, z > 0. Power series below z = 17, Hankel expansion above.
double bessel_j(double nu, double z);

// e^{-z} I_nu(z), nu > -1, z > 0.
double bessel_i_scaled(double nu, double z);

// Gamma on the complex plane (Lanczos, g = 7, with reflection). Throws at poles.
cplx complex_gamma(cplx z);
cplx complex_lgamma(cplx z);

// [nu, r] = (4nu^2 - 1)(4nu^2 - 9)...(4nu^2 - (2r-1)^2) / (2^{2r} Gamma(r+1)).
double bessel_bracket(double nu, int r);

// sqrt(2 pi z) e^{-z} I_nu(z) compared with sum_{r<=n} (-1)^r [nu,r] (2z)^{-r}.
double large_z_law_deviation(double nu, double z);

// I_nu(z) / (z^nu / (2^nu Gamma(nu+1))).
double small_z_law_ratio(double nu, double z);

// Relative residual of d/dz (z^{-nu} I_nu(z)) = z^{-nu} I_{nu+1}(z), LHS by a
// centered difference with step h.
double derivative_identity_check(double nu, double z, double h = 1e-5);

}  // namespace bh
