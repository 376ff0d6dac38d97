#include "besselharm/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bh {

namespace {

constexpr double kPi = std::numbers::pi;

// Hankel asymptotic coefficients a_k(nu) = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k).
// Returns the partial sums P and Q used by both J and I expansions.
void hankel_pq(double nu, double z, double& P, double& Q) {
    const double mu = 4.0 * nu * nu;
    P = 1.0;
    Q = 0.0;
    double term = 1.0;
    double last = 1e300;
    for (int k = 1; k < 200; ++k) {
        term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * z);
        double mag = std::abs(term);
        if (mag > last) break;
        last = mag;
        // k odd -> Q, k even -> P, with alternating signs in pairs
        int r = k % 4;
        if (r == 1) Q += term;
        else if (r == 2) P -= term;
        else if (r == 3) Q -= term;
        else P += term;
        if (mag < 1e-18) break;
    }
}

}  // namespace

BesselOrder BesselOrder::from_lambda(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("BesselOrder: lambda must be positive");
    return {lambda, lambda - 0.5};
}

double bessel_j(double nu, double z) {
    if (!(nu > -1.0)) throw std::invalid_argument("bessel_j: nu must exceed -1");
    if (!(z > 0.0)) throw std::invalid_argument("bessel_j: z must be positive");
    if (z >= 17.0 && z < 2.0 * nu * nu) return std::cyl_bessel_j(nu, z);
    if (z < 17.0) {
        long double h = 0.5L * z;
        long double t = std::exp(static_cast<long double>(nu) * std::log(h) - std::lgamma(static_cast<long double>(nu) + 1.0L));
        long double s = t;
        long double q = h * h;
        for (int k = 0; k < 500; ++k) {
            t *= -q / ((k + 1.0L) * (k + 1.0L + nu));
            s += t;
            if (k > h && std::fabs(t) < 1e-21L * std::fabs(s)) break;
        }
        return static_cast<double>(s);
    }
    double P, Q;
    hankel_pq(nu, z, P, Q);
    const double phi = (0.5 * nu + 0.25) * kPi;
    const double c = std::cos(z) * std::cos(phi) + std::sin(z) * std::sin(phi);
    const double s = std::sin(z) * std::cos(phi) - std::cos(z) * std::sin(phi);
    return std::sqrt(2.0 / (kPi * z)) * (P * c - Q * s);
}

double bessel_i_scaled(double nu, double z) {
    if (!(nu > -1.0)) throw std::invalid_argument("bessel_i_scaled: nu must exceed -1");
    if (!(z > 0.0)) throw std::invalid_argument("bessel_i_scaled: z must be positive");
    const double zswitch = std::max(40.0, 2.0 * nu * nu);
    if (z < zswitch) {
        double h = 0.5 * z;
        double t = std::exp(nu * std::log(h) - std::lgamma(nu + 1.0) - z);
        double s = t;
        double q = h * h;
        for (int k = 0; k < 2000; ++k) {
            t *= q / ((k + 1.0) * (k + 1.0 + nu));
            s += t;
            if (k > h && t < 1e-18 * s) break;
        }
        return s;
    }
    // e^{-z} I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) z^{-k}
    const double mu = 4.0 * nu * nu;
    double term = 1.0, s = 1.0, last = 1e300;
    for (int k = 1; k < 200; ++k) {
        term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * z);
        double mag = std::abs(term);
        if (mag > last) break;
        last = mag;
        s += term;
        if (mag < 1e-18) break;
    }
    return s / std::sqrt(2.0 * kPi * z);
}

cplx complex_lgamma(cplx z) {
    static const double g = 7.0;
    static const double p[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real())
        throw std::invalid_argument("complex_gamma: pole at a nonpositive integer");
    if (z.real() < 0.5) {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(kPi) - std::log(std::sin(kPi * z)) - complex_lgamma(1.0 - z);
    }
    z -= 1.0;
    cplx x = p[0];
    for (int i = 1; i < 9; ++i) x += p[i] / (z + static_cast<double>(i));
    cplx t = z + g + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx complex_gamma(cplx z) { return std::exp(complex_lgamma(z)); }

double bessel_bracket(double nu, int r) {
    double num = 1.0;
    for (int j = 1; j <= r; ++j) num *= 4.0 * nu * nu - (2.0 * j - 1.0) * (2.0 * j - 1.0);
    return num / (std::pow(2.0, 2 * r) * std::tgamma(r + 1.0));
}

double large_z_law_deviation(double nu, double z) {
    return std::sqrt(2.0 * kPi * z) * bessel_i_scaled(nu, z) - 1.0;
}

double small_z_law_ratio(double nu, double z) {
    double law = std::exp(nu * std::log(0.5 * z) - std::lgamma(nu + 1.0));
    return bessel_i_scaled(nu, z) * std::exp(z) / law;
}

double derivative_identity_check(double nu, double z, double h) {
    auto F = [nu](double s) { return std::exp(s - nu * std::log(s)) * bessel_i_scaled(nu, s); };
    double lhs = (F(z + h) - F(z - h)) / (2.0 * h);
    double rhs = std::exp(z - nu * std::log(z)) * bessel_i_scaled(nu + 1.0, z);
    return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace bh
