#pragma once

#include "besselharm/grid.hpp"

#include <functional>

namespace bh {

// 1 / (sqrt(pi) 2^{lambda-1/2} Gamma(lambda)), the constant of the translation.
double translation_constant(double lambda);

// phi_g(w) = g(sqrt w) / w^{lambda/2}, all components of g.
using PhiProfile = std::function<void(double w, double* out)>;

// tau_x(g)(y) for every y in ys, given phi_g; out is n x ncomp (row-major).
// sigma is the length scale of g and sets the grading of the u-quadrature.
void translate_phi(double lambda, const PhiProfile& phi, int ncomp, double sigma, double x, const double* ys, int n,
                   double* out);

// phi of the dilation g_(t): t^{-2 lambda - 1} phi_g(w / t^2).
PhiProfile dilated_phi(const SampledFunction& g, double t);

// tau_x(g) sampled on `out` (defaults to g's grid). x must lie in g's grid hull.
SampledFunction hankel_translate(const SampledFunction& g, double x, double sigma = 0.0, const GridPtr& out = nullptr);

// psi_(t)(x) = t^{-lambda-1} psi(x / t) sampled on `out` (defaults to psi's grid).
SampledFunction dilate(const SampledFunction& psi, double t, const GridPtr& out = nullptr);

// Length below which 10% of int |g| is accumulated; the default sigma.
double mass_scale(const SampledFunction& g);

struct ConvolveOptions {
    GridPtr out;           // output grid (defaults to f's grid)
    double g_dilation = 1;  // convolve with g_(t) for t = g_dilation
    double g_sigma = 0;     // length scale of g before dilation; 0 selects mass_scale
};

// (f # g)(x) = int f(y) tau_x(g)(y) dy. One of f, g must be scalar; the
// scalar one is translated.
SampledFunction hankel_convolve(const SampledFunction& f, const SampledFunction& g, const ConvolveOptions& opt = {});

// W_psi(f)(t, x) = (psi_(t) # f)(x) over tg x out, computed spectrally as
// h((ty)^{-lambda} h(psi)(ty) h(f)(y)).
TimeField wavelet_transform(const SampledFunction& psi, const SampledFunction& f, const TimeGridPtr& tg,
                            const GridPtr& out = nullptr, const GridPtr& spectral = nullptr);

// (psi_(t) # f)(x) by direct quadrature; out receives f.ncomp() values.
void wavelet_direct(const SampledFunction& psi, const SampledFunction& f, double t, double x, double* out);

// int x^lambda psi(x) dx.
double zero_mean_check(const SampledFunction& psi);

// x^lambda (1 - x^2 / (2 lambda + 1)) e^{-x^2/2}; its moment vanishes and its
// transform is y^{lambda+2} e^{-y^2/2} / (2 lambda + 1).
SampledFunction zero_moment_wavelet(const GridPtr& grid, double lambda);

struct CalibrationResult {
    double value;
    bool calibratable;
    // Fitted exponent s of the integrand ~ y^s near y = 0.
    double small_y_exponent;
};

// int h(psi) h(phi) y^{-2 lambda - 1} dy; integrands with s <= -0.9 near zero
// are reported as non-calibratable.
CalibrationResult calibration_pairing(const SampledFunction& psi, const SampledFunction& phi);

// phi / calibration_pairing(psi, phi).
SampledFunction calibrate(const SampledFunction& psi, const SampledFunction& phi);

struct PolarizationResult {
    double lhs;
    double rhs;
    double residual;         // |lhs - rhs| / |lhs|
    double scaled_residual;  // |lhs - rhs| / (||f||_2 ||g||_2)
    double tail_budget;      // estimated |RHS| mass outside the time grid, relative to ||f|| ||g||
};

// int f g dx against int int (f # psi_(t))(y) (g # phi_(t))(y) dy dt/t.
PolarizationResult polarization_residual(const SampledFunction& f, const SampledFunction& g,
                                         const SampledFunction& psi, const SampledFunction& phi,
                                         const TimeGridPtr& tg);

}  // namespace bh
