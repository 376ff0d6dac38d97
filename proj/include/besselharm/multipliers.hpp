#pragma once

#include "besselharm/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bh {

// Symbol y -> m(y) of m(Delta_lambda); m(Delta_lambda) f = h_lambda(m(x^2) h_lambda f).
struct MultiplierSymbol {
    enum class Tag { Generic, LaplaceType, ImaginaryPower, Sector };
    std::function<cplx(double)> m;
    Tag tag = Tag::Generic;
    double omega = 0.0;  // ImaginaryPower: m(y) = y^{i omega}
    double angle = 0.0;  // Sector: holomorphy angle
    double bound = 0.0;  // certified sup |m|, or 0 when not certified
    std::string name;

    cplx operator()(double y) const { return m(y); }
    // sup |m(y^2)| over the nodes of g.
    double sup_on(const RadialGrid& g) const;

    static MultiplierSymbol identity();
    // m(y) = y^{i omega}.
    static MultiplierSymbol imaginary_power(double omega);
    // m(z) = z / (1 + z).
    static MultiplierSymbol resolvent_ratio();
    // m(z) = e^{-z}.
    static MultiplierSymbol exponential();
    // m(y) = e^{-t sqrt(y)}, the Poisson semigroup at time t.
    static MultiplierSymbol poisson(double t);
};

// h_lambda(m(x^2) h_lambda f); throws when m is unbounded on the spectral grid.
SampledFunction spectral_multiplier(const SampledFunction& f, const MultiplierSymbol& m,
                                    const GridPtr& spectral = nullptr, const GridPtr& out = nullptr);

// m(y) = y int_0^inf e^{-yt} psi(t) dt = int_0^inf e^{-s} psi(s / y) ds, with
// |m| <= psi_sup certified by the triangle inequality.
MultiplierSymbol laplace_type_symbol(std::function<cplx(double)> psi, double psi_sup);
// The quadrature behind laplace_type_symbol at one y.
cplx laplace_type_value(const std::function<cplx(double)>& psi, double y);

// d/dt W_t(x, y) in closed form.
double heat_kernel_dt(double lambda, double t, double x, double y);

// K_omega(x, y) = int_0^inf t^{-i omega} / Gamma(1 - i omega) d/dt W_t(x, y) dt, x != y,
// by Gauss-Legendre panels in ln t.
cplx imaginary_power_kernel(double lambda, double omega, double x, double y);

enum class IpPath { Spectral, Kernel };

// Delta^{i omega} f = h_lambda(y^{2 i omega} h_lambda f). The kernel path
// returns -int K_omega(x, y) f(y) dy and requires every output node to lie
// outside the closed support hull of f (the panels carrying nonzero values).
SampledFunction imaginary_power(const SampledFunction& f, double omega, IpPath path,
                                const GridPtr& spectral = nullptr, const GridPtr& out = nullptr);

struct KernelProbes {
    double size;      // sup |K| |x - y| e^{-pi |omega| / 2}
    double gradient;  // sup |d_x K| |x - y|^2 e^{-pi |omega| / 2}
    double symmetry;  // max |K(x,y) - K(y,x)| / |K(x,y)|
};
// Suprema over distinct lattice pairs; the x-derivative is a centered difference.
KernelProbes imaginary_power_kernel_probes(double lambda, double omega, const std::vector<double>& lattice);
// n log-spaced points in [a, b]; refining inserts geometric midpoints.
std::vector<double> log_lattice(double a, double b, int n);
std::vector<double> refine_lattice(const std::vector<double>& lattice);

// M_n(t, u) = int_0^inf (ty)^n e^{-ty/2} m(y^2) y^{-iu-1} dy.
cplx mellin_Mn(const MultiplierSymbol& m, int n, double t, double u);

struct MellinOptions {
    double U = 12.0;        // u-integral over [-U, U]
    int u_panels = 24;      // Gauss-Legendre panels of 16 nodes
    GridPtr spectral;       // defaults to f's grid
};

struct MellinReport {
    double discrepancy;  // relative L^2((t, x)) distance of the two sides
    double U;
    double tail_bound;   // (1/2pi) int_{|u|>U} sup_t |M_n(t,u)| du, relative to ||f||_2
    bool flagged;        // tail_bound above 1e-4
    TimeField lhs, rhs;
};

// LHS t^{n+1} d_t^{n+1} P_t(m(Delta) f) against
// RHS (1/2pi) int M_n(t,u) t (d_s P_s)|_{s=t/2} (Delta^{iu/2} f) du, both spectral.
// The u-integral is carried out on the symbol before the final Hankel transform.
MellinReport multiplier_via_mellin(const SampledFunction& f, const MultiplierSymbol& m, int n,
                                   const TimeGridPtr& tg, const MellinOptions& opt = {});

// T h(t) = t^{-beta} int_0^t (t-s)^{beta-1} h(t-s) phi_omega(s) ds with
// phi_omega(s) = s^{-2 i omega} / Gamma(1 - 2 i omega). h is a complex profile
// on tg (interpolated in ln t, zero outside the grid); the result lives on tg.
std::vector<cplx> transfer_T(const TimeGrid& tg, const std::vector<cplx>& h, double omega, double beta);

double h_norm(const TimeGrid& tg, const std::vector<cplx>& h);

struct PairingIdentity {
    std::vector<cplx> A1;   // int G^{beta}(Delta^{i omega} f)(t, x) h(t) dt/t at each out node
    std::vector<cplx> A2T;  // int G^{beta+1}(f)(t, x) (T h)(t) dt/t
    double residual;        // max |A1 + A2T| / max |A1|
};
// Both G-fields on the spectral path, sampled on tg x out.
PairingIdentity transfer_pairing(const SampledFunction& f, double omega, double beta, const TimeGridPtr& tg,
                                 const std::vector<cplx>& h, const GridPtr& out);

struct GrowthProbe {
    std::vector<double> omegas;
    std::vector<double> ratios;  // max over the corpus of ||Delta^{i omega} f||_p / ||f||_p
    double exponent;             // least-squares slope of ln ratio against omega
    double envelope;             // 2 pi |1/p - 1/2|
};
// corpus: functions with dim = space.dim(); Delta^{i omega} acts coordinatewise.
GrowthProbe norm_growth_probe(const std::vector<SampledFunction>& corpus, double p, const FiniteBanachSpace& space,
                              const std::vector<double>& omegas, const GridPtr& out = nullptr);

}  // namespace bh
