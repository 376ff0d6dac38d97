#pragma once

#include "besselharm/grid.hpp"

#include <string>
#include <vector>

namespace bh {

// W_t(x,y) = (xy)^{1/2} / (2t) I_{lambda-1/2}(xy/2t) e^{-(x^2+y^2)/4t}.
double heat_kernel(double lambda, double t, double x, double y);

// P_t(x,y) = (2 lambda (xy)^lambda t / pi) int_0^2 (u(2-u))^{lambda-1} (A + 2xyu)^{-lambda-1} du,
// A = (x-y)^2 + t^2.
double poisson_kernel(double lambda, double t, double x, double y);

// P_t(x,y) from the heat kernel by subordination, written in v = t^2/(4u).
double poisson_kernel_subordinated(double lambda, double t, double x, double y);

// K(x) = 2^{lambda+1/2} Gamma(lambda+1) / sqrt(pi) x^lambda / (1+x^2)^{lambda+1}.
double poisson_profile_K(double lambda, double x);

// Conjugate Poisson kernel QQ_t(x,y) (x on the lambda+1 side); t = 0 gives
// the Riesz kernel off the diagonal.
double conjugate_kernel_QQ(double lambda, double t, double x, double y);

enum class Path { Kernel, Spectral };

// P_t f. The kernel path integrates the Poisson kernel; the spectral path
// applies e^{-ty}.
SampledFunction poisson_apply(const SampledFunction& f, double t, Path path, const GridPtr& out = nullptr);

// QQ_t f = int QQ_t(x,y) f(y) dy, result of type lambda+1.
SampledFunction conjugate_apply(const SampledFunction& f, double t, Path path, const GridPtr& out = nullptr);

// Q_t f = int QQ_t(y,x) f(y) dy for f of type lambda+1 (lambda is the
// argument), result of type lambda.
SampledFunction adjoint_conjugate_apply(const SampledFunction& f, double lambda, double t, Path path,
                                        const GridPtr& out = nullptr);

// D_lambda f = x^lambda (x^{-lambda} f)' and D*_lambda f = -x^{-lambda} (x^lambda f)',
// differentiated panelwise. Nodes below 2 x_min are set to zero.
SampledFunction D_lambda(const SampledFunction& f, double lambda);
SampledFunction D_lambda_star(const SampledFunction& f, double lambda);
// Mask used by D_lambda / D_lambda_star.
bool derivative_masked(const RadialGrid& g, double x);

enum class RieszVariant { R, RStar };

struct PvValue {
    double value;
    double error;
    bool converged;
};

// Principal value of int QQ_0(x,y) f(y) dy (variant R) or int QQ_0(y,x) f(y) dy
// (variant RStar) by symmetric excision: a far part beyond radius 2^{-k} plus
// dyadic annuli summed down to radius 1e-9 x.
PvValue riesz_pv_at(const SampledFunction& f, double lambda, RieszVariant v, double x);

// Riesz transform R = h_{lambda+1} h_lambda or R* = h_lambda h_{lambda+1}. The
// kernel path evaluates the principal value at every output node and adds a
// warning when the extrapolation fails to converge.
SampledFunction riesz_transform(const SampledFunction& f, double lambda, RieszVariant v, Path path,
                                const GridPtr& out = nullptr);

struct IntertwiningResult {
    double residual;  // relative L^2 residual
    double lhs_norm;
    double rhs_norm;
};

// d/dt P_t(R* f) against D*_lambda P^{lambda+1}_t f, d/dt by centered
// difference with step h (defaults to t/100). R* f is taken on the kernel path.
IntertwiningResult intertwining_check(const SampledFunction& f, double t, double h = 0.0);

// Relative L^2 difference of f and g restricted to nodes not masked by the
// derivative mask.
double masked_rel_l2(const SampledFunction& f, const SampledFunction& g);

}  // namespace bh
