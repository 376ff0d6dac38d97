#pragma once

#include "besselharm/grid.hpp"

#include <functional>
#include <vector>

namespace bh {

// beta > 0 with m the integer such that m - 1 <= beta < m.
struct FractionalOrder {
    double beta;
    int m;
    static FractionalOrder make(double beta);
    bool is_integer() const { return beta == static_cast<double>(m - 1); }
    // Order of the derivative the Segovia-Wheeden integral consumes: beta
    // itself for integer beta (no s-integral), m otherwise.
    int derivative_order() const { return is_integer() ? m - 1 : m; }
    // e^{-i pi (m - beta)} / Gamma(m - beta), or 1 for integer beta.
    cplx prefactor() const;
};

// E_{n,k} = 2^{n-2k} n! / (k! (n-2k)!).
double E_coeff(int n, int k);

// d^m/dt^m P_t(x, y), m >= 0, from the u-quadrature of the closed-form
// derivative of t (a + t^2)^{-lambda-1}.
double poisson_kernel_dtm(double lambda, int m, double t, double x, double y);

// Quadrature in s for int_0^inf g(s) s^{m-beta-1} ds: Gauss-Jacobi on [0, t],
// then panels of ratio 8 up to s_max = 1e4 t. Weights include s^{m-beta-1}.
struct SwRule {
    std::vector<double> s, w;
    double s_max;
};
SwRule sw_rule(const FractionalOrder& b, double t);

// Value-returning family tau -> d^m F(tau) with ncomp real components.
using DerivFamily = std::function<void(double tau, double* out)>;

struct SwResult {
    std::vector<cplx> value;
    double tail_estimate;  // relative size of the algebraic tail beyond s_max
    bool flagged;          // tail estimate above 1e-6
};

// d_t^beta F(t) = e^{-i pi (m-beta)} / Gamma(m-beta) int_0^inf d^m F(t+s) s^{m-beta-1} ds,
// with dmF of order b.derivative_order().
SwResult frac_deriv_sw(const DerivFamily& dmF, int ncomp, const FractionalOrder& b, double t);

// t^beta d_t^beta P_t f as the symbol e^{i pi beta} (ty)^beta e^{-ty}.
SampledFunction frac_poisson_spectral(const SampledFunction& f, double beta, double t, const GridPtr& out = nullptr);

// t^beta d_t^beta P_t f(x) through the Segovia-Wheeden integral of the
// differentiated Poisson kernel, integrated against f. out receives f.ncomp() values.
void frac_poisson_kernel_at(const SampledFunction& f, double beta, double t, double x, cplx* out);

// G^{lambda,beta} f(t, x) = t^beta d_t^beta P_t f(x) on tg x out (spectral path).
TimeField g_operator(const SampledFunction& f, double beta, const TimeGridPtr& tg, const GridPtr& out = nullptr,
                     const GridPtr& spectral = nullptr);

// t D*_lambda P^{lambda+1}_t f on tg x f's grid (real field); nodes below
// 2 x_min are zero.
TimeField g_script_operator(const SampledFunction& f, const TimeGridPtr& tg);

// Relative L^2(dx; H) distance ||A - B|| / ||B|| between fields on common
// grids, skipping x nodes below 2 x_min; real fields count as zero imaginary part.
double field_rel_diff(const TimeField& a, const TimeField& b);

// int f g dx against c int int G f G g dt/t dx for the two prefactors
// e^{2 i pi beta} 2^{2 beta} / Gamma(2 beta) and e^{2 i pi beta} Gamma(2 beta) 2^{2 beta};
// the modulus form compares ||G f||^2 with Gamma(2 beta) 2^{-2 beta} ||f||^2.
struct PrefactorResiduals {
    double stated;
    double proof_line;
    double modulus;
};
PrefactorResiduals polarization_prefactor_residuals(const SampledFunction& f, const SampledFunction& g, double beta,
                                 const TimeGridPtr& tg, const GridPtr& out = nullptr);

// int_0^inf v^a g(v) dv: Gauss-Jacobi on [0,1], doubling panels above.
double halfline_power_integral(double a, const std::function<double(double)>& g);

// phi^k(z) = int_0^inf (1+v)^{m+1-2k} v^{m-beta-1} / ((1+v)^2 + z^2)^{m-k+1} dv.
double phi_k(const FractionalOrder& b, int k, double z);
// phi^{lambda,k}(w) = int_0^inf (1+v)^{m+1-2k} v^{m-beta-1} / ((1+v)^2 + w)^{lambda+m-k+1} dv.
double phi_lambda_k(double lambda, const FractionalOrder& b, int k, double w);

// t^beta d_t^beta of the classical Poisson kernel t / (pi (t^2 + z^2)) by the
// Segovia-Wheeden integral of d^m = (1/pi) Im(i^m m! / (z - i tau)^{m+1}).
cplx classical_poisson_frac_sw(double t, double z, double beta);

// Coefficients c_k in t^beta d_t^beta P_t(z) = sum_k (c_k / t) phi^k(z / t),
// k = 0 .. floor((m+1)/2). The closed form follows from the derivative
// formula; the fit solves least squares against the SW reference on a lattice.
std::vector<cplx> classical_ck_closed_form(double beta);
struct CkFit {
    std::vector<cplx> c;
    double residual;  // relative l2 residual of the fit on the lattice
};
CkFit fit_ck(double beta);

// The profile sum with fitted coefficients (cached per beta).
cplx classical_poisson_frac(double t, double z, double beta);

// b_k^lambda = 2 lambda (lambda+1)...(lambda+m-k) / (m-k)! c_k.
std::vector<cplx> bessel_bk(double lambda, double beta, const std::vector<cplx>& c);
// t^beta d_t^beta P_t(x,y) = (xy)^lambda int (u(2-u))^{lambda-1} sum_k b_k t^{-2 lambda - 1} phi^{lambda,k}(a / t^2) du
// with a = (x-y)^2 + 2xyu.
cplx bessel_poisson_frac_profiles(double lambda, double beta, double t, double x, double y,
                                  const std::vector<cplx>& b);
// The same kernel by the SW integral of poisson_kernel_dtm.
cplx bessel_poisson_frac_sw(double lambda, double beta, double t, double x, double y);

// Phi(z) = c int_0^inf u^{lambda-1} phi_psi(z^2 + u) du, c = 1 / (sqrt(pi) 2^{lambda+1/2} Gamma(lambda)),
// even in z.
double classical_profile_Phi(const SampledFunction& psi, double z);

struct KernelProbe {
    double norm;   // || tau_x(psi_(t))(y) - Phi_t(x - y) ||_H
    double ratio;  // norm * max(x, y)
};
// Phi tabulated on [0, z_max] (zero beyond); probes use Phi_t(z) = Phi(z / t) / t.
class PhiTable {
public:
    PhiTable(const SampledFunction& psi, double z_max = 16.0);
    double operator()(double z) const;

private:
    SampledFunction tab_;
};
KernelProbe kernel_difference_probe(const SampledFunction& psi, const PhiTable& Phi, double x, double y,
                                    const TimeGrid& tg);

// sup over the lattice of ||t^beta d_t^beta P_t(x - y)||_H |x - y| for the classical kernel, x != y.
double classical_frac_probe(double beta, const std::vector<double>& lattice, const TimeGrid& tg);

}  // namespace bh
