#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bh {

using cplx = std::complex<double>;

// Pairwise (cascade) summation. Result depends only on the input order, so
// reductions stay reproducible.
double pairwise_sum(std::span<const double> v);
double pairwise_sum_strided(const double* v, std::size_t n, std::size_t stride);
cplx pairwise_sum(std::span<const cplx> v);

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre on [-1,1].
QuadRule gauss_legendre(int n);
// Gauss-Jacobi on [-1,1] for the weight (1-x)^a (1+x)^b, a,b > -1.
QuadRule gauss_jacobi(int n, double a, double b);
// Rule on [0,1] for the weight v^a.
QuadRule gauss_jacobi_left(int n, double a);

// Cached Gauss-Legendre rule (n <= 64).
const QuadRule& gl_rule(int n);
// Cached gauss_jacobi_left rule.
const QuadRule& gj_left_rule(int n, double a);

// Helpers for polynomial interpolation on the n Gauss-Legendre nodes of a
// panel, in the reference variable s in [-1,1].
class LegendrePanel {
public:
    explicit LegendrePanel(int n);
    static const LegendrePanel& get(int n);

    int n() const { return n_; }
    const QuadRule& rule() const { return rule_; }
    // Legendre coefficients from nodal values: c = C * f.
    const std::vector<double>& coeff_matrix() const { return C_; }
    // d/ds of the interpolant at the nodes: f' = D * f.
    const std::vector<double>& diff_matrix() const { return D_; }
    // Integral from -1 to node i of the interpolant: F = I * f.
    const std::vector<double>& cumint_matrix() const { return I_; }
    // Barycentric weights of the nodes.
    const std::vector<double>& bary() const { return bary_; }

    // Lagrange basis values l_j(s), j = 0..n-1.
    void lagrange(double s, double* out) const;
    // Legendre polynomials P_0..P_{n-1} at s.
    void legendre(double s, double* out) const;

private:
    int n_;
    QuadRule rule_;
    std::vector<double> C_, D_, I_, bary_;
};

// Quadrature on u in (0,2) against the weight (u(2-u))^(lambda-1), graded
// toward u = 0 where Bessel-type integrands peak at scale r. With
// u = 1 - cos(theta) this realizes int_0^pi (sin theta)^(2 lambda - 1) F dtheta.
class ThetaQuadrature {
public:
    ThetaQuadrature(double lambda, int n);
    static const ThetaQuadrature& get(double lambda, int n = 12);

    double lambda() const { return lambda_; }
    // Appends nodes/weights (weight factor included) to u and w after clearing.
    void build(double r, std::vector<double>& u, std::vector<double>& w) const;

private:
    double lambda_;
    int n_;
    QuadRule full_;   // [-1,1], weight (1-s)^a (1+s)^a
    QuadRule head_;   // [0,1], weight v^a
    QuadRule gl_;     // [-1,1]
};

// Richardson extrapolation of values a_k computed at steps h_k = h_0 q^k for
// an error expansion in integer powers h^1, h^2, ... Returns the final
// diagonal entry and an error estimate from the last two diagonal entries.
struct Extrapolated {
    double value;
    double error;
};
Extrapolated richardson(const std::vector<double>& a, double q);

// Local Lagrange interpolation on a uniform grid x_j = x0 + j*dx with
// `order` points (even). Values outside [x0, x_last] are `outside`.
double uniform_interp(const double* f, std::size_t n, double x0, double dx, double x, int order,
                      double outside = 0.0);

}  // namespace bh
