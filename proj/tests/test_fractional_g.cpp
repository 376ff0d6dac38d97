#include "besselharm/convolution.hpp"
#include "besselharm/fractional.hpp"
#include "besselharm/hankel.hpp"
#include "besselharm/multipliers.hpp"
#include "besselharm/numerics.hpp"
#include "besselharm/semigroups.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bh;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr default_grid() { return RadialGrid::from_config(GridConfig{}); }

DerivFamily exp_family(double x, int m) {
    return [x, m](double tau, double* out) { out[0] = std::pow(-x, m) * std::exp(-x * tau); };
}

}  // namespace

TEST_CASE("fractional order") {
    const FractionalOrder a = FractionalOrder::make(0.5), b = FractionalOrder::make(1.0), c = FractionalOrder::make(1.5);
    CHECK(a.m == 1);
    CHECK(b.m == 2);
    CHECK(c.m == 2);
    CHECK(b.is_integer());
    CHECK(b.derivative_order() == 1);
    CHECK(c.derivative_order() == 2);
    CHECK(std::abs(a.prefactor() - std::exp(cplx(0, -kPi * 0.5)) / std::tgamma(0.5)) < 1e-15);
    CHECK_THROWS(FractionalOrder::make(0.0));
}

TEST_CASE("E coefficients") {
    CHECK(E_coeff(2, 0) == 4.0);
    CHECK(E_coeff(2, 1) == 2.0);
    CHECK(E_coeff(3, 0) == 8.0);
    CHECK(E_coeff(3, 1) == 12.0);
    CHECK(E_coeff(4, 2) == 12.0);
}

TEST_CASE("time derivatives of the Poisson kernel") {
    const double lam = 1.2, t = 0.7, x = 1.0, y = 2.0;
    CHECK(bhtest::rel(poisson_kernel_dtm(lam, 0, t, x, y), poisson_kernel(lam, t, x, y)) < 1e-10);
    const double h1 = 1e-4;
    const double fd1 = (poisson_kernel(lam, t + h1, x, y) - poisson_kernel(lam, t - h1, x, y)) / (2 * h1);
    CHECK(std::abs(poisson_kernel_dtm(lam, 1, t, x, y) - fd1) < 1e-6);
    const double h2 = 1e-3;
    const double fd2 =
        (poisson_kernel(lam, t + h2, x, y) - 2 * poisson_kernel(lam, t, x, y) + poisson_kernel(lam, t - h2, x, y)) /
        (h2 * h2);
    CHECK(std::abs(poisson_kernel_dtm(lam, 2, t, x, y) - fd2) < 1e-5);
    // The third derivative against a difference of the closed-form second.
    const double fd3 = (poisson_kernel_dtm(lam, 2, t + h1, x, y) - poisson_kernel_dtm(lam, 2, t - h1, x, y)) / (2 * h1);
    CHECK(std::abs(poisson_kernel_dtm(lam, 3, t, x, y) - fd3) < 1e-5 * std::max(1.0, std::abs(fd3)));
}

TEST_CASE("Segovia-Wheeden derivative of the exponential") {
    for (double x : {1.0, 2.5})
        for (double beta : {0.5, 1.0, 1.5, 2.3}) {
            const FractionalOrder b = FractionalOrder::make(beta);
            const double t = 0.5;
            const SwResult r = frac_deriv_sw(exp_family(x, b.derivative_order()), 1, b, t);
            const cplx ref = std::exp(cplx(0, kPi * beta)) * std::pow(x, beta) * std::exp(-x * t);
            CHECK(std::abs(r.value[0] - ref) < 1e-6);
            CHECK_FALSE(r.flagged);
        }
    // beta = 1 is the plain derivative.
    const double x = 1.0, t = 0.5, h = 1e-4;
    const SwResult one = frac_deriv_sw(exp_family(x, 1), 1, FractionalOrder::make(1.0), t);
    CHECK(std::abs(one.value[0] - (std::exp(-x * (t + h)) - std::exp(-x * (t - h))) / (2 * h)) < 1e-6);
}

TEST_CASE("half derivatives compose to the first derivative") {
    const double x = 1.0, t = 0.5, h = 1e-4;
    const FractionalOrder half = FractionalOrder::make(0.5);
    auto d_half = [&](double tau) { return frac_deriv_sw(exp_family(x, 1), 1, half, tau).value[0]; };
    // Real and imaginary parts of the derivative of tau -> d^{1/2} F(tau).
    const DerivFamily dG = [&](double tau, double* out) {
        const cplx d = (d_half(tau + h) - d_half(tau - h)) / (2 * h);
        out[0] = d.real();
        out[1] = d.imag();
    };
    const SwResult twice = frac_deriv_sw(dG, 2, half, t);
    const cplx composed = twice.value[0] + cplx(0, 1) * twice.value[1];
    const cplx ref = -x * std::exp(-x * t);
    CHECK(std::abs(std::abs(composed) - std::abs(ref)) < 1e-5);
    CHECK(std::abs(composed - ref) < 1e-5);
}

TEST_CASE("spectral fractional Poisson derivative") {
    const GridPtr g = default_grid();
    const SampledFunction f = make_test_corpus(1.0, 2, 51, g)[1].f;
    // beta = 1 is t d/dt P_t f.
    const double t = 0.8, h = 1e-4;
    const SampledFunction one = frac_poisson_spectral(f, 1.0, t);
    const SampledFunction fd = (poisson_apply(f, t + h, Path::Spectral) - poisson_apply(f, t - h, Path::Spectral)).scaled(t / (2 * h));
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        worst = std::max(worst, std::abs(one.value(i) - fd.at(i)));
        scale = std::max(scale, std::abs(fd.at(i)));
    }
    CHECK(worst < 1e-6 * scale);
    // The symbol depends on t only through ty, so t -> 2t is the symbol at 2y.
    const SampledFunction a = frac_poisson_spectral(f, 0.5, 2 * t);
    const SampledFunction b = apply_symbol(f, Symbol([t](double y) {
        return std::exp(cplx(0, kPi * 0.5)) * std::sqrt(2 * t * y) * std::exp(-2 * t * y);
    }));
    CHECK(rel_l2_diff(a, b) < 1e-12);
}

TEST_CASE("kernel and spectral paths of t^beta d^beta P_t") {
    const GridPtr g = default_grid();
    const double lam = 1.0;
    const SampledFunction f = make_test_corpus(lam, 2, 52, g)[1].f;
    const GridPtr xo = RadialGrid::log_panels(0.05, 8.0, 2, 8);
    for (double beta : {0.5, 1.5})
        for (double t : {0.3, 1.0, 3.0}) {
            const SampledFunction sp = frac_poisson_spectral(f, beta, t, xo);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < xo->size(); ++i) {
                cplx o;
                frac_poisson_kernel_at(f, beta, t, xo->x(i), &o);
                num += xo->w(i) * std::norm(o - sp.value(i));
                den += xo->w(i) * std::norm(sp.value(i));
            }
            CHECK(std::sqrt(num / den) < 1e-4);
        }
}

TEST_CASE("g-operators of zero vanish") {
    const GridPtr g = default_grid();
    const TimeGridPtr tg = TimeGrid::make(1e-3, 1e2, 30);
    const SampledFunction zero(g, 1.0);
    const TimeField G = g_operator(zero, 0.5, tg);
    CHECK(lp_h_norm(G, 2.0) == 0.0);
    CHECK(lp_h_norm(g_script_operator(zero, tg), 2.0) == 0.0);
}

TEST_CASE("G^{lambda,1} has half the L2 norm") {
    const GridPtr g = default_grid();
    const SampledFunction f = make_test_corpus(1.0, 2, 53, g)[1].f;
    const TimeField G = g_operator(f, 1.0, TimeGrid::make(1e-7, 1e3, 200), g->extended(4000.0, 16));
    CHECK(std::abs(lp_h_norm(G, 2.0) / l2_norm(f) - 0.5) < 1e-4 * 0.5);
}

TEST_CASE("script G factors through R*") {
    const GridPtr g = default_grid();
    const SampledFunction f = make_test_corpus(1.0, 2, 54, g)[1].f;
    const TimeGridPtr tg = TimeGrid::make(1e-3, 1e2, 40);
    const TimeField lhs = g_script_operator(f, tg);
    const TimeField rhs = g_operator(riesz_transform(f, 1.0, RieszVariant::RStar, Path::Kernel), 1.0, tg);
    CHECK(field_rel_diff(lhs, rhs) < 1e-3);
}

TEST_CASE("polarization identity in modulus form") {
    const GridPtr g = default_grid();
    const auto c = make_test_corpus(1.0, 3, 55, g);
    const TimeGridPtr tg = TimeGrid::make(1e-7, 1e3, 200);
    for (double beta : {0.5, 1.0}) CHECK(polarization_prefactor_residuals(c[1].f, c[2].f, beta, tg).modulus < 1e-4);
}

TEST_CASE("half-line power integrals") {
    for (double a : {-0.5, 0.0, 1.3, 4.0})
        CHECK(bhtest::rel(halfline_power_integral(a, [](double v) { return std::exp(-v); }), std::tgamma(a + 1)) < 1e-10);
    // int v^{a} / (1 + v)^2 dv = Gamma(a+1) Gamma(1-a).
    CHECK(bhtest::rel(halfline_power_integral(-0.5, [](double v) { return 1 / ((1 + v) * (1 + v)); }),
                      std::tgamma(0.5) * std::tgamma(1.5)) < 1e-8);
}

TEST_CASE("classical and Bessel profiles") {
    bhtest::Gen gen(56);
    for (int trial = 0; trial < 20; ++trial) {
        const FractionalOrder b = FractionalOrder::make(gen.uniform(0.2, 2.8));
        const int k = gen.integer(0, (b.m + 1) / 2);
        const double z = gen.log_uniform(0.05, 20.0);
        const double p = phi_k(b, k, z);
        CHECK(p > 0.0);
        CHECK(p == phi_k(b, k, -z));
        // The Bessel profile at lambda = 0 is the classical one at sqrt(w).
        CHECK(bhtest::rel(phi_lambda_k(0.0, b, k, z * z), p) < 1e-10);
    }
}

TEST_CASE("classical Poisson kernel fractional derivative") {
    bhtest::Gen gen(57);
    for (int trial = 0; trial < 30; ++trial) {
        const double t = gen.log_uniform(0.05, 5.0), z = gen.uniform(-6.0, 6.0);
        const double ref = t / kPi * (z * z - t * t) / std::pow(z * z + t * t, 2);
        CHECK(std::abs(classical_poisson_frac(t, z, 1.0) - ref) < 1e-8);
        CHECK(std::abs(classical_poisson_frac_sw(t, z, 1.0) - ref) < 1e-8);
        for (double beta : {0.5, 1.5}) {
            CHECK(classical_poisson_frac(t, z, beta) == classical_poisson_frac(t, -z, beta));
            const cplx sw = classical_poisson_frac_sw(t, z, beta);
            CHECK(std::abs(classical_poisson_frac(t, z, beta) - sw) < 1e-6 * std::max(1.0 / t, std::abs(sw)));
        }
    }
}

TEST_CASE("fitted profile coefficients") {
    for (double beta : {0.5, 1.0, 1.5, 2.5}) {
        const CkFit fit = fit_ck(beta);
        CHECK(fit.c.size() == static_cast<std::size_t>((FractionalOrder::make(beta).m + 1) / 2 + 1));
        CHECK(fit.residual < 1e-8);
    }
}

TEST_CASE("Bessel profile sum against the Segovia-Wheeden kernel") {
    for (double lam : {0.5, 1.0, 2.3})
        for (double beta : {0.5, 1.5}) {
            const std::vector<cplx> bk = bessel_bk(lam, beta, fit_ck(beta).c);
            for (auto [x, y] : {std::pair{1.0, 2.0}, std::pair{0.4, 0.5}, std::pair{3.0, 0.7}})
                for (double t : {0.3, 1.5}) {
                    const cplx a = bessel_poisson_frac_profiles(lam, beta, t, x, y, bk);
                    const cplx s = bessel_poisson_frac_sw(lam, beta, t, x, y);
                    CHECK(std::abs(a - s) < 1e-6 * std::max(1.0, std::abs(s)));
                }
        }
}

TEST_CASE("the profile Phi") {
    const GridPtr g = default_grid();
    for (double lam : {0.5, 1.0, 2.3}) {
        const SampledFunction psi =
            SampledFunction::from_function(g, lam, [lam](double x) { return std::pow(x, lam) * std::exp(-x * x / 2); });
        for (double z : {0.0, 0.3, 1.0, 2.5, 5.0}) {
            CHECK(std::abs(classical_profile_Phi(psi, z) - std::exp(-z * z / 2) / std::sqrt(2 * kPi)) < 1e-8);
            CHECK(classical_profile_Phi(psi, z) == classical_profile_Phi(psi, -z));
        }
        // A zero-moment wavelet gives a profile with vanishing integral.
        const SampledFunction w = zero_moment_wavelet(g, lam);
        const QuadRule& q = gl_rule(16);
        double I = 0.0, M = 0.0;
        for (double a = 0.0; a < 16.0; a += 0.5)
            for (std::size_t k = 0; k < q.size(); ++k) {
                const double v = classical_profile_Phi(w, a + 0.25 * (1 + q.x[k]));
                I += 0.5 * q.w[k] * v;
                M += 0.5 * q.w[k] * std::abs(v);
            }
        CHECK(std::abs(I) < 1e-6 * M);
    }
}

TEST_CASE("kernel difference probe") {
    const GridPtr g = default_grid();
    const double lam = 1.0;
    const SampledFunction psi = zero_moment_wavelet(g, lam);
    const SampledFunction psi2 = psi.scaled(2.0);
    const PhiTable T1(psi), T2(psi2);
    const TimeGridPtr tg = TimeGrid::make(1e-3, 1e2, 60);
    for (auto [x, y] : {std::pair{1.0, 2.0}, std::pair{3.0, 3.0}, std::pair{0.5, 4.0}}) {
        const KernelProbe a = kernel_difference_probe(psi, T1, x, y, *tg);
        const KernelProbe b = kernel_difference_probe(psi2, T2, x, y, *tg);
        CHECK(std::isfinite(a.norm));
        CHECK(std::abs(b.norm - 2 * a.norm) <= 1e-12 * std::max(1.0, a.norm));
        CHECK(a.ratio == doctest::Approx(a.norm * std::max(x, y)).epsilon(1e-14));
    }
}

TEST_CASE("classical off-diagonal probe is finite") {
    const TimeGridPtr tg = TimeGrid::make(1e-3, 1e3, 60);
    for (double beta : {0.5, 1.0}) {
        const double p = classical_frac_probe(beta, log_lattice(0.1, 10.0, 6), *tg);
        CHECK(std::isfinite(p));
        CHECK(p > 0.0);
    }
}
