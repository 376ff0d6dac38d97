#include "besselharm/numerics.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace bh;
using bhtest::Gen;

namespace {

double beta_fn(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

}  // namespace

TEST_CASE("pairwise_sum matches a long double accumulation") {
    Gen g(1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(g.integer(1, 5000));
        long double ref = 0;
        for (double& x : v) {
            x = g.uniform(-1, 1) * std::pow(10.0, g.integer(-3, 3));
            ref += x;
        }
        CHECK(std::abs(pairwise_sum(v) - static_cast<double>(ref)) <= 1e-13 * v.size());
    }
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("pairwise_sum is a function of the input order only") {
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (i + 1.0);
    const double a = pairwise_sum(v), b = pairwise_sum(v);
    CHECK(a == b);
    CHECK(pairwise_sum_strided(v.data(), v.size(), 1) == a);
    std::vector<cplx> c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = cplx(v[i], -v[i]);
    CHECK(std::abs(pairwise_sum(c) - cplx(a, -a)) < 1e-14);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    Gen g(2);
    for (int n : {1, 2, 5, 16, 33, 64}) {
        const QuadRule q = gauss_legendre(n);
        REQUIRE(q.size() == static_cast<std::size_t>(n));
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> c(2 * n);
            for (double& x : c) x = g.uniform(-1, 1);
            double num = 0.0, ref = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                double p = 0.0;
                for (int k = 2 * n - 1; k >= 0; --k) p = p * q.x[i] + c[k];
                num += q.w[i] * p;
            }
            for (int k = 0; k < 2 * n; k += 2) ref += 2.0 * c[k] / (k + 1);
            CHECK(std::abs(num - ref) < 1e-13 * (1 + std::abs(ref)) * n);
        }
    }
    CHECK(&gl_rule(16) == &gl_rule(16));
}

TEST_CASE("Gauss-Jacobi moments against the Beta function") {
    Gen g(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = g.uniform(-0.9, 3), b = g.uniform(-0.9, 3);
        const int n = g.integer(2, 20);
        const QuadRule q = gauss_jacobi(n, a, b);
        for (int k = 0; k < 2 * n; k += 3) {
            double num = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) num += q.w[i] * std::pow(1 + q.x[i], k);
            const double ref = std::pow(2.0, a + b + k + 1) * beta_fn(a + 1, b + k + 1);
            CHECK(bhtest::rel(num, ref) < 1e-11);
        }
    }
}

TEST_CASE("left Gauss-Jacobi rule on [0,1]") {
    for (double a : {-0.75, -0.5, 0.0, 0.3, 2.5}) {
        const QuadRule& q = gj_left_rule(10, a);
        for (int k = 0; k < 20; ++k) {
            double num = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) num += q.w[i] * std::pow(q.x[i], k);
            CHECK(bhtest::rel(num, 1.0 / (a + k + 1)) < 1e-12);
        }
    }
}

TEST_CASE("Legendre panel matrices act exactly on polynomials") {
    Gen g(4);
    for (int n : {4, 8, 16}) {
        const LegendrePanel& P = LegendrePanel::get(n);
        const auto& s = P.rule().x;
        std::vector<double> c(n);
        for (double& x : c) x = g.uniform(-1, 1);
        auto poly = [&](double x) {
            double p = 0.0;
            for (int k = n - 1; k >= 0; --k) p = p * x + c[k];
            return p;
        };
        auto dpoly = [&](double x) {
            double p = 0.0;
            for (int k = n - 1; k >= 1; --k) p = p * x + k * c[k];
            return p;
        };
        auto ipoly = [&](double x) {
            double p = 0.0, q = 0.0;
            for (int k = 0; k < n; ++k) {
                p += c[k] * std::pow(x, k + 1) / (k + 1);
                q += c[k] * std::pow(-1.0, k + 1) / (k + 1);
            }
            return p - q;
        };
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = poly(s[i]);
        for (int i = 0; i < n; ++i) {
            double d = 0.0, in = 0.0;
            for (int j = 0; j < n; ++j) {
                d += P.diff_matrix()[i * n + j] * f[j];
                in += P.cumint_matrix()[i * n + j] * f[j];
            }
            CHECK(std::abs(d - dpoly(s[i])) < 1e-10 * n * n);
            CHECK(std::abs(in - ipoly(s[i])) < 1e-12 * n);
        }
        std::vector<double> l(n);
        for (double x : {-1.0, -0.3, 0.77, 1.0}) {
            P.lagrange(x, l.data());
            double sum = 0.0, val = 0.0;
            for (int j = 0; j < n; ++j) {
                sum += l[j];
                val += l[j] * f[j];
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
            CHECK(std::abs(val - poly(x)) < 1e-11);
        }
        std::vector<double> leg(n);
        P.legendre(0.5, leg.data());
        CHECK(leg[0] == doctest::Approx(1.0));
        if (n > 2) CHECK(leg[2] == doctest::Approx(-0.125));
    }
}

TEST_CASE("theta quadrature reproduces the Beta integral") {
    std::vector<double> u, w;
    for (double lam : {0.3, 0.5, 1.0, 2.3, 5.0}) {
        const ThetaQuadrature& Q = ThetaQuadrature::get(lam);
        for (double r : {1e-6, 1e-2, 1.0, 100.0}) {
            Q.build(r, u, w);
            double m0 = 0.0, m1 = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                REQUIRE(u[i] > 0.0);
                REQUIRE(u[i] < 2.0);
                m0 += w[i];
                m1 += w[i] * u[i];
            }
            const double ref = std::pow(2.0, 2 * lam - 1) * beta_fn(lam, lam);
            CHECK(bhtest::rel(m0, ref) < 1e-11);
            CHECK(bhtest::rel(m1, ref) < 1e-11);
        }
        // Peaked integrand at scale r.
        Q.build(1e-4, u, w);
        double num = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) num += w[i] * std::exp(-u[i] / 1e-4);
        // int_0^inf u^{lam-1} 2^{lam-1} e^{-u/r} du to leading order.
        const double ref = std::pow(2.0, lam - 1) * std::tgamma(lam) * std::pow(1e-4, lam);
        CHECK(bhtest::rel(num, ref) < 1e-3);
    }
}

TEST_CASE("Richardson extrapolation removes integer-power errors") {
    std::vector<double> a;
    for (int k = 0; k < 5; ++k) {
        const double h = 0.1 * std::pow(0.5, k);
        a.push_back(std::numbers::pi + 0.7 * h - 2.0 * h * h + 0.3 * h * h * h);
    }
    const Extrapolated e = richardson(a, 0.5);
    CHECK(std::abs(e.value - std::numbers::pi) < 1e-13);
    CHECK(e.error < 1e-10);
}

TEST_CASE("uniform interpolation is exact below its order") {
    std::vector<double> f(40);
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = 0.5 + 0.1 * j;
        f[j] = 1.0 - 2.0 * x + 0.5 * x * x * x;
    }
    for (double x : {0.5, 0.73, 2.01, 4.4}) CHECK(std::abs(uniform_interp(f.data(), f.size(), 0.5, 0.1, x, 6) -
                                                           (1.0 - 2.0 * x + 0.5 * x * x * x)) < 1e-11);
    CHECK(uniform_interp(f.data(), f.size(), 0.5, 0.1, 0.2, 6, -7.0) == -7.0);
    CHECK(uniform_interp(f.data(), f.size(), 0.5, 0.1, 9.0, 6) == 0.0);
}
