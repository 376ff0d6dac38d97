#include "besselharm/hankel.hpp"
#include "besselharm/semigroups.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bh;
using bhtest::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr default_grid() { return RadialGrid::from_config(GridConfig{}); }

SampledFunction stacked(double lam, int count, std::uint64_t seed) {
    std::vector<SampledFunction> fs;
    for (auto& c : make_test_corpus(lam, count + 1, seed)) fs.push_back(c.f);
    fs.erase(fs.begin());
    return SampledFunction::stack(fs);
}

double inner(const SampledFunction& a, const SampledFunction& b) {
    const RadialGrid& g = *a.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.w(i) * a.at(i) * b.at(i);
    return s;
}

}  // namespace

TEST_CASE("heat kernel") {
    for (double t : {0.05, 0.5, 3.0})
        for (double x : {0.1, 1.0, 4.0})
            for (double y : {0.2, 1.1, 6.0}) {
                const double ref = (std::exp(-(x - y) * (x - y) / (4 * t)) - std::exp(-(x + y) * (x + y) / (4 * t))) /
                                   std::sqrt(4 * kPi * t);
                CHECK(std::abs(heat_kernel(1.0, t, x, y) - ref) < 1e-10 * std::max(1.0, ref));
                CHECK(std::abs(heat_kernel(2.3, t, x, y) - heat_kernel(2.3, t, y, x)) < 1e-12);
                CHECK(heat_kernel(2.3, t, x, y) > 0.0);
            }
    // Semigroup law by quadrature over z.
    const GridPtr g = RadialGrid::log_panels(1e-4, 30.0, 48);
    const double lam = 1.5, t = 0.3, s = 0.7, x = 1.0, y = 2.0;
    double q = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) q += g->w(i) * heat_kernel(lam, t, x, g->x(i)) * heat_kernel(lam, s, g->x(i), y);
    CHECK(std::abs(q - heat_kernel(lam, t + s, x, y)) < 1e-5);
}

TEST_CASE("Poisson kernel: closed form, subordination and symmetry") {
    Gen gen(41);
    for (int trial = 0; trial < 200; ++trial) {
        const double t = gen.log_uniform(1e-3, 10.0), x = gen.log_uniform(1e-2, 20.0), y = gen.log_uniform(1e-2, 20.0);
        const double ref = t / kPi * (1 / ((x - y) * (x - y) + t * t) - 1 / ((x + y) * (x + y) + t * t));
        CHECK(bhtest::rel(poisson_kernel(1.0, t, x, y), ref) < 1e-8);
        const double lam = gen.uniform(0.3, 3.0);
        const double p = poisson_kernel(lam, t, x, y);
        CHECK(p > 0.0);
        CHECK(std::abs(p - poisson_kernel(lam, t, y, x)) <= 1e-10 * p);
        if (t > 1e-2) CHECK(bhtest::rel(poisson_kernel_subordinated(lam, t, x, y), p) < 1e-5);
    }
}

TEST_CASE("Poisson profile") {
    CHECK(poisson_profile_K(1.0, 1.0) == doctest::Approx(std::pow(2.0, 1.5) / (4 * std::sqrt(kPi))).epsilon(1e-14));
    for (double lam : {0.5, 1.0, 2.3}) {
        const double slope = std::log(poisson_profile_K(lam, 1e-3) / poisson_profile_K(lam, 1e-4)) / std::log(10.0);
        CHECK(std::abs(slope - lam) < 0.01);
    }
    // h(K_(t))(y) = y^lambda e^{-t y}.
    const GridPtr wide = RadialGrid::log_panels(1e-4, 400.0, 80);
    const GridPtr out = RadialGrid::from_breaks({0.1, 1.0, 5.0}, 8);
    for (double lam : {1.0, 2.3})
        for (double t : {0.5, 1.0}) {
            const SampledFunction K = SampledFunction::from_function(
                wide, lam, [=](double x) { return std::pow(t, -lam - 1) * poisson_profile_K(lam, x / t); });
            const SampledFunction h = hankel_transform(K, out);
            for (std::size_t i = 0; i < out->size(); ++i)
                CHECK(std::abs(h.at(i) - std::pow(out->x(i), lam) * std::exp(-t * out->x(i))) < 1e-5);
        }
}

TEST_CASE("Poisson semigroup on the corpus") {
    for (double lam : {0.5, 1.0, 2.3}) {
        const SampledFunction f = stacked(lam, 4, 42);
        CHECK(rel_l2_diff(poisson_apply(f, 1e-3, Path::Spectral), f) < 0.01);
        // P_t f decays algebraically, so the intermediate lives on a wider grid.
        const GridPtr wide = f.grid()->extended(4000.0, 16);
        const SampledFunction a =
            poisson_apply(poisson_apply(f, 0.4, Path::Spectral, wide), 0.9, Path::Spectral, f.grid());
        CHECK(rel_l2_diff(a, poisson_apply(f, 1.3, Path::Spectral)) < 1e-5);
        for (double t : {0.1, 0.3, 2.0})
            CHECK(rel_l2_diff(poisson_apply(f, t, Path::Kernel), poisson_apply(f, t, Path::Spectral)) < 1e-5);
    }
}

TEST_CASE("the Poisson semigroup loses mass") {
    const GridPtr g = RadialGrid::log_panels(1e-6, 1e4, 160);
    for (double x : {0.1, 1.0, 5.0})
        for (double t : {0.1, 1.0}) {
            double m = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) m += g->w(i) * poisson_kernel(1.0, t, x, g->x(i));
            // int_0^inf P^1_t(x, y) dy = (2/pi) arctan(x/t).
            CHECK(m < 1.0);
            CHECK(std::abs(m - 2 / kPi * std::atan(x / t)) < 1e-4);
        }
}

TEST_CASE("D_lambda and D*_lambda") {
    const GridPtr g = default_grid();
    for (double lam : {0.5, 1.0, 2.3}) {
        const SampledFunction p = SampledFunction::from_function(g, lam, [lam](double x) { return std::pow(x, lam); });
        const SampledFunction dp = D_lambda(p, lam);
        for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(dp.at(i)) < 1e-8 * std::pow(g->x(i), lam));
        const SampledFunction G =
            SampledFunction::from_function(g, lam, [lam](double x) { return std::pow(x, lam) * std::exp(-x * x / 2); });
        const SampledFunction dG = D_lambda(G, lam);
        const SampledFunction dsG = D_lambda_star(G.with_lambda(lam + 1), lam);
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double x = g->x(i);
            if (derivative_masked(*g, x)) {
                CHECK(dG.at(i) == 0.0);
                continue;
            }
            CHECK(std::abs(dG.at(i) + std::pow(x, lam + 1) * std::exp(-x * x / 2)) < 1e-6);
            // -x^{-lam} (x^{2 lam} e^{-x^2/2})' = (x^{lam+1} - 2 lam x^{lam-1}) e^{-x^2/2}.
            CHECK(std::abs(dsG.at(i) - (std::pow(x, lam + 1) - 2 * lam * std::pow(x, lam - 1)) * std::exp(-x * x / 2)) <
                  1e-6 * std::max(1.0, std::pow(x, lam - 1)));
        }
        // Adjointness on corpus pairs.
        const auto c = make_test_corpus(lam, 2, 43);
        const auto d = make_test_corpus(lam + 1, 2, 44);
        const double lhs = inner(D_lambda(c[1].f, lam), d[1].f);
        const double rhs = inner(c[1].f, D_lambda_star(d[1].f, lam));
        CHECK(std::abs(lhs - rhs) < 1e-5 * l2_norm(c[1].f) * l2_norm(d[1].f));
    }
}

TEST_CASE("Cauchy-Riemann equations") {
    const double lam = 1.0, t = 0.5, h = t / 100;
    const SampledFunction f = stacked(lam, 3, 44);
    const SampledFunction lhs1 = D_lambda(poisson_apply(f, t, Path::Spectral), lam);
    const SampledFunction rhs1 =
        (conjugate_apply(f, t + h, Path::Spectral) - conjugate_apply(f, t - h, Path::Spectral)).scaled(0.5 / h);
    CHECK(masked_rel_l2(lhs1, rhs1.with_lambda(lhs1.lambda())) < 1e-4);
    const SampledFunction lhs2 = D_lambda_star(conjugate_apply(f, t, Path::Spectral), lam);
    const SampledFunction rhs2 =
        (poisson_apply(f, t + h, Path::Spectral) - poisson_apply(f, t - h, Path::Spectral)).scaled(0.5 / h);
    CHECK(masked_rel_l2(lhs2, rhs2.with_lambda(lhs2.lambda())) < 1e-4);
    // Kernel paths of the conjugate integrals agree with the spectral ones.
    CHECK(rel_l2_diff(conjugate_apply(f, t, Path::Kernel), conjugate_apply(f, t, Path::Spectral)) < 1e-5);
    const SampledFunction g1 = stacked(lam + 1, 3, 44);
    CHECK(rel_l2_diff(adjoint_conjugate_apply(g1, lam, t, Path::Kernel), adjoint_conjugate_apply(g1, lam, t, Path::Spectral)) <
          1e-5);
}

TEST_CASE("conjugate kernels are adjoint") {
    const SampledFunction f = make_test_corpus(1.0, 2, 45)[1].f, g = make_test_corpus(2.0, 2, 45)[1].f;
    const double lhs = inner(conjugate_apply(f, 0.7, Path::Kernel), g);
    const double rhs = inner(f, adjoint_conjugate_apply(g, 1.0, 0.7, Path::Kernel));
    CHECK(std::abs(lhs - rhs) < 1e-8 * l2_norm(f) * l2_norm(g));
}

TEST_CASE("Riesz transforms") {
    const double lam = 1.0;
    const auto c = make_test_corpus(lam, 3, 46);
    for (RieszVariant v : {RieszVariant::R, RieszVariant::RStar}) {
        const SampledFunction f = stacked(v == RieszVariant::R ? lam : lam + 1, 2, 46);
        const SampledFunction& in = f;
        const SampledFunction k = riesz_transform(in, lam, v, Path::Kernel);
        const SampledFunction s = riesz_transform(in, lam, v, Path::Spectral);
        CHECK(k.warnings().empty());
        CHECK(rel_l2_diff(k, s) < 1e-3);
        for (int j = 0; j < 2; ++j) CHECK(l2_norm(s.coordinate(j)) <= 1.05 * l2_norm(f.coordinate(j)));
    }
    const SampledFunction a = riesz_transform(c[1].f.scaled(2.0) + c[2].f, lam, RieszVariant::R, Path::Kernel);
    const SampledFunction b = riesz_transform(c[1].f, lam, RieszVariant::R, Path::Kernel).scaled(2.0) +
                              riesz_transform(c[2].f, lam, RieszVariant::R, Path::Kernel);
    CHECK(rel_l2_diff(a, b) < 1e-12);
    const PvValue pv = riesz_pv_at(c[1].f, lam, RieszVariant::R, 1.0);
    CHECK(pv.converged);
    CHECK(std::abs(pv.value - riesz_transform(c[1].f, lam, RieszVariant::R, Path::Spectral).eval(1.0)) < 1e-4);
    // P_t(R* f) = Q_t f for f of type lambda + 1.
    const SampledFunction g = make_test_corpus(lam + 1, 2, 48)[1].f;
    const SampledFunction lhs = poisson_apply(riesz_transform(g, lam, RieszVariant::RStar, Path::Kernel), 0.5, Path::Spectral);
    CHECK(rel_l2_diff(lhs, adjoint_conjugate_apply(g, lam, 0.5, Path::Spectral)) < 1e-4);
}

TEST_CASE("intertwining identity and its differencing order") {
    const auto c = make_test_corpus(1.0, 2, 47);
    const double t = 0.5;
    CHECK(intertwining_check(c[1].f, t).residual < 1e-3);
    const SampledFunction zero(c[1].f.grid(), 1.0);
    const IntertwiningResult z = intertwining_check(zero, t);
    CHECK(z.lhs_norm == 0.0);
    CHECK(z.rhs_norm == 0.0);
    const double r1 = intertwining_check(c[1].f, t, t / 4).residual, r2 = intertwining_check(c[1].f, t, t / 8).residual;
    CHECK(std::log2(r1 / r2) >= 1.9);
}
