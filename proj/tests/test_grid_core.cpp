#include "besselharm/grid.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bh;
using bhtest::Gen;

TEST_CASE("radial grid integrates smooth functions") {
    const GridPtr g = RadialGrid::from_config(GridConfig{});
    double len = 0.0, gauss = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        len += g->w(i);
        gauss += g->w(i) * std::exp(-g->x(i) * g->x(i));
    }
    CHECK(bhtest::rel(len, g->x_max() - g->x_min()) < 1e-13);
    // int_{x_min}^inf e^{-x^2} = sqrt(pi)/2 - x_min + O(x_min^3).
    CHECK(std::abs(gauss - (std::sqrt(std::numbers::pi) / 2 - 1e-4)) < 1e-12);
    for (std::size_t i = 1; i < g->size(); ++i) REQUIRE(g->x(i) > g->x(i - 1));
}

TEST_CASE("log panels place a break at one and refine geometrically") {
    const GridPtr g = RadialGrid::log_panels(1e-3, 50.0, 40, 12);
    CHECK(g->panels() == 40);
    CHECK(g->nodes_per_panel() == 12);
    CHECK(std::count(g->breaks().begin(), g->breaks().end(), 1.0) == 1);
    const GridPtr r = g->refined();
    CHECK(r->panels() == 80);
    CHECK(r->x_min() == g->x_min());
    CHECK(r->x_max() == g->x_max());
    CHECK(bhtest::rel(r->breaks()[1], std::sqrt(g->breaks()[0] * g->breaks()[1])) < 1e-15);
    const GridPtr e = g->extended(500.0, 6);
    CHECK(e->panels() == 46);
    CHECK(e->x_max() == doctest::Approx(500.0));
    CHECK_THROWS(g->extended(10.0, 2));
    CHECK(g->panel_of(1e-9) == 0);
    CHECK(g->panel_of(1e9) == g->panels() - 1);
    CHECK(g->id() != r->id());
}

TEST_CASE("time grid carries the measure dt/t") {
    const TimeGridPtr tg = TimeGrid::make(1e-3, 1e3, 600);
    CHECK(tg->size() == 600u);
    CHECK(bhtest::rel(tg->du() * tg->size(), std::log(1e6)) < 1e-14);
    CHECK(bhtest::rel(std::log(tg->t(0)), tg->u(0)) < 1e-12);
    // int t^2 e^{-2t} dt/t = 1/4 over (0, inf).
    std::vector<double> p(tg->size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = tg->t(j) * std::exp(-tg->t(j));
    // Mass below t_min is about t_min^2 / 2.
    CHECK(h_norm(*tg, p) == doctest::Approx(std::sqrt(0.25 - 5e-7)).epsilon(1e-9));
    const TimeGridPtr r = tg->refined();
    CHECK(r->size() == 1200u);
    CHECK(r->t_min() == tg->t_min());
    CHECK_THROWS(TimeGrid::make(0.0, 1.0, 10));
}

TEST_CASE("grid config round trip") {
    GridConfig c;
    c.x_min = 2e-4;
    c.panels = 33;
    c.t_nodes = 77;
    c.t_max = 123.5;
    std::map<std::string, std::string> kv;
    std::istringstream in(c.to_config_block());
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        REQUIRE(eq != std::string::npos);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(' '));
            s.erase(s.find_last_not_of(' ') + 1);
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const GridConfig d = GridConfig::from_map(kv);
    CHECK(d.x_min == c.x_min);
    CHECK(d.panels == 33);
    CHECK(d.t_nodes == 77);
    CHECK(d.t_max == 123.5);
    CHECK(GridConfig::from_map({{"bogus", "1"}}).panels == GridConfig{}.panels);
}

TEST_CASE("finite Banach space norms") {
    const double v[4] = {3.0, -4.0, 0.0, 1.0};
    CHECK(FiniteBanachSpace::hilbert(4).norm(v) == doctest::Approx(std::sqrt(26.0)));
    CHECK(FiniteBanachSpace::ellq(4, 1.0).norm(v) == doctest::Approx(8.0));
    CHECK(FiniteBanachSpace::ellq(4, INFINITY).norm(v) == doctest::Approx(4.0));
    CHECK(FiniteBanachSpace::ellq(4, 3.0).norm(v) == doctest::Approx(std::cbrt(27.0 + 64.0 + 1.0)));
    const double im[4] = {4.0, 3.0, 0.0, 0.0};
    CHECK(FiniteBanachSpace::ellq(4, 1.0).norm(v, im) == doctest::Approx(11.0));
    CHECK(FiniteBanachSpace::scalar().dim() == 1);
    CHECK(FiniteBanachSpace::ellq(3, 3.0).describe() == "ell^3(3)");
}

TEST_CASE("property: norms are homogeneous and subadditive") {
    Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = g.integer(1, 8);
        const double q = g.integer(0, 3) == 0 ? INFINITY : g.uniform(1.0, 6.0);
        const FiniteBanachSpace s = trial % 2 ? FiniteBanachSpace::ellq(n, q) : FiniteBanachSpace::hilbert(n);
        std::vector<double> a(n), b(n), c(n), d(n);
        const double k = g.uniform(-3, 3);
        for (int i = 0; i < n; ++i) {
            a[i] = g.uniform(-2, 2);
            b[i] = g.uniform(-2, 2);
            c[i] = a[i] + b[i];
            d[i] = k * a[i];
        }
        CHECK(s.norm(c.data()) <= s.norm(a.data()) + s.norm(b.data()) + 1e-12);
        CHECK(std::abs(s.norm(d.data()) - std::abs(k) * s.norm(a.data())) < 1e-12);
    }
}

TEST_CASE("sampled function interpolation and views") {
    const GridPtr g = RadialGrid::from_config(GridConfig{});
    auto f = [](double x) { return x * std::exp(-x * x / 2) * (1 + x * x); };
    const SampledFunction s = SampledFunction::from_function(g, 1.0, f);
    Gen gen(12);
    for (int i = 0; i < 50; ++i) {
        const double x = gen.log_uniform(1e-3, 30.0);
        CHECK(std::abs(s.eval(x) - f(x)) < 1e-12);
    }
    // Power-law extension below x_min.
    CHECK(bhtest::rel(s.eval(1e-6), f(1e-6)) < 1e-6);

    const SampledFunction v = SampledFunction::stack({s, s.scaled(2.0), s.scaled(-1.0)});
    CHECK(v.dim() == 3);
    CHECK(rel_l2_diff(v.coordinate(1), s.scaled(2.0)) == 0.0);
    const SampledFunction z = v.as_complex();
    CHECK(z.is_complex());
    CHECK(z.ncomp() == 6);
    CHECK(rel_l2_diff(z.real_part().coordinate(2), s.scaled(-1.0)) == 0.0);
    CHECK(l2_norm(z.imag_part()) == 0.0);
    CHECK(l2_norm(s - s) == 0.0);
    CHECK(rel_l2_diff(s + s, s.scaled(2.0)) < 1e-16);
    CHECK(s.with_lambda(2.0).lambda() == 2.0);
    CHECK_THROWS(SampledFunction(g, -1.0));
}

TEST_CASE("Lp norms of x^lambda e^{-x^2/2}") {
    const GridPtr g = RadialGrid::from_config(GridConfig{});
    for (double lam : {0.5, 1.0, 2.3}) {
        const SampledFunction f =
            SampledFunction::from_function(g, lam, [lam](double x) { return std::pow(x, lam) * std::exp(-x * x / 2); });
        for (double p : {1.5, 2.0, 4.0}) {
            // int x^{p lam} e^{-p x^2/2} = Gamma((p lam + 1)/2) (2/p)^{(p lam + 1)/2} / 2.
            const double a = (p * lam + 1) / 2;
            const double head = std::pow(g->x_min(), p * lam + 1) / (p * lam + 1);
            const double ref = std::pow(std::tgamma(a) * std::pow(2.0 / p, a) / 2 - head, 1.0 / p);
            CHECK(bhtest::rel(lp_norm(f, p, FiniteBanachSpace::scalar()), ref) < 1e-10);
        }
    }
}

TEST_CASE("Hardy operators against closed forms") {
    const GridPtr g = RadialGrid::from_config(GridConfig{});
    const SampledFunction f = SampledFunction::from_function(g, 1.0, [](double x) { return x * std::exp(-x); });
    const SampledFunction h0 = hardy_H0(f), hi = hardy_Hinf(f);
    double e0 = 0.0, ei = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double x = g->x(i);
        double ref = 0.0;
        if (x < 0.5) {
            // sum_{k>=2} (-1)^k (k-1) x^{k-1} / k!
            double term = 1.0;
            for (int k = 2; k < 30; ++k) {
                term *= (k == 2 ? x / 2.0 : -x / k);
                ref += (k - 1) * term;
            }
        } else {
            ref = (1.0 - (1.0 + x) * std::exp(-x)) / x;
        }
        // The head below x_min comes from a fitted power law.
        // The head below x_min comes from a fitted power law; its error decays like 1/x.
        e0 = std::max(e0, x * std::abs(h0.at(i) - ref));
        if (x < 20.0) ei = std::max(ei, std::abs(hi.at(i) - std::exp(-x)));
    }
    CHECK(e0 < 1e-12);
    CHECK(ei < 1e-10);
}

TEST_CASE("test corpus is deterministic and matches its closed form") {
    const auto a = make_test_corpus(1.5, 5, 99), b = make_test_corpus(1.5, 5, 99), c = make_test_corpus(1.5, 5, 100);
    REQUIRE(a.size() == 5u);
    CHECK(a[0].q == std::vector<double>{1.0});
    for (int k = 0; k < 5; ++k) {
        CHECK(a[k].q == b[k].q);
        CHECK(a[k].f.data() == b[k].f.data());
        const auto& g = *a[k].f.grid();
        for (std::size_t i = 0; i < g.size(); i += 97) CHECK(a[k].f.at(i) == a[k].exact(g.x(i)));
    }
    CHECK(a[1].q != c[1].q);
}

TEST_CASE("seminorms of x^lambda e^{-x^2/2}") {
    const GridPtr g = RadialGrid::from_config(GridConfig{});
    const SampledFunction f =
        SampledFunction::from_function(g, 1.0, [](double x) { return x * std::exp(-x * x / 2); });
    // (x^{-1} d/dx)^k e^{-x^2/2} = (-1)^k e^{-x^2/2}; sup x^m e^{-x^2/2} = (m/e)^{m/2}.
    for (int m : {0, 2, 4})
        for (int k : {0, 1, 2}) {
            const SeminormResult r = seminorm_eta(f, m, k, 1e-3);
            const double ref = m == 0 ? 1.0 : std::pow(m / std::numbers::e, m / 2.0);
            CHECK(r.reliable);
            CHECK(bhtest::rel(r.value, ref) < 2e-3);
        }
    const SampledFunction bad = SampledFunction::from_function(g, 1.0, [](double x) { return std::sqrt(x); });
    CHECK(seminorm_eta(bad, 0, 0).value > 50.0);
}

TEST_CASE("time fields expose profiles and slices") {
    const TimeGridPtr tg = TimeGrid::make(0.1, 10.0, 5);
    const GridPtr xg = RadialGrid::from_breaks({1.0, 2.0}, 4);
    TimeField F(tg, xg, 2, true);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 4; ++i)
            for (int c = 0; c < 4; ++c) F.at(j, i, c) = 100.0 * j + 10.0 * i + c;
    const auto p = F.profile(2);
    REQUIRE(p.size() == 20u);
    CHECK(p[3 * 4 + 1] == 321.0);
    const SampledFunction s = F.slice(4, 1.0);
    CHECK(s.is_complex());
    CHECK(s.at(3, 2) == 432.0);
    CHECK(lp_h_norm(F, 2.0) == doctest::Approx(std::sqrt(l2_h_norm_sq(F))));
}
