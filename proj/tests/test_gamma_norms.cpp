#include "besselharm/gamma_norms.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <limits>

using namespace bh;

namespace {

TimeGridPtr tgrid() { return TimeGrid::make(1e-4, 1e4, 200); }

// Smooth profile in u = ln t with a shift and a linear factor.
double bump(double t, double shift, double slope) {
    const double u = std::log(t) - shift;
    return (1.0 + slope * u) * std::exp(-u * u / 4);
}

std::vector<double> profile(const TimeGrid& tg, int dim, bhtest::Gen& gen, bool complex = false) {
    const int nc = complex ? 2 * dim : dim;
    std::vector<double> shift(nc), slope(nc), amp(nc);
    for (int c = 0; c < nc; ++c) {
        shift[c] = gen.uniform(-2.0, 2.0);
        slope[c] = gen.uniform(-0.5, 0.5);
        amp[c] = gen.uniform(0.2, 2.0);
    }
    std::vector<double> p(tg.size() * nc);
    for (std::size_t j = 0; j < tg.size(); ++j)
        for (int c = 0; c < nc; ++c) p[j * nc + c] = amp[c] * bump(tg.t(j), shift[c], slope[c]);
    return p;
}

bool within(const GammaEstimate& e, double ref, double k = 3.0) { return std::abs(e.estimate - ref) <= k * e.std_error + 1e-12; }

}  // namespace

TEST_CASE("counter-based normals") {
    const CounterNormal a(7, 0), b(7, 0), c(7, 1);
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    const int n = 200000;
    int same = 0, repeat = 0;
    for (int i = 0; i < n; ++i) {
        const double x = a(i);
        repeat += x == b(i);
        same += x == c(i);
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    CHECK(repeat == n);
    CHECK(same < 5);
    CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("Hermite basis in ln t") {
    const TimeGridPtr tg = tgrid();
    const HBasis one = build_h_basis(1, tg);
    std::vector<double> p(tg->size());
    for (std::size_t i = 0; i < tg->size(); ++i) p[i] = one.at(0, i);
    CHECK(std::abs(h_norm(*tg, p) - 1.0) < 1e-8);
    for (int K : {16, 64, 128}) {
        const HBasis b = build_h_basis(K, tg);
        CHECK(b.size() == K);
        CHECK(b.gram_defect() < 1e-8);
        CHECK(b.end_value() < 1e-10);
    }
    CHECK_THROWS(build_h_basis(0, tg));
    CHECK_THROWS(build_h_basis(129, tg));
}

TEST_CASE("scalar gamma norm is the H norm") {
    const TimeGridPtr tg = tgrid();
    const HBasis b = build_h_basis(64, tg);
    bhtest::Gen gen(61);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = profile(*tg, 1, gen);
        const GammaEstimate e = gamma_norm_mc(p, false, FiniteBanachSpace::scalar(), b, 4000, 100 + trial);
        CHECK(within(e, h_norm(*tg, p)));
        CHECK(e.captured > 0.999);
        CHECK_FALSE(e.flagged);
    }
}

TEST_CASE("rank-one profiles") {
    const TimeGridPtr tg = tgrid();
    const HBasis b = build_h_basis(64, tg);
    std::vector<double> h(tg->size());
    for (std::size_t i = 0; i < tg->size(); ++i) h[i] = bump(tg->t(i), 0.5, 0.2);
    const double hn = h_norm(*tg, h);
    bhtest::Gen gen(62);
    for (double q : {1.0, 1.5, 4.0, std::numeric_limits<double>::infinity()}) {
        const FiniteBanachSpace sp = FiniteBanachSpace::ellq(4, q);
        std::vector<double> v(4);
        for (double& x : v) x = gen.uniform(-1.0, 1.0);
        std::vector<double> p(tg->size() * 4);
        for (std::size_t i = 0; i < tg->size(); ++i)
            for (int c = 0; c < 4; ++c) p[i * 4 + c] = h[i] / hn * v[c];
        const GammaEstimate e = gamma_norm_mc(p, false, sp, b, 4000, 7);
        CHECK(within(e, sp.norm(v.data())));
    }
}

TEST_CASE("Hilbert-Schmidt reduction") {
    const TimeGridPtr tg = tgrid();
    const HBasis b = build_h_basis(64, tg);
    bhtest::Gen gen(63);
    for (bool complex : {false, true}) {
        const int n = 3, nc = complex ? 2 * n : n;
        const auto p = profile(*tg, n, gen, complex);
        double ref = 0.0;
        for (int c = 0; c < nc; ++c) {
            std::vector<double> col(tg->size());
            for (std::size_t i = 0; i < tg->size(); ++i) col[i] = p[i * nc + c];
            ref += std::pow(h_norm(*tg, col), 2);
        }
        const GammaEstimate e = gamma_norm_mc(p, complex, FiniteBanachSpace::hilbert(n), b, 4000, 9);
        CHECK(within(e, std::sqrt(ref)));
    }
}

TEST_CASE("gamma norm invariants") {
    const TimeGridPtr tg = tgrid();
    const HBasis b = build_h_basis(32, tg);
    bhtest::Gen gen(64);
    const auto p = profile(*tg, 3, gen);
    const FiniteBanachSpace sp = FiniteBanachSpace::ellq(3, 1.0);
    const GammaEstimate a = gamma_norm_mc(p, false, sp, b, 2000, 11, 5);
    const GammaEstimate a2 = gamma_norm_mc(p, false, sp, b, 2000, 11, 5);
    CHECK(a.estimate == a2.estimate);
    CHECK(a.std_error == a2.std_error);
    CHECK_THROWS(gamma_norm_mc(p, false, sp, b, 999, 11));
    CHECK_THROWS(gamma_norm_mc(std::span<const double>(p).first(p.size() - 1), false, sp, b, 2000, 11));

    // Orthogonal change of basis.
    Eigen::MatrixXd A(b.size(), b.size());
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) A(i, j) = gen.uniform(-1.0, 1.0);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
    std::vector<double> q(b.size() * b.size());
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) q[i * b.size() + j] = Q(i, j);
    const HBasis r = b.rotated(q);
    CHECK(r.gram_defect() < 1e-8);
    const GammaEstimate c = gamma_norm_mc(p, false, sp, r, 2000, 11, 5);
    CHECK(std::abs(c.estimate - a.estimate) <= 3.0 * std::hypot(a.std_error, c.std_error));
}

TEST_CASE("a narrow basis flags truncation loss") {
    const TimeGridPtr tg = tgrid();
    const HBasis b = build_h_basis(2, tg);
    std::vector<double> p(tg->size());
    for (std::size_t i = 0; i < tg->size(); ++i) p[i] = bump(tg->t(i), 3.0, 0.0) * std::cos(4 * std::log(tg->t(i)));
    CHECK(gamma_norm_mc(p, false, FiniteBanachSpace::scalar(), b, 1000, 1).flagged);
}

TEST_CASE("mixed norms") {
    const TimeGridPtr tg = tgrid();
    const GridPtr xg = RadialGrid::log_panels(0.1, 10.0, 4, 8);
    const HBasis b = build_h_basis(64, tg);
    bhtest::Gen gen(65);

    TimeField zero(tg, xg);
    const MixedNormResult z = mixed_norm(zero, 2.0, FiniteBanachSpace::scalar(), b, 1000, 3);
    CHECK(z.value == 0.0);
    CHECK(z.flagged_nodes == 0);

    for (int dim : {1, 3}) {
        TimeField f(tg, xg, dim);
        for (std::size_t i = 0; i < xg->size(); ++i) {
            const auto p = profile(*tg, dim, gen);
            for (std::size_t j = 0; j < tg->size(); ++j)
                for (int c = 0; c < dim; ++c) f.at(j, i, c) = p[j * dim + c] * std::exp(-xg->x(i));
        }
        for (double p : {1.5, 2.0, 4.0}) {
            const MixedNormResult m = mixed_norm(f, p, FiniteBanachSpace::hilbert(dim), b, 4000, 17);
            // Node estimates match the Hilbert-Schmidt value to MC accuracy, so the
            // L^p aggregate sits within a few percent of the deterministic one.
            CHECK(std::abs(m.value / lp_h_norm(f, p) - 1.0) < 0.05);
            CHECK(m.flagged_nodes == 0);
        }
    }
    TimeField wrong(TimeGrid::make(1e-4, 1e4, 100), xg);
    CHECK_THROWS(mixed_norm(wrong, 2.0, FiniteBanachSpace::scalar(), b, 1000, 3));
}
