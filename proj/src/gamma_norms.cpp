#include "besselharm/gamma_norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bh {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in (0, 1] from the top 53 bits.
double to_unit(std::uint64_t z) { return (static_cast<double>(z >> 11) + 1.0) * 0x1.0p-53; }

// psi_0 .. psi_{K-1} at v; out has K entries.
void hermite_functions(int K, double v, double* out) {
    out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * v * v);
    if (K > 1) out[1] = std::sqrt(2.0) * v * out[0];
    for (int n = 1; n + 1 < K; ++n)
        out[n + 1] = std::sqrt(2.0 / (n + 1)) * v * out[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * out[n - 1];
}

double grid_dot(const double* a, const double* b, std::size_t n, double du) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = a[i] * b[i];
    return du * pairwise_sum(p);
}

}  // namespace

CounterNormal::CounterNormal(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

double CounterNormal::operator()(std::uint64_t index) const {
    const double u1 = to_unit(splitmix64(key_ ^ splitmix64(2 * index)));
    const double u2 = to_unit(splitmix64(key_ ^ splitmix64(2 * index + 1)));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double HBasis::gram_defect() const {
    const std::size_t n = tg_->size();
    double d = 0.0;
    for (int a = 0; a < K_; ++a)
        for (int b = 0; b <= a; ++b) {
            const double g = grid_dot(&h_[a * n], &h_[b * n], n, tg_->du());
            d = std::max(d, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    return d;
}

double HBasis::end_value() const {
    const std::size_t n = tg_->size();
    double e = 0.0;
    for (int j = 0; j < K_; ++j) e = std::max({e, std::abs(at(j, 0)), std::abs(at(j, n - 1))});
    return e;
}

HBasis HBasis::rotated(const std::vector<double>& Q) const {
    if (Q.size() != static_cast<std::size_t>(K_) * K_) throw std::invalid_argument("HBasis::rotated: Q must be K x K");
    const std::size_t n = tg_->size();
    HBasis r = *this;
    std::fill(r.h_.begin(), r.h_.end(), 0.0);
    for (int i = 0; i < K_; ++i)
        for (int j = 0; j < K_; ++j) {
            const double q = Q[i * K_ + j];
            for (std::size_t k = 0; k < n; ++k) r.h_[i * n + k] += q * h_[j * n + k];
        }
    return r;
}

HBasis build_h_basis(int K, const TimeGridPtr& tg) {
    if (K < 1 || K > 128) throw std::invalid_argument("build_h_basis: K must lie in [1, 128]");
    if (!tg) throw std::invalid_argument("build_h_basis: null time grid");
    const std::size_t n = tg->size();
    const double u_lo = tg->u(0), u_hi = tg->u(n - 1);
    const double uc = 0.5 * (u_lo + u_hi), half = 0.5 * (u_hi - u_lo);

    // Widen the end point in v until every profile has decayed below 1e-10 there.
    std::vector<double> tmp(K);
    double v_end = std::sqrt(2.0 * K + 1.0);
    for (;; v_end += 0.25) {
        hermite_functions(K, v_end, tmp.data());
        double m = 0.0;
        for (double x : tmp) m = std::max(m, std::abs(x));
        if (m / std::sqrt(half / v_end) < 1e-10) break;
    }
    const double s = half / v_end;

    HBasis b;
    b.K_ = K;
    b.scale_ = s;
    b.tg_ = tg;
    b.h_.assign(static_cast<std::size_t>(K) * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        hermite_functions(K, (tg->u(i) - uc) / s, tmp.data());
        for (int j = 0; j < K; ++j) b.h_[j * n + i] = tmp[j] / std::sqrt(s);
    }
    // Modified Gram-Schmidt, two passes.
    for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < K; ++j) {
            double* hj = &b.h_[j * n];
            for (int k = 0; k < j; ++k) {
                const double* hk = &b.h_[k * n];
                const double c = grid_dot(hj, hk, n, tg->du());
                for (std::size_t i = 0; i < n; ++i) hj[i] -= c * hk[i];
            }
            const double nrm = std::sqrt(grid_dot(hj, hj, n, tg->du()));
            for (std::size_t i = 0; i < n; ++i) hj[i] /= nrm;
        }
    if (b.gram_defect() > 1e-8) throw std::runtime_error("build_h_basis: Gram defect above 1e-8");
    return b;
}

GammaEstimate gamma_norm_mc(std::span<const double> profile, bool complex, const FiniteBanachSpace& space,
                            const HBasis& basis, int M, std::uint64_t seed, std::uint64_t stream) {
    if (M < 1000) throw std::invalid_argument("gamma_norm_mc: M must be at least 1000");
    const TimeGrid& tg = *basis.tgrid();
    const std::size_t T = tg.size();
    const int dim = space.dim();
    const int ncomp = complex ? 2 * dim : dim;
    if (profile.size() != T * ncomp) throw std::invalid_argument("gamma_norm_mc: profile size does not match grid");
    const int K = basis.size();

    std::vector<double> c(static_cast<std::size_t>(K) * ncomp), col(T);
    double captured_sq = 0.0;
    for (int j = 0; j < K; ++j)
        for (int q = 0; q < ncomp; ++q) {
            for (std::size_t i = 0; i < T; ++i) col[i] = basis.at(j, i) * profile[i * ncomp + q];
            const double v = tg.du() * pairwise_sum(col);
            c[j * ncomp + q] = v;
            captured_sq += v * v;
        }
    const double total_sq = std::pow(h_norm(tg, profile, ncomp), 2);
    const double captured = total_sq > 0.0 ? captured_sq / total_sq : 1.0;

    const CounterNormal gauss(seed, stream);
    std::vector<double> samples(M), v(ncomp);
    for (int m = 0; m < M; ++m) {
        std::fill(v.begin(), v.end(), 0.0);
        for (int j = 0; j < K; ++j) {
            const double g = gauss(static_cast<std::uint64_t>(m) * K + j);
            for (int q = 0; q < ncomp; ++q) v[q] += g * c[j * ncomp + q];
        }
        const double nv = space.norm(v.data(), complex ? v.data() + dim : nullptr);
        samples[m] = nv * nv;
    }
    const double mean = pairwise_sum(samples) / M;
    for (double& x : samples) x = (x - mean) * (x - mean);
    const double var = pairwise_sum(samples) / (M - 1);
    const double est = std::sqrt(mean);
    const double se = est > 0.0 ? std::sqrt(var / M) / (2.0 * est) : 0.0;
    return {est, se, captured, captured < 0.999};
}

MixedNormResult mixed_norm(const TimeField& field, double p, const FiniteBanachSpace& space, const HBasis& basis,
                           int M, std::uint64_t seed) {
    if (!(p >= 1.0)) throw std::invalid_argument("mixed_norm: p must be at least 1");
    if (field.tgrid()->size() != basis.tgrid()->size() || field.tgrid()->t_min() != basis.tgrid()->t_min() ||
        field.tgrid()->t_max() != basis.tgrid()->t_max())
        throw std::invalid_argument("mixed_norm: field and basis use different time grids");
    if (field.dim() != space.dim()) throw std::invalid_argument("mixed_norm: field dimension differs from space");
    const RadialGrid& xg = *field.xgrid();
    MixedNormResult r{0.0, 0, std::vector<double>(xg.size())};
    std::vector<double> terms(xg.size());
    for (std::size_t i = 0; i < xg.size(); ++i) {
        const std::vector<double> prof = field.profile(i);
        double e = 0.0;
        if (std::any_of(prof.begin(), prof.end(), [](double x) { return x != 0.0; })) {
            const GammaEstimate g = gamma_norm_mc(prof, field.is_complex(), space, basis, M, seed, i);
            e = g.estimate;
            if (g.flagged) ++r.flagged_nodes;
        }
        r.node_estimates[i] = e;
        terms[i] = xg.w(i) * std::pow(e, p);
    }
    r.value = std::pow(pairwise_sum(terms), 1.0 / p);
    return r;
}

}  // namespace bh
