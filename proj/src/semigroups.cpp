#include "besselharm/semigroups.hpp"

#include "besselharm/hankel.hpp"
#include "besselharm/kernel_apply.hpp"
#include "besselharm/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bh {

double heat_kernel(double lambda, double t, double x, double y) {
    const double z = x * y / (2.0 * t);
    const double d = x - y;
    return std::sqrt(x * y) / (2.0 * t) * bessel_i_scaled(lambda - 0.5, z) * std::exp(-d * d / (4.0 * t));
}

double poisson_kernel(double lambda, double t, double x, double y) {
    thread_local std::vector<double> u, w;
    const double xy = x * y;
    const double a = (x - y) * (x - y) + t * t;
    ThetaQuadrature::get(lambda).build(a / (2.0 * xy), u, w);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * std::pow(a + 2.0 * xy * u[k], -lambda - 1.0);
    return 2.0 * lambda * std::pow(xy, lambda) * t / std::numbers::pi * s;
}

double poisson_kernel_subordinated(double lambda, double t, double x, double y) {
    // (2 / sqrt(pi)) int_0^inf e^{-s^2} W_{t^2 / (4 s^2)}(x, y) ds with v = s^2.
    static const std::vector<double> breaks = [] {
        std::vector<double> b{0.0};
        const int n = 48;
        for (int i = 0; i <= n; ++i) b.push_back(1e-4 * std::pow(7.0 / 1e-4, static_cast<double>(i) / n));
        return b;
    }();
    const QuadRule& q = gl_rule(16);
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double c = 0.5 * (breaks[p] + breaks[p + 1]), h = 0.5 * (breaks[p + 1] - breaks[p]);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const double s = c + h * q.x[k];
            acc += h * q.w[k] * std::exp(-s * s) * heat_kernel(lambda, t * t / (4.0 * s * s), x, y);
        }
    }
    return 2.0 / std::sqrt(std::numbers::pi) * acc;
}

double poisson_profile_K(double lambda, double x) {
    return std::pow(2.0, lambda + 0.5) * std::tgamma(lambda + 1.0) / std::sqrt(std::numbers::pi) *
           std::pow(x, lambda) / std::pow(1.0 + x * x, lambda + 1.0);
}

double conjugate_kernel_QQ(double lambda, double t, double x, double y) {
    thread_local std::vector<double> u, w;
    const double xy = x * y;
    const double a = (x - y) * (x - y) + t * t;
    ThetaQuadrature::get(lambda).build(a / (2.0 * xy), u, w);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        s += w[k] * ((x - y) + y * u[k]) * std::pow(a + 2.0 * xy * u[k], -lambda - 1.0);
    return 2.0 * lambda * std::pow(xy, lambda) / std::numbers::pi * s;
}

namespace {

// h_{lam_out}(s(y) h_{lam_in} f), both transforms on f's grid unless out is given.
SampledFunction two_type_symbol(const SampledFunction& f, double lam_in, double lam_out,
                                const std::function<double(double)>& s, const GridPtr& out) {
    SampledFunction hf = hankel_transform(f.with_lambda(lam_in));
    auto& d = hf.mutable_data();
    const int nc = hf.ncomp();
    for (std::size_t i = 0; i < hf.size(); ++i) {
        const double v = s(hf.grid()->x(i));
        for (int c = 0; c < nc; ++c) d[i * nc + c] *= v;
    }
    return hankel_transform(hf.with_lambda(lam_out), out ? out : f.grid());
}

SampledFunction apply_kernel(const SampledFunction& f, double t, const GridPtr& out,
                             const std::function<double(double, double)>& k, double lam_out) {
    KernelBatch K = [&](double x, const double* ys, int n, double* kv) {
        for (int i = 0; i < n; ++i) kv[i] = k(x, ys[i]);
    };
    SampledFunction r = kernel_apply(f, out ? out : f.grid(), K, [t](double) { return t; });
    return r.with_lambda(lam_out);
}

}  // namespace

SampledFunction poisson_apply(const SampledFunction& f, double t, Path path, const GridPtr& out) {
    if (!(t > 0.0)) throw std::invalid_argument("poisson_apply: t must be positive");
    const double lam = f.lambda();
    if (path == Path::Spectral)
        return apply_symbol(f, [t](double y) { return cplx(std::exp(-t * y), 0.0); }, nullptr, out, true);
    return apply_kernel(f, t, out, [lam, t](double x, double y) { return poisson_kernel(lam, t, x, y); }, lam);
}

SampledFunction conjugate_apply(const SampledFunction& f, double t, Path path, const GridPtr& out) {
    const double lam = f.lambda();
    if (path == Path::Spectral)
        return two_type_symbol(f, lam, lam + 1.0, [t](double y) { return std::exp(-t * y); }, out);
    return apply_kernel(f, t, out, [lam, t](double x, double y) { return conjugate_kernel_QQ(lam, t, x, y); },
                        lam + 1.0);
}

SampledFunction adjoint_conjugate_apply(const SampledFunction& f, double lambda, double t, Path path,
                                        const GridPtr& out) {
    if (path == Path::Spectral)
        return two_type_symbol(f, lambda + 1.0, lambda, [t](double y) { return std::exp(-t * y); }, out);
    return apply_kernel(f, t, out, [lambda, t](double x, double y) { return conjugate_kernel_QQ(lambda, t, y, x); },
                        lambda);
}

bool derivative_masked(const RadialGrid& g, double x) { return x < 2.0 * g.x_min(); }

namespace {

// x^b (x^{a} f)' at the nodes, scaled by sign.
SampledFunction power_derivative(const SampledFunction& f, double a, double b, double sign, double lam_out) {
    const auto& g = *f.grid();
    const int npp = g.nodes_per_panel();
    const int nc = f.ncomp();
    const auto& D = LegendrePanel::get(npp).diff_matrix();
    SampledFunction r(f.grid(), lam_out, f.dim(), f.is_complex());
    auto& d = r.mutable_data();
    std::vector<double> v(static_cast<std::size_t>(npp) * nc);
    for (int p = 0; p < g.panels(); ++p) {
        const std::size_t base = static_cast<std::size_t>(p) * npp;
        const double jac = 2.0 / (g.breaks()[p + 1] - g.breaks()[p]);
        for (int j = 0; j < npp; ++j) {
            const double s = std::pow(g.x(base + j), a);
            for (int c = 0; c < nc; ++c) v[j * nc + c] = s * f.at(base + j, c);
        }
        for (int i = 0; i < npp; ++i) {
            const double x = g.x(base + i);
            const double pre = derivative_masked(g, x) ? 0.0 : sign * jac * std::pow(x, b);
            for (int c = 0; c < nc; ++c) {
                double acc = 0.0;
                for (int j = 0; j < npp; ++j) acc += D[i * npp + j] * v[j * nc + c];
                d[(base + i) * nc + c] = pre * acc;
            }
        }
    }
    for (const auto& w : f.warnings()) r.add_warning(w);
    return r;
}

}  // namespace

SampledFunction D_lambda(const SampledFunction& f, double lambda) {
    return power_derivative(f, -lambda, lambda, 1.0, lambda + 1.0);
}

SampledFunction D_lambda_star(const SampledFunction& f, double lambda) {
    return power_derivative(f, lambda, -lambda, -1.0, lambda);
}

namespace {

void riesz_pv_components(const SampledFunction& f, double lambda, RieszVariant v, double x, double* val,
                         double* err) {
    const int nc = f.ncomp();
    const auto& g = *f.grid();
    auto kern = [lambda, v](double xx, double y) {
        return v == RieszVariant::R ? conjugate_kernel_QQ(lambda, 0.0, xx, y) : conjugate_kernel_QQ(lambda, 0.0, y, xx);
    };
    const int k0 = std::max(4, static_cast<int>(std::ceil(std::log2(2.0 / x))));
    double eps = std::ldexp(1.0, -k0);
    // The kernel carries a log|x-y| term besides 1/(x-y), so the excision error
    // behaves like eps log eps; annuli are summed down to eps ~ 1e-9 x instead
    // of extrapolating in powers of eps.
    const double eps_end = 1e-9 * x;

    KernelApplyOptions opt;
    opt.exclude_lo = x - eps;
    opt.exclude_hi = x + eps;
    std::vector<double> acc(nc);
    KernelBatch K = [&](double xx, const double* ys, int n, double* kv) {
        for (int i = 0; i < n; ++i) kv[i] = kern(xx, ys[i]);
    };
    kernel_apply_at(f, x, K, eps, acc.data(), opt);

    const QuadRule& q = gl_rule(12);
    std::vector<double> fv(nc), last(nc, 0.0);
    while (eps > eps_end) {
        const double hi = eps, lo = 0.5 * eps;
        const double cm = 0.5 * (hi + lo), hw = 0.5 * (hi - lo);
        std::fill(last.begin(), last.end(), 0.0);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const double s = cm + hw * q.x[k];
            for (double y : {x - s, x + s}) {
                if (y < g.x_min() || y > g.x_max()) continue;
                const double kv = hw * q.w[k] * kern(x, y);
                f.eval(y, fv.data());
                for (int c = 0; c < nc; ++c) last[c] += kv * fv[c];
            }
        }
        for (int c = 0; c < nc; ++c) acc[c] += last[c];
        eps = lo;
    }
    for (int c = 0; c < nc; ++c) {
        val[c] = acc[c];
        // The remaining excision behaves like the last annulus.
        err[c] = 2.0 * std::abs(last[c]);
    }
}

}  // namespace

PvValue riesz_pv_at(const SampledFunction& f, double lambda, RieszVariant v, double x) {
    if (f.dim() != 1 || f.is_complex()) throw std::invalid_argument("riesz_pv_at: scalar real input required");
    double val, err;
    riesz_pv_components(f, lambda, v, x, &val, &err);
    double fmax = 0.0;
    for (double d : f.data()) fmax = std::max(fmax, std::abs(d));
    return {val, err, err <= 1e-6 * std::max(fmax, std::abs(val))};
}

SampledFunction riesz_transform(const SampledFunction& f, double lambda, RieszVariant v, Path path,
                                const GridPtr& out) {
    const double lam_in = v == RieszVariant::R ? lambda : lambda + 1.0;
    const double lam_out = v == RieszVariant::R ? lambda + 1.0 : lambda;
    if (path == Path::Spectral) {
        SampledFunction hf = hankel_transform(f.with_lambda(lam_in));
        return hankel_transform(hf.with_lambda(lam_out), out ? out : f.grid());
    }
    const GridPtr& og = out ? out : f.grid();
    SampledFunction r(og, lam_out, f.dim(), f.is_complex());
    const int nc = f.ncomp();
    double fmax = 0.0;
    for (double d : f.data()) fmax = std::max(fmax, std::abs(d));
    std::vector<double> val(nc), err(nc);
    bool flagged = false;
    auto& d = r.mutable_data();
    for (std::size_t i = 0; i < og->size(); ++i) {
        riesz_pv_components(f, lambda, v, og->x(i), val.data(), err.data());
        for (int c = 0; c < nc; ++c) {
            d[i * nc + c] = val[c];
            if (err[c] > 1e-6 * std::max(fmax, std::abs(val[c]))) flagged = true;
        }
    }
    if (flagged) r.add_warning("riesz: principal value extrapolation did not converge at some nodes");
    return r;
}

double masked_rel_l2(const SampledFunction& f, const SampledFunction& g) {
    if (f.grid() != g.grid() || f.ncomp() != g.ncomp())
        throw std::invalid_argument("masked_rel_l2: incompatible functions");
    const auto& gr = *f.grid();
    const int nc = f.ncomp();
    std::vector<double> num(gr.size()), den(gr.size());
    for (std::size_t i = 0; i < gr.size(); ++i) {
        if (derivative_masked(gr, gr.x(i))) continue;
        double a = 0.0, b = 0.0;
        for (int c = 0; c < nc; ++c) {
            const double dd = f.at(i, c) - g.at(i, c);
            a += dd * dd;
            b += g.at(i, c) * g.at(i, c);
        }
        num[i] = gr.w(i) * a;
        den[i] = gr.w(i) * b;
    }
    const double dn = pairwise_sum(den);
    return dn > 0.0 ? std::sqrt(pairwise_sum(num) / dn) : std::sqrt(pairwise_sum(num));
}

IntertwiningResult intertwining_check(const SampledFunction& f, double t, double h) {
    if (!(h > 0.0)) h = t / 100.0;
    const double lam = f.lambda();
    SampledFunction rs = riesz_transform(f, lam, RieszVariant::RStar, Path::Kernel);
    SampledFunction lhs = (poisson_apply(rs, t + h, Path::Spectral) - poisson_apply(rs, t - h, Path::Spectral))
                              .scaled(0.5 / h);
    SampledFunction p1 = poisson_apply(f.with_lambda(lam + 1.0), t, Path::Spectral);
    SampledFunction rhs = D_lambda_star(p1, lam);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (derivative_masked(*lhs.grid(), lhs.grid()->x(i)))
            for (int c = 0; c < lhs.ncomp(); ++c) lhs.at(i, c) = 0.0;
    return {masked_rel_l2(lhs, rhs), l2_norm(lhs), l2_norm(rhs)};
}

}  // namespace bh
