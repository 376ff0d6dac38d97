#include "besselharm/convolution.hpp"

#include "besselharm/hankel.hpp"
#include "besselharm/kernel_apply.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bh {

double translation_constant(double lambda) {
    return 1.0 / (std::sqrt(std::numbers::pi) * std::pow(2.0, lambda - 0.5) * std::tgamma(lambda));
}

void translate_phi(double lambda, const PhiProfile& phi, int ncomp, double sigma, double x, const double* ys, int n,
                   double* out) {
    const auto& tq = ThetaQuadrature::get(lambda);
    const double c = translation_constant(lambda);
    std::vector<double> u, w, v(ncomp);
    for (int i = 0; i < n; ++i) {
        const double y = ys[i];
        double* o = out + static_cast<std::size_t>(i) * ncomp;
        std::fill(o, o + ncomp, 0.0);
        const double xy = x * y;
        const double a = (x - y) * (x - y);
        tq.build(sigma * sigma / (2.0 * xy), u, w);
        for (std::size_t k = 0; k < u.size(); ++k) {
            phi(a + 2.0 * xy * u[k], v.data());
            for (int q = 0; q < ncomp; ++q) o[q] += w[k] * v[q];
        }
        const double pre = c * std::pow(xy, lambda);
        for (int q = 0; q < ncomp; ++q) o[q] *= pre;
    }
}

namespace {

PhiProfile make_phi(const SampledFunction& g) {
    const double lam = g.lambda();
    return [&g, lam](double w, double* out) {
        const double r = std::sqrt(w);
        g.eval(r, out);
        const double s = std::pow(w, -0.5 * lam);
        for (int q = 0; q < g.ncomp(); ++q) out[q] *= s;
    };
}

void require_scalar_real(const SampledFunction& f, const char* what) {
    if (f.dim() != 1 || f.is_complex()) throw std::invalid_argument(std::string(what) + ": scalar real input required");
}

}  // namespace

PhiProfile dilated_phi(const SampledFunction& g, double t) {
    const double lam = g.lambda();
    const double pre = std::pow(t, -2.0 * lam - 1.0);
    const double it2 = 1.0 / (t * t);
    return [&g, lam, pre, it2](double w, double* out) {
        const double ws = w * it2;
        g.eval(std::sqrt(ws), out);
        const double s = pre * std::pow(ws, -0.5 * lam);
        for (int q = 0; q < g.ncomp(); ++q) out[q] *= s;
    };
}

double mass_scale(const SampledFunction& g) {
    const auto& gr = *g.grid();
    const int nc = g.ncomp();
    std::vector<double> m(gr.size());
    double tot = 0.0;
    for (std::size_t i = 0; i < gr.size(); ++i) {
        double a = 0.0;
        for (int c = 0; c < nc; ++c) a += std::abs(g.at(i, c));
        tot += gr.w(i) * a;
        m[i] = tot;
    }
    if (!(tot > 0.0)) return 1.0;
    for (std::size_t i = 0; i < gr.size(); ++i)
        if (m[i] >= 0.1 * tot) return gr.x(i);
    return gr.x_max();
}

SampledFunction hankel_translate(const SampledFunction& g, double x, double sigma, const GridPtr& out) {
    require_scalar_real(g, "hankel_translate");
    const auto& gr = *g.grid();
    if (!(x >= gr.x_min() && x <= gr.x_max()))
        throw std::invalid_argument("hankel_translate: x outside the grid hull");
    if (!(sigma > 0.0)) sigma = mass_scale(g);
    const GridPtr& og = out ? out : g.grid();
    SampledFunction r(og, g.lambda());
    translate_phi(g.lambda(), make_phi(g), 1, sigma, x, og->nodes().data(), static_cast<int>(og->size()),
                  r.mutable_data().data());
    return r;
}

SampledFunction dilate(const SampledFunction& psi, double t, const GridPtr& out) {
    if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
    const GridPtr& og = out ? out : psi.grid();
    SampledFunction r(og, psi.lambda(), psi.dim(), psi.is_complex());
    const int nc = psi.ncomp();
    const double pre = std::pow(t, -psi.lambda() - 1.0);
    auto& d = r.mutable_data();
    for (std::size_t i = 0; i < og->size(); ++i) {
        psi.eval(og->x(i) / t, &d[i * nc]);
        for (int c = 0; c < nc; ++c) d[i * nc + c] *= pre;
    }
    for (const auto& w : psi.warnings()) r.add_warning(w);
    return r;
}

SampledFunction hankel_convolve(const SampledFunction& f, const SampledFunction& g, const ConvolveOptions& opt) {
    if (f.lambda() != g.lambda()) throw std::invalid_argument("hankel_convolve: lambda mismatch");
    const bool g_scalar = g.dim() == 1 && !g.is_complex();
    if (!g_scalar) {
        if (opt.g_dilation == 1.0 && f.dim() == 1 && !f.is_complex()) {
            ConvolveOptions o = opt;
            if (!o.out) o.out = f.grid();
            return hankel_convolve(g, f, o);
        }
        throw std::invalid_argument("hankel_convolve: the translated factor must be scalar and real");
    }
    const double t = opt.g_dilation;
    const double sigma = (opt.g_sigma > 0.0 ? opt.g_sigma : mass_scale(g)) * t;
    PhiProfile phi = t == 1.0 ? make_phi(g) : dilated_phi(g, t);
    const double lam = g.lambda();
    KernelBatch K = [&](double x, const double* ys, int n, double* k) {
        translate_phi(lam, phi, 1, sigma, x, ys, n, k);
    };
    SampledFunction r = kernel_apply(f, opt.out ? opt.out : f.grid(), K, [sigma](double) { return sigma; });
    for (const auto& w : g.warnings()) r.add_warning(w);
    return r;
}

TimeField wavelet_transform(const SampledFunction& psi, const SampledFunction& f, const TimeGridPtr& tg,
                            const GridPtr& out, const GridPtr& spectral) {
    require_scalar_real(psi, "wavelet_transform");
    if (psi.lambda() != f.lambda()) throw std::invalid_argument("wavelet_transform: lambda mismatch");
    SampledFunction hpsi = hankel_transform(psi);
    const double lam = psi.lambda();
    TimeSymbol s = [&hpsi, lam](double t, double y) {
        double ty = t * y;
        double v;
        hpsi.eval(ty, &v);
        return cplx(std::pow(ty, -lam) * v, 0.0);
    };
    return apply_symbol_field(f, tg, s, spectral, out);
}

void wavelet_direct(const SampledFunction& psi, const SampledFunction& f, double t, double x, double* out) {
    require_scalar_real(psi, "wavelet_direct");
    const double sigma = mass_scale(psi) * t;
    PhiProfile phi = dilated_phi(psi, t);
    const double lam = psi.lambda();
    KernelBatch K = [&](double xx, const double* ys, int n, double* k) {
        translate_phi(lam, phi, 1, sigma, xx, ys, n, k);
    };
    kernel_apply_at(f, x, K, sigma, out);
}

double zero_mean_check(const SampledFunction& psi) {
    require_scalar_real(psi, "zero_mean_check");
    const auto& g = *psi.grid();
    std::vector<double> t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = g.w(i) * std::pow(g.x(i), psi.lambda()) * psi.at(i);
    return pairwise_sum(t);
}

SampledFunction zero_moment_wavelet(const GridPtr& grid, double lambda) {
    return SampledFunction::from_function(grid, lambda, [lambda](double x) {
        return std::pow(x, lambda) * (1.0 - x * x / (2.0 * lambda + 1.0)) * std::exp(-0.5 * x * x);
    });
}

CalibrationResult calibration_pairing(const SampledFunction& psi, const SampledFunction& phi) {
    require_scalar_real(psi, "calibration_pairing");
    require_scalar_real(phi, "calibration_pairing");
    if (psi.grid() != phi.grid()) throw std::invalid_argument("calibration_pairing: functions must share a grid");
    SampledFunction hp = hankel_transform(psi), hq = hankel_transform(phi);
    const auto& g = *psi.grid();
    const double lam = psi.lambda();
    std::vector<double> I(g.size()), t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        I[i] = hp.at(i) * hq.at(i) * std::pow(g.x(i), -2.0 * lam - 1.0);
        t[i] = g.w(i) * I[i];
    }
    double value = pairwise_sum(t);
    const std::size_t last = static_cast<std::size_t>(g.nodes_per_panel()) - 1;
    double s = -1.0;
    bool ok = false;
    if (I[0] != 0.0 && I[last] != 0.0 && (I[0] > 0) == (I[last] > 0)) {
        s = std::log(I[last] / I[0]) / std::log(g.x(last) / g.x(0));
        ok = s > -0.9;
    }
    if (ok) {
        double y0 = g.x(0), ym = g.x_min();
        value += I[0] * std::pow(ym / y0, s) * ym / (s + 1.0);
    }
    return {value, ok, s};
}

SampledFunction calibrate(const SampledFunction& psi, const SampledFunction& phi) {
    CalibrationResult c = calibration_pairing(psi, phi);
    if (!c.calibratable || c.value == 0.0) throw std::invalid_argument("calibrate: pair is not calibratable");
    return phi.scaled(1.0 / c.value);
}

PolarizationResult polarization_residual(const SampledFunction& f, const SampledFunction& g,
                                         const SampledFunction& psi, const SampledFunction& phi,
                                         const TimeGridPtr& tg) {
    require_scalar_real(f, "polarization_residual");
    require_scalar_real(g, "polarization_residual");
    if (f.grid() != g.grid()) throw std::invalid_argument("polarization_residual: f and g must share a grid");
    const auto& gr = *f.grid();
    std::vector<double> t(gr.size());
    for (std::size_t i = 0; i < gr.size(); ++i) t[i] = gr.w(i) * f.at(i) * g.at(i);
    const double lhs = pairwise_sum(t);

    TimeField wf = wavelet_transform(psi, f, tg);
    TimeField wg = wavelet_transform(phi, g, tg);
    const std::size_t T = tg->size();
    std::vector<double> I(T);
    for (std::size_t j = 0; j < T; ++j) {
        for (std::size_t i = 0; i < gr.size(); ++i) t[i] = gr.w(i) * wf.at(j, i, 0) * wg.at(j, i, 0);
        I[j] = pairwise_sum(t);
    }
    const double rhs = tg->du() * pairwise_sum(I);

    // Geometric tails of the t-integrand beyond both ends of the grid.
    auto tail = [&](double a, double b) {
        a = std::abs(a);
        b = std::abs(b);
        if (a == 0.0) return 0.0;
        if (!(b > a)) return std::numeric_limits<double>::infinity();
        double rate = std::log(b / a) / tg->du();
        return a * std::exp(-0.5 * rate * tg->du()) / rate;
    };
    double budget = 0.0;
    if (T >= 2) budget = tail(I[0], I[1]) + tail(I[T - 1], I[T - 2]);
    const double nf = l2_norm(f), ng = l2_norm(g);
    const double scale = nf * ng > 0.0 ? nf * ng : 1.0;
    const double diff = std::abs(lhs - rhs);
    return {lhs, rhs, lhs != 0.0 ? diff / std::abs(lhs) : std::numeric_limits<double>::infinity(), diff / scale,
            budget / scale};
}

}  // namespace bh
