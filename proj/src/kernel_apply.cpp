#include "besselharm/kernel_apply.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bh {

namespace {

struct Work {
    std::vector<double> ys, ws, ks, l;
    std::vector<std::pair<double, double>> stack;
};

void integrate_panel(const SampledFunction& f, int p, double x, const KernelBatch& K, double scale,
                     const KernelApplyOptions& opt, Work& wk, double* acc) {
    const auto& g = *f.grid();
    const int npp = g.nodes_per_panel();
    const int nc = f.ncomp();
    const double a = g.breaks()[p], b = g.breaks()[p + 1];
    const std::size_t base = static_cast<std::size_t>(p) * npp;
    const auto& lp = LegendrePanel::get(npp);
    const QuadRule& sub = gl_rule(opt.sub_nodes);
    const bool has_excl = opt.exclude_hi > opt.exclude_lo;

    auto needs_split = [&](double lo, double hi) {
        double d = 0.0;
        if (x < lo) d = lo - x;
        else if (x > hi) d = x - hi;
        double h = 0.5 * (hi - lo);
        return h > std::sqrt(d * d + scale * scale);
    };

    // Fast path: the panel's own nodes suffice.
    if (!has_excl && !needs_split(a, b)) {
        wk.ys.assign(g.nodes().begin() + base, g.nodes().begin() + base + npp);
        wk.ks.resize(npp);
        K(x, wk.ys.data(), npp, wk.ks.data());
        for (int j = 0; j < npp; ++j) {
            double kw = wk.ks[j] * g.w(base + j);
            for (int c = 0; c < nc; ++c) acc[c] += kw * f.at(base + j, c);
        }
        return;
    }

    // Collect sub-intervals.
    std::vector<std::pair<double, double>> leaves;
    wk.stack.clear();
    auto push_clipped = [&](double lo, double hi) {
        if (has_excl) {
            if (hi <= opt.exclude_lo || lo >= opt.exclude_hi) {
                wk.stack.emplace_back(lo, hi);
            } else {
                if (lo < opt.exclude_lo) wk.stack.emplace_back(lo, opt.exclude_lo);
                if (hi > opt.exclude_hi) wk.stack.emplace_back(opt.exclude_hi, hi);
            }
        } else {
            wk.stack.emplace_back(lo, hi);
        }
    };
    push_clipped(a, b);
    while (!wk.stack.empty()) {
        auto [lo, hi] = wk.stack.back();
        wk.stack.pop_back();
        if (needs_split(lo, hi) && (hi - lo) > 1e-14 * b) {
            double mid = 0.5 * (lo + hi);
            wk.stack.emplace_back(lo, mid);
            wk.stack.emplace_back(mid, hi);
        } else {
            leaves.emplace_back(lo, hi);
        }
    }
    const int ns = static_cast<int>(sub.size());
    wk.ys.resize(leaves.size() * ns);
    wk.ws.resize(leaves.size() * ns);
    for (std::size_t q = 0; q < leaves.size(); ++q) {
        auto [lo, hi] = leaves[q];
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int k = 0; k < ns; ++k) {
            wk.ys[q * ns + k] = c + h * sub.x[k];
            wk.ws[q * ns + k] = h * sub.w[k];
        }
    }
    const int n = static_cast<int>(wk.ys.size());
    wk.ks.resize(n);
    K(x, wk.ys.data(), n, wk.ks.data());
    wk.l.resize(npp);
    std::vector<double> fv(nc);
    for (int i = 0; i < n; ++i) {
        double kw = wk.ks[i] * wk.ws[i];
        if (kw == 0.0) continue;
        lp.lagrange((2.0 * wk.ys[i] - a - b) / (b - a), wk.l.data());
        std::fill(fv.begin(), fv.end(), 0.0);
        for (int j = 0; j < npp; ++j)
            for (int c = 0; c < nc; ++c) fv[c] += wk.l[j] * f.at(base + j, c);
        for (int c = 0; c < nc; ++c) acc[c] += kw * fv[c];
    }
}

std::vector<char> active_panels(const SampledFunction& f, double rel_skip) {
    const auto& g = *f.grid();
    const int npp = g.nodes_per_panel();
    const int nc = f.ncomp();
    double mx = 0.0;
    for (double v : f.data()) mx = std::max(mx, std::abs(v));
    std::vector<char> act(g.panels(), 0);
    for (int p = 0; p < g.panels(); ++p) {
        double pm = 0.0;
        for (int j = 0; j < npp * nc; ++j)
            pm = std::max(pm, std::abs(f.data()[static_cast<std::size_t>(p) * npp * nc + j]));
        act[p] = pm > rel_skip * mx;
    }
    return act;
}

}  // namespace

void kernel_apply_at(const SampledFunction& f, double x, const KernelBatch& K, double scale, double* out,
                     const KernelApplyOptions& opt) {
    const int nc = f.ncomp();
    auto act = active_panels(f, opt.rel_skip);
    Work wk;
    std::fill(out, out + nc, 0.0);
    for (int p = 0; p < f.grid()->panels(); ++p)
        if (act[p]) integrate_panel(f, p, x, K, scale, opt, wk, out);
}

SampledFunction kernel_apply(const SampledFunction& f, const GridPtr& out, const KernelBatch& K,
                             const KernelScale& scale, const KernelApplyOptions& opt) {
    SampledFunction r(out, f.lambda(), f.dim(), f.is_complex());
    const int nc = f.ncomp();
    auto act = active_panels(f, opt.rel_skip);
    Work wk;
    std::vector<double> acc(nc);
    auto& d = r.mutable_data();
    for (std::size_t o = 0; o < out->size(); ++o) {
        double x = out->x(o);
        double sc = scale(x);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int p = 0; p < f.grid()->panels(); ++p)
            if (act[p]) integrate_panel(f, p, x, K, sc, opt, wk, acc.data());
        for (int c = 0; c < nc; ++c) d[o * nc + c] = acc[c];
    }
    return r;
}

}  // namespace bh
