#include "besselharm/hankel.hpp"

#include "besselharm/special.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace bh {

double hankel_kernel(double lambda, double x, double y) {
    double z = x * y;
    return std::sqrt(z) * bessel_j(lambda - 0.5, z);
}

HankelOperator::HankelOperator(double lambda, GridPtr in, GridPtr out)
    : lambda_(lambda), in_(std::move(in)), out_(std::move(out)) {
    if (!(lambda > 0.0)) throw std::invalid_argument("HankelOperator: lambda must be positive");
    const auto& gi = *in_;
    const auto& go = *out_;
    const int npp = gi.nodes_per_panel();
    const int P = gi.panels();
    const auto& lp = LegendrePanel::get(npp);
    const QuadRule& sub = gl_rule(16);
    const double nu = lambda - 0.5;
    const double max_phase = 3.0 * std::numbers::pi;
    M_.setZero(go.size(), gi.size());
    std::vector<double> row(gi.size());
    std::vector<double> l(npp);
    for (std::size_t o = 0; o < go.size(); ++o) {
        const double x = go.x(o);
        std::fill(row.begin(), row.end(), 0.0);
        for (int p = 0; p < P; ++p) {
            const double a = gi.breaks()[p], b = gi.breaks()[p + 1];
            const std::size_t base = static_cast<std::size_t>(p) * npp;
            double need = std::ceil(x * (b - a) / max_phase);
            int nsub = static_cast<int>(std::max(1.0, need));
            if (nsub > kMaxSubpanels) {
                nsub = kMaxSubpanels;
                capped_ = true;
            }
            if (nsub == 1) {
                for (int j = 0; j < npp; ++j) {
                    double y = gi.x(base + j);
                    double z = x * y;
                    row[base + j] += gi.w(base + j) * std::sqrt(z) * bessel_j(nu, z);
                }
                continue;
            }
            const double d = (b - a) / nsub;
            for (int s = 0; s < nsub; ++s) {
                const double sa = a + d * s;
                for (std::size_t k = 0; k < sub.size(); ++k) {
                    double y = sa + 0.5 * d * (1.0 + sub.x[k]);
                    double z = x * y;
                    double kv = 0.5 * d * sub.w[k] * std::sqrt(z) * bessel_j(nu, z);
                    lp.lagrange((2.0 * y - a - b) / (b - a), l.data());
                    for (int j = 0; j < npp; ++j) row[base + j] += kv * l[j];
                }
            }
        }
        for (std::size_t j = 0; j < gi.size(); ++j) M_(o, j) = row[j];
    }
}

std::shared_ptr<const HankelOperator> HankelOperator::get(double lambda, const GridPtr& in, const GridPtr& out) {
    using Key = std::tuple<double, std::uint64_t, std::uint64_t>;
    static std::mutex mu;
    static std::list<std::pair<Key, std::shared_ptr<const HankelOperator>>> lru;
    constexpr std::size_t kCapacity = 16;
    Key key{lambda, in->id(), out->id()};
    {
        std::lock_guard<std::mutex> lock(mu);
        for (auto it = lru.begin(); it != lru.end(); ++it)
            if (it->first == key) {
                lru.splice(lru.begin(), lru, it);
                return lru.front().second;
            }
    }
    auto op = std::make_shared<const HankelOperator>(lambda, in, out);
    std::lock_guard<std::mutex> lock(mu);
    lru.emplace_front(key, op);
    if (lru.size() > kCapacity) lru.pop_back();
    return op;
}

void HankelOperator::apply(const double* in, int ncols, double* out) const {
    using RM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RM> X(in, static_cast<Eigen::Index>(in_->size()), ncols);
    Eigen::Map<RM> Y(out, static_cast<Eigen::Index>(out_->size()), ncols);
    Y.noalias() = M_ * X;
}

SampledFunction hankel_transform(const SampledFunction& f, const GridPtr& out_grid) {
    const GridPtr& og = out_grid ? out_grid : f.grid();
    auto op = HankelOperator::get(f.lambda(), f.grid(), og);
    SampledFunction r(og, f.lambda(), f.dim(), f.is_complex());
    op->apply(f.data().data(), f.ncomp(), r.mutable_data().data());
    for (const auto& w : f.warnings()) r.add_warning(w);
    if (op->resolution_warning()) r.add_warning("hankel: output grid exceeds oscillation resolution cap");
    return r;
}

namespace {

// s(y) * v at every node; v real or complex, result complex unless real_symbol and v real.
SampledFunction multiply_symbol(const SampledFunction& v, const Symbol& s, bool real_symbol) {
    const bool cx = v.is_complex() || !real_symbol;
    const int n = v.dim();
    SampledFunction r(v.grid(), v.lambda(), n, cx);
    auto& d = r.mutable_data();
    const int nc = r.ncomp();
    for (std::size_t i = 0; i < v.size(); ++i) {
        cplx sv = s(v.grid()->x(i));
        if (!std::isfinite(sv.real()) || !std::isfinite(sv.imag()))
            throw std::invalid_argument("apply_symbol: symbol is not finite on the spectral grid");
        for (int c = 0; c < n; ++c) {
            cplx z = sv * v.value(i, c);
            d[i * nc + c] = z.real();
            if (cx) d[i * nc + n + c] = z.imag();
        }
    }
    for (const auto& w : v.warnings()) r.add_warning(w);
    return r;
}

}  // namespace

SampledFunction apply_symbol_to_transform(const SampledFunction& hf, const Symbol& s, const GridPtr& out,
                                          bool real_symbol) {
    SampledFunction prod = multiply_symbol(hf, s, real_symbol);
    return hankel_transform(prod, out);
}

SampledFunction apply_symbol(const SampledFunction& f, const Symbol& s, const GridPtr& spectral, const GridPtr& out,
                             bool real_symbol) {
    SampledFunction hf = hankel_transform(f, spectral ? spectral : f.grid());
    return apply_symbol_to_transform(hf, s, out ? out : f.grid(), real_symbol);
}

TimeField apply_symbol_field(const SampledFunction& f, const TimeGridPtr& tg, const TimeSymbol& s,
                             const GridPtr& spectral, const GridPtr& out) {
    const GridPtr& sg = spectral ? spectral : f.grid();
    const GridPtr& og = out ? out : f.grid();
    SampledFunction hf = hankel_transform(f, sg);
    auto op = HankelOperator::get(f.lambda(), sg, og);
    const int n = f.dim();
    const std::size_t Ns = sg->size(), No = og->size(), T = tg->size();
    TimeField field(tg, og, n, true);
    const int nc = 2 * n;
    const std::size_t chunk = std::max<std::size_t>(1, 4096 / static_cast<std::size_t>(nc));
    std::vector<double> S, Y;
    for (std::size_t j0 = 0; j0 < T; j0 += chunk) {
        std::size_t nt = std::min(chunk, T - j0);
        const int cols = static_cast<int>(nt) * nc;
        S.assign(Ns * cols, 0.0);
        for (std::size_t i = 0; i < Ns; ++i) {
            double y = sg->x(i);
            for (std::size_t jj = 0; jj < nt; ++jj) {
                cplx sv = s(tg->t(j0 + jj), y);
                for (int c = 0; c < n; ++c) {
                    cplx z = sv * hf.value(i, c);
                    S[i * cols + jj * nc + c] = z.real();
                    S[i * cols + jj * nc + n + c] = z.imag();
                }
            }
        }
        Y.assign(No * cols, 0.0);
        op->apply(S.data(), cols, Y.data());
        for (std::size_t jj = 0; jj < nt; ++jj)
            for (std::size_t i = 0; i < No; ++i)
                for (int c = 0; c < nc; ++c) field.at(j0 + jj, i, c) = Y[i * cols + jj * nc + c];
    }
    if (op->resolution_warning()) field.warnings.push_back("hankel: output grid exceeds oscillation resolution cap");
    return field;
}

PairingResult plancherel_pairing(const SampledFunction& f, const SampledFunction& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("plancherel_pairing: functions must share a grid");
    if (f.dim() != 1 || g.dim() != 1 || f.is_complex() || g.is_complex())
        throw std::invalid_argument("plancherel_pairing: scalar real inputs required");
    const auto& gr = *f.grid();
    std::vector<double> t(gr.size());
    for (std::size_t i = 0; i < gr.size(); ++i) t[i] = gr.w(i) * f.at(i) * g.at(i);
    double direct = pairwise_sum(t);
    SampledFunction hf = hankel_transform(f), hg = hankel_transform(g);
    for (std::size_t i = 0; i < gr.size(); ++i) t[i] = gr.w(i) * hf.at(i) * hg.at(i);
    double spec = pairwise_sum(t);
    return {direct, spec, std::abs(direct - spec)};
}

}  // namespace bh
