#include "besselharm/multipliers.hpp"

#include "besselharm/hankel.hpp"
#include "besselharm/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bh {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I1{0.0, 1.0};

// Composite 16-node Gauss-Legendre rule on [a, b] with panels of width <= h.
void log_panels_rule(double a, double b, double h, std::vector<double>& v, std::vector<double>& w) {
    v.clear();
    w.clear();
    if (!(b > a)) return;
    const QuadRule& q = gl_rule(16);
    const int np = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    const double width = (b - a) / np;
    for (int p = 0; p < np; ++p) {
        const double c = a + (p + 0.5) * width;
        for (std::size_t k = 0; k < q.size(); ++k) {
            v.push_back(c + 0.5 * width * q.x[k]);
            w.push_back(0.5 * width * q.w[k]);
        }
    }
}

// ln t range carrying d/dt W_t(x, y) for x != y.
void kernel_time_range(double lambda, double x, double y, double& vlo, double& vhi) {
    const double d = x - y;
    vlo = std::log(d * d / 200.0);
    vhi = std::log((x + y) * (x + y)) + 28.0 / (lambda + 0.5);
}

cplx kernel_quad(double lambda, double omega, double x, double y, double vlo, double vhi) {
    thread_local std::vector<double> v, w;
    log_panels_rule(vlo, vhi, 0.5, v, w);
    cplx s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double t = std::exp(v[k]);
        s += w[k] * std::exp(-I1 * omega * v[k]) * (t * heat_kernel_dt(lambda, t, x, y));
    }
    return s / complex_gamma(cplx(1.0, -omega));
}

// Support hull [lo, hi] of f: the union of panels holding a nonzero value.
bool support_hull(const SampledFunction& f, double& lo, double& hi) {
    const RadialGrid& g = *f.grid();
    const int npp = g.nodes_per_panel();
    int first = -1, last = -1;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (int c = 0; c < f.ncomp(); ++c)
            if (f.at(i, c) != 0.0) {
                const int p = static_cast<int>(i) / npp;
                if (first < 0) first = p;
                last = p;
            }
    if (first < 0) return false;
    lo = g.breaks()[first];
    hi = g.breaks()[last + 1];
    return true;
}

}  // namespace

// ------------------------------------------------------------------ symbols

double MultiplierSymbol::sup_on(const RadialGrid& g) const {
    double s = 0.0;
    for (double y : g.nodes()) s = std::max(s, std::abs(m(y * y)));
    return s;
}

MultiplierSymbol MultiplierSymbol::identity() {
    MultiplierSymbol s;
    s.m = [](double) { return cplx(1.0, 0.0); };
    s.bound = 1.0;
    s.name = "identity";
    return s;
}

MultiplierSymbol MultiplierSymbol::imaginary_power(double omega) {
    MultiplierSymbol s;
    s.m = [omega](double y) { return std::exp(I1 * omega * std::log(y)); };
    s.tag = Tag::ImaginaryPower;
    s.omega = omega;
    s.bound = 1.0;
    s.name = "imaginary_power";
    return s;
}

MultiplierSymbol MultiplierSymbol::resolvent_ratio() {
    MultiplierSymbol s;
    s.m = [](double z) { return cplx(z / (1.0 + z), 0.0); };
    s.tag = Tag::Sector;
    s.angle = kPi;
    s.bound = 1.0;
    s.name = "z/(1+z)";
    return s;
}

MultiplierSymbol MultiplierSymbol::exponential() {
    MultiplierSymbol s;
    s.m = [](double z) { return cplx(std::exp(-z), 0.0); };
    s.tag = Tag::Sector;
    s.angle = kPi / 2.0;
    s.bound = 1.0;
    s.name = "exp(-z)";
    return s;
}

MultiplierSymbol MultiplierSymbol::poisson(double t) {
    MultiplierSymbol s;
    s.m = [t](double y) { return cplx(std::exp(-t * std::sqrt(y)), 0.0); };
    s.bound = 1.0;
    s.name = "poisson";
    return s;
}

SampledFunction spectral_multiplier(const SampledFunction& f, const MultiplierSymbol& m, const GridPtr& spectral,
                                    const GridPtr& out) {
    const GridPtr& sg = spectral ? spectral : f.grid();
    if (!std::isfinite(m.sup_on(*sg))) throw std::invalid_argument("spectral_multiplier: symbol unbounded on grid");
    return apply_symbol(f, [&m](double y) { return m(y * y); }, sg, out);
}

cplx laplace_type_value(const std::function<cplx(double)>& psi, double y) {
    // s = e^v over [-40, 4]: e^{-s} s is below 1e-17 outside.
    thread_local std::vector<double> v, w;
    log_panels_rule(-40.0, 4.0, 0.5, v, w);
    cplx s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double sv = std::exp(v[k]);
        s += w[k] * sv * std::exp(-sv) * psi(sv / y);
    }
    return s;
}

MultiplierSymbol laplace_type_symbol(std::function<cplx(double)> psi, double psi_sup) {
    MultiplierSymbol s;
    s.m = [psi = std::move(psi)](double y) { return laplace_type_value(psi, y); };
    s.tag = MultiplierSymbol::Tag::LaplaceType;
    s.bound = psi_sup;
    s.name = "laplace_type";
    return s;
}

// --------------------------------------------------------- imaginary powers

double heat_kernel_dt(double lambda, double t, double x, double y) {
    const double nu = lambda - 0.5;
    const double z = x * y / (2.0 * t);
    const double d2 = (x - y) * (x - y);
    const double pref = std::sqrt(x * y) / (2.0 * t) * std::exp(-d2 / (4.0 * t));
    const double i0 = bessel_i_scaled(nu, z), i1 = bessel_i_scaled(nu + 1.0, z);
    return pref / t * (i0 * (d2 / (4.0 * t) - 1.0 - nu + z) - z * i1);
}

cplx imaginary_power_kernel(double lambda, double omega, double x, double y) {
    if (x == y) throw std::invalid_argument("imaginary_power_kernel: x must differ from y");
    double vlo, vhi;
    kernel_time_range(lambda, x, y, vlo, vhi);
    return kernel_quad(lambda, omega, x, y, vlo, vhi);
}

SampledFunction imaginary_power(const SampledFunction& f, double omega, IpPath path, const GridPtr& spectral,
                                const GridPtr& out) {
    if (path == IpPath::Spectral) return spectral_multiplier(f, MultiplierSymbol::imaginary_power(omega), spectral, out);

    const GridPtr& og = out ? out : f.grid();
    double lo = 0.0, hi = 0.0;
    const bool nonzero = support_hull(f, lo, hi);
    const int n = f.dim();
    SampledFunction r(og, f.lambda(), n, true);
    if (!nonzero) return r;
    for (double x : og->nodes())
        if (x >= lo && x <= hi)
            throw std::invalid_argument("imaginary_power: kernel path needs output nodes outside the support of f");
    const RadialGrid& g = *f.grid();
    auto& d = r.mutable_data();
    std::vector<cplx> acc(n);
    for (std::size_t o = 0; o < og->size(); ++o) {
        const double x = og->x(o);
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double y = g.x(i);
            if (y < lo || y > hi) continue;
            const cplx k = imaginary_power_kernel(f.lambda(), omega, x, y) * g.w(i);
            for (int c = 0; c < n; ++c) acc[c] -= k * f.value(i, c);
        }
        for (int c = 0; c < n; ++c) {
            d[o * 2 * n + c] = acc[c].real();
            d[o * 2 * n + n + c] = acc[c].imag();
        }
    }
    return r;
}

std::vector<double> log_lattice(double a, double b, int n) {
    std::vector<double> l(n);
    for (int i = 0; i < n; ++i) l[i] = a * std::pow(b / a, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
    return l;
}

std::vector<double> refine_lattice(const std::vector<double>& lattice) {
    std::vector<double> r;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        r.push_back(lattice[i]);
        if (i + 1 < lattice.size()) r.push_back(std::sqrt(lattice[i] * lattice[i + 1]));
    }
    return r;
}

KernelProbes imaginary_power_kernel_probes(double lambda, double omega, const std::vector<double>& lattice) {
    KernelProbes p{0.0, 0.0, 0.0};
    const double damp = std::exp(-kPi * std::abs(omega) / 2.0);
    for (double x : lattice)
        for (double y : lattice) {
            if (x == y) continue;
            const double d = std::abs(x - y);
            double vlo, vhi;
            kernel_time_range(lambda, x, y, vlo, vhi);
            vlo -= 1.0;
            vhi += 1.0;
            const cplx k = kernel_quad(lambda, omega, x, y, vlo, vhi);
            const cplx kt = kernel_quad(lambda, omega, y, x, vlo, vhi);
            // Same nodes on both sides of the difference.
            const double h = 1e-4 * d;
            const cplx dk = (kernel_quad(lambda, omega, x + h, y, vlo, vhi) -
                             kernel_quad(lambda, omega, x - h, y, vlo, vhi)) /
                            (2.0 * h);
            p.size = std::max(p.size, std::abs(k) * d * damp);
            p.gradient = std::max(p.gradient, std::abs(dk) * d * d * damp);
            if (std::abs(k) > 0.0) p.symmetry = std::max(p.symmetry, std::abs(k - kt) / std::abs(k));
        }
    return p;
}

// ------------------------------------------------------------------- Mellin

cplx mellin_Mn(const MultiplierSymbol& m, int n, double t, double u) {
    if (n < 1) throw std::invalid_argument("mellin_Mn: n must be at least 1");
    // s = ty = e^v; s^n e^{-s/2} is below 1e-17 of its peak outside the range.
    thread_local std::vector<double> v, w;
    log_panels_rule(-39.0 / n, std::log(2.0 * n + 90.0), 0.25, v, w);
    const double lt = std::log(t);
    cplx s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double sv = std::exp(v[k]);
        const double y = sv / t;
        s += w[k] * std::pow(sv, n) * std::exp(-sv / 2.0) * m(y * y) * std::exp(-I1 * u * (v[k] - lt));
    }
    return s;
}

MellinReport multiplier_via_mellin(const SampledFunction& f, const MultiplierSymbol& m, int n, const TimeGridPtr& tg,
                                   const MellinOptions& opt) {
    if (n < 1) throw std::invalid_argument("multiplier_via_mellin: n must be at least 1");
    if (f.dim() != 1) throw std::invalid_argument("multiplier_via_mellin: scalar input required");
    const GridPtr& sg = opt.spectral ? opt.spectral : f.grid();
    const std::size_t T = tg->size();

    // u nodes on [-U, U].
    std::vector<double> un, uw;
    {
        const QuadRule& q = gl_rule(16);
        const double width = 2.0 * opt.U / opt.u_panels;
        for (int p = 0; p < opt.u_panels; ++p) {
            const double c = -opt.U + (p + 0.5) * width;
            for (std::size_t k = 0; k < q.size(); ++k) {
                un.push_back(c + 0.5 * width * q.x[k]);
                uw.push_back(0.5 * width * q.w[k]);
            }
        }
    }
    std::vector<cplx> M(T * un.size());
    for (std::size_t j = 0; j < T; ++j)
        for (std::size_t k = 0; k < un.size(); ++k) M[j * un.size() + k] = mellin_Mn(m, n, tg->t(j), un[k]);

    auto t_index = [&tg](double t) {
        const auto& nd = tg->nodes();
        return static_cast<std::size_t>(std::lower_bound(nd.begin(), nd.end(), t) - nd.begin());
    };
    const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
    MellinReport rep;
    rep.U = opt.U;
    rep.lhs = apply_symbol_field(
        f, tg,
        [&](double t, double y) { return sign * std::pow(t * y, n + 1) * std::exp(-t * y) * m(y * y); }, sg);
    rep.rhs = apply_symbol_field(
        f, tg,
        [&](double t, double y) {
            const std::size_t j = t_index(t);
            const double ly = std::log(y);
            cplx s = 0.0;
            for (std::size_t k = 0; k < un.size(); ++k) s += uw[k] * M[j * un.size() + k] * std::exp(I1 * un[k] * ly);
            return s / (2.0 * kPi) * (-(t * y) * std::exp(-t * y / 2.0));
        },
        sg);

    const RadialGrid& xg = *rep.lhs.xgrid();
    const int nc = rep.lhs.ncomp();
    std::vector<double> num, den;
    for (std::size_t j = 0; j < T; ++j)
        for (std::size_t i = 0; i < xg.size(); ++i) {
            double a = 0.0, b = 0.0;
            for (int c = 0; c < nc; ++c) {
                const double l = rep.lhs.at(j, i, c), r = rep.rhs.at(j, i, c);
                a += (l - r) * (l - r);
                b += l * l;
            }
            num.push_back(xg.w(i) * a);
            den.push_back(xg.w(i) * b);
        }
    const double dn = pairwise_sum(den);
    rep.discrepancy = std::sqrt(pairwise_sum(num) / (dn > 0.0 ? dn : 1.0));

    // Tail envelope over U < |u| < U + 24.
    double tail = 0.0;
    const QuadRule& q = gl_rule(16);
    for (int side : {-1, 1})
        for (int p = 0; p < 3; ++p) {
            const double a = opt.U + 8.0 * p;
            for (std::size_t k = 0; k < q.size(); ++k) {
                const double u = side * (a + 4.0 * (1.0 + q.x[k]));
                double sup = 0.0;
                for (std::size_t j = 0; j < T; j += std::max<std::size_t>(1, T / 16))
                    sup = std::max(sup, std::abs(mellin_Mn(m, n, tg->t(j), u)));
                tail += 4.0 * q.w[k] * sup;
            }
        }
    rep.tail_bound = tail / (2.0 * kPi);
    rep.flagged = rep.tail_bound > 1e-4;
    return rep;
}

// ------------------------------------------------------------------ transfer

namespace {

// Order-6 Lagrange interpolation of h in u = ln t on the uniform TimeGrid
// nodes; zero outside [u_0, u_{T-1}].
class LogInterp {
public:
    LogInterp(const TimeGrid& tg, const std::vector<cplx>& h) : tg_(tg), h_(h) {}
    cplx operator()(double u) const {
        const std::size_t T = tg_.size();
        const double p = (u - tg_.u(0)) / tg_.du();
        if (p < 0.0 || p > static_cast<double>(T - 1)) return 0.0;
        if (T < 6) throw std::invalid_argument("transfer_T: time grid too small");
        const long k = std::min<long>(static_cast<long>(p), static_cast<long>(T) - 2);
        const long j0 = std::clamp<long>(k - 2, 0, static_cast<long>(T) - 6);
        cplx s = 0.0;
        for (int a = 0; a < 6; ++a) {
            double l = 1.0;
            for (int b = 0; b < 6; ++b)
                if (b != a) l *= (p - (j0 + b)) / static_cast<double>(a - b);
            s += l * h_[j0 + a];
        }
        return s;
    }

private:
    const TimeGrid& tg_;
    const std::vector<cplx>& h_;
};

}  // namespace

std::vector<cplx> transfer_T(const TimeGrid& tg, const std::vector<cplx>& h, double omega, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("transfer_T: beta must be positive");
    if (h.size() != tg.size()) throw std::invalid_argument("transfer_T: profile length does not match grid");
    const LogInterp hi(tg, h);
    const cplx ginv = 1.0 / complex_gamma(cplx(1.0, -2.0 * omega));
    const QuadRule& g6 = gl_rule(6);
    std::vector<double> wv, ww;
    std::vector<cplx> out(tg.size());
    for (std::size_t j = 0; j < tg.size(); ++j) {
        const double t = tg.t(j);
        const double vmid = std::log(t / 2.0);
        cplx acc = 0.0;
        // r in (0, t/2] as r = e^v, cells aligned with the interpolation nodes.
        for (std::size_t c = 0; c + 1 < tg.size(); ++c) {
            const double a = tg.u(c), b = std::min(tg.u(c + 1), vmid);
            if (a >= vmid) break;
            for (std::size_t k = 0; k < g6.size(); ++k) {
                const double v = 0.5 * (a + b) + 0.5 * (b - a) * g6.x[k];
                const double r = std::exp(v);
                acc += 0.5 * (b - a) * g6.w[k] * std::pow(r, beta) * hi(v) *
                       std::exp(-2.0 * I1 * omega * std::log(t - r));
            }
        }
        // s = t - r in (0, t/2) as s = e^w.
        log_panels_rule(vmid - 37.0, vmid, 0.5, wv, ww);
        for (std::size_t k = 0; k < wv.size(); ++k) {
            const double s = std::exp(wv[k]);
            const double r = t - s;
            acc += ww[k] * std::pow(r, beta - 1.0) * hi(std::log(r)) * s * std::exp(-2.0 * I1 * omega * wv[k]);
        }
        out[j] = acc * ginv / std::pow(t, beta);
    }
    return out;
}

double h_norm(const TimeGrid& tg, const std::vector<cplx>& h) {
    std::vector<double> p(2 * h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        p[2 * j] = h[j].real();
        p[2 * j + 1] = h[j].imag();
    }
    return h_norm(tg, p, 2);
}

PairingIdentity transfer_pairing(const SampledFunction& f, double omega, double beta, const TimeGridPtr& tg,
                                 const std::vector<cplx>& h, const GridPtr& out) {
    if (f.dim() != 1) throw std::invalid_argument("transfer_pairing: scalar input required");
    const std::vector<cplx> Th = transfer_T(*tg, h, omega, beta);
    const TimeField g1 = apply_symbol_field(
        f, tg,
        [&](double t, double y) {
            return std::exp(I1 * kPi * beta) * std::pow(t * y, beta) * std::exp(-t * y) *
                   std::exp(2.0 * I1 * omega * std::log(y));
        },
        nullptr, out);
    const TimeField g2 = apply_symbol_field(
        f, tg,
        [&](double t, double y) {
            return std::exp(I1 * kPi * (beta + 1.0)) * std::pow(t * y, beta + 1.0) * std::exp(-t * y);
        },
        nullptr, out);
    PairingIdentity r;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < out->size(); ++i) {
        std::vector<cplx> a(tg->size()), b(tg->size());
        for (std::size_t j = 0; j < tg->size(); ++j) {
            a[j] = cplx(g1.at(j, i, 0), g1.at(j, i, 1)) * h[j] * tg->du();
            b[j] = cplx(g2.at(j, i, 0), g2.at(j, i, 1)) * Th[j] * tg->du();
        }
        r.A1.push_back(pairwise_sum(a));
        r.A2T.push_back(pairwise_sum(b));
        num = std::max(num, std::abs(r.A1.back() + r.A2T.back()));
        den = std::max(den, std::abs(r.A1.back()));
    }
    r.residual = num / (den > 0.0 ? den : 1.0);
    return r;
}

GrowthProbe norm_growth_probe(const std::vector<SampledFunction>& corpus, double p, const FiniteBanachSpace& space,
                              const std::vector<double>& omegas, const GridPtr& out) {
    GrowthProbe g;
    g.omegas = omegas;
    g.envelope = 2.0 * kPi * std::abs(1.0 / p - 0.5);
    for (double w : omegas) {
        double best = 0.0;
        for (const auto& f : corpus) {
            const SampledFunction d = imaginary_power(f, w, IpPath::Spectral, nullptr, out);
            const double nf = lp_norm(f, p, space);
            best = std::max(best, lp_norm(d, p, space) / nf);
        }
        g.ratios.push_back(best);
    }
    // Least-squares slope of ln ratio in omega.
    const double n = static_cast<double>(omegas.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double x = omegas[k], y = std::log(g.ratios[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    g.exponent = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    return g;
}

}  // namespace bh
