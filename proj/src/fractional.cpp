#include "besselharm/fractional.hpp"

#include "besselharm/convolution.hpp"
#include "besselharm/hankel.hpp"
#include "besselharm/kernel_apply.hpp"
#include "besselharm/semigroups.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bh {

namespace {
constexpr double kPi = std::numbers::pi;

double factorial(int n) { return std::tgamma(n + 1.0); }

// (lambda+1)(lambda+2)...(lambda+j), 1 for j = 0.
double rising_from(double lambda, int j) {
    double p = 1.0;
    for (int i = 1; i <= j; ++i) p *= lambda + i;
    return p;
}

// Coefficients of d^m/dt^m [t (a + t^2)^{-lambda-1}] =
// sum_k coef_k t^{m+1-2k} (t^2 + a)^{-lambda-m-1+k}.
std::vector<double> dtm_coefficients(double lambda, int m) {
    std::vector<double> c;
    for (int k = 0; 2 * k <= m + 1; ++k)
        c.push_back(0.5 * ((m - k) % 2 ? -1.0 : 1.0) * E_coeff(m + 1, k) * rising_from(lambda, m - k));
    return c;
}

double dtm_profile(const std::vector<double>& coef, double lambda, int m, double tau, double a) {
    const double B = tau * tau + a;
    const double base = std::pow(B, -lambda - m - 1.0);
    double s = 0.0, Bk = 1.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        s += coef[k] * std::pow(tau, static_cast<double>(m + 1) - 2.0 * static_cast<double>(k)) * Bk;
        Bk *= B;
    }
    return s * base;
}

}  // namespace

FractionalOrder FractionalOrder::make(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("FractionalOrder: beta must be positive");
    return {beta, static_cast<int>(std::floor(beta)) + 1};
}

cplx FractionalOrder::prefactor() const {
    if (is_integer()) return 1.0;
    const double d = m - beta;
    return std::polar(1.0 / std::tgamma(d), -kPi * d);
}

double E_coeff(int n, int k) {
    if (k < 0 || 2 * k > n) return 0.0;
    return std::ldexp(1.0, n - 2 * k) * factorial(n) / (factorial(k) * factorial(n - 2 * k));
}

double poisson_kernel_dtm(double lambda, int m, double t, double x, double y) {
    if (m < 0) throw std::invalid_argument("poisson_kernel_dtm: m must be nonnegative");
    thread_local std::vector<double> u, w;
    const auto coef = dtm_coefficients(lambda, m);
    const double xy = x * y;
    const double a0 = (x - y) * (x - y);
    ThetaQuadrature::get(lambda).build((a0 + t * t) / (2.0 * xy), u, w);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * dtm_profile(coef, lambda, m, t, a0 + 2.0 * xy * u[k]);
    return 2.0 * lambda * std::pow(xy, lambda) / kPi * s;
}

SwRule sw_rule(const FractionalOrder& b, double t) {
    SwRule r;
    r.s_max = 1e4 * t;
    if (b.is_integer()) return r;
    const double a = b.m - b.beta - 1.0;
    const QuadRule& head = gj_left_rule(16, a);
    const double ta = std::pow(t, a + 1.0);
    for (std::size_t i = 0; i < head.size(); ++i) {
        r.s.push_back(t * head.x[i]);
        r.w.push_back(ta * head.w[i]);
    }
    const QuadRule& gl = gl_rule(12);
    double lo = t;
    while (lo < r.s_max) {
        const double hi = std::min(8.0 * lo, r.s_max);
        const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double s = c + h * gl.x[i];
            r.s.push_back(s);
            r.w.push_back(h * gl.w[i] * std::pow(s, a));
        }
        lo = hi;
    }
    return r;
}

SwResult frac_deriv_sw(const DerivFamily& dmF, int ncomp, const FractionalOrder& b, double t) {
    SwResult res;
    res.value.assign(ncomp, 0.0);
    res.tail_estimate = 0.0;
    res.flagged = false;
    std::vector<double> v(ncomp);
    if (b.is_integer()) {
        dmF(t, v.data());
        for (int c = 0; c < ncomp; ++c) res.value[c] = v[c];
        return res;
    }
    const SwRule rule = sw_rule(b, t);
    std::vector<double> acc(ncomp, 0.0);
    for (std::size_t j = 0; j < rule.s.size(); ++j) {
        dmF(t + rule.s[j], v.data());
        for (int c = 0; c < ncomp; ++c) acc[c] += rule.w[j] * v[c];
    }
    // Algebraic tail beyond s_max from the decay between s_max / 2 and s_max.
    const double a = b.m - b.beta - 1.0;
    std::vector<double> v1(ncomp), v2(ncomp);
    dmF(t + 0.5 * rule.s_max, v1.data());
    dmF(t + rule.s_max, v2.data());
    double worst = 0.0;
    for (int c = 0; c < ncomp; ++c) {
        double tail = 0.0;
        if (v2[c] != 0.0) {
            double p = (v1[c] != 0.0 && (v1[c] > 0) == (v2[c] > 0)) ? std::log(v2[c] / v1[c]) / std::log(2.0) + a
                                                                     : 0.0;
            tail = (p < -1.0) ? v2[c] * std::pow(rule.s_max, a + 1.0) / (-p - 1.0)
                              : std::numeric_limits<double>::infinity();
            if (std::isfinite(tail)) acc[c] += tail;
        }
        const double scale = std::max(std::abs(acc[c]), 1e-300);
        worst = std::max(worst, std::abs(tail) / scale);
    }
    const cplx pre = b.prefactor();
    for (int c = 0; c < ncomp; ++c) res.value[c] = pre * acc[c];
    res.tail_estimate = worst;
    res.flagged = !(worst <= 1e-6);
    return res;
}

SampledFunction frac_poisson_spectral(const SampledFunction& f, double beta, double t, const GridPtr& out) {
    const cplx ph = std::polar(1.0, kPi * beta);
    return apply_symbol(
        f, [=](double y) { return ph * std::pow(t * y, beta) * std::exp(-t * y); }, nullptr, out, false);
}

void frac_poisson_kernel_at(const SampledFunction& f, double beta, double t, double x, cplx* out) {
    const FractionalOrder b = FractionalOrder::make(beta);
    const double lam = f.lambda();
    const int m = b.derivative_order();
    const auto coef = dtm_coefficients(lam, m);
    const SwRule rule = sw_rule(b, t);
    const bool direct = b.is_integer();
    KernelBatch K = [&](double xx, const double* ys, int n, double* kv) {
        std::vector<double> u, w;
        for (int i = 0; i < n; ++i) {
            const double y = ys[i];
            const double xy = xx * y;
            const double a0 = (xx - y) * (xx - y);
            ThetaQuadrature::get(lam).build((a0 + t * t) / (2.0 * xy), u, w);
            double s = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) {
                const double a = a0 + 2.0 * xy * u[k];
                if (direct) {
                    s += w[k] * dtm_profile(coef, lam, m, t, a);
                } else {
                    double q = 0.0;
                    for (std::size_t j = 0; j < rule.s.size(); ++j)
                        q += rule.w[j] * dtm_profile(coef, lam, m, t + rule.s[j], a);
                    s += w[k] * q;
                }
            }
            kv[i] = 2.0 * lam * std::pow(xy, lam) / kPi * s;
        }
    };
    const int nc = f.ncomp();
    std::vector<double> acc(nc);
    kernel_apply_at(f, x, K, t, acc.data());
    const cplx pre = b.prefactor() * std::pow(t, beta);
    if (f.is_complex()) {
        const int d = f.dim();
        for (int c = 0; c < d; ++c) out[c] = pre * cplx(acc[c], acc[d + c]);
    } else {
        for (int c = 0; c < nc; ++c) out[c] = pre * acc[c];
    }
}

TimeField g_operator(const SampledFunction& f, double beta, const TimeGridPtr& tg, const GridPtr& out,
                     const GridPtr& spectral) {
    const cplx ph = std::polar(1.0, kPi * beta);
    TimeSymbol s = [=](double t, double y) {
        const double ty = t * y;
        return ph * std::pow(ty, beta) * std::exp(-ty);
    };
    return apply_symbol_field(f, tg, s, spectral, out);
}

TimeField g_script_operator(const SampledFunction& f, const TimeGridPtr& tg) {
    if (f.is_complex()) throw std::invalid_argument("g_script_operator: real input required");
    const double lam = f.lambda();
    SampledFunction f1 = f.with_lambda(lam + 1.0);
    TimeSymbol s = [](double t, double y) { return cplx(t * std::exp(-t * y), 0.0); };
    TimeField p = apply_symbol_field(f1, tg, s);
    const auto& xg = f.grid();
    const int d = f.dim();
    TimeField r(tg, xg, d, false);
    for (std::size_t j = 0; j < tg->size(); ++j) {
        SampledFunction sl(xg, lam + 1.0, d, false);
        auto& sd = sl.mutable_data();
        for (std::size_t i = 0; i < xg->size(); ++i)
            for (int c = 0; c < d; ++c) sd[i * d + c] = p.at(j, i, c);
        SampledFunction ds = D_lambda_star(sl, lam);
        for (std::size_t i = 0; i < xg->size(); ++i)
            for (int c = 0; c < d; ++c) r.at(j, i, c) = ds.at(i, c);
    }
    r.warnings = p.warnings;
    return r;
}

double field_rel_diff(const TimeField& a, const TimeField& b) {
    if (a.tgrid() != b.tgrid() || a.xgrid() != b.xgrid() || a.dim() != b.dim())
        throw std::invalid_argument("field_rel_diff: fields must share grids and dimension");
    const auto& xg = *a.xgrid();
    const int d = a.dim();
    auto val = [d](const TimeField& f, std::size_t j, std::size_t i, int c) {
        return cplx(f.at(j, i, c), f.is_complex() ? f.at(j, i, d + c) : 0.0);
    };
    std::vector<double> num(a.tgrid()->size()), den(a.tgrid()->size());
    for (std::size_t j = 0; j < a.tgrid()->size(); ++j) {
        double n = 0.0, m = 0.0;
        for (std::size_t i = 0; i < xg.size(); ++i) {
            if (derivative_masked(xg, xg.x(i))) continue;
            for (int c = 0; c < d; ++c) {
                n += xg.w(i) * std::norm(val(a, j, i, c) - val(b, j, i, c));
                m += xg.w(i) * std::norm(val(b, j, i, c));
            }
        }
        num[j] = n;
        den[j] = m;
    }
    const double dn = pairwise_sum(den);
    return dn > 0.0 ? std::sqrt(pairwise_sum(num) / dn) : std::sqrt(pairwise_sum(num));
}

PrefactorResiduals polarization_prefactor_residuals(const SampledFunction& f, const SampledFunction& g, double beta,
                                 const TimeGridPtr& tg, const GridPtr& out) {
    if (f.dim() != 1 || g.dim() != 1 || f.is_complex() || g.is_complex())
        throw std::invalid_argument("polarization_prefactor_residuals: scalar real inputs required");
    const auto& gr = *f.grid();
    std::vector<double> t(gr.size());
    for (std::size_t i = 0; i < gr.size(); ++i) t[i] = gr.w(i) * f.at(i) * g.at(i);
    const double lhs = pairwise_sum(t);
    TimeField Gf = g_operator(f, beta, tg, out), Gg = g_operator(g, beta, tg, out);
    const auto& xg = *Gf.xgrid();
    std::vector<cplx> S(tg->size());
    std::vector<double> N(tg->size());
    for (std::size_t j = 0; j < tg->size(); ++j) {
        cplx s = 0.0;
        double n = 0.0;
        for (std::size_t i = 0; i < xg.size(); ++i) {
            const cplx a(Gf.at(j, i, 0), Gf.at(j, i, 1)), b(Gg.at(j, i, 0), Gg.at(j, i, 1));
            s += xg.w(i) * a * b;
            n += xg.w(i) * std::norm(a);
        }
        S[j] = s * tg->du();
        N[j] = n * tg->du();
    }
    const cplx pair = pairwise_sum(S);
    const double g2b = std::tgamma(2.0 * beta), p2b = std::pow(2.0, 2.0 * beta);
    const cplx ph = std::polar(1.0, 2.0 * kPi * beta);
    const cplx c_stated = ph * p2b / g2b;
    const cplx c_proof = ph * g2b * p2b;
    const double scale = std::abs(lhs) > 0.0 ? std::abs(lhs) : 1.0;
    double ff = 0.0;
    for (std::size_t i = 0; i < gr.size(); ++i) ff += gr.w(i) * f.at(i) * f.at(i);
    const double mod = std::abs(pairwise_sum(N) / (g2b / p2b * ff) - 1.0);
    return {std::abs(lhs - c_stated * pair) / scale, std::abs(lhs - c_proof * pair) / scale, mod};
}

double halfline_power_integral(double a, const std::function<double(double)>& g) {
    const QuadRule& head = gj_left_rule(24, a);
    double acc = 0.0, absacc = 0.0;
    for (std::size_t i = 0; i < head.size(); ++i) {
        const double v = head.w[i] * g(head.x[i]);
        acc += v;
        absacc += std::abs(v);
    }
    const QuadRule& gl = gl_rule(16);
    int small = 0;
    for (int p = 0; p < 120 && small < 2; ++p) {
        const double lo = std::ldexp(1.0, p), hi = 2.0 * lo;
        const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
        double part = 0.0, apart = 0.0;
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double v = c + h * gl.x[i];
            const double q = h * gl.w[i] * std::pow(v, a) * g(v);
            part += q;
            apart += std::abs(q);
        }
        acc += part;
        absacc += apart;
        small = apart < 1e-17 * absacc ? small + 1 : 0;
    }
    return acc;
}

double phi_k(const FractionalOrder& b, int k, double z) {
    const int m = b.m;
    const double e1 = m + 1 - 2 * k, e2 = -(m - k + 1.0), z2 = z * z;
    return halfline_power_integral(b.m - b.beta - 1.0, [=](double v) {
        const double q = 1.0 + v;
        return std::pow(q, e1) * std::pow(q * q + z2, e2);
    });
}

double phi_lambda_k(double lambda, const FractionalOrder& b, int k, double w) {
    const int m = b.m;
    const double e1 = m + 1 - 2 * k, e2 = -(lambda + m - k + 1.0);
    return halfline_power_integral(b.m - b.beta - 1.0, [=](double v) {
        const double q = 1.0 + v;
        return std::pow(q, e1) * std::pow(q * q + w, e2);
    });
}

namespace {

// d^m/dtau^m of tau / (pi (tau^2 + z^2)).
double classical_dtm(int m, double tau, double z) {
    const cplx iz(z, -tau);
    const cplx im = std::pow(cplx(0.0, 1.0), m);
    return (im * factorial(m) / std::pow(iz, m + 1)).imag() / kPi;
}

}  // namespace

cplx classical_poisson_frac_sw(double t, double z, double beta) {
    const FractionalOrder b = FractionalOrder::make(beta);
    const int m = b.derivative_order();
    SwResult r = frac_deriv_sw([m, z](double tau, double* o) { o[0] = classical_dtm(m, tau, z); }, 1, b, t);
    return std::pow(t, beta) * r.value[0];
}

std::vector<cplx> classical_ck_closed_form(double beta) {
    const FractionalOrder b = FractionalOrder::make(beta);
    const int m = b.m;
    const double d = m - beta;
    const cplx ph = std::polar(1.0, -kPi * d);
    std::vector<cplx> c;
    for (int k = 0; 2 * k <= m + 1; ++k) {
        const double sgn = (m - k) % 2 ? -1.0 : 1.0;
        c.push_back(ph * sgn * E_coeff(m + 1, k) * factorial(m - k) / (2.0 * kPi * std::tgamma(d)));
    }
    return c;
}

CkFit fit_ck(double beta) {
    const FractionalOrder b = FractionalOrder::make(beta);
    const int K = (b.m + 1) / 2 + 1;
    const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 4.0};
    const std::vector<double> zs{0.0, 0.3, 0.7, 1.0, 1.5, 2.5, 4.0, 8.0};
    const int N = static_cast<int>(ts.size() * zs.size());
    Eigen::MatrixXd A(N, K);
    Eigen::VectorXd br(N), bi(N);
    int row = 0;
    for (double t : ts)
        for (double z : zs) {
            for (int k = 0; k < K; ++k) A(row, k) = phi_k(b, k, z / t) / t;
            const cplx ref = classical_poisson_frac_sw(t, z, beta);
            br(row) = ref.real();
            bi(row) = ref.imag();
            ++row;
        }
    auto qr = A.colPivHouseholderQr();
    Eigen::VectorXd xr = qr.solve(br), xi = qr.solve(bi);
    CkFit fit;
    for (int k = 0; k < K; ++k) fit.c.emplace_back(xr(k), xi(k));
    const double rn = std::sqrt((A * xr - br).squaredNorm() + (A * xi - bi).squaredNorm());
    const double bn = std::sqrt(br.squaredNorm() + bi.squaredNorm());
    fit.residual = bn > 0.0 ? rn / bn : rn;
    return fit;
}

cplx classical_poisson_frac(double t, double z, double beta) {
    static std::mutex mu;
    static std::map<double, std::vector<cplx>> cache;
    std::vector<cplx> c;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(beta);
        if (it != cache.end()) c = it->second;
    }
    if (c.empty()) {
        c = fit_ck(beta).c;
        std::lock_guard<std::mutex> lock(mu);
        cache[beta] = c;
    }
    const FractionalOrder b = FractionalOrder::make(beta);
    cplx s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] / t * phi_k(b, static_cast<int>(k), z / t);
    return s;
}

std::vector<cplx> bessel_bk(double lambda, double beta, const std::vector<cplx>& c) {
    const FractionalOrder b = FractionalOrder::make(beta);
    std::vector<cplx> r;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const int j = b.m - static_cast<int>(k);
        r.push_back(2.0 * lambda * rising_from(lambda, j) / factorial(j) * c[k]);
    }
    return r;
}

cplx bessel_poisson_frac_profiles(double lambda, double beta, double t, double x, double y,
                                  const std::vector<cplx>& bk) {
    const FractionalOrder b = FractionalOrder::make(beta);
    std::vector<double> u, w;
    const double xy = x * y, a0 = (x - y) * (x - y);
    ThetaQuadrature::get(lambda).build((a0 + t * t) / (2.0 * xy), u, w);
    cplx s = 0.0;
    for (std::size_t q = 0; q < u.size(); ++q) {
        const double a = a0 + 2.0 * xy * u[q];
        cplx v = 0.0;
        for (std::size_t k = 0; k < bk.size(); ++k) v += bk[k] * phi_lambda_k(lambda, b, static_cast<int>(k), a / (t * t));
        s += w[q] * v;
    }
    return std::pow(xy, lambda) * std::pow(t, -2.0 * lambda - 1.0) * s;
}

cplx bessel_poisson_frac_sw(double lambda, double beta, double t, double x, double y) {
    const FractionalOrder b = FractionalOrder::make(beta);
    const int m = b.derivative_order();
    SwResult r = frac_deriv_sw(
        [=](double tau, double* o) { o[0] = poisson_kernel_dtm(lambda, m, tau, x, y); }, 1, b, t);
    return std::pow(t, beta) * r.value[0];
}

double classical_profile_Phi(const SampledFunction& psi, double z) {
    if (psi.dim() != 1 || psi.is_complex())
        throw std::invalid_argument("classical_profile_Phi: scalar real input required");
    const double lam = psi.lambda();
    const double c = 1.0 / (std::sqrt(kPi) * std::pow(2.0, lam + 0.5) * std::tgamma(lam));
    const double z2 = z * z;
    return c * halfline_power_integral(lam - 1.0, [&psi, lam, z2](double u) {
               const double w = z2 + u;
               double v;
               psi.eval(std::sqrt(w), &v);
               return v * std::pow(w, -0.5 * lam);
           });
}

PhiTable::PhiTable(const SampledFunction& psi, double z_max) {
    std::vector<double> br;
    const int n = std::max(4, static_cast<int>(std::ceil(z_max / 0.5)));
    br.push_back(1e-6);
    for (int i = 1; i <= n; ++i) br.push_back(z_max * i / n);
    auto g = RadialGrid::from_breaks(br, 16);
    tab_ = SampledFunction::from_function(g, psi.lambda(), [&psi](double z) { return classical_profile_Phi(psi, z); });
}

double PhiTable::operator()(double z) const {
    z = std::max(std::abs(z), tab_.grid()->x_min());
    if (z > tab_.grid()->x_max()) return 0.0;
    double v;
    tab_.eval(z, &v);
    return v;
}

KernelProbe kernel_difference_probe(const SampledFunction& psi, const PhiTable& Phi, double x, double y,
                                    const TimeGrid& tg) {
    const double lam = psi.lambda();
    const double sig = mass_scale(psi);
    std::vector<double> prof(tg.size());
    for (std::size_t j = 0; j < tg.size(); ++j) {
        const double t = tg.t(j);
        double v;
        translate_phi(lam, dilated_phi(psi, t), 1, sig * t, x, &y, 1, &v);
        prof[j] = v - Phi((x - y) / t) / t;
    }
    const double n = h_norm(tg, prof, 1);
    return {n, n * std::max(x, y)};
}

double classical_frac_probe(double beta, const std::vector<double>& lattice, const TimeGrid& tg) {
    double sup = 0.0;
    std::vector<double> prof(2 * tg.size());
    for (double x : lattice)
        for (double y : lattice) {
            if (x == y) continue;
            for (std::size_t j = 0; j < tg.size(); ++j) {
                const cplx v = classical_poisson_frac(tg.t(j), x - y, beta);
                prof[2 * j] = v.real();
                prof[2 * j + 1] = v.imag();
            }
            sup = std::max(sup, h_norm(tg, prof, 2) * std::abs(x - y));
        }
    return sup;
}

}  // namespace bh
