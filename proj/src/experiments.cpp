#include "besselharm/experiments.hpp"

#include "besselharm/convolution.hpp"
#include "besselharm/fractional.hpp"
#include "besselharm/gamma_norms.hpp"
#include "besselharm/hankel.hpp"
#include "besselharm/multipliers.hpp"
#include "besselharm/semigroups.hpp"
#include "besselharm/special.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bh {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Collects rows for one recipe; each row is charged the time since the previous one.
class Rows {
public:
    explicit Rows(std::string id) : id_(std::move(id)) {}

    void add(const json& params, double value, double oracle, double residual, double tol, std::string reason = {}) {
        ReportRow r;
        r.experiment_id = id_;
        r.param_json = params.dump();
        r.value = value;
        r.oracle = oracle;
        r.residual = residual;
        r.tolerance = tol;
        r.pass = residual <= tol;
        r.runtime_s = clock_.lap();
        r.reason = !reason.empty() ? std::move(reason) : (std::isinf(tol) ? "logged" : "");
        rows_.push_back(std::move(r));
    }
    void fail(const json& params, const std::string& reason) {
        add(params, std::nan(""), std::nan(""), std::nan(""), 0.0, reason);
    }
    std::vector<ReportRow>& rows() { return rows_; }

private:
    std::string id_;
    Stopwatch clock_;
    std::vector<ReportRow> rows_;
};

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> d) { return v.empty() ? d : v; }

SampledFunction stacked_corpus(double lambda, int count, std::uint64_t seed, const GridPtr& grid,
                               std::vector<SampledFunction>* members = nullptr) {
    auto corp = make_test_corpus(lambda, count, seed, grid);
    std::vector<SampledFunction> fs;
    for (auto& c : corp) fs.push_back(c.f);
    if (members) *members = fs;
    return SampledFunction::stack(fs);
}

// Relative L^2 distance on a fixed grid summed over all components, complex aware.
double rel_l2_all(const SampledFunction& a, const SampledFunction& b) {
    const RadialGrid& g = *a.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int c = 0; c < a.dim(); ++c) {
            num += g.w(i) * std::norm(a.value(i, c) - b.value(i, c));
            den += g.w(i) * std::norm(b.value(i, c));
        }
    return std::sqrt(num / (den > 0.0 ? den : 1.0));
}

// Per-coordinate L^p(H) norms of a field.
std::vector<double> lp_h_norms(const TimeField& F, double p) {
    const RadialGrid& xg = *F.xgrid();
    const TimeGrid& tg = *F.tgrid();
    const int d = F.dim();
    std::vector<double> out(d);
    for (int c = 0; c < d; ++c) {
        std::vector<double> terms(xg.size());
        for (std::size_t i = 0; i < xg.size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < tg.size(); ++j) {
                const double re = F.at(j, i, c), im = F.is_complex() ? F.at(j, i, d + c) : 0.0;
                s += re * re + im * im;
            }
            terms[i] = xg.w(i) * std::pow(s * tg.du(), p / 2.0);
        }
        out[c] = std::pow(pairwise_sum(terms), 1.0 / p);
    }
    return out;
}

// ------------------------------------------------------------------ recipes

void run_hankel_isometry(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    for (double lam : or_default(r.lambdas, {0.5, 1.0, 2.3})) {
        std::vector<SampledFunction> fs;
        const SampledFunction F = stacked_corpus(lam, r.corpus_count, r.seed, grid, &fs);
        const SampledFunction H = hankel_transform(F), HH = hankel_transform(H);
        double iso = 0.0, inv = 0.0;
        for (int c = 0; c < F.dim(); ++c) {
            const double nf = l2_norm(fs[c]);
            iso = std::max(iso, std::abs(l2_norm(H.coordinate(c)) / nf - 1.0));
            inv = std::max(inv, l2_norm(HH.coordinate(c) - fs[c]) / nf);
        }
        rows.add({{"lambda", lam}, {"check", "isometry"}, {"count", r.corpus_count}}, iso, 0.0, iso,
                 r.tol("isometry", 1e-6));
        rows.add({{"lambda", lam}, {"check", "involution"}, {"count", r.corpus_count}}, inv, 0.0, inv,
                 r.tol("involution", 1e-5));
    }
}

void run_interchange(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const GridPtr xo = RadialGrid::log_panels(0.05, 8.0, 4, 8);
    for (double lam : or_default(r.lambdas, {0.5, 1.0, 2.3})) {
        std::vector<SampledFunction> fs;
        stacked_corpus(lam, r.corpus_count + 1, r.seed, grid, &fs);
        const SampledFunction g = fs.back();
        fs.pop_back();
        const SampledFunction F = SampledFunction::stack(fs);
        ConvolveOptions opt;
        opt.out = xo;
        const SampledFunction conv = hankel_convolve(F, g, opt);
        const SampledFunction hF = hankel_transform(F), hg = hankel_transform(g);
        SampledFunction prod(grid, lam, F.dim());
        for (std::size_t i = 0; i < grid->size(); ++i)
            for (int c = 0; c < F.dim(); ++c)
                prod.at(i, c) = std::pow(grid->x(i), -lam) * hF.at(i, c) * hg.at(i);
        const SampledFunction spec = hankel_transform(prod, xo);
        double worst = 0.0;
        for (int c = 0; c < F.dim(); ++c) {
            double e = 0.0, n = 0.0;
            for (std::size_t i = 0; i < xo->size(); ++i) {
                e = std::max(e, std::abs(conv.at(i, c) - spec.at(i, c)));
                n = std::max(n, std::abs(spec.at(i, c)));
            }
            worst = std::max(worst, e / n);
        }
        rows.add({{"lambda", lam}, {"pairs", F.dim()}}, worst, 0.0, worst, r.tol("interchange", 1e-5));
    }
}

void run_poisson_identity(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const GridPtr xo = RadialGrid::log_panels(0.02, 12.0, 6, 8);
    for (double lam : or_default(r.lambdas, {0.5, 1.0, 2.3})) {
        const SampledFunction F = stacked_corpus(lam, 3, r.seed, grid);
        for (double t : {0.3, 1.0}) {
            const SampledFunction pk = poisson_apply(F, t, Path::Kernel, xo);
            const SampledFunction ps = poisson_apply(F, t, Path::Spectral, xo);
            const double e = rel_l2_all(pk, ps);
            rows.add({{"lambda", lam}, {"t", t}, {"check", "kernel_vs_spectral"}}, e, 0.0, e,
                     r.tol("paths", 1e-5));
        }
    }
    double cf = 0.0;
    for (double x : {0.1, 0.7, 1.0, 3.0})
        for (double y : {0.05, 0.9, 1.1, 5.0})
            for (double t : {1e-3, 0.1, 2.0}) {
                const double ref = t / kPi * (1.0 / ((x - y) * (x - y) + t * t) - 1.0 / ((x + y) * (x + y) + t * t));
                cf = std::max(cf, std::abs(poisson_kernel(1.0, t, x, y) - ref) / ref);
            }
    rows.add({{"lambda", 1.0}, {"check", "closed_form"}}, cf, 0.0, cf, r.tol("closed_form", 1e-8));
    double sub = 0.0;
    for (double lam : or_default(r.lambdas, {0.5, 1.0, 2.3}))
        for (double x : {0.3, 1.0, 2.0})
            for (double y : {0.5, 1.2})
                for (double t : {0.05, 0.5, 2.0}) {
                    const double a = poisson_kernel(lam, t, x, y), b = poisson_kernel_subordinated(lam, t, x, y);
                    sub = std::max(sub, std::abs(a - b) / a);
                }
    rows.add({{"check", "subordination"}}, sub, 0.0, sub, r.tol("subordination", 1e-5));
}

void run_frac_two_path(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const GridPtr xo = RadialGrid::log_panels(0.02, 12.0, 4, 8);
    const double t = 1.0;
    for (double lam : or_default(r.lambdas, {0.5, 1.0, 2.3})) {
        const SampledFunction F = stacked_corpus(lam, 3, r.seed, grid);
        for (double beta : or_default(r.betas, {0.5, 1.0, 1.5})) {
            const SampledFunction sp = frac_poisson_spectral(F, beta, t, xo);
            double num = 0.0, den = 0.0;
            std::vector<cplx> o(F.dim());
            for (std::size_t i = 0; i < xo->size(); ++i) {
                frac_poisson_kernel_at(F, beta, t, xo->x(i), o.data());
                for (int c = 0; c < F.dim(); ++c) {
                    num += xo->w(i) * std::norm(o[c] - sp.value(i, c));
                    den += xo->w(i) * std::norm(sp.value(i, c));
                }
            }
            const double e = std::sqrt(num / den);
            rows.add({{"lambda", lam}, {"beta", beta}, {"t", t}}, e, 0.0, e, r.tol("two_path", 1e-4));
        }
    }
}

void run_mixed_norm_constant(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    // The field spreads to x ~ t for large t and needs t down to 1e-7 for beta = 1/2.
    const GridPtr out = grid->extended(4000.0, 16);
    const TimeGridPtr tg = TimeGrid::make(1e-7, 1e3, 200);
    for (double lam : or_default(r.lambdas, {1.0})) {
        std::vector<SampledFunction> fs;
        const SampledFunction F = stacked_corpus(lam, 3, r.seed, grid, &fs);
        for (double beta : or_default(r.betas, {0.5, 1.0, 1.5})) {
            const TimeField G = g_operator(F, beta, tg, out);
            const double c = std::tgamma(2.0 * beta) * std::pow(2.0, -2.0 * beta);
            double worst = 0.0, ratio = 0.0;
            for (int k = 0; k < F.dim(); ++k) {
                std::vector<double> terms;
                for (std::size_t j = 0; j < tg->size(); ++j)
                    for (std::size_t i = 0; i < out->size(); ++i)
                        terms.push_back(out->w(i) * tg->du() *
                                        (std::pow(G.at(j, i, k), 2) + std::pow(G.at(j, i, F.dim() + k), 2)));
                const double q = pairwise_sum(terms) / std::pow(l2_norm(fs[k]), 2);
                if (std::abs(q / c - 1.0) >= worst) {
                    worst = std::abs(q / c - 1.0);
                    ratio = q;
                }
            }
            rows.add({{"lambda", lam}, {"beta", beta}}, ratio, c, worst, r.tol("constant", 1e-4));
        }
    }
}

void run_norm_equivalence(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr g0 = RadialGrid::from_config(r.grid);
    const TimeGridPtr t0 = TimeGrid::make(r.grid.t_min, r.grid.t_max, 120);
    const auto ps = or_default(r.ps, {1.5, 4.0});
    for (double lam : or_default(r.lambdas, {1.0})) {
        // [level][op][p] -> (min, max)
        std::vector<std::vector<std::vector<std::pair<double, double>>>> win(2);
        for (int level = 0; level < 2; ++level) {
            const GridPtr grid = level ? g0->refined() : g0;
            const TimeGridPtr tg = level ? t0->refined() : t0;
            std::vector<SampledFunction> fs;
            const SampledFunction F = stacked_corpus(lam, std::min(r.corpus_count, 8), r.seed, grid, &fs);
            const TimeField G = g_operator(F, 1.0, tg);
            const TimeField W = wavelet_transform(zero_moment_wavelet(grid, lam), F, tg);
            for (const TimeField* fld : {&G, &W}) {
                std::vector<std::pair<double, double>> per_p;
                for (double p : ps) {
                    const auto n = lp_h_norms(*fld, p);
                    double lo = kInf, hi = 0.0;
                    for (int c = 0; c < F.dim(); ++c) {
                        const double q = n[c] / lp_norm(fs[c], p, FiniteBanachSpace::scalar());
                        lo = std::min(lo, q);
                        hi = std::max(hi, q);
                    }
                    per_p.emplace_back(lo, hi);
                }
                win[level].push_back(per_p);
            }
        }
        const char* names[] = {"G_beta1", "wavelet"};
        for (int op = 0; op < 2; ++op)
            for (std::size_t k = 0; k < ps.size(); ++k) {
                const auto [c0, C0] = win[0][op][k];
                const auto [c1, C1] = win[1][op][k];
                const double move = std::max(std::abs(c1 - c0) / c0, std::abs(C1 - C0) / C0);
                json pj = {{"lambda", lam}, {"p", ps[k]}, {"operator", names[op]}, {"c", c0}, {"C", C0},
                           {"c_refined", c1}, {"C_refined", C1}};
                if (!(c0 > 0.0) || !(c1 > 0.0))
                    rows.add(pj, c0, 0.0, kInf, r.tol("window", 0.1), "lower window endpoint is not positive");
                else
                    rows.add(pj, move, 0.0, move, r.tol("window", 0.1));
            }
    }
}

void run_cauchy_riemann(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const double t = 0.5, h = t / 100.0;
    const TimeGridPtr tg = TimeGrid::make(r.grid.t_min, r.grid.t_max, 120);
    for (double lam : or_default(r.lambdas, {1.0})) {
        const SampledFunction F = stacked_corpus(lam, 3, r.seed, grid);
        const double tol = r.tol("residual", 1e-3);
        {
            const SampledFunction lhs = D_lambda(poisson_apply(F, t, Path::Spectral), lam);
            const SampledFunction rhs =
                (conjugate_apply(F, t + h, Path::Spectral) - conjugate_apply(F, t - h, Path::Spectral)).scaled(0.5 / h);
            const double e = masked_rel_l2(lhs, rhs.with_lambda(lhs.lambda()));
            rows.add({{"lambda", lam}, {"t", t}, {"identity", "D P = d/dt QQ"}}, e, 0.0, e, tol);
        }
        {
            const SampledFunction q = conjugate_apply(F, t, Path::Spectral);
            const SampledFunction lhs = D_lambda_star(q, lam);
            const SampledFunction rhs =
                (poisson_apply(F, t + h, Path::Spectral) - poisson_apply(F, t - h, Path::Spectral)).scaled(0.5 / h);
            const double e = masked_rel_l2(lhs, rhs.with_lambda(lhs.lambda()));
            rows.add({{"lambda", lam}, {"t", t}, {"identity", "D* QQ = d/dt P"}}, e, 0.0, e, tol);
        }
        {
            const IntertwiningResult it = intertwining_check(F, t);
            rows.add({{"lambda", lam}, {"t", t}, {"identity", "d/dt P(R* f) = D* P^(lambda+1) f"}}, it.residual, 0.0,
                     it.residual, tol);
        }
        {
            const SampledFunction rs = riesz_transform(F, lam, RieszVariant::RStar, Path::Kernel);
            const TimeField lhs = g_script_operator(F, tg);
            const TimeField rhs = g_operator(rs, 1.0, tg);
            const double e = field_rel_diff(lhs, rhs);
            rows.add({{"lambda", lam}, {"identity", "script G = G^1 R*"}}, e, 0.0, e, tol);
        }
    }
}

// G^{lambda,1} time profiles of corpus members at the output node nearest x = 1.
std::vector<std::vector<double>> g_profiles(double lam, int count, std::uint64_t seed, const TimeGridPtr& tg,
                                            const GridConfig& gc) {
    const GridPtr grid = RadialGrid::from_config(gc);
    const GridPtr out = RadialGrid::from_breaks({0.9, 1.1}, 2);
    const TimeField G = g_operator(stacked_corpus(lam, count, seed, grid), 1.0, tg, out);
    std::vector<std::vector<double>> prof(count);
    for (int c = 0; c < count; ++c)
        for (std::size_t j = 0; j < tg->size(); ++j) prof[c].push_back(G.at(j, 0, c));
    return prof;
}

void run_gamma_estimator(const ExperimentRecipe& r, Rows& rows) {
    const int M = 20000;
    const TimeGridPtr tg = TimeGrid::from_config(r.grid);
    const HBasis basis = build_h_basis(64, tg);
    const double lam = or_default(r.lambdas, {1.0}).front();
    const auto prof = g_profiles(lam, 4, r.seed, tg, r.grid);
    const double tol = r.tol("sigmas", 3.0);
    {
        const auto g = gamma_norm_mc(prof[0], false, FiniteBanachSpace::scalar(), basis, M, r.seed);
        const double h = h_norm(*tg, prof[0]);
        rows.add({{"space", "R"}, {"M", M}, {"se", g.std_error}, {"captured", g.captured}}, g.estimate, h,
                 std::abs(g.estimate - h) / g.std_error, tol, g.flagged ? "truncation flag" : "");
    }
    {
        // unit h in H times b in l^3_3
        const FiniteBanachSpace sp = FiniteBanachSpace::ellq(3, 3.0);
        const double b[3] = {1.0, -2.0, 0.5};
        const double hn = h_norm(*tg, prof[1]);
        std::vector<double> p(tg->size() * 3);
        for (std::size_t j = 0; j < tg->size(); ++j)
            for (int c = 0; c < 3; ++c) p[j * 3 + c] = prof[1][j] / hn * b[c];
        const auto g = gamma_norm_mc(p, false, sp, basis, M, r.seed);
        const double nb = sp.norm(b);
        rows.add({{"space", sp.describe()}, {"check", "rank_one"}, {"se", g.std_error}}, g.estimate, nb,
                 std::abs(g.estimate - nb) / g.std_error, tol, g.flagged ? "truncation flag" : "");
    }
    {
        const FiniteBanachSpace sp = FiniteBanachSpace::hilbert(4);
        std::vector<double> p(tg->size() * 4);
        double hs = 0.0;
        for (int c = 0; c < 4; ++c) {
            hs += std::pow(h_norm(*tg, prof[c]), 2);
            for (std::size_t j = 0; j < tg->size(); ++j) p[j * 4 + c] = prof[c][j];
        }
        const auto g = gamma_norm_mc(p, false, sp, basis, M, r.seed);
        rows.add({{"space", sp.describe()}, {"check", "hilbert_schmidt"}, {"se", g.std_error}}, g.estimate,
                 std::sqrt(hs), std::abs(g.estimate - std::sqrt(hs)) / g.std_error, tol,
                 g.flagged ? "truncation flag" : "");
        const auto g2 = gamma_norm_mc(p, false, sp, basis, M, r.seed);
        const double d = std::abs(g.estimate - g2.estimate) + std::abs(g.std_error - g2.std_error);
        rows.add({{"space", sp.describe()}, {"check", "determinism"}}, g2.estimate, g.estimate, d, 0.0);
    }
}

void run_imaginary_powers(const ExperimentRecipe& r, Rows& rows) {
    const double lam = or_default(r.lambdas, {1.5}).front();
    const GridPtr grid = RadialGrid::from_config(r.grid);
    std::vector<SampledFunction> fs;
    const SampledFunction F = stacked_corpus(lam, std::min(r.corpus_count, 6), r.seed, grid, &fs);
    {
        const SampledFunction id = imaginary_power(F, 0.0, IpPath::Spectral);
        const double e = rel_l2_all(id, F.as_complex());
        rows.add({{"lambda", lam}, {"check", "omega_zero_identity"}}, e, 0.0, e, r.tol("identity", 1e-5));
    }
    // Delta^{i omega} f decays like a power of x, so norms and intermediates
    // are taken on an extended grid.
    const GridPtr wide = grid->extended(4000.0, 16);
    {
        double worst = 0.0, best = 0.0;
        for (double w : {0.5, 1.0, 2.0}) {
            const SampledFunction d = imaginary_power(F, w, IpPath::Spectral, nullptr, wide);
            for (int c = 0; c < F.dim(); ++c) {
                const double q = l2_norm(d.coordinate(c)) / l2_norm(fs[c]);
                worst = std::max(worst, std::abs(q - 1.0));
                best = std::max(best, q);
            }
        }
        rows.add({{"lambda", lam}, {"check", "L2_norm_probe"}, {"omega", {0.5, 1.0, 2.0}}}, best, 1.0, worst,
                 r.tol("l2_norm", 1e-3));
    }
    {
        const double w1 = 0.5, w2 = 0.7;
        const SampledFunction mid = imaginary_power(F, w1, IpPath::Spectral, nullptr, wide);
        const SampledFunction a = imaginary_power(mid, w2, IpPath::Spectral, wide, grid);
        const SampledFunction b = imaginary_power(F, w1 + w2, IpPath::Spectral);
        const double e = rel_l2_all(a, b);
        rows.add({{"lambda", lam}, {"check", "group_law"}, {"omega1", w1}, {"omega2", w2}}, e, 0.0, e,
                 r.tol("group_law", 1e-5));
    }
    {
        // Bump supported in [1, 2] on a grid with breaks at the support ends.
        const GridPtr bg = RadialGrid::from_breaks(
            {1e-4, 0.01, 0.1, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 14.0, 20.0, 28.0, 40.0});
        const SampledFunction bump = SampledFunction::from_function(
            bg, lam, [](double x) { return x > 1.0 && x < 2.0 ? 256.0 * std::pow((x - 1.0) * (2.0 - x), 4) : 0.0; });
        const GridPtr sg = RadialGrid::log_panels(1e-4, 80.0, 96);
        const GridPtr og = RadialGrid::from_breaks({4.0, 6.0, 8.0}, 8);
        for (double w : {0.5, 1.0}) {
            const SampledFunction k = imaginary_power(bump, w, IpPath::Kernel, nullptr, og);
            const SampledFunction s = imaginary_power(bump, w, IpPath::Spectral, sg, og);
            double e = 0.0, n = 0.0;
            for (std::size_t i = 0; i < og->size(); ++i) {
                e = std::max(e, std::abs(k.value(i) - s.value(i)));
                n = std::max(n, std::abs(s.value(i)));
            }
            rows.add({{"lambda", lam}, {"check", "off_support_paths"}, {"omega", w}}, e / n, 0.0, e / n,
                     r.tol("off_support", 1e-3));
        }
    }
    const auto L = log_lattice(0.2, 5.0, 12);
    for (double w : {0.5, 1.0, 2.0}) {
        const KernelProbes a = imaginary_power_kernel_probes(lam, w, L);
        const KernelProbes b = imaginary_power_kernel_probes(lam, w, refine_lattice(L));
        const double ms = std::abs(b.size - a.size) / a.size, mg = std::abs(b.gradient - a.gradient) / a.gradient;
        const bool finite = std::isfinite(a.size) && std::isfinite(b.size) && std::isfinite(a.gradient) &&
                            std::isfinite(b.gradient);
        rows.add({{"lambda", lam}, {"check", "size_probe"}, {"omega", w}, {"coarse", a.size}, {"refined", b.size}},
                 b.size, a.size, finite ? ms : kInf, r.tol("probe", 0.15));
        rows.add({{"lambda", lam},
                  {"check", "gradient_probe"},
                  {"omega", w},
                  {"coarse", a.gradient},
                  {"refined", b.gradient}},
                 b.gradient, a.gradient, finite ? mg : kInf, r.tol("probe", 0.15));
    }
}

void run_mellin(const ExperimentRecipe& r, Rows& rows) {
    const double lam = or_default(r.lambdas, {1.0}).front();
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const SampledFunction f = make_test_corpus(lam, 2, r.seed, grid)[1].f;
    const TimeGridPtr tg = TimeGrid::make(0.01, 100.0, 40);
    const int n = 2;
    struct Case {
        MultiplierSymbol m;
        const char* key;
        double tol;
    };
    const Case cases[] = {{MultiplierSymbol::identity(), "identity", 1e-3},
                          {MultiplierSymbol::imaginary_power(0.5), "imaginary_power", 1e-3},
                          {MultiplierSymbol::resolvent_ratio(), "sector", 5e-3}};
    for (const auto& c : cases) {
        const MellinReport rep = multiplier_via_mellin(f, c.m, n, tg);
        rows.add({{"lambda", lam}, {"symbol", c.m.name}, {"n", n}, {"U", rep.U}, {"tail_bound", rep.tail_bound}},
                 rep.discrepancy, 0.0, rep.flagged ? kInf : rep.discrepancy, r.tol(c.key, c.tol),
                 rep.flagged ? "u-truncation tail above 1e-4" : "");
    }
    double e = 0.0;
    const MultiplierSymbol id = MultiplierSymbol::identity();
    for (double u : {0.0, 1.0, 3.0}) {
        const double ref = 2.0 * std::abs(complex_gamma(cplx(1.0, -u)));
        for (double t : {0.1, 1.0, 10.0}) e = std::max(e, std::abs(std::abs(mellin_Mn(id, 1, t, u)) - ref) / ref);
    }
    rows.add({{"symbol", "identity"}, {"n", 1}, {"check", "|M_1| t-independence"}}, e, 0.0, e,
             r.tol("mellin_modulus", 1e-6));
}

void run_transfer(const ExperimentRecipe& r, Rows& rows) {
    {
        const TimeGridPtr tg = TimeGrid::from_config(r.grid);
        std::vector<cplx> h(tg->size());
        std::vector<double> tn(tg->size());
        for (std::size_t j = 0; j < h.size(); ++j) {
            const double t = tg->t(j);
            h[j] = t * t * t * std::exp(-t);
        }
        const std::vector<cplx> T = transfer_T(*tg, h, 0.0, 1.0);
        // Running average on a radial grid in the t variable.
        const GridPtr rg = RadialGrid::log_panels(tg->t_min() / 4.0, tg->t_max(), 96, 16, false);
        const SampledFunction H0 = hardy_H0(
            SampledFunction::from_function(rg, 1.0, [](double t) { return t * t * t * std::exp(-t); }));
        std::vector<cplx> d(h.size()), ref(h.size());
        for (std::size_t j = 0; j < h.size(); ++j) {
            ref[j] = H0.eval(tg->t(j));
            d[j] = T[j] - ref[j];
        }
        const double e = h_norm(*tg, d) / h_norm(*tg, ref);
        rows.add({{"omega", 0.0}, {"beta", 1.0}, {"check", "running_average"}}, e, 0.0, e, r.tol("average", 1e-6));
    }
    {
        const TimeGridPtr tg = TimeGrid::from_config(r.grid);
        const HBasis basis = build_h_basis(16, tg);
        for (double w : {0.5, 1.0}) {
            double worst = 0.0;
            for (int s = 0; s < 8; ++s) {
                const CounterNormal g(r.seed, 1000 + s);
                std::vector<cplx> h(tg->size(), 0.0);
                for (int k = 0; k < basis.size(); ++k) {
                    const cplx a(g(2 * k), g(2 * k + 1));
                    for (std::size_t j = 0; j < tg->size(); ++j) h[j] += a * basis.at(k, j);
                }
                const auto T = transfer_T(*tg, h, w, 1.0);
                worst = std::max(worst, h_norm(*tg, T) / h_norm(*tg, h));
            }
            const double bound = std::exp(kPi * w);
            rows.add({{"omega", w}, {"beta", 1.0}, {"check", "norm_bound"}, {"samples", 8}}, worst, bound,
                     worst / bound, r.tol("norm_bound", 1.05));
        }
    }
    {
        const double lam = or_default(r.lambdas, {1.0}).front();
        const GridPtr grid = RadialGrid::from_config(r.grid);
        const SampledFunction f = make_test_corpus(lam, 2, r.seed, grid)[1].f;
        const TimeGridPtr tg = TimeGrid::make(1e-6, 1e6, 800);
        std::vector<cplx> h(tg->size());
        for (std::size_t j = 0; j < h.size(); ++j) {
            const double l = std::log(tg->t(j));
            h[j] = std::exp(-l * l / 8.0);
        }
        const PairingIdentity P =
            transfer_pairing(f, 0.5, 0.5, tg, h, RadialGrid::from_breaks({0.25, 0.5, 1.0, 2.0, 4.0}, 4));
        rows.add({{"lambda", lam}, {"omega", 0.5}, {"beta", 0.5}, {"check", "pairing_identity"}}, P.residual, 0.0,
                 P.residual, r.tol("pairing", 1e-3));
    }
}

void run_kernel_difference(const ExperimentRecipe& r, Rows& rows) {
    const auto L = log_lattice(0.1, 10.0, 12);
    for (double lam : or_default(r.lambdas, {1.0, 2.3})) {
        double sup[2];
        for (int level = 0; level < 2; ++level) {
            GridPtr grid = RadialGrid::from_config(r.grid);
            TimeGridPtr tg = TimeGrid::from_config(r.grid);
            if (level) {
                grid = grid->refined();
                tg = tg->refined();
            }
            const SampledFunction psi = zero_moment_wavelet(grid, lam);
            const PhiTable Phi(psi);
            double s = 0.0;
            for (double x : L)
                for (double y : L) s = std::max(s, kernel_difference_probe(psi, Phi, x, y, *tg).ratio);
            sup[level] = s;
        }
        const double move = std::abs(sup[1] - sup[0]) / sup[0];
        rows.add({{"lambda", lam}, {"lattice", "12x12 log [0.1,10]"}, {"coarse", sup[0]}, {"refined", sup[1]}},
                 sup[1], sup[0], std::isfinite(move) ? move : kInf, r.tol("refinement", 0.15));
    }
}

// ------------------------------------------------------------ logged probes

void run_polarization_prefactors(const ExperimentRecipe& r, Rows& rows) {
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const double lam = or_default(r.lambdas, {1.0}).front();
    auto corp = make_test_corpus(lam, 3, r.seed, grid);
    const TimeGridPtr tg = TimeGrid::make(1e-7, r.grid.t_max, 200);
    for (double beta : or_default(r.betas, {0.5, 1.0, 1.5})) {
        const PrefactorResiduals l = polarization_prefactor_residuals(corp[1].f, corp[2].f, beta, tg);
        rows.add({{"lambda", lam}, {"beta", beta}, {"form", "stated"}}, l.stated, 0.0, l.stated, kInf);
        rows.add({{"lambda", lam}, {"beta", beta}, {"form", "proof_line"}}, l.proof_line, 0.0, l.proof_line, kInf);
    }
}

void run_growth_envelope(const ExperimentRecipe& r, Rows& rows) {
    const double lam = or_default(r.lambdas, {1.5}).front();
    const GridPtr grid = RadialGrid::from_config(r.grid);
    const std::vector<double> omegas = {0.5, 1.0, 2.0, 3.0, 4.0};
    struct Case {
        double p;
        std::string space;
    };
    const std::vector<Case> cases = {{2.0, "l2:4"}, {2.0, "lq:8:4"}, {4.0, "R"}};
    for (const auto& c : cases) {
        const FiniteBanachSpace sp = parse_space(c.space);
        std::vector<SampledFunction> fs;
        stacked_corpus(lam, 4 * sp.dim(), r.seed, grid, &fs);
        std::vector<SampledFunction> corpus;
        for (int k = 0; k < 4; ++k)
            corpus.push_back(SampledFunction::stack(
                std::vector<SampledFunction>(fs.begin() + k * sp.dim(), fs.begin() + (k + 1) * sp.dim())));
        const GrowthProbe g = norm_growth_probe(corpus, c.p, sp, omegas, grid->extended(4000.0, 16));
        double dev = 0.0;
        for (double q : g.ratios) dev = std::max(dev, std::abs(q - 1.0));
        json pj = {{"lambda", lam}, {"p", c.p}, {"space", sp.describe()}, {"ratios", g.ratios},
                   {"exponent", g.exponent}, {"envelope", g.envelope}};
        if (sp.kind() == FiniteBanachSpace::Kind::Hilbert && c.p == 2.0)
            rows.add(pj, g.ratios.front(), 1.0, dev, r.tol("hilbert_l2", 1e-3));
        else if (c.p == 2.0)
            rows.add(pj, g.ratios.front(), 1.0, dev, kInf);
        else
            rows.add(pj, g.exponent, g.envelope, g.exponent - (g.envelope + 0.2), 0.0);
    }
}

void run_classical_frac_probe(const ExperimentRecipe& r, Rows& rows) {
    const auto L = log_lattice(0.1, 10.0, 12);
    const TimeGridPtr tg = TimeGrid::make(r.grid.t_min, r.grid.t_max, 120);
    for (double beta : or_default(r.betas, {0.5, 1.0, 1.5})) {
        const double a = classical_frac_probe(beta, L, *tg);
        const double b = classical_frac_probe(beta, refine_lattice(L), *tg->refined());
        rows.add({{"beta", beta}, {"coarse", a}, {"refined", b}}, b, a, std::abs(b - a) / a, kInf);
    }
}

using Runner = std::function<void(const ExperimentRecipe&, Rows&)>;

struct Entry {
    RecipeInfo info;
    Runner run;
    std::vector<double> lambdas, betas, ps;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> reg = {
        {{"hankel-isometry", "transform", true, 1, "h_lambda isometry and involution over the corpus"},
         run_hankel_isometry, {0.5, 1.0, 2.3}, {}, {}},
        {{"interchange", "transform", true, 2, "h(f # g) = x^-lambda h(f) h(g) on corpus pairs"},
         run_interchange, {0.5, 1.0, 2.3}, {}, {}},
        {{"poisson-identity", "semigroup", true, 3, "Poisson kernel path, closed form and subordination"},
         run_poisson_identity, {0.5, 1.0, 2.3}, {}, {}},
        {{"frac-two-path", "gfunction", true, 4, "Segovia-Wheeden kernel path against the spectral symbol"},
         run_frac_two_path, {0.5, 1.0, 2.3}, {0.5, 1.0, 1.5}, {}},
        {{"mixed-norm-constant", "gfunction", true, 5, "||G f||^2 / ||f||^2 = Gamma(2 beta) 2^(-2 beta)"},
         run_mixed_norm_constant, {1.0}, {0.5, 1.0, 1.5}, {}},
        {{"norm-equivalence", "gfunction", true, 6, "L^p(H) windows for G^(lambda,1) and the wavelet transform"},
         run_norm_equivalence, {1.0}, {1.0}, {1.5, 4.0}},
        {{"cauchy-riemann", "semigroup", true, 7, "Cauchy-Riemann equations and the Riesz factorizations"},
         run_cauchy_riemann, {1.0}, {}, {}},
        {{"gamma-estimator", "gfunction", true, 8, "Monte Carlo gamma-norm against closed forms"},
         run_gamma_estimator, {1.0}, {}, {}},
        {{"imaginary-powers", "multiplier", true, 9, "Delta^(i omega): identity, L^2 norm, group law, kernels"},
         run_imaginary_powers, {1.5}, {}, {}},
        {{"mellin-representation", "multiplier", true, 10, "Mellin representation of m(Delta)"}, run_mellin,
         {1.0}, {}, {}},
        {{"transfer-operator", "multiplier", true, 11, "T_(omega,beta): running average, bound, pairing"},
         run_transfer, {1.0}, {}, {}},
        {{"kernel-difference-probe", "probe", true, 12, "sup ||K(., x, y)||_H max(x, y) under refinement"},
         run_kernel_difference, {1.0, 2.3}, {}, {}},
        {{"polarization-prefactors", "probe", false, 0, "residuals of the two signed polarization prefactors (logged)"},
         run_polarization_prefactors, {1.0}, {0.5, 1.0, 1.5}, {}},
        {{"growth-envelope", "multiplier", false, 0, "||Delta^(i omega)||_p growth against the envelope"},
         run_growth_envelope, {1.5}, {}, {2.0, 4.0}},
        {{"classical-frac-probe", "probe", false, 0, "classical fractional Poisson kernel H-norm probe (logged)"},
         run_classical_frac_probe, {}, {0.5, 1.0, 1.5}, {}},
    };
    return reg;
}

const Entry& entry(const std::string& id) {
    for (const auto& e : registry())
        if (e.info.id == id) return e;
    throw std::invalid_argument("unknown recipe: " + id);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (item.find_first_not_of(" \t") != std::string::npos) v.push_back(std::stod(item));
    return v;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

double ExperimentRecipe::tol(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

const std::vector<RecipeInfo>& list_recipes() {
    static const std::vector<RecipeInfo> infos = [] {
        std::vector<RecipeInfo> v;
        for (const auto& e : registry()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

ExperimentRecipe builtin_recipe(const std::string& id) {
    const Entry& e = entry(id);
    ExperimentRecipe r;
    r.id = id;
    r.lambdas = e.lambdas;
    r.betas = e.betas;
    r.ps = e.ps;
    return r;
}

FiniteBanachSpace parse_space(const std::string& s) {
    if (s == "R" || s == "r") return FiniteBanachSpace::scalar();
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 2 && parts[0] == "l2") return FiniteBanachSpace::hilbert(std::stoi(parts[1]));
    if (parts.size() == 3 && parts[0] == "lq") {
        const double q = parts[2] == "inf" ? kInf : std::stod(parts[2]);
        return FiniteBanachSpace::ellq(std::stoi(parts[1]), q);
    }
    throw std::invalid_argument("unrecognized space descriptor: " + s);
}

std::vector<std::string> validate(const ExperimentRecipe& r) {
    std::vector<std::string> d;
    bool known = false;
    for (const auto& e : registry()) known = known || e.info.id == r.id;
    if (!known) d.push_back("unknown recipe id '" + r.id + "'");
    for (double l : r.lambdas)
        if (!(l > 0.0) || !std::isfinite(l)) d.push_back("lambda must be positive: " + fmt(l));
    for (double b : r.betas)
        if (!(b > 0.0) || !std::isfinite(b)) d.push_back("beta must be positive: " + fmt(b));
    for (double p : r.ps)
        if (!(p > 1.0) || !std::isfinite(p)) d.push_back("p must lie in (1, inf): " + fmt(p));
    try {
        parse_space(r.space);
    } catch (const std::exception& e) {
        d.push_back(e.what());
    }
    const GridConfig& g = r.grid;
    if (!(g.x_min > 0.0) || !(g.x_max > g.x_min)) d.push_back("grid needs 0 < x_min < x_max");
    if (g.panels < 1 || g.nodes_per_panel < 2 || g.nodes_per_panel > 64) d.push_back("grid panel counts out of range");
    if (!(g.t_min > 0.0) || !(g.t_max > g.t_min) || g.t_nodes < 6) d.push_back("time grid out of range");
    if (r.corpus_count < 1) d.push_back("corpus_count must be at least 1");
    for (const auto& [k, v] : r.tolerances)
        if (!(v >= 0.0)) d.push_back("tolerance '" + k + "' must be nonnegative");
    return d;
}

std::vector<ReportRow> run_recipe(const ExperimentRecipe& r) {
    Rows rows(r.id);
    const auto diag = validate(r);
    if (!diag.empty()) {
        std::string msg = "invalid recipe:";
        for (const auto& s : diag) msg += " " + s + ";";
        rows.fail(json::object(), msg);
        return rows.rows();
    }
    try {
        entry(r.id).run(r, rows);
    } catch (const std::exception& e) {
        rows.fail(json::object(), std::string("error: ") + e.what());
    }
    return rows.rows();
}

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(n) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config(ExperimentRecipe& r, const std::map<std::string, std::string>& kv) {
    std::map<std::string, std::string> grid_kv = parse_config(r.grid.to_config_block());
    for (const auto& [k, v] : kv) {
        if (k == "lambdas") r.lambdas = parse_list(v);
        else if (k == "betas") r.betas = parse_list(v);
        else if (k == "ps") r.ps = parse_list(v);
        else if (k == "space") r.space = v;
        else if (k == "seed") r.seed = std::stoull(v);
        else if (k == "corpus_count") r.corpus_count = std::stoi(v);
        else if (k.rfind("tol.", 0) == 0) r.tolerances[k.substr(4)] = std::stod(v);
        else if (grid_kv.count(k)) grid_kv[k] = v;
    }
    r.grid = GridConfig::from_map(grid_kv);
}

std::string report_csv(const std::vector<ReportRow>& rows, bool timing) {
    std::string s = "experiment_id,param_json,value,oracle,residual,pass,runtime_s\n";
    for (const auto& r : rows) {
        s += csv_quote(r.experiment_id) + "," + csv_quote(r.param_json) + "," + fmt(r.value) + "," + fmt(r.oracle) +
             "," + fmt(r.residual) + "," + (r.pass ? "true" : "false") + "," + (timing ? fmt(r.runtime_s) : "0") + "\n";
    }
    return s;
}

std::string report_metadata_json(const std::vector<ExperimentRecipe>& recipes, const std::vector<ReportRow>& rows) {
    json m;
    m["tool"] = "besselharm";
    m["version"] = "1.0.0";
    m["compiler"] = __VERSION__;
    m["recipes"] = json::array();
    for (const auto& r : recipes) {
        json g = {{"x_min", r.grid.x_min},   {"x_max", r.grid.x_max}, {"panels", r.grid.panels},
                  {"nodes_per_panel", r.grid.nodes_per_panel},        {"t_min", r.grid.t_min},
                  {"t_max", r.grid.t_max},   {"t_nodes", r.grid.t_nodes}};
        m["recipes"].push_back({{"id", r.id},
                                {"lambdas", r.lambdas},
                                {"betas", r.betas},
                                {"ps", r.ps},
                                {"space", r.space},
                                {"seed", r.seed},
                                {"corpus_count", r.corpus_count},
                                {"tolerances", r.tolerances},
                                {"grid", g}});
    }
    int failed = 0;
    json reasons = json::array();
    for (const auto& r : rows) {
        if (!r.pass) {
            ++failed;
            reasons.push_back({{"experiment_id", r.experiment_id}, {"param_json", r.param_json}, {"reason", r.reason}});
        }
    }
    m["rows"] = rows.size();
    m["failed"] = failed;
    m["failures"] = reasons;
    return m.dump(2);
}

}  // namespace bh
