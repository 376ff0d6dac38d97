#include "besselharm/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bh {

namespace {

std::uint64_t next_grid_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

std::vector<double> log_breaks(double a, double b, int n) {
    std::vector<double> br(n + 1);
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i <= n; ++i) br[i] = std::exp(la + (lb - la) * i / n);
    br.front() = a;
    br.back() = b;
    return br;
}

}  // namespace

std::string GridConfig::to_config_block() const {
    std::ostringstream os;
    os.precision(17);
    os << "x_min = " << x_min << "\n"
       << "x_max = " << x_max << "\n"
       << "panels = " << panels << "\n"
       << "nodes_per_panel = " << nodes_per_panel << "\n"
       << "t_min = " << t_min << "\n"
       << "t_max = " << t_max << "\n"
       << "t_nodes = " << t_nodes << "\n";
    return os.str();
}

GridConfig GridConfig::from_map(const std::map<std::string, std::string>& kv) {
    GridConfig c;
    auto num = [&](const char* key, double& out) {
        auto it = kv.find(key);
        if (it != kv.end()) out = std::stod(it->second);
    };
    auto inum = [&](const char* key, int& out) {
        auto it = kv.find(key);
        if (it != kv.end()) out = std::stoi(it->second);
    };
    num("x_min", c.x_min);
    num("x_max", c.x_max);
    inum("panels", c.panels);
    inum("nodes_per_panel", c.nodes_per_panel);
    num("t_min", c.t_min);
    num("t_max", c.t_max);
    inum("t_nodes", c.t_nodes);
    return c;
}

// ---------------------------------------------------------------- RadialGrid

GridPtr RadialGrid::from_breaks(std::vector<double> breaks, int npp) {
    if (breaks.size() < 2) throw std::invalid_argument("RadialGrid: need at least one panel");
    if (npp < 2 || npp > 64) throw std::invalid_argument("RadialGrid: nodes per panel must be in [2,64]");
    if (!(breaks.front() > 0.0)) throw std::invalid_argument("RadialGrid: x_min must be positive");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1])) throw std::invalid_argument("RadialGrid: breakpoints must increase");
    auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
    g->breaks_ = std::move(breaks);
    g->npp_ = npp;
    g->id_ = next_grid_id();
    const QuadRule& r = gl_rule(npp);
    const int P = g->panels();
    g->x_.reserve(static_cast<std::size_t>(P) * npp);
    g->w_.reserve(static_cast<std::size_t>(P) * npp);
    for (int p = 0; p < P; ++p) {
        double a = g->breaks_[p], b = g->breaks_[p + 1];
        double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int k = 0; k < npp; ++k) {
            g->x_.push_back(c + h * r.x[k]);
            g->w_.push_back(h * r.w[k]);
        }
    }
    return g;
}

GridPtr RadialGrid::log_panels(double x_min, double x_max, int panels, int npp, bool break_at_one) {
    if (!(x_min > 0.0) || !(x_max > x_min)) throw std::invalid_argument("RadialGrid: need 0 < x_min < x_max");
    if (panels < 1) throw std::invalid_argument("RadialGrid: panels must be positive");
    if (break_at_one && x_min < 1.0 && x_max > 1.0 && panels >= 2) {
        double l1 = -std::log(x_min), l2 = std::log(x_max);
        int p1 = static_cast<int>(std::lround(panels * l1 / (l1 + l2)));
        p1 = std::clamp(p1, 1, panels - 1);
        auto lo = log_breaks(x_min, 1.0, p1);
        auto hi = log_breaks(1.0, x_max, panels - p1);
        lo.insert(lo.end(), hi.begin() + 1, hi.end());
        return from_breaks(std::move(lo), npp);
    }
    return from_breaks(log_breaks(x_min, x_max, panels), npp);
}

GridPtr RadialGrid::from_config(const GridConfig& cfg) {
    return log_panels(cfg.x_min, cfg.x_max, cfg.panels, cfg.nodes_per_panel);
}

int RadialGrid::panel_of(double x) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    int p = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(p, 0, panels() - 1);
}

GridPtr RadialGrid::refined() const {
    std::vector<double> br;
    br.reserve(2 * breaks_.size());
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        br.push_back(breaks_[i]);
        br.push_back(std::sqrt(breaks_[i] * breaks_[i + 1]));
    }
    br.push_back(breaks_.back());
    return from_breaks(std::move(br), npp_);
}

GridPtr RadialGrid::extended(double new_x_max, int extra_panels) const {
    if (!(new_x_max > x_max())) throw std::invalid_argument("RadialGrid::extended: new x_max must exceed x_max");
    auto br = breaks_;
    auto tail = log_breaks(x_max(), new_x_max, extra_panels);
    br.insert(br.end(), tail.begin() + 1, tail.end());
    return from_breaks(std::move(br), npp_);
}

// ------------------------------------------------------------------ TimeGrid

TimeGridPtr TimeGrid::make(double t_min, double t_max, int n) {
    if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("TimeGrid: need 0 < t_min < t_max");
    if (n < 1) throw std::invalid_argument("TimeGrid: need at least one node");
    auto g = std::shared_ptr<TimeGrid>(new TimeGrid());
    g->t_min_ = t_min;
    g->t_max_ = t_max;
    g->u0_ = std::log(t_min);
    g->du_ = (std::log(t_max) - g->u0_) / n;
    g->id_ = next_grid_id();
    g->t_.resize(n);
    for (int j = 0; j < n; ++j) g->t_[j] = std::exp(g->u0_ + (j + 0.5) * g->du_);
    return g;
}

TimeGridPtr TimeGrid::from_config(const GridConfig& cfg) { return make(cfg.t_min, cfg.t_max, cfg.t_nodes); }

TimeGridPtr TimeGrid::refined() const { return make(t_min_, t_max_, 2 * static_cast<int>(t_.size())); }

// --------------------------------------------------------- FiniteBanachSpace

FiniteBanachSpace FiniteBanachSpace::ellq(int n, double q) {
    if (n < 1) throw std::invalid_argument("FiniteBanachSpace: dimension must be positive");
    if (!(q >= 1.0)) throw std::invalid_argument("FiniteBanachSpace: q must be >= 1");
    FiniteBanachSpace s;
    s.kind_ = Kind::EllQ;
    s.n_ = n;
    s.q_ = q;
    return s;
}

FiniteBanachSpace FiniteBanachSpace::hilbert(int n) {
    if (n < 1) throw std::invalid_argument("FiniteBanachSpace: dimension must be positive");
    FiniteBanachSpace s;
    s.kind_ = Kind::Hilbert;
    s.n_ = n;
    s.q_ = 2.0;
    return s;
}

double FiniteBanachSpace::norm(const double* re, const double* im) const {
    auto mod = [&](int i) { return im ? std::hypot(re[i], im[i]) : std::abs(re[i]); };
    if (n_ == 1) return mod(0);
    if (kind_ == Kind::EllQ && std::isinf(q_)) {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) m = std::max(m, mod(i));
        return m;
    }
    const double q = kind_ == Kind::Hilbert ? 2.0 : q_;
    double scale = 0.0;
    for (int i = 0; i < n_; ++i) scale = std::max(scale, mod(i));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::pow(mod(i) / scale, q);
    return scale * std::pow(s, 1.0 / q);
}

std::string FiniteBanachSpace::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::Hilbert) os << "hilbert(" << n_ << ")";
    else os << "ell^" << q_ << "(" << n_ << ")";
    return os.str();
}

// ----------------------------------------------------------- SampledFunction

SampledFunction::SampledFunction(GridPtr grid, double lambda, int dim, bool complex)
    : grid_(std::move(grid)), lambda_(lambda), dim_(dim), complex_(complex) {
    if (!grid_) throw std::invalid_argument("SampledFunction: null grid");
    if (!(lambda > 0.0)) throw std::invalid_argument("SampledFunction: lambda must be positive");
    if (dim < 1) throw std::invalid_argument("SampledFunction: dimension must be positive");
    v_.assign(grid_->size() * ncomp(), 0.0);
}

SampledFunction SampledFunction::from_function(GridPtr grid, double lambda, const std::function<double(double)>& f) {
    SampledFunction s(std::move(grid), lambda);
    for (std::size_t i = 0; i < s.size(); ++i) s.v_[i] = f(s.grid_->x(i));
    return s;
}

SampledFunction SampledFunction::from_vector_function(GridPtr grid, double lambda, int dim,
                                                      const std::function<void(double, double*)>& f) {
    SampledFunction s(std::move(grid), lambda, dim);
    for (std::size_t i = 0; i < s.size(); ++i) f(s.grid_->x(i), &s.v_[i * dim]);
    return s;
}

const SampledFunction::Cache& SampledFunction::cache() const {
    std::lock_guard<std::mutex> lock(*cache_mu_);
    if (cache_) return *cache_;
    auto c = std::make_shared<Cache>();
    const int npp = grid_->nodes_per_panel();
    const int P = grid_->panels();
    const int nc = ncomp();
    const auto& lp = LegendrePanel::get(npp);
    const auto& C = lp.coeff_matrix();
    c->coef.assign(static_cast<std::size_t>(P) * npp * nc, 0.0);
    for (int p = 0; p < P; ++p) {
        const double* vals = &v_[static_cast<std::size_t>(p) * npp * nc];
        double* out = &c->coef[static_cast<std::size_t>(p) * npp * nc];
        for (int k = 0; k < npp; ++k)
            for (int j = 0; j < npp; ++j) {
                double ckj = C[k * npp + j];
                for (int q = 0; q < nc; ++q) out[k * nc + q] += ckj * vals[j * nc + q];
            }
    }
    c->lo_val.resize(nc);
    c->lo_pow.resize(nc);
    c->hi_val.resize(nc);
    c->hi_pow.resize(nc);
    std::vector<double> Pm(npp), Pp(npp);
    lp.legendre(-1.0, Pm.data());
    lp.legendre(1.0, Pp.data());
    const std::size_t first_last = npp - 1;
    const std::size_t last0 = static_cast<std::size_t>(P - 1) * npp;
    const std::size_t last1 = last0 + npp - 1;
    for (int q = 0; q < nc; ++q) {
        double lo = 0.0, hi = 0.0;
        for (int k = 0; k < npp; ++k) {
            lo += c->coef[k * nc + q] * Pm[k];
            hi += c->coef[(static_cast<std::size_t>(P - 1) * npp + k) * nc + q] * Pp[k];
        }
        c->lo_val[q] = lo;
        c->hi_val[q] = hi;
        double a = v_[q], b = v_[first_last * nc + q];
        double p = lambda_;
        if (a != 0.0 && b != 0.0 && (a > 0) == (b > 0))
            p = std::log(b / a) / std::log(grid_->x(first_last) / grid_->x(0));
        c->lo_pow[q] = std::clamp(p, -0.9, 60.0);
        a = v_[last0 * nc + q];
        b = v_[last1 * nc + q];
        double hp = 0.0;
        if (a != 0.0 && b != 0.0 && (a > 0) == (b > 0))
            hp = std::log(b / a) / std::log(grid_->x(last1) / grid_->x(last0));
        c->hi_pow[q] = hp < -0.5 ? hp : std::numeric_limits<double>::quiet_NaN();
    }
    cache_ = c;
    return *cache_;
}

void SampledFunction::eval(double x, double* out) const {
    const Cache& c = cache();
    const int nc = ncomp();
    if (x < grid_->x_min()) {
        double r = x / grid_->x_min();
        for (int q = 0; q < nc; ++q) out[q] = c.lo_val[q] * std::pow(r, c.lo_pow[q]);
        return;
    }
    if (x > grid_->x_max()) {
        double r = x / grid_->x_max();
        for (int q = 0; q < nc; ++q)
            out[q] = std::isnan(c.hi_pow[q]) ? 0.0 : c.hi_val[q] * std::pow(r, c.hi_pow[q]);
        return;
    }
    const int npp = grid_->nodes_per_panel();
    int p = grid_->panel_of(x);
    double a = grid_->breaks()[p], b = grid_->breaks()[p + 1];
    double s = std::clamp((2.0 * x - a - b) / (b - a), -1.0, 1.0);
    double P[64];
    LegendrePanel::get(npp).legendre(s, P);
    const double* cf = &c.coef[static_cast<std::size_t>(p) * npp * nc];
    for (int q = 0; q < nc; ++q) out[q] = 0.0;
    for (int k = 0; k < npp; ++k)
        for (int q = 0; q < nc; ++q) out[q] += cf[k * nc + q] * P[k];
}

double SampledFunction::eval(double x, int c) const {
    std::vector<double> tmp(ncomp());
    eval(x, tmp.data());
    return tmp[c];
}

SampledFunction SampledFunction::coordinate(int c) const {
    SampledFunction s(grid_, lambda_, 1, complex_);
    for (std::size_t i = 0; i < size(); ++i) {
        s.v_[i * s.ncomp()] = re(i, c);
        if (complex_) s.v_[i * 2 + 1] = im(i, c);
    }
    return s;
}

SampledFunction SampledFunction::real_part() const {
    SampledFunction s(grid_, lambda_, dim_, false);
    for (std::size_t i = 0; i < size(); ++i)
        for (int c = 0; c < dim_; ++c) s.v_[i * dim_ + c] = re(i, c);
    return s;
}

SampledFunction SampledFunction::imag_part() const {
    SampledFunction s(grid_, lambda_, dim_, false);
    for (std::size_t i = 0; i < size(); ++i)
        for (int c = 0; c < dim_; ++c) s.v_[i * dim_ + c] = im(i, c);
    return s;
}

SampledFunction SampledFunction::as_complex() const {
    if (complex_) return *this;
    SampledFunction s(grid_, lambda_, dim_, true);
    for (std::size_t i = 0; i < size(); ++i)
        for (int c = 0; c < dim_; ++c) s.v_[i * 2 * dim_ + c] = v_[i * dim_ + c];
    s.warnings_ = warnings_;
    return s;
}

SampledFunction SampledFunction::with_lambda(double lambda) const {
    SampledFunction s = *this;
    if (!(lambda > 0.0)) throw std::invalid_argument("SampledFunction: lambda must be positive");
    s.lambda_ = lambda;
    s.cache_.reset();
    s.cache_mu_ = std::make_shared<std::mutex>();
    return s;
}

SampledFunction SampledFunction::stack(const std::vector<SampledFunction>& fs) {
    if (fs.empty()) throw std::invalid_argument("stack: empty list");
    bool cx = false;
    for (const auto& f : fs) {
        if (f.grid_ != fs[0].grid_) throw std::invalid_argument("stack: grids differ");
        if (f.dim_ != 1) throw std::invalid_argument("stack: scalar inputs required");
        cx = cx || f.complex_;
    }
    const int n = static_cast<int>(fs.size());
    SampledFunction s(fs[0].grid_, fs[0].lambda_, n, cx);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (int c = 0; c < n; ++c) {
            s.v_[i * s.ncomp() + c] = fs[c].re(i);
            if (cx) s.v_[i * s.ncomp() + n + c] = fs[c].im(i);
        }
    return s;
}

SampledFunction SampledFunction::scaled(double a) const {
    SampledFunction s = *this;
    s.cache_.reset();
    s.cache_mu_ = std::make_shared<std::mutex>();
    for (auto& v : s.v_) v *= a;
    return s;
}

SampledFunction SampledFunction::operator+(const SampledFunction& o) const {
    if (o.grid_ != grid_ || o.dim_ != dim_) throw std::invalid_argument("SampledFunction: shape mismatch");
    SampledFunction a = complex_ || !o.complex_ ? *this : as_complex();
    SampledFunction b = o.complex_ == a.complex_ ? o : o.as_complex();
    a.cache_.reset();
    a.cache_mu_ = std::make_shared<std::mutex>();
    for (std::size_t i = 0; i < a.v_.size(); ++i) a.v_[i] += b.v_[i];
    return a;
}

SampledFunction SampledFunction::operator-(const SampledFunction& o) const { return *this + o.scaled(-1.0); }

// ----------------------------------------------------------------- TimeField

TimeField::TimeField(TimeGridPtr tg, GridPtr xg, int dim, bool complex)
    : tg_(std::move(tg)), xg_(std::move(xg)), dim_(dim), complex_(complex) {
    if (!tg_ || !xg_) throw std::invalid_argument("TimeField: null grid");
    v_.assign(tg_->size() * xg_->size() * ncomp(), 0.0);
}

std::vector<double> TimeField::profile(std::size_t i) const {
    const int nc = ncomp();
    std::vector<double> p(tg_->size() * nc);
    for (std::size_t j = 0; j < tg_->size(); ++j)
        for (int c = 0; c < nc; ++c) p[j * nc + c] = at(j, i, c);
    return p;
}

SampledFunction TimeField::slice(std::size_t j, double lambda) const {
    SampledFunction s(xg_, lambda, dim_, complex_);
    auto& d = s.mutable_data();
    const int nc = ncomp();
    for (std::size_t i = 0; i < xg_->size(); ++i)
        for (int c = 0; c < nc; ++c) d[i * nc + c] = at(j, i, c);
    return s;
}

// --------------------------------------------------------------------- norms

double lp_norm(const SampledFunction& f, double p, const FiniteBanachSpace& space) {
    if (space.dim() != f.dim()) throw std::invalid_argument("lp_norm: space dimension does not match function");
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm: p must be finite and >= 1");
    const auto& g = *f.grid();
    const int n = f.dim();
    std::vector<double> terms(f.size());
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int c = 0; c < n; ++c) {
            re[c] = f.re(i, c);
            im[c] = f.im(i, c);
        }
        double v = space.norm(re.data(), f.is_complex() ? im.data() : nullptr);
        terms[i] = g.w(i) * std::pow(v, p);
    }
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

double l2_norm(const SampledFunction& f) { return lp_norm(f, 2.0, FiniteBanachSpace::hilbert(f.dim())); }

double rel_l2_diff(const SampledFunction& f, const SampledFunction& g) {
    double ng = l2_norm(g);
    return l2_norm(f - g) / (ng > 0.0 ? ng : 1.0);
}

double h_norm(const TimeGrid& tg, std::span<const double> profile, int ncomp) {
    if (profile.empty()) throw std::invalid_argument("h_norm: empty profile");
    if (profile.size() != tg.size() * static_cast<std::size_t>(ncomp))
        throw std::invalid_argument("h_norm: profile length does not match time grid");
    std::vector<double> terms(tg.size());
    for (std::size_t j = 0; j < tg.size(); ++j) {
        double s = 0.0;
        for (int c = 0; c < ncomp; ++c) s += profile[j * ncomp + c] * profile[j * ncomp + c];
        terms[j] = tg.weight() * s;
    }
    return std::sqrt(pairwise_sum(terms));
}

double lp_h_norm(const TimeField& field, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_h_norm: p must be finite and >= 1");
    const auto& xg = *field.xgrid();
    std::vector<double> terms(xg.size());
    for (std::size_t i = 0; i < xg.size(); ++i) {
        auto pr = field.profile(i);
        terms[i] = xg.w(i) * std::pow(h_norm(*field.tgrid(), pr, field.ncomp()), p);
    }
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

double l2_h_norm_sq(const TimeField& field) {
    const auto& xg = *field.xgrid();
    std::vector<double> terms(xg.size());
    for (std::size_t i = 0; i < xg.size(); ++i) {
        auto pr = field.profile(i);
        double h = h_norm(*field.tgrid(), pr, field.ncomp());
        terms[i] = xg.w(i) * h * h;
    }
    return pairwise_sum(terms);
}

// -------------------------------------------------------------------- Hardy

namespace {

void require_scalar(const SampledFunction& f, const char* who) {
    if (f.dim() != 1 || f.is_complex())
        throw std::invalid_argument(std::string(who) + ": scalar real input required");
}

// Cumulative integrals from each panel's left end to its nodes, plus panel totals.
void panel_cumulative(const RadialGrid& g, const std::vector<double>& vals, std::vector<double>& cum,
                      std::vector<double>& totals) {
    const int npp = g.nodes_per_panel();
    const int P = g.panels();
    const auto& I = LegendrePanel::get(npp).cumint_matrix();
    const auto& r = gl_rule(npp);
    cum.assign(g.size(), 0.0);
    totals.assign(P, 0.0);
    for (int p = 0; p < P; ++p) {
        double h = 0.5 * (g.breaks()[p + 1] - g.breaks()[p]);
        const double* v = &vals[static_cast<std::size_t>(p) * npp];
        for (int i = 0; i < npp; ++i) {
            double s = 0.0;
            for (int j = 0; j < npp; ++j) s += I[i * npp + j] * v[j];
            cum[static_cast<std::size_t>(p) * npp + i] = h * s;
        }
        double t = 0.0;
        for (int j = 0; j < npp; ++j) t += r.w[j] * v[j];
        totals[p] = h * t;
    }
}

}  // namespace

SampledFunction hardy_H0(const SampledFunction& f) {
    require_scalar(f, "hardy_H0");
    const auto& g = *f.grid();
    const int npp = g.nodes_per_panel();
    std::vector<double> vals(f.data().begin(), f.data().end()), cum, tot;
    panel_cumulative(g, vals, cum, tot);
    // [0, x_min] from the fitted power law f(x) ~ f(x_min) (x/x_min)^p
    double below = 0.0;
    {
        double a = vals[0], b = vals[npp - 1];
        double p = f.lambda();
        if (a != 0.0 && b != 0.0 && (a > 0) == (b > 0)) p = std::log(b / a) / std::log(g.x(npp - 1) / g.x(0));
        p = std::clamp(p, -0.9, 60.0);
        below = f.eval(g.x_min()) * g.x_min() / (p + 1.0);
    }
    SampledFunction out(f.grid(), f.lambda());
    auto& d = out.mutable_data();
    double acc = below;
    for (int p = 0; p < g.panels(); ++p) {
        for (int i = 0; i < npp; ++i) {
            std::size_t k = static_cast<std::size_t>(p) * npp + i;
            d[k] = (acc + cum[k]) / g.x(k);
        }
        acc += tot[p];
    }
    return out;
}

SampledFunction hardy_Hinf(const SampledFunction& f) {
    require_scalar(f, "hardy_Hinf");
    const auto& g = *f.grid();
    const int npp = g.nodes_per_panel();
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) vals[i] = f.at(i) / g.x(i);
    std::vector<double> cum, tot;
    panel_cumulative(g, vals, cum, tot);
    // tail beyond x_max from the fitted decay f ~ f(x_max) (x/x_max)^q, q < 0
    double tail = 0.0;
    {
        std::size_t l0 = g.size() - npp, l1 = g.size() - 1;
        double a = f.at(l0), b = f.at(l1);
        if (a != 0.0 && b != 0.0 && (a > 0) == (b > 0)) {
            double q = std::log(b / a) / std::log(g.x(l1) / g.x(l0));
            if (q < -0.5) tail = f.eval(g.x_max()) / (-q);
        }
    }
    SampledFunction out(f.grid(), f.lambda());
    auto& d = out.mutable_data();
    double acc = tail;
    for (int p = g.panels() - 1; p >= 0; --p) {
        for (int i = 0; i < npp; ++i) {
            std::size_t k = static_cast<std::size_t>(p) * npp + i;
            d[k] = acc + (tot[p] - cum[k]);
        }
        acc += tot[p];
    }
    return out;
}

// -------------------------------------------------------------------- corpus

double CorpusMember::exact(double x) const {
    double u = x * x, s = 0.0;
    for (std::size_t k = q.size(); k-- > 0;) s = s * u + q[k];
    return std::pow(x, lambda) * s * std::exp(-0.5 * u);
}

std::vector<CorpusMember> make_test_corpus(double lambda, int count, std::uint64_t seed, GridPtr grid) {
    if (count < 1) throw std::invalid_argument("make_test_corpus: count must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("make_test_corpus: lambda must be positive");
    std::mt19937_64 gen(seed);
    auto unif = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<CorpusMember> out;
    out.reserve(count);
    for (int m = 0; m < count; ++m) {
        CorpusMember c;
        c.lambda = lambda;
        if (m == 0) {
            c.q = {1.0};
        } else {
            int deg = 1 + static_cast<int>(gen() % 6);
            double fact = 1.0;
            c.q.resize(deg + 1);
            for (int k = 0; k <= deg; ++k) {
                if (k > 0) fact *= 2.0 * k;
                c.q[k] = (2.0 * unif() - 1.0) / fact;
            }
        }
        c.f = SampledFunction::from_function(grid, lambda, [&c](double x) { return c.exact(x); });
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CorpusMember> make_test_corpus(double lambda, int count, std::uint64_t seed) {
    return make_test_corpus(lambda, count, seed, RadialGrid::from_config(GridConfig{}));
}

// ----------------------------------------------------------------- seminorm

namespace {

double eta_pass(const SampledFunction& f, int m, int k, double h) {
    const auto& g = *f.grid();
    const double lam = f.lambda();
    const double umin = g.x_min() * g.x_min();
    auto phi = [&](double u) {
        double x = std::sqrt(u);
        return f.eval(x) / std::pow(x, lam);
    };
    std::vector<double> binom(k + 1, 1.0);
    for (int j = 1; j <= k; ++j) binom[j] = binom[j - 1] * (k - j + 1) / j;
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.x(i), u = x * x;
        double d;
        if (k == 0) {
            d = f.at(i) / std::pow(x, lam);
        } else {
            double us = std::max(u - 0.5 * k * h, umin);
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += ((k - j) % 2 ? -1.0 : 1.0) * binom[j] * phi(us + j * h);
            d = std::pow(2.0 / h, k) * s;
        }
        double v = std::pow(x, m) * std::abs(d);
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        sup = std::max(sup, v);
    }
    return sup;
}

}  // namespace

SeminormResult seminorm_eta(const SampledFunction& f, int m, int k, double h, double rtol) {
    require_scalar(f, "seminorm_eta");
    if (m < 0 || k < 0) throw std::invalid_argument("seminorm_eta: m and k must be nonnegative");
    if (!(h > 0.0)) throw std::invalid_argument("seminorm_eta: step must be positive");
    SeminormResult r;
    r.value = eta_pass(f, m, k, h);
    r.coarse_value = k == 0 ? r.value : eta_pass(f, m, k, 2.0 * h);
    double scale = std::max(r.value, 1e-300);
    r.reliable = std::isfinite(r.value) && std::abs(r.value - r.coarse_value) <= rtol * scale;
    return r;
}

}  // namespace bh
