#include "besselharm/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bh {

namespace {

double psum_rec(const double* v, std::size_t n, std::size_t stride) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i * stride];
        return s;
    }
    std::size_t h = n / 2;
    return psum_rec(v, h, stride) + psum_rec(v + h * stride, n - h, stride);
}

cplx psum_rec(const cplx* v, std::size_t n) {
    if (n <= 16) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return psum_rec(v, h) + psum_rec(v + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return psum_rec(v.data(), v.size(), 1); }

double pairwise_sum_strided(const double* v, std::size_t n, std::size_t stride) {
    return psum_rec(v, n, stride);
}

cplx pairwise_sum(std::span<const cplx> v) { return psum_rec(v.data(), v.size()); }

QuadRule gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
    if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
    const double ab = a + b;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            diag(k) = (b - a) / (ab + 2.0);
        } else {
            double d = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
            diag(k) = (b * b - a * a) / d;
        }
    }
    for (int k = 1; k < n; ++k) {
        double bk;
        if (k == 1) {
            bk = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            double s = 2.0 * k + ab;
            bk = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        sub(k - 1) = std::sqrt(bk);
    }
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                          std::lgamma(ab + 2.0));
    if (n == 1) {
        r.x[0] = diag(0);
        r.w[0] = mu0;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    return r;
}

QuadRule gauss_legendre(int n) {
    QuadRule r = gauss_jacobi(n, 0.0, 0.0);
    // Newton polish against P_n; symmetrize.
    for (int i = 0; i < n; ++i) {
        double x = r.x[i];
        for (int it = 0; it < 3; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = n == 1 ? x : p1;
            double pm = n == 1 ? 1.0 : p0;
            double dp = n * (x * pn - pm) / (x * x - 1.0);
            x -= pn / dp;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double pn = n == 1 ? x : p1;
        double pm = n == 1 ? 1.0 : p0;
        double dp = n * (x * pn - pm) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    for (int i = 0; i < n / 2; ++i) {
        double xs = 0.5 * (r.x[n - 1 - i] - r.x[i]);
        double ws = 0.5 * (r.w[n - 1 - i] + r.w[i]);
        r.x[i] = -xs;
        r.x[n - 1 - i] = xs;
        r.w[i] = r.w[n - 1 - i] = ws;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

QuadRule gauss_jacobi_left(int n, double a) {
    // int_0^1 v^a g(v) dv = 2^{-a-1} int_{-1}^{1} (1+s)^a g((1+s)/2) ds
    QuadRule r = gauss_jacobi(n, 0.0, a);
    double scale = std::pow(2.0, -a - 1.0);
    for (int i = 0; i < n; ++i) {
        r.x[i] = 0.5 * (1.0 + r.x[i]);
        r.w[i] *= scale;
    }
    return r;
}

const QuadRule& gj_left_rule(int n, double a) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::unique_ptr<QuadRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, a}];
    if (!slot) slot = std::make_unique<QuadRule>(gauss_jacobi_left(n, a));
    return *slot;
}

const QuadRule& gl_rule(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadRule>(gauss_legendre(n));
    return *slot;
}

LegendrePanel::LegendrePanel(int n) : n_(n), rule_(gauss_legendre(n)) {
    const auto& x = rule_.x;
    const auto& w = rule_.w;
    C_.assign(n * n, 0.0);
    std::vector<double> P(n);
    for (int i = 0; i < n; ++i) {
        legendre(x[i], P.data());
        for (int k = 0; k < n; ++k) C_[k * n + i] = 0.5 * (2.0 * k + 1.0) * w[i] * P[k];
    }
    bary_.resize(n);
    for (int j = 0; j < n; ++j) {
        double p = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != j) p *= (x[j] - x[k]);
        bary_[j] = 1.0 / p;
    }
    D_.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double dij = (bary_[j] / bary_[i]) / (x[i] - x[j]);
            D_[i * n + j] = dij;
            diag -= dij;
        }
        D_[i * n + i] = diag;
    }
    // int_{-1}^{x_i} P_k = (P_{k+1}(x_i) - P_{k-1}(x_i)) / (2k+1), k >= 1
    std::vector<double> B(n * n);
    std::vector<double> Pn(n + 1);
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        Pn[0] = 1.0;
        if (n >= 1) Pn[1] = s;
        for (int k = 2; k <= n; ++k) Pn[k] = ((2.0 * k - 1.0) * s * Pn[k - 1] - (k - 1.0) * Pn[k - 2]) / k;
        B[i * n + 0] = s + 1.0;
        for (int k = 1; k < n; ++k) B[i * n + k] = (Pn[k + 1] - Pn[k - 1]) / (2.0 * k + 1.0);
    }
    I_.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += B[i * n + k] * C_[k * n + j];
            I_[i * n + j] = s;
        }
}

const LegendrePanel& LegendrePanel::get(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<LegendrePanel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<LegendrePanel>(n);
    return *slot;
}

void LegendrePanel::legendre(double s, double* out) const {
    out[0] = 1.0;
    if (n_ > 1) out[1] = s;
    for (int k = 2; k < n_; ++k) out[k] = ((2.0 * k - 1.0) * s * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

void LegendrePanel::lagrange(double s, double* out) const {
    const auto& x = rule_.x;
    double denom = 0.0;
    for (int j = 0; j < n_; ++j) {
        double d = s - x[j];
        if (d == 0.0) {
            std::fill(out, out + n_, 0.0);
            out[j] = 1.0;
            return;
        }
        out[j] = bary_[j] / d;
        denom += out[j];
    }
    for (int j = 0; j < n_; ++j) out[j] /= denom;
}

ThetaQuadrature::ThetaQuadrature(double lambda, int n)
    : lambda_(lambda),
      n_(n),
      full_(gauss_jacobi(2 * n, lambda - 1.0, lambda - 1.0)),
      head_(gauss_jacobi_left(n, lambda - 1.0)),
      gl_(gauss_legendre(n)) {}

const ThetaQuadrature& ThetaQuadrature::get(double lambda, int n) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::unique_ptr<ThetaQuadrature>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{lambda, n}];
    if (!slot) slot = std::make_unique<ThetaQuadrature>(lambda, n);
    return *slot;
}

void ThetaQuadrature::build(double r, std::vector<double>& u, std::vector<double>& w) const {
    u.clear();
    w.clear();
    const double a = lambda_ - 1.0;
    if (!(r < 0.5)) {
        for (std::size_t i = 0; i < full_.size(); ++i) {
            u.push_back(1.0 + full_.x[i]);
            w.push_back(full_.w[i]);
        }
        return;
    }
    r = std::max(r, 1e-300);
    // [0, r]: weight u^a exact, (2-u)^a smooth.
    double ra = std::pow(r, lambda_);
    for (std::size_t i = 0; i < head_.size(); ++i) {
        double uu = r * head_.x[i];
        u.push_back(uu);
        w.push_back(ra * head_.w[i] * (a == 0.0 ? 1.0 : std::pow(2.0 - uu, a)));
    }
    // geometric panels up to 1
    double lo = r;
    while (lo < 1.0) {
        double hi = 3.0 * lo;
        if (hi > 1.0 || 1.0 - hi < lo) hi = 1.0;
        double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gl_.size(); ++i) {
            double uu = c + h * gl_.x[i];
            u.push_back(uu);
            w.push_back(h * gl_.w[i] * (a == 0.0 ? 1.0 : std::pow(uu * (2.0 - uu), a)));
        }
        lo = hi;
    }
    // [1, 2]: weight (2-u)^a exact.
    for (std::size_t i = 0; i < head_.size(); ++i) {
        double uu = 2.0 - head_.x[i];
        u.push_back(uu);
        w.push_back(head_.w[i] * (a == 0.0 ? 1.0 : std::pow(uu, a)));
    }
}

Extrapolated richardson(const std::vector<double>& a, double q) {
    if (a.empty()) throw std::invalid_argument("richardson: empty sequence");
    std::vector<std::vector<double>> T(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        T[k].resize(k + 1);
        T[k][0] = a[k];
        for (std::size_t j = 1; j <= k; ++j) {
            double f = std::pow(q, -static_cast<double>(j)) - 1.0;
            T[k][j] = T[k][j - 1] + (T[k][j - 1] - T[k - 1][j - 1]) / f;
        }
    }
    std::size_t K = a.size() - 1;
    double v = T[K][K];
    double e = K >= 1 ? std::abs(T[K][K] - T[K - 1][K - 1]) : std::abs(v);
    return {v, e};
}

double uniform_interp(const double* f, std::size_t n, double x0, double dx, double x, int order,
                      double outside) {
    double pos = (x - x0) / dx;
    if (pos < -1e-12 || pos > static_cast<double>(n - 1) + 1e-12) return outside;
    int m = std::min<int>(order, static_cast<int>(n));
    long j0 = static_cast<long>(std::floor(pos)) - m / 2 + 1;
    j0 = std::clamp<long>(j0, 0, static_cast<long>(n) - m);
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
        double l = 1.0;
        for (int k = 0; k < m; ++k)
            if (k != j) l *= (pos - (j0 + k)) / static_cast<double>(j - k);
        s += l * f[j0 + j];
    }
    return s;
}

}  // namespace bh
