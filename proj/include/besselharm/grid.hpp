#pragma once

#include "besselharm/numerics.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace bh {

struct GridConfig {
    double x_min = 1e-4;
    double x_max = 40.0;
    int panels = 64;
    int nodes_per_panel = 16;
    double t_min = 1e-3;
    double t_max = 1e3;
    int t_nodes = 600;

    // One "key = value" line per field.
    std::string to_config_block() const;
    // Reads the keys above from a flat key/value map; unknown keys are ignored.
    static GridConfig from_map(const std::map<std::string, std::string>& kv);
};

class RadialGrid;
class TimeGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;
using TimeGridPtr = std::shared_ptr<const TimeGrid>;

// Composite Gauss-Legendre rule on a partition of [x_min, x_max].
class RadialGrid {
public:
    static GridPtr from_breaks(std::vector<double> breaks, int nodes_per_panel = 16);
    // Log-spaced panels; when break_at_one and 1 lies inside, x = 1 is a
    // breakpoint and panels are split between [x_min,1] and [1,x_max] in
    // proportion to their log lengths.
    static GridPtr log_panels(double x_min, double x_max, int panels, int nodes_per_panel = 16,
                              bool break_at_one = true);
    static GridPtr from_config(const GridConfig& cfg);

    std::size_t size() const { return x_.size(); }
    double x(std::size_t i) const { return x_[i]; }
    double w(std::size_t i) const { return w_[i]; }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& weights() const { return w_; }
    const std::vector<double>& breaks() const { return breaks_; }
    int nodes_per_panel() const { return npp_; }
    int panels() const { return static_cast<int>(breaks_.size()) - 1; }
    double x_min() const { return breaks_.front(); }
    double x_max() const { return breaks_.back(); }
    std::uint64_t id() const { return id_; }

    // Panel containing x, clamped to [0, panels-1].
    int panel_of(double x) const;
    // Every panel split into two at its geometric midpoint.
    GridPtr refined() const;
    // Appends log-spaced panels from x_max up to new_x_max.
    GridPtr extended(double new_x_max, int extra_panels) const;

private:
    RadialGrid() = default;
    std::vector<double> breaks_, x_, w_;
    int npp_ = 16;
    std::uint64_t id_ = 0;
};

// Log-uniform nodes for the measure dt/t. Nodes are the midpoints, in
// u = ln t, of n equal cells covering [t_min, t_max]; each weight is the cell
// width, so the constant 1 integrates to ln(t_max / t_min).
class TimeGrid {
public:
    static TimeGridPtr make(double t_min, double t_max, int n);
    static TimeGridPtr from_config(const GridConfig& cfg);

    std::size_t size() const { return t_.size(); }
    double t(std::size_t j) const { return t_[j]; }
    double u(std::size_t j) const { return u0_ + (static_cast<double>(j) + 0.5) * du_; }
    double weight() const { return du_; }
    double du() const { return du_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    const std::vector<double>& nodes() const { return t_; }
    std::uint64_t id() const { return id_; }
    TimeGridPtr refined() const;

private:
    TimeGrid() = default;
    std::vector<double> t_;
    double t_min_ = 0, t_max_ = 0, u0_ = 0, du_ = 0;
    std::uint64_t id_ = 0;
};

// Concrete finite-dimensional norm: l^q_n (q may be infinity) or Hilbert l^2_n.
class FiniteBanachSpace {
public:
    enum class Kind { EllQ, Hilbert };
    static FiniteBanachSpace ellq(int n, double q);
    static FiniteBanachSpace hilbert(int n);
    static FiniteBanachSpace scalar() { return hilbert(1); }

    int dim() const { return n_; }
    Kind kind() const { return kind_; }
    double q() const { return q_; }
    // Norm of a real vector, or of the moduli |re_i + i im_i| when im != nullptr.
    double norm(const double* re, const double* im = nullptr) const;
    std::string describe() const;

private:
    Kind kind_ = Kind::Hilbert;
    int n_ = 1;
    double q_ = 2.0;
};

// Function on a radial grid with n coordinates per node, real or complex.
// Storage is node-major; complex data keeps the n real parts followed by the
// n imaginary parts at each node.
class SampledFunction {
public:
    SampledFunction() = default;
    SampledFunction(GridPtr grid, double lambda, int dim = 1, bool complex = false);

    static SampledFunction from_function(GridPtr grid, double lambda, const std::function<double(double)>& f);
    static SampledFunction from_vector_function(GridPtr grid, double lambda, int dim,
                                                const std::function<void(double, double*)>& f);

    const GridPtr& grid() const { return grid_; }
    double lambda() const { return lambda_; }
    int dim() const { return dim_; }
    bool is_complex() const { return complex_; }
    int ncomp() const { return complex_ ? 2 * dim_ : dim_; }
    std::size_t size() const { return grid_ ? grid_->size() : 0; }

    double& at(std::size_t i, int c) {
        invalidate();
        return v_[i * ncomp() + c];
    }
    double at(std::size_t i, int c = 0) const { return v_[i * ncomp() + c]; }
    double re(std::size_t i, int c = 0) const { return v_[i * ncomp() + c]; }
    double im(std::size_t i, int c = 0) const { return complex_ ? v_[i * ncomp() + dim_ + c] : 0.0; }
    cplx value(std::size_t i, int c = 0) const { return {re(i, c), im(i, c)}; }
    const std::vector<double>& data() const { return v_; }
    std::vector<double>& mutable_data() {
        invalidate();
        return v_;
    }

    // Interpolated value of all components at x; below x_min and above x_max
    // power laws fitted on the end panels are used.
    void eval(double x, double* out) const;
    double eval(double x, int c = 0) const;

    // Per-coordinate views.
    SampledFunction coordinate(int c) const;
    SampledFunction real_part() const;
    SampledFunction imag_part() const;
    SampledFunction as_complex() const;
    SampledFunction with_lambda(double lambda) const;
    // Stacks scalar functions on the same grid into one vector-valued function.
    static SampledFunction stack(const std::vector<SampledFunction>& fs);

    SampledFunction scaled(double a) const;
    SampledFunction operator+(const SampledFunction& o) const;
    SampledFunction operator-(const SampledFunction& o) const;

    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    struct Cache {
        std::vector<double> coef;   // per panel: npp x ncomp Legendre coefficients
        std::vector<double> lo_val, lo_pow, hi_val, hi_pow;
    };
    void invalidate() { cache_.reset(); }
    const Cache& cache() const;

    GridPtr grid_;
    double lambda_ = 1.0;
    int dim_ = 1;
    bool complex_ = false;
    std::vector<double> v_;
    std::vector<std::string> warnings_;
    mutable std::shared_ptr<const Cache> cache_;
    mutable std::shared_ptr<std::mutex> cache_mu_ = std::make_shared<std::mutex>();
};

// Samples over (t_j, x_i); index ((j * Nx) + i) * ncomp + c.
class TimeField {
public:
    TimeField() = default;
    TimeField(TimeGridPtr tg, GridPtr xg, int dim = 1, bool complex = false);

    const TimeGridPtr& tgrid() const { return tg_; }
    const GridPtr& xgrid() const { return xg_; }
    int dim() const { return dim_; }
    bool is_complex() const { return complex_; }
    int ncomp() const { return complex_ ? 2 * dim_ : dim_; }
    double& at(std::size_t j, std::size_t i, int c) { return v_[(j * xg_->size() + i) * ncomp() + c]; }
    double at(std::size_t j, std::size_t i, int c) const { return v_[(j * xg_->size() + i) * ncomp() + c]; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    // Time profile at x-node i, layout j * ncomp + c.
    std::vector<double> profile(std::size_t i) const;
    // Time slice at t-node j as a SampledFunction.
    SampledFunction slice(std::size_t j, double lambda) const;

    std::vector<std::string> warnings;

private:
    TimeGridPtr tg_;
    GridPtr xg_;
    int dim_ = 1;
    bool complex_ = false;
    std::vector<double> v_;
};

// (sum_i w_i ||f(x_i)||_B^p)^{1/p}.
double lp_norm(const SampledFunction& f, double p, const FiniteBanachSpace& space);
double l2_norm(const SampledFunction& f);
// Relative L^2 distance ||f - g|| / ||g|| on a common grid.
double rel_l2_diff(const SampledFunction& f, const SampledFunction& g);

// (sum_j omega_j ||profile(t_j)||^2)^{1/2}, Euclidean in the ncomp coordinates.
double h_norm(const TimeGrid& tg, std::span<const double> profile, int ncomp = 1);
// L^p over x of the H norms of the time profiles of a field.
double lp_h_norm(const TimeField& field, double p);
// Squared L^2(dx; H) norm.
double l2_h_norm_sq(const TimeField& field);

// H_0 f(x) = x^{-1} int_0^x f and H_inf f(x) = int_x^inf f(y)/y dy.
SampledFunction hardy_H0(const SampledFunction& f);
SampledFunction hardy_Hinf(const SampledFunction& f);

struct CorpusMember {
    SampledFunction f;
    double lambda;
    std::vector<double> q;  // coefficients of q(u) = sum_k q_k u^k
    double exact(double x) const;
};

// Functions x^lambda q(x^2) e^{-x^2/2} with random q of degree <= 6; member 0
// has q = 1. Deterministic under the seed.
std::vector<CorpusMember> make_test_corpus(double lambda, int count, std::uint64_t seed, GridPtr grid);
std::vector<CorpusMember> make_test_corpus(double lambda, int count, std::uint64_t seed);

struct SeminormResult {
    double value;
    double coarse_value;
    bool reliable;
};

// sup_x x^m |(x^{-1} d/dx)^k (x^{-lambda} f)| over the grid nodes, using k-th
// differences of phi(u) = x^{-lambda} f(x), u = x^2, with step h in u. The
// result is marked unreliable when the step-2h value differs by more than rtol.
SeminormResult seminorm_eta(const SampledFunction& f, int m, int k, double h = 0.01, double rtol = 0.05);

}  // namespace bh
