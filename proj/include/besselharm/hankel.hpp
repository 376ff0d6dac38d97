#pragma once

#include "besselharm/grid.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace bh {

// Discretized h_lambda from one radial grid to another:
// (h f)(x_o) = sum_j M(o, j) f(y_j). Input panels are split into sub-panels
// on which the phase x_o * width stays below 3 pi; f is interpolated from
// the parent panel onto the sub-panel nodes.
class HankelOperator {
public:
    HankelOperator(double lambda, GridPtr in, GridPtr out);
    // Shared, cached instance.
    static std::shared_ptr<const HankelOperator> get(double lambda, const GridPtr& in, const GridPtr& out);

    double lambda() const { return lambda_; }
    const GridPtr& in_grid() const { return in_; }
    const GridPtr& out_grid() const { return out_; }
    const Eigen::MatrixXd& matrix() const { return M_; }
    // True when some panel needed more sub-panels than the cap allows.
    bool resolution_warning() const { return capped_; }

    // out (N_out x ncols, row-major) = M * in (N_in x ncols, row-major).
    void apply(const double* in, int ncols, double* out) const;

    static constexpr int kMaxSubpanels = 8192;

private:
    double lambda_;
    GridPtr in_, out_;
    Eigen::MatrixXd M_;
    bool capped_ = false;
};

// Hankel kernel sqrt(xy) J_{lambda-1/2}(xy).
double hankel_kernel(double lambda, double x, double y);

// h_lambda f sampled on out_grid (defaults to the input grid), coordinatewise.
SampledFunction hankel_transform(const SampledFunction& f, const GridPtr& out_grid = nullptr);

using Symbol = std::function<cplx(double)>;

// h_lambda(s(y) h_lambda f). The middle step lives on `spectral` (defaults to
// f's grid); the result is sampled on `out` (defaults to f's grid). Real
// symbols on real data give real output.
SampledFunction apply_symbol(const SampledFunction& f, const Symbol& s, const GridPtr& spectral = nullptr,
                             const GridPtr& out = nullptr, bool real_symbol = false);
// Same with the spectral data supplied directly (values of h_lambda f on `spectral`).
SampledFunction apply_symbol_to_transform(const SampledFunction& hf, const Symbol& s, const GridPtr& out = nullptr,
                                          bool real_symbol = false);

// Field (t, x) -> h_lambda(s(t, y) h_lambda f)(x) over a time grid.
using TimeSymbol = std::function<cplx(double t, double y)>;
TimeField apply_symbol_field(const SampledFunction& f, const TimeGridPtr& tg, const TimeSymbol& s,
                             const GridPtr& spectral = nullptr, const GridPtr& out = nullptr);

struct PairingResult {
    double direct;
    double spectral;
    double discrepancy;
};
// int f g dx directly and as int h(f) h(g) dy.
PairingResult plancherel_pairing(const SampledFunction& f, const SampledFunction& g);

}  // namespace bh
