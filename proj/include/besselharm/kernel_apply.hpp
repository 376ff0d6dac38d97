#pragma once

#include "besselharm/grid.hpp"

#include <functional>

namespace bh {

// Batched two-point kernel: fills k[0..n) with K(x, ys[i]).
using KernelBatch = std::function<void(double x, const double* ys, int n, double* k)>;
// Length scale of the kernel's peak near y = x (for example t for Poisson).
using KernelScale = std::function<double(double x)>;

struct KernelApplyOptions {
    int sub_nodes = 16;
    // Input panels whose values are all below rel_skip * max|f| are skipped.
    double rel_skip = 1e-17;
    // Interval [lo, hi] in y excluded from the integration (principal values).
    double exclude_lo = 0.0;
    double exclude_hi = -1.0;
};

// (K f)(x_o) = int K(x_o, y) f(y) dy on the output grid, with input panels
// bisected near y = x_o until the half-width is below sqrt(dist^2 + scale^2);
// f is interpolated from its parent panel onto sub-panel nodes.
SampledFunction kernel_apply(const SampledFunction& f, const GridPtr& out, const KernelBatch& K,
                             const KernelScale& scale, const KernelApplyOptions& opt = {});

// Same integral at one point x; out receives f.ncomp() values.
void kernel_apply_at(const SampledFunction& f, double x, const KernelBatch& K, double scale, double* out,
                     const KernelApplyOptions& opt = {});

}  // namespace bh
