#pragma once

#include "besselharm/grid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bh {

// Counter-based normal draws: the value depends only on (seed, stream, index).
class CounterNormal {
public:
    CounterNormal(std::uint64_t seed, std::uint64_t stream);
    double operator()(std::uint64_t index) const;

private:
    std::uint64_t key_;
};

// Orthonormal family in H = L^2(dt/t) sampled on a TimeGrid: Hermite
// functions in u = ln t, scaled so every member decays below 1e-10 at the
// grid ends, then re-orthonormalized by modified Gram-Schmidt.
class HBasis {
public:
    int size() const { return K_; }
    const TimeGridPtr& tgrid() const { return tg_; }
    double scale() const { return scale_; }
    // Profile j at t-node i.
    double at(int j, std::size_t i) const { return h_[static_cast<std::size_t>(j) * tg_->size() + i]; }
    // Max |<h_i, h_j> - delta_ij| under the grid inner product.
    double gram_defect() const;
    // Largest |h_j| over the first and last grid nodes.
    double end_value() const;
    // Basis g_i = sum_j Q_ij h_j for an orthogonal K x K matrix Q (row-major).
    HBasis rotated(const std::vector<double>& Q) const;

private:
    friend HBasis build_h_basis(int K, const TimeGridPtr& tg);
    int K_ = 0;
    double scale_ = 1.0;
    TimeGridPtr tg_;
    std::vector<double> h_;
};

// K <= 128; throws when the Gram defect exceeds 1e-8.
HBasis build_h_basis(int K, const TimeGridPtr& tg);

struct GammaEstimate {
    double estimate;
    double std_error;
    double captured;  // sum_j |c_j|^2 / ||profile||_H^2 (Euclidean in B's coordinates)
    bool flagged;     // captured < 0.999
};

// (E || sum_j gamma_j c_j ||_B^2)^{1/2} with c_j = int profile h_j dt/t.
// profile has layout j * ncomp + c with ncomp = dim (real) or 2 dim (complex:
// real parts then imaginary parts). Draws use the stream index given.
GammaEstimate gamma_norm_mc(std::span<const double> profile, bool complex, const FiniteBanachSpace& space,
                            const HBasis& basis, int M, std::uint64_t seed, std::uint64_t stream = 0);

struct MixedNormResult {
    double value;
    int flagged_nodes;
    std::vector<double> node_estimates;
};

// L^p over x of the per-node gamma norms; node i uses stream i.
MixedNormResult mixed_norm(const TimeField& field, double p, const FiniteBanachSpace& space, const HBasis& basis,
                           int M, std::uint64_t seed);

}  // namespace bh
