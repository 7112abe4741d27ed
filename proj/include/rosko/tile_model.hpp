/*
 * Copyright 2026 The Rosko Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// tile_model.hpp -- sparsity-aware analytical tile sizing and resource model.
//
// Two budgets drive the solve, both scaled by a usable-cache fraction alpha
// (default 1.0; real caches suffer conflict misses, so it is configurable):
//
//   shared cache:  (3*d*p*m_c*k_c + p*m_c*k_c + p^2*m_c^2) * elem_bytes
//                      <= alpha * llc_bytes
//   per-core L1:   (3*d*m_r*k_c + k_c*n_r + m_r*n_r) * elem_bytes
//                      <= alpha * l1_bytes
//
// The factor of 3 on the sparse operand budgets its worst-case indexing
// arrays alongside the packed values.  The cache solve sets m_c = k_c and
// takes the largest feasible multiple of m_r; the register solve maximizes
// the sparse outer-product arithmetic intensity d*m*n/(d*m + n) over lane
// multiples of n_r under the L1 budget and a vector-register budget of
//   m_r * (n_r/lanes) accumulators + n_r/lanes operand regs + 1 broadcast.
//
// Derived per-block quantities:
//   io   = 3*d*p*m_c*k_c + p*m_c*k_c          elements per K step
//   t    = d*m_c*k_c*p*m_c / peak             seconds (peak in MAC/s)
//   bw   = io * elem_bytes / t                = (3d+1)/(d*m_c) * peak * elem_bytes
//
// Solvers never read `peak`: scaling it rescales t and bw but cannot change
// the solved tile dimensions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rosko/machine.hpp"

namespace rosko {

class tile_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Densities at or below zero are solved at this floor; truly empty matrices
/// still execute (the kernels skip everything), they just get finite tiles.
inline constexpr double kMinSolveDensity = 1e-6;

inline constexpr double kDefaultAlpha = 1.0;

struct TileParams {
    std::uint32_t m_c = 0;  ///< cache-block rows of the sparse operand (multiple of m_r)
    std::uint32_t k_c = 0;  ///< cache-block depth
    std::uint32_t m_r = 0;  ///< register-block rows (panel height, <= 255)
    std::uint32_t n_r = 0;  ///< register-block columns (multiple of lane_elems)
    std::uint32_t p = 0;    ///< cores the schedule stripes across
    double d = 0.0;         ///< density the solve assumed
    double alpha = kDefaultAlpha;

    bool operator==(const TileParams&) const = default;
};

struct ModelOutputs {
    double io_elems = 0.0;        ///< per-C-block element transfers per K step
    double t_seconds = 0.0;       ///< per-C-block compute time per K step
    double bw_bytes_per_s = 0.0;  ///< io * elem_bytes / t, identically
    double ai_dense = 0.0;        ///< m_r*n_r / (m_r+n_r)
    double ai_sparse = 0.0;       ///< d*m_r*n_r / (d*m_r+n_r)
};

// -- formula layer -----------------------------------------------------------

/// Shared-cache footprint of one block step, in elements.
inline double cache_budget_lhs_elems(double d, std::uint32_t p, std::uint32_t m_c, std::uint32_t k_c) {
    double pm = static_cast<double>(p) * m_c;
    return 3.0 * d * pm * k_c + pm * k_c + pm * pm;
}

/// L1 footprint of one microkernel working set, in elements.
inline double l1_budget_lhs_elems(double d, std::uint32_t m_r, std::uint32_t k_c, std::uint32_t n_r) {
    return 3.0 * d * m_r * static_cast<double>(k_c) + static_cast<double>(k_c) * n_r +
           static_cast<double>(m_r) * n_r;
}

/// Off-chip element transfers to advance one C block by one K step.
inline double block_io(double d, std::uint32_t p, std::uint32_t m_c, std::uint32_t k_c) {
    double pmk = static_cast<double>(p) * m_c * k_c;
    return 3.0 * d * pmk + pmk;
}

/// Per-core compute time for that step; `peak` is the single-core MAC rate.
inline double block_time(double d, std::uint32_t p, std::uint32_t m_c, std::uint32_t k_c, double peak) {
    if (peak <= 0.0) throw tile_error("block_time: peak must be positive");
    return d * m_c * static_cast<double>(k_c) * p * m_c / peak;
}

/// Required off-chip bandwidth (3d+1)/(d*m_c) * peak * elem_bytes.
inline double predict_bandwidth(double d, std::uint32_t m_c, double peak, std::uint32_t elem_bytes) {
    if (d <= 0.0) throw tile_error("predict_bandwidth: density must be positive");
    return (3.0 * d + 1.0) / (d * m_c) * peak * elem_bytes;
}

enum class IntensityKind { DenseInner, DenseOuter, SparseOuter };

/// MACs per element moved for a tile of the given kind.
inline double arithmetic_intensity(IntensityKind kind, double d, std::uint32_t m, std::uint32_t n) {
    if (m < 1 || n < 1) throw tile_error("arithmetic_intensity: tile dims must be >= 1");
    switch (kind) {
        case IntensityKind::DenseInner: return 1.0;
        case IntensityKind::DenseOuter:
            return static_cast<double>(m) * n / (static_cast<double>(m) + n);
        case IntensityKind::SparseOuter:
            if (d <= 0.0) throw tile_error("arithmetic_intensity: sparse kind needs d > 0");
            return d * m * n / (d * m + n);
    }
    throw tile_error("arithmetic_intensity: bad kind");
}

// -- solvers -----------------------------------------------------------------

/// Largest m_c = k_c multiple of m_r fitting the shared-cache budget.
/// Throws when even m_c = m_r does not fit, reporting the LLC bytes needed.
inline std::pair<std::uint32_t, std::uint32_t> solve_cache_tiles(const MachineDescriptor& mach,
                                                                 double d, std::uint32_t m_r,
                                                                 double alpha = kDefaultAlpha) {
    if (d > 1.0) throw tile_error("solve_cache_tiles: density must be <= 1");
    d = std::max(d, kMinSolveDensity);
    if (m_r < 1) throw tile_error("solve_cache_tiles: m_r must be >= 1");

    const double budget = alpha * static_cast<double>(mach.llc_elems());
    const double denom = static_cast<double>(mach.cores) * (3.0 * d + 1.0 + mach.cores);

    if (cache_budget_lhs_elems(d, mach.cores, m_r, m_r) > budget) {
        double need = cache_budget_lhs_elems(d, mach.cores, m_r, m_r) * mach.elem_bytes / alpha;
        throw tile_error("solve_cache_tiles: shared cache too small; need at least " +
                         std::to_string(static_cast<std::uint64_t>(std::ceil(need))) +
                         " llc_bytes for m_c = m_r = " + std::to_string(m_r));
    }

    // Closed form, then exact adjustment so maximality never hinges on sqrt rounding.
    double root = std::sqrt(budget / denom);
    std::uint32_t m = std::max<std::uint32_t>(m_r, static_cast<std::uint32_t>(root / m_r) * m_r);
    while (m > m_r && cache_budget_lhs_elems(d, mach.cores, m, m) > budget) m -= m_r;
    while (cache_budget_lhs_elems(d, mach.cores, m + m_r, m + m_r) <= budget) m += m_r;
    return {m, m};
}

/// One feasible microkernel shape.
struct RegisterShape {
    std::uint32_t m_r;
    std::uint32_t n_r;
};

/// Vector registers a shape occupies: C accumulators + B operands + 1 broadcast.
inline std::uint64_t register_cost(std::uint32_t m_r, std::uint32_t n_r, std::uint32_t lane_elems) {
    std::uint64_t nb = n_r / lane_elems;
    return static_cast<std::uint64_t>(m_r) * nb + nb + 1;
}

/// Every (m_r, n_r) pair admitted by the register file alone: n_r a lane
/// multiple, m_r <= max_m_r (255 caps the packed row index width).
inline std::vector<RegisterShape> register_shape_candidates(const MachineDescriptor& mach,
                                                            std::uint32_t max_m_r = 255) {
    std::vector<RegisterShape> out;
    max_m_r = std::min<std::uint32_t>(max_m_r, 255);
    for (std::uint32_t n = mach.lane_elems;; n += mach.lane_elems) {
        std::uint64_t nb = n / mach.lane_elems;
        if (nb + 2 > mach.vregs) break;  // one accumulator row + broadcast no longer fit
        std::uint32_t m_max = static_cast<std::uint32_t>(
            std::min<std::uint64_t>(max_m_r, (mach.vregs - nb - 1) / nb));
        for (std::uint32_t m = 1; m <= m_max; ++m) out.push_back({m, n});
    }
    return out;
}

/// Argmax of sparse outer-product intensity d*m*n/(d*m+n) over candidates that
/// also fit the L1 budget at the given k_c; ties break toward larger n_r.
inline RegisterShape solve_register_tiles(const MachineDescriptor& mach, double d, std::uint32_t k_c,
                                          double alpha = kDefaultAlpha, std::uint32_t max_m_r = 255) {
    if (d > 1.0) throw tile_error("solve_register_tiles: density must be <= 1");
    d = std::max(d, kMinSolveDensity);
    if (k_c < 1) throw tile_error("solve_register_tiles: k_c must be >= 1");

    const double budget = alpha * static_cast<double>(mach.l1_elems());
    bool have = false;
    RegisterShape best{0, 0};
    for (const auto& cand : register_shape_candidates(mach, max_m_r)) {
        if (l1_budget_lhs_elems(d, cand.m_r, k_c, cand.n_r) > budget) continue;
        if (!have) {
            best = cand;
            have = true;
            continue;
        }
        // compare d*m1*n1/(d*m1+n1) ? d*m2*n2/(d*m2+n2) by cross-multiplication
        double lhs = static_cast<double>(cand.m_r) * cand.n_r * (d * best.m_r + best.n_r);
        double rhs = static_cast<double>(best.m_r) * best.n_r * (d * cand.m_r + cand.n_r);
        if (lhs > rhs || (lhs == rhs && cand.n_r > best.n_r)) best = cand;
    }
    if (!have)
        throw tile_error("solve_register_tiles: no feasible (m_r, n_r); L1 too small for k_c = " +
                         std::to_string(k_c) + " -- shrink k_c");
    return best;
}

inline void validate_params(const TileParams& t, const MachineDescriptor& mach) {
    auto fail = [](const std::string& s) { throw tile_error("tile params: " + s); };
    if (t.m_r == 0 || t.m_c == 0 || t.m_c % t.m_r != 0) fail("m_c must be a positive multiple of m_r");
    if (t.k_c < 1) fail("k_c must be >= 1");
    if (t.n_r == 0 || t.n_r % mach.lane_elems != 0) fail("n_r must be a positive lane multiple");
    if (t.m_r > 255) fail("m_r exceeds packed row-index width (255)");
    if (t.p == 0) fail("p must be positive");
    double d = std::max(t.d, kMinSolveDensity);
    if (cache_budget_lhs_elems(d, t.p, t.m_c, t.k_c) > t.alpha * static_cast<double>(mach.llc_elems()))
        fail("shared-cache budget exceeded");
    if (l1_budget_lhs_elems(d, t.m_r, t.k_c, t.n_r) > t.alpha * static_cast<double>(mach.l1_elems()))
        fail("L1 budget exceeded");
}

struct SolveResult {
    TileParams params;
    ModelOutputs model;
};

inline ModelOutputs model_outputs(const MachineDescriptor& mach, const TileParams& t) {
    ModelOutputs out;
    double d = std::max(t.d, kMinSolveDensity);
    out.io_elems = block_io(d, t.p, t.m_c, t.k_c);
    out.t_seconds = block_time(d, t.p, t.m_c, t.k_c, mach.peak_macs_per_core());
    out.bw_bytes_per_s = out.io_elems * mach.elem_bytes / out.t_seconds;
    out.ai_dense = arithmetic_intensity(IntensityKind::DenseOuter, 1.0, t.m_r, t.n_r);
    out.ai_sparse = arithmetic_intensity(IntensityKind::SparseOuter, d, t.m_r, t.n_r);
    return out;
}

/// Composes both solvers to a fixed point.
///
/// m_r is seeded from the register budget alone, then the cache and register
/// solves alternate until m_r stabilizes.  Should the alternation cycle (the
/// floor interacts with the L1 budget), the smallest m_r seen in the cycle is
/// taken, the cache solve is redone with it, the register solve is capped by
/// it, and m_c is re-rounded down to the final m_r.  Every output satisfies
/// both budgets and m_c % m_r == 0.
inline SolveResult solve_all(const MachineDescriptor& mach, double d, double alpha = kDefaultAlpha) {
    if (d > 1.0) throw tile_error("solve_all: density must be <= 1");
    const double d_solve = std::max(d, kMinSolveDensity);

    // seed: intensity argmax under the register budget only
    bool have = false;
    RegisterShape seed{0, 0};
    for (const auto& cand : register_shape_candidates(mach)) {
        if (!have) {
            seed = cand;
            have = true;
            continue;
        }
        double lhs = static_cast<double>(cand.m_r) * cand.n_r * (d_solve * seed.m_r + seed.n_r);
        double rhs = static_cast<double>(seed.m_r) * seed.n_r * (d_solve * cand.m_r + cand.n_r);
        if (lhs > rhs || (lhs == rhs && cand.n_r > seed.n_r)) seed = cand;
    }
    if (!have) throw tile_error("solve_all: register file admits no microkernel shape");

    TileParams t;
    t.p = mach.cores;
    t.d = d_solve;
    t.alpha = alpha;

    std::uint32_t m_r = seed.m_r;
    std::vector<std::uint32_t> seen;
    for (int iter = 0; iter < 32; ++iter) {
        auto [m_c, k_c] = solve_cache_tiles(mach, d_solve, m_r, alpha);
        RegisterShape reg = solve_register_tiles(mach, d_solve, k_c, alpha, m_c);
        if (reg.m_r == m_r) {
            t.m_c = m_c;
            t.k_c = k_c;
            t.m_r = reg.m_r;
            t.n_r = reg.n_r;
            validate_params(t, mach);
            return {t, model_outputs(mach, t)};
        }
        auto it = std::find(seen.begin(), seen.end(), reg.m_r);
        if (it != seen.end()) {
            // cycle: cap at the smallest member, then re-round m_c to the final m_r
            std::uint32_t cap = *std::min_element(it, seen.end());
            cap = std::min(cap, reg.m_r);
            auto [cm, ck] = solve_cache_tiles(mach, d_solve, cap, alpha);
            RegisterShape fin = solve_register_tiles(mach, d_solve, ck, alpha, cap);
            t.m_c = cm / fin.m_r * fin.m_r;
            t.k_c = ck;
            t.m_r = fin.m_r;
            t.n_r = fin.n_r;
            validate_params(t, mach);
            return {t, model_outputs(mach, t)};
        }
        seen.push_back(m_r);
        m_r = reg.m_r;
    }
    throw tile_error("solve_all: tile solve failed to converge");
}

} // namespace rosko
