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

// kernel.hpp -- packed row-skipping outer-product microkernels.
//
// The reference kernel is the semantic anchor: walk packed columns in order,
// break at the first empty per-column count, broadcast each nonzero against
// the B row selected through col_ind, and accumulate into the C row named by
// loc_m.  Rows with no nonzero are never touched.  Performed multiply-adds
// are exactly nnz_total * n.
//
// The vectorized kernel is lane-generic: it processes the row in fixed-width
// chunks left to right so every C element accumulates its terms in the same
// sequence as the reference.  Without fused contraction the two are bitwise
// identical; with it they agree to 1 ulp per element.  Accumulation order is
// pinned (packed-column order, lanes left to right) so bitwise comparisons
// between kernels are meaningful; note this order differs from a textbook
// i-j-k loop, which is why real-valued comparisons elsewhere use tolerances.
//
// Counted variants feed the instrumented executor; they increment per
// element multiply-add so the work law is measured, not inferred.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "rosko/pack.hpp"

namespace rosko {

/// Views one microkernel invocation: a k x n slice of B (row i of the panel's
/// K range at b + i*ld_b) and the m x n accumulator slice of C it feeds.
/// Views must not alias the packed panel.
struct MicroTileView {
    const float* b = nullptr;
    std::size_t ld_b = 0;
    float* c = nullptr;
    std::size_t ld_c = 0;
    std::size_t n = 0;
};

namespace detail {

struct NoCount {
    void add(std::uint64_t) {}
};
struct Count {
    std::uint64_t* macs;
    void add(std::uint64_t n) { *macs += n; }
};

template <class Counter>
inline void microkernel_ref_impl(const PackedPanel& a, const MicroTileView& v, Counter cnt) {
    std::size_t at = 0;
    for (std::size_t col = 0; col < a.nnz.size(); ++col) {
        const std::uint16_t count = a.nnz[col];
        if (count == 0) break;  // remaining columns hold no nonzeros
        const float* brow = v.b + static_cast<std::size_t>(a.col_ind[col]) * v.ld_b;
        for (std::uint16_t i = 0; i < count; ++i, ++at) {
            const float aval = a.values[at];
            float* crow = v.c + static_cast<std::size_t>(a.loc_m[at]) * v.ld_c;
            for (std::size_t j = 0; j < v.n; ++j) crow[j] += aval * brow[j];
            cnt.add(v.n);
        }
    }
}

template <unsigned Lanes, class Counter>
inline void microkernel_vec_impl(const PackedPanel& a, const MicroTileView& v, Counter cnt) {
    std::size_t at = 0;
    for (std::size_t col = 0; col < a.nnz.size(); ++col) {
        const std::uint16_t count = a.nnz[col];
        if (count == 0) break;
        const float* brow = v.b + static_cast<std::size_t>(a.col_ind[col]) * v.ld_b;
        for (std::uint16_t i = 0; i < count; ++i, ++at) {
            const float aval = a.values[at];
            float* crow = v.c + static_cast<std::size_t>(a.loc_m[at]) * v.ld_c;
            for (std::size_t j0 = 0; j0 < v.n; j0 += Lanes) {
                float acc[Lanes];
                for (unsigned l = 0; l < Lanes; ++l) acc[l] = crow[j0 + l];
                for (unsigned l = 0; l < Lanes; ++l) acc[l] += aval * brow[j0 + l];
                for (unsigned l = 0; l < Lanes; ++l) crow[j0 + l] = acc[l];
            }
            cnt.add(v.n);
        }
    }
}

template <class Counter>
inline void dense_microkernel_impl(const float* a_tile, std::size_t ld_a, std::size_t m,
                                   std::size_t k, const MicroTileView& v, Counter cnt) {
    for (std::size_t kk = 0; kk < k; ++kk) {
        const float* brow = v.b + kk * v.ld_b;
        for (std::size_t mm = 0; mm < m; ++mm) {
            const float aval = a_tile[mm * ld_a + kk];
            float* crow = v.c + mm * v.ld_c;
            for (std::size_t j = 0; j < v.n; ++j) crow[j] += aval * brow[j];
            cnt.add(v.n);
        }
    }
}

} // namespace detail

/// Scalar reference kernel: c += unpack(a) x b in packed-column order.
inline void microkernel_ref(const PackedPanel& a, const MicroTileView& v) {
    detail::microkernel_ref_impl(a, v, detail::NoCount{});
}

inline void microkernel_ref(const PackedPanel& a, const MicroTileView& v, std::uint64_t& macs) {
    detail::microkernel_ref_impl(a, v, detail::Count{&macs});
}

/// Lane-generic vectorized kernel; v.n must be a multiple of Lanes.
template <unsigned Lanes>
inline void microkernel_vec(const PackedPanel& a, const MicroTileView& v) {
    static_assert(Lanes >= 1);
    if (v.n % Lanes != 0)
        throw std::invalid_argument("microkernel_vec: tile width not a lane multiple");
    detail::microkernel_vec_impl<Lanes>(a, v, detail::NoCount{});
}

template <unsigned Lanes>
inline void microkernel_vec(const PackedPanel& a, const MicroTileView& v, std::uint64_t& macs) {
    static_assert(Lanes >= 1);
    if (v.n % Lanes != 0)
        throw std::invalid_argument("microkernel_vec: tile width not a lane multiple");
    detail::microkernel_vec_impl<Lanes>(a, v, detail::Count{&macs});
}

/// Dense outer-product comparator: every column, no skipping, m*k*n MACs.
inline void dense_microkernel(const float* a_tile, std::size_t ld_a, std::size_t m, std::size_t k,
                              const MicroTileView& v) {
    detail::dense_microkernel_impl(a_tile, ld_a, m, k, v, detail::NoCount{});
}

inline void dense_microkernel(const float* a_tile, std::size_t ld_a, std::size_t m, std::size_t k,
                              const MicroTileView& v, std::uint64_t& macs) {
    detail::dense_microkernel_impl(a_tile, ld_a, m, k, v, detail::Count{&macs});
}

/// Dispatches to the widest specialized lane count dividing v.n, or the
/// scalar reference for ragged widths.  Hot shapes: 16, 8, 4 lanes.
inline void run_microkernel(const PackedPanel& a, const MicroTileView& v, unsigned lanes,
                            std::uint64_t* macs = nullptr) {
    if (lanes >= 16 && v.n % 16 == 0) {
        if (macs) detail::microkernel_vec_impl<16>(a, v, detail::Count{macs});
        else detail::microkernel_vec_impl<16>(a, v, detail::NoCount{});
    } else if (lanes >= 8 && v.n % 8 == 0) {
        if (macs) detail::microkernel_vec_impl<8>(a, v, detail::Count{macs});
        else detail::microkernel_vec_impl<8>(a, v, detail::NoCount{});
    } else if (lanes >= 4 && v.n % 4 == 0) {
        if (macs) detail::microkernel_vec_impl<4>(a, v, detail::Count{macs});
        else detail::microkernel_vec_impl<4>(a, v, detail::NoCount{});
    } else {
        if (macs) detail::microkernel_ref_impl(a, v, detail::Count{macs});
        else detail::microkernel_ref_impl(a, v, detail::NoCount{});
    }
}

} // namespace rosko
