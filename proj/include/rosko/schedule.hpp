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

// schedule.hpp -- K-first multicore block executor.
//
// Loop nest: N-blocks, M-blocks, K-steps, per-core stripes, n_r column
// chunks, m_r panels.  A C block of p*m_c x p*m_c accumulates in an on-chip
// buffer across all K steps and is written back to C exactly once, so
// partial results never round-trip through the modeled DRAM boundary.
//
// Parallelism is stripe ownership: stripe s of every block belongs to worker
// s mod threads, each stripe's buffer rows and C rows are touched by that
// worker alone, and there are no atomics or locks on the data path.  Because
// each C element's accumulation order is fixed by the schedule (K steps then
// packed columns), results are bitwise identical for every thread count.
// The final stripe of a ragged block simply has fewer rows; under uniform
// random sparsity stripes carry nearly equal nnz, and the bench reports the
// per-stripe spread so imbalance stays observable.
//
// B slices are read in place, shared by all workers; no per-core copies.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rosko/io_ledger.hpp"
#include "rosko/kernel.hpp"
#include "rosko/matrix.hpp"
#include "rosko/pack.hpp"
#include "rosko/tile_model.hpp"

namespace rosko {

class schedule_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExecPlan {
    TileParams params;
    std::size_t m = 0, k = 0, n = 0;
    unsigned lanes = 1;       ///< widest SIMD chunk the dispatcher may use
    bool instrument = false;  ///< collect IoLedger counters and measured MACs

    std::size_t block_span() const { return static_cast<std::size_t>(params.p) * params.m_c; }
    std::size_t n_mblocks() const { return (m + block_span() - 1) / block_span(); }
    std::size_t n_nblocks() const { return (n + block_span() - 1) / block_span(); }
    std::size_t n_ksteps() const { return (k + params.k_c - 1) / params.k_c; }

    std::size_t block_rows(std::size_t mb) const {
        return std::min(block_span(), m - mb * block_span());
    }
    std::size_t block_cols(std::size_t nb) const {
        return std::min(block_span(), n - nb * block_span());
    }
    std::size_t stripes_in_block(std::size_t mb) const {
        return (block_rows(mb) + params.m_c - 1) / params.m_c;
    }
    std::size_t stripe_rows(std::size_t mb, std::size_t s) const {
        return std::min<std::size_t>(params.m_c, block_rows(mb) - s * params.m_c);
    }
    std::size_t kstep_len(std::size_t ks) const {
        return std::min<std::size_t>(params.k_c, k - ks * params.k_c);
    }
};

/// Builds the block plan for C = A x B; inner dimensions must agree.
inline ExecPlan plan(std::size_t a_rows, std::size_t a_cols, std::size_t b_rows,
                     std::size_t b_cols, const TileParams& params, bool instrument = false) {
    if (a_cols != b_rows)
        throw schedule_error("plan: inner dimensions disagree (A is ?x" + std::to_string(a_cols) +
                             ", B is " + std::to_string(b_rows) + "x?)");
    if (a_rows == 0 || a_cols == 0 || b_cols == 0)
        throw schedule_error("plan: dimensions must be positive");
    if (params.m_r == 0 || params.m_c % params.m_r != 0 || params.k_c == 0 || params.p == 0 ||
        params.n_r == 0)
        throw schedule_error("plan: invalid tile params");

    ExecPlan pl;
    pl.params = params;
    pl.m = a_rows;
    pl.k = a_cols;
    pl.n = b_cols;
    pl.instrument = instrument;
    pl.lanes = params.n_r % 16 == 0 ? 16 : params.n_r % 8 == 0 ? 8 : params.n_r % 4 == 0 ? 4 : 1;
    return pl;
}

/// Total multiply-adds the row-skipping kernels perform: nnz * N.
inline std::uint64_t mac_count(const PackedMatrix& a, std::size_t n_cols) {
    return a.total_nnz * static_cast<std::uint64_t>(n_cols);
}

namespace detail {

struct WorkerLedger {
    std::uint64_t macs = 0;
    std::vector<BlockIo> blocks;  // one per (nb, mb), only blocks this worker touched B/A in
};

inline void exec_worker(const PackedMatrix& a, const DenseMatrix& b, const ExecPlan& pl,
                        unsigned worker, unsigned threads, float* block_buf, DenseMatrix& c,
                        WorkerLedger* wl) {
    const auto& tp = pl.params;
    const std::size_t n_mb = pl.n_mblocks();
    const std::size_t n_nb = pl.n_nblocks();
    const std::size_t n_ks = pl.n_ksteps();
    // Buffer stride is the fixed block span so a stripe's rows occupy the same
    // cells in every block; workers advance through blocks without a barrier.
    const std::size_t ld = pl.block_span();

    for (std::size_t nb = 0; nb < n_nb; ++nb) {
        const std::size_t col0 = nb * pl.block_span();
        const std::size_t bcols = pl.block_cols(nb);
        for (std::size_t mb = 0; mb < n_mb; ++mb) {
            const std::size_t row0 = mb * pl.block_span();
            const std::size_t stripes = pl.stripes_in_block(mb);
            BlockIo bio;
            bio.n_block = nb;
            bio.m_block = mb;

            // zero the owned stripe regions of the block accumulator
            for (std::size_t s = worker; s < stripes; s += threads) {
                const std::size_t srow0 = s * tp.m_c;
                const std::size_t srows = pl.stripe_rows(mb, s);
                for (std::size_t r = 0; r < srows; ++r)
                    std::fill_n(block_buf + (srow0 + r) * ld, bcols, 0.0f);
            }

            for (std::size_t ks = 0; ks < n_ks; ++ks) {
                const std::size_t k0 = ks * tp.k_c;
                if (wl && worker == 0) bio.b_elems += pl.kstep_len(ks) * bcols;
                for (std::size_t s = worker; s < stripes; s += threads) {
                    const std::size_t srow0 = s * tp.m_c;
                    const std::size_t n_panels = a.panels_in_stripe(mb, s);
                    for (std::size_t j0 = 0; j0 < bcols; j0 += tp.n_r) {
                        const std::size_t width = std::min<std::size_t>(tp.n_r, bcols - j0);
                        for (std::size_t pr = 0; pr < n_panels; ++pr) {
                            const PackedPanel& panel = a.panel_at(mb, ks, s, pr);
                            if (wl && j0 == 0) {
                                bio.a_value_elems += panel.nnz_total();
                                bio.a_index_bytes += panel.index_bytes();
                            }
                            MicroTileView v;
                            v.b = b.values.data() + k0 * b.cols + col0 + j0;
                            v.ld_b = b.cols;
                            v.c = block_buf + (srow0 + pr * tp.m_r) * ld + j0;
                            v.ld_c = ld;
                            v.n = width;
                            run_microkernel(panel, v, pl.lanes, wl ? &wl->macs : nullptr);
                        }
                    }
                }
            }

            // single write-back of the owned stripe regions
            for (std::size_t s = worker; s < stripes; s += threads) {
                const std::size_t srow0 = s * tp.m_c;
                const std::size_t srows = pl.stripe_rows(mb, s);
                for (std::size_t r = 0; r < srows; ++r)
                    std::copy_n(block_buf + (srow0 + r) * ld, bcols, c.row(row0 + srow0 + r) + col0);
            }
            if (wl) wl->blocks.push_back(bio);
        }
    }
}

} // namespace detail

/// Executes C = A x B under the plan with `threads` workers (1..p).
/// With plan.instrument set and a ledger supplied, fills traffic counters and
/// the measured MAC count.
inline DenseMatrix rosko_spmm(const PackedMatrix& a, const DenseMatrix& b, const ExecPlan& pl,
                              unsigned threads = 1, IoLedger* ledger = nullptr) {
    if (!(a.params == pl.params))
        throw schedule_error("rosko_spmm: matrix was packed with different tile params");
    if (a.rows != pl.m || a.cols != pl.k || b.rows != pl.k || b.cols != pl.n)
        throw schedule_error("rosko_spmm: dimensions disagree with plan");
    if (threads < 1 || threads > pl.params.p)
        throw schedule_error("rosko_spmm: thread count must lie in 1..p (p = " +
                             std::to_string(pl.params.p) + ")");

    DenseMatrix c(pl.m, pl.n);
    std::vector<float> block_buf(pl.block_span() * pl.block_span());

    const bool collect = pl.instrument && ledger != nullptr;
    std::vector<detail::WorkerLedger> wls(collect ? threads : 0);

    if (threads == 1) {
        detail::exec_worker(a, b, pl, 0, 1, block_buf.data(), c, collect ? &wls[0] : nullptr);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads - 1);
        for (unsigned w = 1; w < threads; ++w)
            pool.emplace_back([&, w] {
                detail::exec_worker(a, b, pl, w, threads, block_buf.data(), c,
                                    collect ? &wls[w] : nullptr);
            });
        detail::exec_worker(a, b, pl, 0, threads, block_buf.data(), c, collect ? &wls[0] : nullptr);
        for (auto& t : pool) t.join();
    }

    if (collect) {
        // merge per-worker counters in block execution order
        const std::size_t n_blocks = pl.n_nblocks() * pl.n_mblocks();
        std::vector<BlockIo> merged(n_blocks);
        for (std::size_t i = 0; i < n_blocks; ++i) {
            merged[i].n_block = i / pl.n_mblocks();
            merged[i].m_block = i % pl.n_mblocks();
        }
        for (const auto& wl : wls) {
            ledger->mac_count += wl.macs;
            for (const auto& b2 : wl.blocks) {
                BlockIo& dst = merged[b2.n_block * pl.n_mblocks() + b2.m_block];
                dst.a_value_elems += b2.a_value_elems;
                dst.a_index_bytes += b2.a_index_bytes;
                dst.b_elems += b2.b_elems;
            }
        }
        for (const auto& b2 : merged) ledger->add_block(b2);
        ledger->c_write_elems += static_cast<std::uint64_t>(pl.m) * pl.n;
        // c_read_elems stays 0: partials live in the block buffer for all K steps
    }
    return c;
}

/// Per-stripe nonzero counts of one M-block, for load-balance reporting.
inline std::vector<std::uint64_t> stripe_nnz_spread(const PackedMatrix& a, std::size_t mb) {
    std::vector<std::uint64_t> out(a.stripes_in_block(mb), 0);
    for (std::size_t ks = 0; ks < a.n_ksteps(); ++ks)
        for (std::size_t s = 0; s < a.stripes_in_block(mb); ++s)
            for (std::size_t pr = 0; pr < a.panels_in_stripe(mb, s); ++pr)
                out[s] += a.panel_at(mb, ks, s, pr).nnz_total();
    return out;
}

} // namespace rosko
