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

// pack.hpp -- row-skipping pack format for the sparse operand.
//
// A panel packs an m x k tile (m <= 255, k <= 65535) by walking columns in
// ascending k and rows in ascending m, appending each nonzero to `values`
// and its row index to `loc_m`.  Per-column counts go into `nnz` and the
// column's original index into `col_ind`, but only for columns that hold at
// least one nonzero -- so the nonzero per-column counts sit contiguously at
// the front of `nnz` and the first zero entry marks the end of useful work.
// That front-packing is the licence for the microkernel's early break.
//
// Packing granularity is the register panel (m <= m_r), which keeps loc_m in
// 8 bits and lets the microkernel address its accumulator rows directly.
// A whole matrix packs into a grid of panels following the block hierarchy:
// M splits into p*m_c cache blocks, each block into p stripes of m_c rows,
// each stripe into m_r panels; K splits into k_c steps.  Edge panels keep
// their ragged true dimensions -- the sparse operand is never zero-padded,
// since padding would inflate every nnz-derived account.
//
// Index widths: loc_m 8-bit, nnz and col_ind 16-bit.  Worst case the index
// arrays cost 1 + 2 + 2 bytes against each 4-byte packed value plus the
// fixed 2*k bytes of nnz array per panel, comfortably inside the factor-of-3
// indexing budget the IO model charges for the sparse operand.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rosko/matrix.hpp"
#include "rosko/tile_model.hpp"

namespace rosko {

class pack_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PackedPanel {
    std::uint32_t m = 0;  ///< panel height (<= 255)
    std::uint32_t k = 0;  ///< panel width  (<= 65535)
    std::vector<float> values;          ///< nonzeros, column-major nonzero order
    std::vector<std::uint8_t> loc_m;    ///< panel-relative row of each value
    std::vector<std::uint16_t> nnz;     ///< length k; nonempty-column counts packed at the front
    std::vector<std::uint16_t> col_ind; ///< original column of each nonempty column, ascending

    std::size_t nnz_total() const { return values.size(); }
    std::size_t nonempty_cols() const { return col_ind.size(); }

    /// Bytes of the four arrays as stored.
    std::uint64_t bytes() const {
        return static_cast<std::uint64_t>(values.size()) * sizeof(float) + loc_m.size() +
               2ull * nnz.size() + 2ull * col_ind.size();
    }
    std::uint64_t index_bytes() const {
        return static_cast<std::uint64_t>(loc_m.size()) + 2ull * nnz.size() + 2ull * col_ind.size();
    }
};

/// Packs a dense row-major m x k tile view with row stride `ld`.
inline PackedPanel pack_panel(const float* tile, std::size_t ld, std::uint32_t m, std::uint32_t k) {
    if (m > 255) throw pack_error("pack_panel: panel height " + std::to_string(m) + " exceeds 255");
    if (k > 65535) throw pack_error("pack_panel: panel width " + std::to_string(k) + " exceeds 65535");

    PackedPanel p;
    p.m = m;
    p.k = k;
    p.nnz.assign(k, 0);

    std::size_t packed_cols = 0;
    for (std::uint32_t kk = 0; kk < k; ++kk) {
        std::uint16_t count = 0;
        for (std::uint32_t mm = 0; mm < m; ++mm) {
            float v = tile[static_cast<std::size_t>(mm) * ld + kk];
            if (v != 0.0f) {
                p.values.push_back(v);
                p.loc_m.push_back(static_cast<std::uint8_t>(mm));
                ++count;
            }
        }
        if (count != 0) {
            p.col_ind.push_back(static_cast<std::uint16_t>(kk));
            p.nnz[packed_cols++] = count;
        }
    }
    return p;
}

/// Throws pack_error unless all panel invariants hold.
inline void validate_panel(const PackedPanel& p) {
    auto fail = [](const std::string& s) { throw pack_error("packed panel: " + s); };
    if (p.m > 255 || p.k > 65535) fail("panel dimensions exceed index widths");
    if (p.values.size() != p.loc_m.size()) fail("values and loc_m lengths differ");
    if (p.nnz.size() != p.k) fail("nnz array length must equal panel width");
    std::uint64_t total = 0;
    bool seen_zero = false;
    for (std::uint16_t c : p.nnz) {
        if (c == 0) seen_zero = true;
        else if (seen_zero) fail("nonzero count after a zero entry (columns not front-packed)");
        total += c;
    }
    if (total != p.values.size()) fail("sum of per-column counts does not match value count");
    std::size_t cols = 0;
    while (cols < p.nnz.size() && p.nnz[cols] != 0) ++cols;
    if (cols != p.col_ind.size()) fail("col_ind length does not match nonempty-column count");
    for (std::size_t i = 0; i < p.col_ind.size(); ++i) {
        if (p.col_ind[i] >= p.k) fail("col_ind out of range");
        if (i > 0 && p.col_ind[i] <= p.col_ind[i - 1]) fail("col_ind not strictly increasing");
    }
    std::size_t at = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::uint16_t i = 0; i < p.nnz[c]; ++i, ++at) {
            if (p.loc_m[at] >= p.m) fail("loc_m out of range");
            if (i > 0 && p.loc_m[at] <= p.loc_m[at - 1])
                fail("duplicate or unsorted loc_m within a column");
        }
    }
}

/// Inverse of pack_panel; bitwise round-trip for every tile.
inline DenseMatrix unpack_panel(const PackedPanel& p) {
    validate_panel(p);
    DenseMatrix out(p.m, p.k);
    std::size_t at = 0;
    for (std::size_t c = 0; c < p.col_ind.size(); ++c)
        for (std::uint16_t i = 0; i < p.nnz[c]; ++i, ++at)
            out.at(p.loc_m[at], p.col_ind[c]) = p.values[at];
    return out;
}

struct PackedMatrix {
    std::size_t rows = 0;  ///< original M
    std::size_t cols = 0;  ///< original K
    TileParams params;
    std::uint64_t total_nnz = 0;
    std::vector<PackedPanel> panels;          ///< flat, ordered (mblock, kstep, stripe, panel)
    std::vector<std::uint64_t> panel_offset;  ///< size n_mblocks*n_ksteps*p + 1

    std::size_t block_span() const { return static_cast<std::size_t>(params.p) * params.m_c; }
    std::size_t n_mblocks() const { return (rows + block_span() - 1) / block_span(); }
    std::size_t n_ksteps() const { return (cols + params.k_c - 1) / params.k_c; }

    std::size_t block_rows(std::size_t mb) const {
        return std::min<std::size_t>(block_span(), rows - mb * block_span());
    }
    std::size_t stripes_in_block(std::size_t mb) const {
        return (block_rows(mb) + params.m_c - 1) / params.m_c;
    }
    std::size_t stripe_rows(std::size_t mb, std::size_t s) const {
        return std::min<std::size_t>(params.m_c, block_rows(mb) - s * params.m_c);
    }
    std::size_t panels_in_stripe(std::size_t mb, std::size_t s) const {
        return (stripe_rows(mb, s) + params.m_r - 1) / params.m_r;
    }
    std::size_t kstep_len(std::size_t ks) const {
        return std::min<std::size_t>(params.k_c, cols - ks * params.k_c);
    }

    const PackedPanel& panel_at(std::size_t mb, std::size_t ks, std::size_t stripe,
                                std::size_t panel) const {
        std::size_t slot = (mb * n_ksteps() + ks) * params.p + stripe;
        return panels[panel_offset[slot] + panel];
    }
};

/// Packs the sparse operand into the panel grid the scheduler walks.
inline PackedMatrix pack_matrix(const DenseMatrix& a, const TileParams& params) {
    if (params.m_r == 0 || params.m_c == 0 || params.k_c == 0 || params.p == 0 ||
        params.m_c % params.m_r != 0)
        throw pack_error("pack_matrix: invalid tile params");
    if (a.rows == 0 || a.cols == 0) throw pack_error("pack_matrix: empty matrix");

    PackedMatrix pm;
    pm.rows = a.rows;
    pm.cols = a.cols;
    pm.params = params;

    const std::size_t n_mb = pm.n_mblocks();
    const std::size_t n_ks = pm.n_ksteps();
    pm.panel_offset.assign(n_mb * n_ks * params.p + 1, 0);

    for (std::size_t mb = 0; mb < n_mb; ++mb) {
        const std::size_t block_row0 = mb * pm.block_span();
        for (std::size_t ks = 0; ks < n_ks; ++ks) {
            const std::size_t k0 = ks * params.k_c;
            const std::size_t klen = pm.kstep_len(ks);
            const std::size_t stripes = pm.stripes_in_block(mb);
            for (std::size_t s = 0; s < params.p; ++s) {
                const std::size_t slot = (mb * n_ks + ks) * params.p + s;
                pm.panel_offset[slot] = pm.panels.size();
                if (s >= stripes) continue;
                const std::size_t row0 = block_row0 + s * params.m_c;
                const std::size_t srows = pm.stripe_rows(mb, s);
                for (std::size_t pr = 0; pr < pm.panels_in_stripe(mb, s); ++pr) {
                    const std::size_t prow0 = row0 + pr * params.m_r;
                    const std::size_t pm_rows = std::min<std::size_t>(params.m_r, srows - pr * params.m_r);
                    PackedPanel panel = pack_panel(a.values.data() + prow0 * a.cols + k0, a.cols,
                                                   static_cast<std::uint32_t>(pm_rows),
                                                   static_cast<std::uint32_t>(klen));
                    pm.total_nnz += panel.nnz_total();
                    pm.panels.push_back(std::move(panel));
                }
            }
        }
    }
    pm.panel_offset.back() = pm.panels.size();
    return pm;
}

/// Total bytes of all packed value and index arrays.
inline std::uint64_t packed_bytes(const PackedMatrix& pm) {
    std::uint64_t total = 0;
    for (const auto& p : pm.panels) total += p.bytes();
    return total;
}

/// Reassembles the original dense operand from the panel grid.
inline DenseMatrix unpack_matrix(const PackedMatrix& pm) {
    DenseMatrix out(pm.rows, pm.cols);
    for (std::size_t mb = 0; mb < pm.n_mblocks(); ++mb)
        for (std::size_t ks = 0; ks < pm.n_ksteps(); ++ks)
            for (std::size_t s = 0; s < pm.stripes_in_block(mb); ++s)
                for (std::size_t pr = 0; pr < pm.panels_in_stripe(mb, s); ++pr) {
                    const PackedPanel& panel = pm.panel_at(mb, ks, s, pr);
                    DenseMatrix tile = unpack_panel(panel);
                    const std::size_t row0 =
                        mb * pm.block_span() + s * pm.params.m_c + pr * pm.params.m_r;
                    const std::size_t col0 = ks * pm.params.k_c;
                    for (std::size_t r = 0; r < tile.rows; ++r)
                        for (std::size_t c = 0; c < tile.cols; ++c)
                            out.at(row0 + r, col0 + c) = tile.at(r, c);
                }
    return out;
}

// -- versioned binary serialization ------------------------------------------
//
// Layout (little-endian): magic "RSKPACK1", u32 version, u64 rows/cols/nnz,
// u32 m_c/k_c/m_r/n_r/p, f64 d/alpha, u64 panel count, then per panel
// u32 m, u32 k, u64 values, u64 cols followed by the four arrays.

inline constexpr char kPackMagic[8] = {'R', 'S', 'K', 'P', 'A', 'C', 'K', '1'};
inline constexpr std::uint32_t kPackVersion = 1;

inline void save_packed(const PackedMatrix& pm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pack_error("cannot write packed matrix '" + path + "'");
    auto put = [&](const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    };
    put(kPackMagic, sizeof(kPackMagic));
    put(&kPackVersion, 4);
    std::uint64_t dims[3] = {pm.rows, pm.cols, pm.total_nnz};
    put(dims, sizeof(dims));
    std::uint32_t tp[5] = {pm.params.m_c, pm.params.k_c, pm.params.m_r, pm.params.n_r, pm.params.p};
    put(tp, sizeof(tp));
    double dd[2] = {pm.params.d, pm.params.alpha};
    put(dd, sizeof(dd));
    std::uint64_t n_panels = pm.panels.size();
    put(&n_panels, 8);
    for (const auto& p : pm.panels) {
        std::uint32_t mk[2] = {p.m, p.k};
        put(mk, sizeof(mk));
        std::uint64_t counts[2] = {p.values.size(), p.col_ind.size()};
        put(counts, sizeof(counts));
        put(p.values.data(), p.values.size() * sizeof(float));
        put(p.loc_m.data(), p.loc_m.size());
        put(p.nnz.data(), p.nnz.size() * 2);
        put(p.col_ind.data(), p.col_ind.size() * 2);
    }
    if (!out) throw pack_error("short write to '" + path + "'");
}

inline PackedMatrix load_packed(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pack_error("cannot open packed matrix '" + path + "'");
    auto get = [&](void* p, std::size_t n) {
        if (!in.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
            throw pack_error(path + ": truncated packed matrix");
    };
    char magic[8];
    get(magic, 8);
    if (std::memcmp(magic, kPackMagic, 8) != 0) throw pack_error(path + ": bad magic");
    std::uint32_t version;
    get(&version, 4);
    if (version != kPackVersion)
        throw pack_error(path + ": unsupported version " + std::to_string(version));

    PackedMatrix pm;
    std::uint64_t dims[3];
    get(dims, sizeof(dims));
    pm.rows = dims[0];
    pm.cols = dims[1];
    std::uint32_t tp[5];
    get(tp, sizeof(tp));
    pm.params.m_c = tp[0];
    pm.params.k_c = tp[1];
    pm.params.m_r = tp[2];
    pm.params.n_r = tp[3];
    pm.params.p = tp[4];
    double dd[2];
    get(dd, sizeof(dd));
    pm.params.d = dd[0];
    pm.params.alpha = dd[1];
    std::uint64_t n_panels;
    get(&n_panels, 8);

    std::uint64_t expect_panels = 0;
    {
        // geometry must agree with the stored panel count
        PackedMatrix probe;
        probe.rows = pm.rows;
        probe.cols = pm.cols;
        probe.params = pm.params;
        for (std::size_t mb = 0; mb < probe.n_mblocks(); ++mb)
            for (std::size_t s = 0; s < probe.stripes_in_block(mb); ++s)
                expect_panels += probe.panels_in_stripe(mb, s);
        expect_panels *= probe.n_ksteps();
    }
    if (n_panels != expect_panels)
        throw pack_error(path + ": panel count disagrees with dimensions and params");

    pm.panels.resize(n_panels);
    std::uint64_t total = 0;
    for (auto& p : pm.panels) {
        std::uint32_t mk[2];
        get(mk, sizeof(mk));
        p.m = mk[0];
        p.k = mk[1];
        std::uint64_t counts[2];
        get(counts, sizeof(counts));
        p.values.resize(counts[0]);
        p.loc_m.resize(counts[0]);
        p.nnz.resize(p.k);
        p.col_ind.resize(counts[1]);
        get(p.values.data(), p.values.size() * sizeof(float));
        get(p.loc_m.data(), p.loc_m.size());
        get(p.nnz.data(), p.nnz.size() * 2);
        get(p.col_ind.data(), p.col_ind.size() * 2);
        validate_panel(p);
        total += p.nnz_total();
    }
    if (total != dims[2])
        throw pack_error(path + ": stored nnz total disagrees with panel contents");
    pm.total_nnz = total;

    // rebuild the offset table by replaying the pack order
    const std::size_t n_mb = pm.n_mblocks();
    const std::size_t n_ks = pm.n_ksteps();
    pm.panel_offset.assign(n_mb * n_ks * pm.params.p + 1, 0);
    std::uint64_t at = 0;
    for (std::size_t mb = 0; mb < n_mb; ++mb)
        for (std::size_t ks = 0; ks < n_ks; ++ks)
            for (std::size_t s = 0; s < pm.params.p; ++s) {
                pm.panel_offset[(mb * n_ks + ks) * pm.params.p + s] = at;
                if (s < pm.stripes_in_block(mb)) at += pm.panels_in_stripe(mb, s);
            }
    pm.panel_offset.back() = at;
    return pm;
}

} // namespace rosko
