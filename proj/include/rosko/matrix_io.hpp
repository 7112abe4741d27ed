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

// matrix_io.hpp -- external sparse/dense matrix formats.
//
//   .smtx  sparsity-pattern text format used by the DLMC benchmark suite:
//          header `rows, cols, nnz`, a line of rows+1 offsets, a line of nnz
//          column indices.  The format stores structure only; values are
//          filled deterministically (small-int mode, stream seeded with the
//          FNV-1a hash of the file's basename) so repeated runs agree.
//   .mtx   Matrix Market `matrix coordinate real general`, 1-based triplets.
//   .bin   trivial little-endian dense dump: u64 rows, u64 cols, fp32 data.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rosko/generate.hpp"
#include "rosko/matrix.hpp"

namespace rosko {

// Raw dumps are specified little-endian; big-endian hosts would need swaps.
static_assert(std::endian::native == std::endian::little,
              "binary matrix formats assume a little-endian host");

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

/// Bitwise checksum of a dense matrix (FNV-1a over the raw fp32 bytes).
inline std::uint64_t checksum(const DenseMatrix& m) {
    return fnv1a64(m.values.data(), m.values.size() * sizeof(float));
}

namespace detail {

inline std::string basename_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

inline std::vector<std::uint64_t> parse_u64_line(const std::string& line, const std::string& what,
                                                 const std::string& origin) {
    std::vector<std::uint64_t> out;
    std::istringstream ss(line);
    std::uint64_t v;
    while (ss >> v) out.push_back(v);
    std::string tail;
    if (ss.fail() && !ss.eof())
        throw matrix_error(origin + ": non-numeric token in " + what + " line");
    return out;
}

} // namespace detail

inline CsrMatrix read_smtx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw matrix_error("cannot open smtx file '" + path + "'");

    std::string header, offsets_line, indices_line;
    if (!std::getline(in, header)) throw matrix_error(path + ": missing header line");
    if (!std::getline(in, offsets_line)) throw matrix_error(path + ": missing row-offset line");
    if (!std::getline(in, indices_line)) throw matrix_error(path + ": missing column-index line");

    // header: `rows, cols, nnz`
    std::replace(header.begin(), header.end(), ',', ' ');
    auto dims = detail::parse_u64_line(header, "header", path);
    if (dims.size() != 3) throw matrix_error(path + ": malformed header, want `rows, cols, nnz`");

    CsrMatrix m;
    m.rows = dims[0];
    m.cols = dims[1];
    const std::uint64_t nnz = dims[2];

    m.row_ptr = detail::parse_u64_line(offsets_line, "row-offset", path);
    if (m.row_ptr.size() != m.rows + 1)
        throw matrix_error(path + ": expected " + std::to_string(m.rows + 1) + " row offsets, got " +
                           std::to_string(m.row_ptr.size()));

    auto idx = detail::parse_u64_line(indices_line, "column-index", path);
    if (idx.size() != nnz)
        throw matrix_error(path + ": header promises nnz=" + std::to_string(nnz) + " but found " +
                           std::to_string(idx.size()) + " column indices");
    if (m.row_ptr.back() != nnz)
        throw matrix_error(path + ": row_ptr[rows]=" + std::to_string(m.row_ptr.back()) +
                           " disagrees with header nnz=" + std::to_string(nnz));

    m.col_idx.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= m.cols)
            throw matrix_error(path + ": column index " + std::to_string(idx[i]) + " out of range");
        m.col_idx[i] = static_cast<std::uint32_t>(idx[i]);
    }

    // Column indices within each row are sorted before value assignment so
    // the output matrix depends only on the stored pattern.
    for (std::size_t r = 0; r < m.rows; ++r)
        std::sort(m.col_idx.begin() + static_cast<std::ptrdiff_t>(m.row_ptr[r]),
                  m.col_idx.begin() + static_cast<std::ptrdiff_t>(m.row_ptr[r + 1]));

    SplitMix64 rng(fnv1a64(detail::basename_of(path)));
    m.values.resize(m.col_idx.size());
    for (auto& v : m.values) v = draw_value(rng, ValueMode::SmallInt);

    validate_csr(m);
    return m;
}

inline void write_smtx(const CsrMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw matrix_error("cannot write smtx file '" + path + "'");
    out << m.rows << ", " << m.cols << ", " << m.nnz() << "\n";
    for (std::size_t i = 0; i < m.row_ptr.size(); ++i) out << (i ? " " : "") << m.row_ptr[i];
    out << "\n";
    for (std::size_t i = 0; i < m.col_idx.size(); ++i) out << (i ? " " : "") << m.col_idx[i];
    out << "\n";
}

inline CsrMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw matrix_error("cannot open matrix market file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw matrix_error(path + ": empty file");
    if (line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
        throw matrix_error(path + ": unsupported header (want `%%MatrixMarket matrix coordinate real general`)");

    do {
        if (!std::getline(in, line)) throw matrix_error(path + ": missing size line");
    } while (!line.empty() && line[0] == '%');

    std::istringstream szs(line);
    std::uint64_t rows, cols, nnz;
    if (!(szs >> rows >> cols >> nnz)) throw matrix_error(path + ": malformed size line");

    struct Entry {
        std::uint64_t r, c;
        float v;
    };
    std::vector<Entry> entries;
    entries.reserve(nnz);
    for (std::uint64_t i = 0; i < nnz; ++i) {
        std::uint64_t r, c;
        double v;
        if (!(in >> r >> c >> v))
            throw matrix_error(path + ": truncated entry list at " + std::to_string(i));
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw matrix_error(path + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                               ") out of range");
        entries.push_back({r - 1, c - 1, static_cast<float>(v)});
    }

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].r == entries[i - 1].r && entries[i].c == entries[i - 1].c)
            throw matrix_error(path + ": duplicate entry at (" + std::to_string(entries[i].r + 1) +
                               "," + std::to_string(entries[i].c + 1) + ")");

    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(entries.size());
    m.values.reserve(entries.size());
    for (const auto& e : entries) {
        m.row_ptr[e.r + 1]++;
        m.col_idx.push_back(static_cast<std::uint32_t>(e.c));
        m.values.push_back(e.v);
    }
    std::partial_sum(m.row_ptr.begin(), m.row_ptr.end(), m.row_ptr.begin());
    validate_csr(m);
    return m;
}

inline void write_dense_bin(const DenseMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw matrix_error("cannot write dense dump '" + path + "'");
    std::uint64_t dims[2] = {m.rows, m.cols};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(m.values.data()),
              static_cast<std::streamsize>(m.values.size() * sizeof(float)));
}

inline DenseMatrix read_dense_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw matrix_error("cannot open dense dump '" + path + "'");
    std::uint64_t dims[2];
    if (!in.read(reinterpret_cast<char*>(dims), sizeof(dims)))
        throw matrix_error(path + ": truncated header");
    DenseMatrix m(dims[0], dims[1]);
    if (!in.read(reinterpret_cast<char*>(m.values.data()),
                 static_cast<std::streamsize>(m.values.size() * sizeof(float))))
        throw matrix_error(path + ": truncated element data");
    return m;
}

} // namespace rosko
