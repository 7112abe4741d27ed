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

// matrix.hpp -- dense row-major and CSR matrix types plus conversions.
//
// DenseMatrix is the universal oracle representation: fp32, row-major,
// immutable by convention once built.  CsrMatrix is the conventional
// compressed-sparse-row triplet used by the inner-product baseline and by
// the external-format readers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rosko {

struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> values;  // length rows*cols

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0f) {}

    float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    float& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    const float* row(std::size_t r) const { return values.data() + r * cols; }
    float* row(std::size_t r) { return values.data() + r * cols; }
    std::size_t elems() const { return rows * cols; }
};

struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint64_t> row_ptr;  // length rows+1, non-decreasing, row_ptr[0] = 0
    std::vector<std::uint32_t> col_idx;  // length nnz, strictly increasing within a row
    std::vector<float> values;           // length nnz

    std::size_t nnz() const { return col_idx.size(); }
};

class matrix_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void validate_dense(const DenseMatrix& m) {
    if (m.values.size() != m.rows * m.cols)
        throw matrix_error("dense matrix: values length does not equal rows*cols");
}

inline void validate_csr(const CsrMatrix& m) {
    if (m.row_ptr.size() != m.rows + 1)
        throw matrix_error("csr: row_ptr length must be rows+1");
    if (m.row_ptr.front() != 0)
        throw matrix_error("csr: row_ptr[0] must be 0");
    if (m.row_ptr.back() != m.col_idx.size())
        throw matrix_error("csr: row_ptr[rows] must equal nnz");
    if (m.values.size() != m.col_idx.size())
        throw matrix_error("csr: values and col_idx lengths differ");
    for (std::size_t r = 0; r < m.rows; ++r)
        if (m.row_ptr[r] > m.row_ptr[r + 1] || m.row_ptr[r + 1] > m.col_idx.size())
            throw matrix_error("csr: row_ptr must be non-decreasing and bounded by nnz (row " +
                               std::to_string(r) + ")");
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::uint64_t i = m.row_ptr[r]; i < m.row_ptr[r + 1]; ++i) {
            if (m.col_idx[i] >= m.cols)
                throw matrix_error("csr: column index out of range in row " + std::to_string(r));
            if (i > m.row_ptr[r] && m.col_idx[i] <= m.col_idx[i - 1])
                throw matrix_error("csr: column indices not strictly increasing in row " +
                                   std::to_string(r));
        }
    }
}

/// Stored-nonzero count of a dense matrix by direct scan.
inline std::size_t count_nonzeros(const DenseMatrix& m) {
    std::size_t n = 0;
    for (float v : m.values) n += (v != 0.0f);
    return n;
}

/// Drops exact zeros; the inverse of to_dense up to explicit zeros.
inline CsrMatrix to_csr(const DenseMatrix& m) {
    CsrMatrix out;
    out.rows = m.rows;
    out.cols = m.cols;
    out.row_ptr.assign(m.rows + 1, 0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            float v = m.at(r, c);
            if (v != 0.0f) {
                out.col_idx.push_back(static_cast<std::uint32_t>(c));
                out.values.push_back(v);
            }
        }
        out.row_ptr[r + 1] = out.col_idx.size();
    }
    return out;
}

inline DenseMatrix to_dense(const CsrMatrix& m) {
    DenseMatrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::uint64_t i = m.row_ptr[r]; i < m.row_ptr[r + 1]; ++i)
            out.at(r, m.col_idx[i]) = m.values[i];
    return out;
}

inline double density(const DenseMatrix& m) {
    if (m.elems() == 0) return 0.0;
    return static_cast<double>(count_nonzeros(m)) / static_cast<double>(m.elems());
}

inline double density(const CsrMatrix& m) {
    if (m.rows * m.cols == 0) return 0.0;
    return static_cast<double>(m.nnz()) / static_cast<double>(m.rows * m.cols);
}

} // namespace rosko
