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

// baseline.hpp -- deliberately unoptimized reference multiplies.
//
// dense_mm_ref is the single source of truth every other multiply path in
// the repo is tested against.  It stays serial and unblocked on purpose.
// csr_spmm is the conventional inner-product comparator; it may run
// row-parallel for benchmarking, while oracle use keeps threads = 1.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rosko/matrix.hpp"

namespace rosko {

/// C[i][j] = sum_k A[i][k] * B[k][j], i-j-k order, fp32 accumulation.
inline DenseMatrix dense_mm_ref(const DenseMatrix& a, const DenseMatrix& b,
                                std::uint64_t* macs = nullptr) {
    if (a.cols != b.rows) throw matrix_error("dense_mm_ref: inner dimensions disagree");
    DenseMatrix c(a.rows, b.cols);
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            float acc = 0.0f;
            for (std::size_t k = 0; k < a.cols; ++k) {
                acc += a.at(i, k) * b.at(k, j);
                ++count;
            }
            c.at(i, j) = acc;
        }
    }
    if (macs) *macs += count;
    return c;
}

/// Per-row inner-product traversal: C[i][:] += v * B[k][:] for stored (k, v).
inline DenseMatrix csr_spmm(const CsrMatrix& a, const DenseMatrix& b, unsigned threads = 1) {
    if (a.cols != b.rows) throw matrix_error("csr_spmm: inner dimensions disagree");
    DenseMatrix c(a.rows, b.cols);

    auto rows_range = [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            float* crow = c.row(i);
            for (std::uint64_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
                const float v = a.values[e];
                const float* brow = b.row(a.col_idx[e]);
                for (std::size_t j = 0; j < b.cols; ++j) crow[j] += v * brow[j];
            }
        }
    };

    if (threads <= 1 || a.rows < 2) {
        rows_range(0, a.rows);
        return c;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (a.rows + threads - 1) / threads;
    for (unsigned t = 1; t < threads; ++t) {
        std::size_t r0 = std::min<std::size_t>(t * chunk, a.rows);
        std::size_t r1 = std::min<std::size_t>(r0 + chunk, a.rows);
        if (r0 < r1) pool.emplace_back(rows_range, r0, r1);
    }
    rows_range(0, std::min<std::size_t>(chunk, a.rows));
    for (auto& t : pool) t.join();
    return c;
}

} // namespace rosko
