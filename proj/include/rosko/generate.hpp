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

// generate.hpp -- deterministic uniform-random sparse matrix generation.
//
// The generator places *exactly* round(d * rows * cols) nonzeros so reported
// densities are exact inputs to the tile model rather than Bernoulli noise.
// Placement uses selection sampling over cells in row-major order: for each
// cell, draw u = next(); include the cell iff (u % remaining_cells) <
// remaining_needed.  This yields a uniformly random exact-count subset in one
// pass with O(1) extra memory.
//
// The PRNG is pinned so independent implementations agree bit for bit:
// splitmix64 seeded directly with the user seed,
//     s += 0x9E3779B97F4A7C15
//     z = s; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
//     z = (z ^ z>>27) * 0x94D049BB133111EB
//     return z ^ z>>31
// One draw is consumed per cell, plus one per placed nonzero (consumed
// immediately after the placement draw).  Value modes:
//   real      float(2 * ((u >> 11) + 0.5) * 2^-53 - 1), uniform in (-1, 1);
//             the half-step offset keeps the draw away from exact zero
//   small-int {-4,-3,-2,-1,1,2,3,4}[u % 8]; exactly representable, and sums
//             of up to 2^16 such terms stay exact in fp32
//
// Same (rows, cols, density, seed, mode) therefore produces a bit-identical
// matrix on every platform.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "rosko/matrix.hpp"

namespace rosko {

enum class ValueMode { Real, SmallInt };

inline const char* to_string(ValueMode m) { return m == ValueMode::Real ? "real" : "small-int"; }

inline ValueMode value_mode_from_string(const std::string& s) {
    if (s == "real") return ValueMode::Real;
    if (s == "small-int" || s == "smallint") return ValueMode::SmallInt;
    throw std::invalid_argument("unknown value mode '" + s + "' (want real|small-int)");
}

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

inline float draw_value(SplitMix64& rng, ValueMode mode) {
    std::uint64_t u = rng.next();
    if (mode == ValueMode::SmallInt) {
        static const float table[8] = {-4.f, -3.f, -2.f, -1.f, 1.f, 2.f, 3.f, 4.f};
        return table[u % 8];
    }
    double x = (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
    return static_cast<float>(2.0 * x - 1.0);                     // never exactly 0
}

/// Number of nonzeros the generator will place for the given density.
inline std::size_t target_nnz(std::size_t rows, std::size_t cols, double density) {
    return static_cast<std::size_t>(
        std::llround(density * static_cast<double>(rows) * static_cast<double>(cols)));
}

inline DenseMatrix gen_uniform_sparse(std::size_t rows, std::size_t cols, double density,
                                      std::uint64_t seed, ValueMode mode) {
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("density must lie in [0, 1], got " + std::to_string(density));
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("matrix dimensions must be positive");

    DenseMatrix out(rows, cols);
    std::uint64_t remaining = static_cast<std::uint64_t>(rows) * cols;
    std::uint64_t needed = target_nnz(rows, cols, density);

    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < out.values.size() && needed > 0; ++i, --remaining) {
        std::uint64_t u = rng.next();
        if (u % remaining < needed) {
            out.values[i] = draw_value(rng, mode);
            --needed;
        }
    }
    return out;
}

} // namespace rosko
