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

// bench.hpp -- timing harness and the CSV record schema.
//
// Wall times come from the monotonic clock, trials report median and min.
// True cache flushing needs privileged instructions, so between trials we
// stream a buffer of at least twice the LLC capacity to evict resident
// lines; the approximation is reported, not hidden.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rosko/matrix_io.hpp"

namespace rosko {

inline double monotonic_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct TrialStats {
    double median_seconds = 0.0;
    double min_seconds = 0.0;
};

/// Streams >= 2x LLC bytes through a scratch buffer to displace cached data.
class CacheFlusher {
public:
    explicit CacheFlusher(std::uint64_t llc_bytes)
        : buf_(2 * llc_bytes / sizeof(std::uint64_t) + 1, 1) {}

    void flush() {
        std::uint64_t acc = sink_;
        for (auto& v : buf_) {
            acc += v;
            v = acc;
        }
        sink_ = acc;
    }

private:
    std::vector<std::uint64_t> buf_;
    volatile std::uint64_t sink_ = 0;
};

/// Runs fn() `trials` times, flushing between runs when a flusher is given.
template <class Fn>
inline TrialStats time_trials(unsigned trials, Fn&& fn, CacheFlusher* flusher = nullptr) {
    if (trials == 0) throw std::invalid_argument("time_trials: trials must be >= 1");
    std::vector<double> times(trials);
    for (auto& t : times) {
        if (flusher) flusher->flush();
        double t0 = monotonic_seconds();
        fn();
        t = monotonic_seconds() - t0;
    }
    std::sort(times.begin(), times.end());
    TrialStats s;
    s.min_seconds = times.front();
    s.median_seconds = trials % 2 ? times[trials / 2]
                                  : 0.5 * (times[trials / 2 - 1] + times[trials / 2]);
    return s;
}

inline constexpr const char* kBenchCsvHeader =
    "# rosko-bench v1\n"
    "machine,M,K,N,density,m_c,k_c,m_r,n_r,threads,method,trials,"
    "wall_seconds,wall_min_seconds,pack_seconds,macs,effective_gflops,audit_ratio,checksum\n";

struct BenchRecord {
    std::string machine;
    std::size_t m = 0, k = 0, n = 0;
    double density = 0.0;
    std::uint32_t m_c = 0, k_c = 0, m_r = 0, n_r = 0;
    unsigned threads = 1;
    std::string method;  // rosko | csr | dense-ref
    unsigned trials = 1;
    double wall_seconds = 0.0;      // median
    double wall_min_seconds = 0.0;
    double pack_seconds = 0.0;
    std::uint64_t macs = 0;
    double effective_gflops = 0.0;  // 2 * macs / wall
    double audit_ratio = -1.0;      // < 0 when not instrumented
    std::uint64_t checksum = 0;

    std::string to_csv_row() const {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%s,%zu,%zu,%zu,%.17g,%u,%u,%u,%u,%u,%s,%u,%.17g,%.17g,%.17g,%llu,%.17g,%.17g,"
                      "0x%016llx",
                      machine.c_str(), m, k, n, density, m_c, k_c, m_r, n_r, threads,
                      method.c_str(), trials, wall_seconds, wall_min_seconds, pack_seconds,
                      static_cast<unsigned long long>(macs), effective_gflops, audit_ratio,
                      static_cast<unsigned long long>(checksum));
        return std::string(buf);
    }

    static BenchRecord from_csv_row(const std::string& row) {
        std::vector<std::string> f;
        std::string cur;
        for (char ch : row) {
            if (ch == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        f.push_back(cur);
        if (f.size() != 19) throw std::invalid_argument("bench csv row: want 19 fields, got " +
                                                        std::to_string(f.size()));
        BenchRecord r;
        std::size_t i = 0;
        r.machine = f[i++];
        r.m = std::stoull(f[i++]);
        r.k = std::stoull(f[i++]);
        r.n = std::stoull(f[i++]);
        r.density = std::stod(f[i++]);
        r.m_c = static_cast<std::uint32_t>(std::stoul(f[i++]));
        r.k_c = static_cast<std::uint32_t>(std::stoul(f[i++]));
        r.m_r = static_cast<std::uint32_t>(std::stoul(f[i++]));
        r.n_r = static_cast<std::uint32_t>(std::stoul(f[i++]));
        r.threads = static_cast<unsigned>(std::stoul(f[i++]));
        r.method = f[i++];
        r.trials = static_cast<unsigned>(std::stoul(f[i++]));
        r.wall_seconds = std::stod(f[i++]);
        r.wall_min_seconds = std::stod(f[i++]);
        r.pack_seconds = std::stod(f[i++]);
        r.macs = std::stoull(f[i++]);
        r.effective_gflops = std::stod(f[i++]);
        r.audit_ratio = std::stod(f[i++]);
        r.checksum = std::stoull(f[i++], nullptr, 16);
        return r;
    }
};

/// Normwise deviation: max |c - r| over max(1, max |r|).
inline double max_rel_error(const DenseMatrix& got, const DenseMatrix& want) {
    if (got.rows != want.rows || got.cols != want.cols)
        throw matrix_error("max_rel_error: shape mismatch");
    float scale = 1.0f;
    for (float v : want.values) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < got.values.size(); ++i)
        worst = std::max(worst,
                         static_cast<double>(std::abs(got.values[i] - want.values[i])) / scale);
    return worst;
}

} // namespace rosko
