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

// machine.hpp -- CPU descriptors consumed by the tile solver and scheduler.
//
// A MachineDescriptor is loaded from a flat `key = value` text file (one key
// per line, `#` starts a comment) or taken from a built-in preset.  Presets
// ship as embedded config text and go through the same parser as user files.
//
// Cache capacities, core count and DRAM bandwidth of the presets follow the
// published datasheet values of the two CPUs.  `peak_flops_per_core`,
// `lane_elems` and `vregs` are documented estimates (base clock x FMA issue
// width), not measured values; model outputs that depend on peak are also
// reported in peak units so these estimates never silently distort results.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rosko {

struct MachineDescriptor {
    std::string name;
    std::uint64_t l1_bytes = 0;        ///< per-core data cache
    std::uint64_t l2_bytes = 0;
    bool l2_shared = false;            ///< true when L2 is the shared LLC (no L3)
    std::uint64_t llc_bytes = 0;       ///< largest shared cache, the "L3" of the cache-tile budget
    std::uint64_t dram_bytes = 0;
    std::uint32_t cores = 0;           ///< symbol p
    std::uint32_t lane_elems = 0;      ///< elements per vector register
    std::uint32_t vregs = 0;           ///< architectural vector registers
    double peak_flops_per_core = 0.0;  ///< MACs/second x2
    double dram_bw_bytes_per_s = 0.0;
    std::uint32_t elem_bytes = 4;

    /// Peak in MAC/s, the unit the per-block time formula divides by.
    double peak_macs_per_core() const { return peak_flops_per_core / 2.0; }

    std::uint64_t l1_elems() const { return l1_bytes / elem_bytes; }
    std::uint64_t llc_elems() const { return llc_bytes / elem_bytes; }
};

class machine_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Checks all descriptor invariants; throws machine_error naming the first violation.
inline void validate_machine(const MachineDescriptor& m) {
    auto fail = [&](const std::string& what) {
        throw machine_error("machine '" + m.name + "': " + what);
    };
    if (m.name.empty()) fail("name must be non-empty");
    if (m.l1_bytes == 0) fail("l1_bytes must be positive");
    if (m.l2_bytes == 0) fail("l2_bytes must be positive");
    if (m.llc_bytes == 0) fail("llc_bytes must be positive");
    if (m.dram_bytes == 0) fail("dram_bytes must be positive");
    if (m.cores == 0) fail("cores must be positive");
    if (m.lane_elems == 0) fail("lane_elems must be positive");
    if (m.vregs == 0) fail("vregs must be positive");
    if (m.peak_flops_per_core <= 0.0) fail("peak_flops_per_core must be positive");
    if (m.dram_bw_bytes_per_s <= 0.0) fail("dram_bw_bytes_per_s must be positive");
    if (m.elem_bytes == 0) fail("elem_bytes must be positive");
    if (m.l1_bytes > m.llc_bytes) fail("l1_bytes must not exceed llc_bytes");
    if ((m.lane_elems & (m.lane_elems - 1)) != 0) fail("lane_elems must be a power of two");
    if (m.l1_bytes % m.elem_bytes != 0) fail("elem_bytes must divide l1_bytes");
    if (m.llc_bytes % m.elem_bytes != 0) fail("elem_bytes must divide llc_bytes");
}

namespace detail {

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_f64(std::string_view s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Parses the `key = value` config text.  `origin` names the source in errors.
inline MachineDescriptor parse_machine(std::string_view text, const std::string& origin) {
    MachineDescriptor m;
    std::vector<std::string> seen;
    auto mark = [&](const char* key) { seen.emplace_back(key); };

    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++lineno;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        auto err = [&](const std::string& what) {
            throw machine_error(origin + ":" + std::to_string(lineno) + ": " + what);
        };

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) err("expected `key = value`");
        std::string_view key = detail::trim(line.substr(0, eq));
        std::string_view val = detail::trim(line.substr(eq + 1));
        if (key.empty()) err("empty key");
        if (val.empty()) err("empty value for key '" + std::string(key) + "'");

        auto want_u64 = [&](std::uint64_t& field, const char* name) {
            if (!detail::parse_u64(val, field)) err(std::string("non-numeric value for '") + name + "'");
            mark(name);
        };
        auto want_u32 = [&](std::uint32_t& field, const char* name) {
            std::uint64_t v;
            if (!detail::parse_u64(val, v) || v > UINT32_MAX) err(std::string("non-numeric value for '") + name + "'");
            field = static_cast<std::uint32_t>(v);
            mark(name);
        };
        auto want_f64 = [&](double& field, const char* name) {
            if (!detail::parse_f64(val, field)) err(std::string("non-numeric value for '") + name + "'");
            mark(name);
        };

        if (key == "name") { m.name = std::string(val); mark("name"); }
        else if (key == "l1_bytes") want_u64(m.l1_bytes, "l1_bytes");
        else if (key == "l2_bytes") want_u64(m.l2_bytes, "l2_bytes");
        else if (key == "l2_shared") {
            if (val == "1" || val == "true") m.l2_shared = true;
            else if (val == "0" || val == "false") m.l2_shared = false;
            else err("l2_shared must be 0/1/true/false");
            mark("l2_shared");
        }
        else if (key == "llc_bytes") want_u64(m.llc_bytes, "llc_bytes");
        else if (key == "dram_bytes") want_u64(m.dram_bytes, "dram_bytes");
        else if (key == "cores") want_u32(m.cores, "cores");
        else if (key == "lane_elems") want_u32(m.lane_elems, "lane_elems");
        else if (key == "vregs") want_u32(m.vregs, "vregs");
        else if (key == "peak_flops_per_core") want_f64(m.peak_flops_per_core, "peak_flops_per_core");
        else if (key == "dram_bw_bytes_per_s") want_f64(m.dram_bw_bytes_per_s, "dram_bw_bytes_per_s");
        else if (key == "elem_bytes") want_u32(m.elem_bytes, "elem_bytes");
        else err("unknown key '" + std::string(key) + "'");
    }

    static const char* required[] = {
        "name", "l1_bytes", "l2_bytes", "llc_bytes", "dram_bytes", "cores",
        "lane_elems", "vregs", "peak_flops_per_core", "dram_bw_bytes_per_s",
    };
    for (const char* key : required) {
        bool found = false;
        for (const auto& s : seen) found |= (s == key);
        if (!found) throw machine_error(origin + ": missing required key '" + std::string(key) + "'");
    }

    validate_machine(m);
    return m;
}

inline MachineDescriptor load_machine(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw machine_error("cannot open machine config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_machine(ss.str(), path);
}

/// Emits config text that parse_machine() round-trips to an identical descriptor.
inline std::string write_machine(const MachineDescriptor& m) {
    std::ostringstream out;
    out << "# rosko machine descriptor\n";
    out << "name = " << m.name << "\n";
    out << "l1_bytes = " << m.l1_bytes << "\n";
    out << "l2_bytes = " << m.l2_bytes << "\n";
    out << "l2_shared = " << (m.l2_shared ? 1 : 0) << "\n";
    out << "llc_bytes = " << m.llc_bytes << "\n";
    out << "dram_bytes = " << m.dram_bytes << "\n";
    out << "cores = " << m.cores << "\n";
    out << "lane_elems = " << m.lane_elems << "\n";
    out << "vregs = " << m.vregs << "\n";
    char buf[64];
    auto fmt = [&](double v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        return std::string(buf, p);
    };
    out << "peak_flops_per_core = " << fmt(m.peak_flops_per_core) << "\n";
    out << "dram_bw_bytes_per_s = " << fmt(m.dram_bw_bytes_per_s) << "\n";
    out << "elem_bytes = " << m.elem_bytes << "\n";
    return out.str();
}

inline void save_machine(const MachineDescriptor& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw machine_error("cannot write machine config '" + path + "'");
    out << write_machine(m);
}

// Intel Core i9-10900K.  10 cores, 32 KiB L1d and 256 KiB L2 per core,
// 20 MiB shared L3, 40 GB/s DRAM.  Peak estimate: 3.7 GHz x 2 FMA ports
// x 8 fp32 lanes x 2 flops.  AVX2: 8-lane registers, 16 of them.
inline constexpr const char* kPresetIntelI9 =
    "name = intel-i9\n"
    "l1_bytes = 32768\n"
    "l2_bytes = 262144\n"
    "l2_shared = 0\n"
    "llc_bytes = 20971520\n"
    "dram_bytes = 34359738368\n"
    "cores = 10\n"
    "lane_elems = 8\n"
    "vregs = 16\n"
    "peak_flops_per_core = 118.4e9\n"
    "dram_bw_bytes_per_s = 40e9\n"
    "elem_bytes = 4\n";

// ARM Cortex-A53.  4 cores, 16 KiB L1d per core, 512 KiB shared L2 and no
// L3, so the L2 plays the shared-cache role in the tile budget.  1 GiB DRAM
// at 2 GB/s.  Peak estimate: 1.4 GHz x 4 fp32 lanes x 2 flops.  NEON:
// 4-lane registers, 32 of them.
inline constexpr const char* kPresetArmA53 =
    "name = arm-a53\n"
    "l1_bytes = 16384\n"
    "l2_bytes = 524288\n"
    "l2_shared = 1\n"
    "llc_bytes = 524288\n"
    "dram_bytes = 1073741824\n"
    "cores = 4\n"
    "lane_elems = 4\n"
    "vregs = 32\n"
    "peak_flops_per_core = 11.2e9\n"
    "dram_bw_bytes_per_s = 2e9\n"
    "elem_bytes = 4\n";

inline std::vector<std::string> preset_names() { return {"intel-i9", "arm-a53"}; }

inline MachineDescriptor preset(const std::string& name) {
    if (name == "intel-i9") return parse_machine(kPresetIntelI9, "preset:intel-i9");
    if (name == "arm-a53") return parse_machine(kPresetArmA53, "preset:arm-a53");
    throw machine_error("unknown preset '" + name + "' (have: intel-i9, arm-a53)");
}

/// Resolves a preset name or, failing that, a config file path.
inline MachineDescriptor resolve_machine(const std::string& name_or_path) {
    for (const auto& n : preset_names())
        if (n == name_or_path) return preset(n);
    std::ifstream probe(name_or_path);
    if (!probe)
        throw machine_error("unknown preset or unreadable machine config '" + name_or_path +
                            "' (presets: intel-i9, arm-a53)");
    return load_machine(name_or_path);
}

} // namespace rosko
