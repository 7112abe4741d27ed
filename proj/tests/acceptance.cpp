// Acceptance suite: nine numbered criteria, one per --criterion invocation.
// Each criterion prints a single PASS/FAIL line (plus diagnostics on stderr);
// the process exits nonzero if any requested criterion fails.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rosko/rosko.hpp"

using namespace rosko;

namespace {

// ---------------------------------------------------------------------------
// shared helpers

constexpr float kSentinel = -6.02214076e23f;

MachineDescriptor synth_machine(const char* name, std::uint64_t llc, std::uint64_t l1,
                                std::uint32_t cores, std::uint32_t lanes, std::uint32_t vregs) {
    MachineDescriptor m;
    m.name = name;
    m.l1_bytes = l1;
    m.l2_bytes = llc;
    m.l2_shared = true;
    m.llc_bytes = llc;
    m.dram_bytes = 1ull << 30;
    m.cores = cores;
    m.lane_elems = lanes;
    m.vregs = vregs;
    m.peak_flops_per_core = 1e9;
    m.dram_bw_bytes_per_s = 1e9;
    validate_machine(m);
    return m;
}

struct OracleCase {
    MachineDescriptor mach;
    TileParams params;
    std::size_t m, k, n;
    double d;
    unsigned threads;
    ValueMode mode;
    std::uint64_t seed;
};

// Deterministic case list shared by criteria 1 and 3.
std::vector<OracleCase> oracle_cases(std::size_t count) {
    std::vector<MachineDescriptor> machines = {
        synth_machine("synth-2core", 64 * 1024, 8 * 1024, 2, 4, 16),
        synth_machine("synth-4core", 256 * 1024, 16 * 1024, 4, 8, 16),
        preset("arm-a53"),
        preset("intel-i9"),
    };
    const double densities[7] = {0.0, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0};
    const unsigned thread_choices[3] = {1, 2, 4};

    std::vector<OracleCase> cases;
    SplitMix64 rng(20260808);
    for (std::size_t i = 0; i < count; ++i) {
        OracleCase c;
        c.mach = machines[rng.next() % machines.size()];
        c.d = densities[rng.next() % 7];
        c.params = solve_all(c.mach, std::max(c.d, kMinSolveDensity)).params;
        c.m = 1 + rng.next() % 512;
        c.k = 1 + rng.next() % 512;
        c.n = 1 + rng.next() % 512;
        // a third of the cases snap to exact block multiples where they fit
        if (rng.next() % 3 == 0) {
            std::size_t span = static_cast<std::size_t>(c.params.p) * c.params.m_c;
            if (span <= 512) {
                c.m = c.m / span * span;
                c.n = c.n / span * span;
            }
            if (c.params.k_c <= 512) c.k = c.k / c.params.k_c * c.params.k_c;
            c.m = std::max<std::size_t>(c.m, 1);
            c.k = std::max<std::size_t>(c.k, 1);
            c.n = std::max<std::size_t>(c.n, 1);
        }
        c.threads = std::min<unsigned>(thread_choices[rng.next() % 3], c.params.p);
        c.mode = i % 2 ? ValueMode::Real : ValueMode::SmallInt;
        c.seed = rng.next();
        cases.push_back(std::move(c));
    }
    return cases;
}

bool report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    return ok;
}

// ---------------------------------------------------------------------------
// 1. oracle equivalence

bool criterion1() {
    auto cases = oracle_cases(200);
    std::size_t failed = 0;
    for (const auto& c : cases) {
        DenseMatrix a = gen_uniform_sparse(c.m, c.k, c.d, c.seed, c.mode);
        DenseMatrix b = gen_uniform_sparse(c.k, c.n, 1.0, c.seed + 1, c.mode);
        PackedMatrix packed = pack_matrix(a, c.params);
        ExecPlan pl = plan(c.m, c.k, c.k, c.n, c.params);
        DenseMatrix got = rosko_spmm(packed, b, pl, c.threads);
        DenseMatrix want = dense_mm_ref(a, b);
        bool ok = c.mode == ValueMode::SmallInt ? got.values == want.values
                                                : max_rel_error(got, want) <= 1e-5;
        if (!ok) {
            ++failed;
            std::fprintf(stderr, "  case %zux%zux%zu d=%g threads=%u mode=%s mismatch\n", c.m,
                         c.k, c.n, c.d, c.threads, to_string(c.mode));
        }
    }
    return report(1, failed == 0,
                  "oracle equivalence on 200 randomized cases (bitwise small-int, 1e-5 real)");
}

// ---------------------------------------------------------------------------
// 2. packing round trip + golden tiles

bool criterion2() {
    bool ok = true;

    // 1000 random panels round-trip bitwise
    SplitMix64 rng(424242);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t m = 1 + rng.next() % 16;
        std::size_t k = 1 + rng.next() % 64;
        const double d_choices[4] = {0.01, 0.1, 0.5, 0.9};
        DenseMatrix tile =
            gen_uniform_sparse(m, k, d_choices[rng.next() % 4], rng.next(), ValueMode::Real);
        PackedPanel p = pack_panel(tile.values.data(), k, static_cast<std::uint32_t>(m),
                                   static_cast<std::uint32_t>(k));
        if (unpack_panel(p).values != tile.values) {
            ok = false;
            std::fprintf(stderr, "  round trip failed at trial %d (%zux%zu)\n", trial, m, k);
            break;
        }
    }

    // golden 6x16 tile, 22 nonzeros labeled in pack order
    struct Cell {
        int row, col;
    };
    const Cell cells[22] = {{1, 0},  {4, 0},  {0, 1},  {2, 1},  {5, 1},  {3, 3},  {0, 4},  {1, 4},
                            {2, 4},  {4, 4},  {2, 6},  {3, 6},  {5, 7},  {0, 9},  {4, 9},  {1, 10},
                            {3, 10}, {5, 10}, {2, 12}, {0, 13}, {5, 13}, {3, 15}};
    DenseMatrix tile(6, 16);
    for (int i = 0; i < 22; ++i) tile.at(cells[i].row, cells[i].col) = static_cast<float>(i + 1);
    PackedPanel golden = pack_panel(tile.values.data(), 16, 6, 16);
    std::vector<float> order(22);
    std::iota(order.begin(), order.end(), 1.0f);
    if (golden.nnz_total() != 22 || golden.values != order) {
        ok = false;
        std::fprintf(stderr, "  golden 6x16 tile: values not in column-major nonzero order\n");
    }

    // golden column of height 6 with zeros at rows 3 and 5
    DenseMatrix col(6, 1);
    col.at(0, 0) = 1;
    col.at(1, 0) = 1;
    col.at(2, 0) = 1;
    col.at(4, 0) = 1;
    PackedPanel pc = pack_panel(col.values.data(), 1, 6, 1);
    if (pc.loc_m != std::vector<std::uint8_t>{0, 1, 2, 4} ||
        pc.nnz != std::vector<std::uint16_t>{4} || pc.col_ind != std::vector<std::uint16_t>{0}) {
        ok = false;
        std::fprintf(stderr, "  golden sparse column: loc_m/nnz/col_ind mismatch\n");
    }

    return report(2, ok, "pack/unpack round trip (1000 panels) and golden tile layouts");
}

// ---------------------------------------------------------------------------
// 3. work law

bool criterion3() {
    auto cases = oracle_cases(200);
    std::size_t failed = 0;
    for (const auto& c : cases) {
        DenseMatrix a = gen_uniform_sparse(c.m, c.k, c.d, c.seed, c.mode);
        DenseMatrix b = gen_uniform_sparse(c.k, c.n, 1.0, c.seed + 1, c.mode);
        PackedMatrix packed = pack_matrix(a, c.params);
        IoLedger ledger;
        ExecPlan pl = plan(c.m, c.k, c.k, c.n, c.params, true);
        rosko_spmm(packed, b, pl, c.threads, &ledger);
        std::uint64_t nnz = count_nonzeros(a);
        if (ledger.mac_count != nnz * c.n || mac_count(packed, c.n) != nnz * c.n) {
            ++failed;
            std::fprintf(stderr, "  MAC law broken: counted %llu, want nnz*N = %llu\n",
                         static_cast<unsigned long long>(ledger.mac_count),
                         static_cast<unsigned long long>(nnz * c.n));
        }
    }
    // dense comparator: instrumented count must be M*K*N
    SplitMix64 rng(7);
    for (int i = 0; i < 20; ++i) {
        std::size_t m = 1 + rng.next() % 64, k = 1 + rng.next() % 64, n = 1 + rng.next() % 64;
        DenseMatrix a = gen_uniform_sparse(m, k, 0.3, rng.next(), ValueMode::Real);
        DenseMatrix b = gen_uniform_sparse(k, n, 1.0, rng.next(), ValueMode::Real);
        std::uint64_t macs = 0;
        dense_mm_ref(a, b, &macs);
        if (macs != static_cast<std::uint64_t>(m) * k * n) ++failed;
    }
    return report(3, failed == 0,
                  "instrumented MACs equal nnz*N for rosko and M*K*N for the dense comparator");
}

// ---------------------------------------------------------------------------
// 4. tiling feasibility and maximality

bool criterion4() {
    bool ok = true;

    // independent re-derivation of the frozen closed-form case
    {
        MachineDescriptor intel = preset("intel-i9");
        double root = std::sqrt(1.0 * intel.llc_elems() / (10.0 * (3 * 0.2 + 1 + 10)));
        std::uint32_t closed_form = static_cast<std::uint32_t>(root / 16) * 16;
        auto [m_c, k_c] = solve_cache_tiles(intel, 0.2, 16);
        if (closed_form != 208 || m_c != 208 || k_c != 208) {
            ok = false;
            std::fprintf(stderr, "  closed form: want 208, derived %u, solver %u\n", closed_form,
                         m_c);
        }
    }

    for (const auto& name : preset_names()) {
        MachineDescriptor mach = preset(name);
        const double llc_e = static_cast<double>(mach.llc_elems());
        const double l1_e = static_cast<double>(mach.l1_elems());
        for (double d : {0.005, 0.02, 0.1, 0.25, 0.42, 1.0}) {
            TileParams t = solve_all(mach, d).params;
            double eq1 = cache_budget_lhs_elems(d, t.p, t.m_c, t.k_c);
            double eq3 = l1_budget_lhs_elems(d, t.m_r, t.k_c, t.n_r);
            double bump = cache_budget_lhs_elems(d, t.p, t.m_c + t.m_r, t.k_c);
            bool case_ok = eq1 <= llc_e && eq3 <= l1_e && bump > llc_e &&
                           t.n_r % mach.lane_elems == 0 && t.m_c % t.m_r == 0;
            if (!case_ok) {
                ok = false;
                std::fprintf(stderr,
                             "  %s d=%g: m_c=%u k_c=%u m_r=%u n_r=%u eq1=%.0f/%.0f eq3=%.0f/%.0f "
                             "bump=%.0f\n",
                             name.c_str(), d, t.m_c, t.k_c, t.m_r, t.n_r, eq1, llc_e, eq3, l1_e,
                             bump);
            }
        }
    }
    return report(4, ok,
                  "solved tiles satisfy both budgets, m_c is maximal, n_r is a lane multiple; "
                  "closed form gives 208");
}

// ---------------------------------------------------------------------------
// 5. model laws

bool criterion5() {
    bool sweep_ok = true;
    for (const auto& name : preset_names()) {
        MachineDescriptor mach = preset(name);
        double prev_bw = 0.0, prev_d = 0.0;
        bool have_prev = false;
        for (int i = 0; i < 30; ++i) {
            double d = 0.005 + i * (1.0 - 0.005) / 29.0;
            SolveResult r = solve_all(mach, d);
            double bw = r.model.bw_bytes_per_s;
            if (have_prev && bw > prev_bw * (1.0 + 1e-12)) {
                sweep_ok = false;
                std::fprintf(stderr,
                             "  %s: composed-solve BW rises %.6g -> %.6g B/s between d=%.4f and "
                             "d=%.4f (m_c step from tile flooring)\n",
                             name.c_str(), prev_bw, bw, prev_d, d);
            }
            prev_bw = bw;
            prev_d = d;
            have_prev = true;
        }
        // reference point: the unfloored closed-form bandwidth is monotone
        double prev_cont = 1e300;
        bool cont_ok = true;
        for (int i = 0; i < 300; ++i) {
            double d = 0.005 + i * (1.0 - 0.005) / 299.0;
            double m_c = std::sqrt(static_cast<double>(mach.llc_elems()) /
                                   (mach.cores * (3 * d + 1 + mach.cores)));
            double bw = (3 * d + 1) / (d * m_c);
            if (bw > prev_cont * (1 + 1e-12)) cont_ok = false;
            prev_cont = bw;
        }
        std::fprintf(stderr, "  %s: continuous-model bandwidth monotone: %s\n", name.c_str(),
                     cont_ok ? "yes" : "no");
    }

    // (3d+1)/d monotonicity, verified analytically at 1e-12
    bool formula_ok = true;
    double prev = 1e300;
    for (int i = 1; i <= 10000; ++i) {
        double d = i / 10000.0;
        double f = predict_bandwidth(d, 100, 1.0, 1) * 100.0;  // = (3d+1)/d
        double algebraic = 3.0 + 1.0 / d;
        if (std::abs(f - algebraic) > 1e-12 * algebraic) formula_ok = false;
        if (f > prev + 1e-12) formula_ok = false;
        prev = f;
    }

    // bw = io * elem_bytes / t holds identically on composed outputs
    bool identity_ok = true;
    for (const auto& name : preset_names()) {
        MachineDescriptor mach = preset(name);
        for (int i = 0; i < 30; ++i) {
            double d = 0.005 + i * (1.0 - 0.005) / 29.0;
            SolveResult r = solve_all(mach, d);
            if (r.model.bw_bytes_per_s != r.model.io_elems * mach.elem_bytes / r.model.t_seconds)
                identity_ok = false;
        }
    }

    std::fprintf(stderr,
                 "  sub-results: composed-sweep non-increasing=%s, (3d+1)/d analytic=%s, "
                 "bw identity=%s\n",
                 sweep_ok ? "pass" : "fail", formula_ok ? "pass" : "fail",
                 identity_ok ? "pass" : "fail");
    return report(5, sweep_ok && formula_ok && identity_ok,
                  "bandwidth non-increasing over the 30-point composed sweep; (3d+1)/d law; "
                  "bw = io*elem_bytes/t");
}

// ---------------------------------------------------------------------------
// 6. IO audit

bool criterion6() {
    bool ok = true;

    struct Config {
        TileParams tp;
        std::size_t m, k, n;
        double d;
        unsigned threads;
    };
    TileParams small;
    small.m_c = 24;
    small.k_c = 32;
    small.m_r = 8;
    small.n_r = 8;
    small.p = 2;
    TileParams intel;
    intel.m_c = 208;
    intel.k_c = 208;
    intel.m_r = 16;
    intel.n_r = 8;
    intel.p = 10;
    std::vector<Config> configs = {
        {small, 96, 64, 96, 0.2, 2},
        {small, 48, 96, 48, 0.5, 2},
        {intel, 2080, 2080, 2080, 0.2, 2},
    };

    for (const auto& cfg : configs) {
        DenseMatrix a = gen_uniform_sparse(cfg.m, cfg.k, cfg.d, 99, ValueMode::Real);
        DenseMatrix b = gen_uniform_sparse(cfg.k, cfg.n, 1.0, 100, ValueMode::Real);
        PackedMatrix packed = pack_matrix(a, cfg.tp);
        IoLedger ledger;
        ExecPlan pl = plan(cfg.m, cfg.k, cfg.k, cfg.n, cfg.tp, true);
        rosko_spmm(packed, b, pl, cfg.threads, &ledger);

        const std::uint64_t ksteps = cfg.k / cfg.tp.k_c;
        const std::uint64_t io_b =
            static_cast<std::uint64_t>(cfg.tp.k_c) * cfg.tp.p * cfg.tp.m_c * ksteps;
        for (const auto& blk : ledger.per_block)
            if (blk.b_elems != io_b) {
                ok = false;
                std::fprintf(stderr, "  B traffic %llu != IO_B %llu per block\n",
                             static_cast<unsigned long long>(blk.b_elems),
                             static_cast<unsigned long long>(io_b));
            }

        AuditReport rep = audit(ledger, cfg.tp, cfg.m, cfg.k, cfg.n, cfg.d);
        if (rep.max_a_ratio > 1.0) {
            ok = false;
            std::fprintf(stderr, "  A traffic exceeds the 3d worst case: ratio %.3f\n",
                         rep.max_a_ratio);
        }
        if (rep.ratio < 0.5 || rep.ratio > 1.0) {
            ok = false;
            std::fprintf(stderr, "  aggregate measured/modeled %.3f outside [0.5, 1.0]\n",
                         rep.ratio);
        }
        if (ledger.c_read_elems != 0 ||
            ledger.c_write_elems != static_cast<std::uint64_t>(cfg.m) * cfg.n) {
            ok = false;
            std::fprintf(stderr, "  C traffic law broken (read=%llu write=%llu)\n",
                         static_cast<unsigned long long>(ledger.c_read_elems),
                         static_cast<unsigned long long>(ledger.c_write_elems));
        }
        std::fprintf(stderr, "  %zux%zux%zu d=%.2f: aggregate ratio %.3f, max A ratio %.3f\n",
                     cfg.m, cfg.k, cfg.n, cfg.d, rep.ratio, rep.max_a_ratio);
    }
    return report(6, ok,
                  "measured B equals IO_B exactly; A within the 3d bound; aggregate ratio in "
                  "[0.5, 1.0]; single C write-back");
}

// ---------------------------------------------------------------------------
// 7. skipping soundness

bool criterion7() {
    SplitMix64 rng(1234321);
    std::size_t failed = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t m = 2 + rng.next() % 12;
        std::size_t k = 1 + rng.next() % 32;
        std::size_t n = 1 + rng.next() % 24;
        const double d_choices[4] = {0.05, 0.15, 0.3, 0.6};
        DenseMatrix tile =
            gen_uniform_sparse(m, k, d_choices[rng.next() % 4], rng.next(), ValueMode::Real);
        DenseMatrix b = gen_uniform_sparse(k, n, 1.0, rng.next(), ValueMode::Real);
        DenseMatrix c(m, n);
        for (auto& v : c.values) v = kSentinel;

        PackedPanel panel = pack_panel(tile.values.data(), k, static_cast<std::uint32_t>(m),
                                       static_cast<std::uint32_t>(k));
        MicroTileView view{b.values.data(), n, c.values.data(), n, n};
        switch (trial % 3) {
            case 0: microkernel_ref(panel, view); break;
            case 1: run_microkernel(panel, view, 8); break;
            default: run_microkernel(panel, view, 4); break;
        }
        for (std::size_t row = 0; row < m; ++row) {
            bool has_nonzero = false;
            for (std::size_t kk = 0; kk < k; ++kk) has_nonzero |= tile.at(row, kk) != 0.0f;
            if (has_nonzero) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (std::memcmp(&c.at(row, j), &kSentinel, sizeof(float)) != 0) ++failed;
        }
    }
    return report(7, failed == 0,
                  "zero rows keep their sentinel bits across 10000 randomized panels");
}

// ---------------------------------------------------------------------------
// 8. thread invariance

bool criterion8() {
    TileParams tp;
    tp.m_c = 16;
    tp.k_c = 24;
    tp.m_r = 8;
    tp.n_r = 8;
    tp.p = 8;
    tp.d = 0.25;

    SplitMix64 rng(5150);
    std::size_t failed = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t m = 1 + rng.next() % 320;
        std::size_t k = 1 + rng.next() % 200;
        std::size_t n = 1 + rng.next() % 200;
        DenseMatrix a = gen_uniform_sparse(m, k, 0.25, rng.next(), ValueMode::SmallInt);
        DenseMatrix b = gen_uniform_sparse(k, n, 1.0, rng.next(), ValueMode::SmallInt);
        PackedMatrix packed = pack_matrix(a, tp);
        ExecPlan pl = plan(m, k, k, n, tp);

        std::optional<std::uint64_t> want;
        for (unsigned threads : {1u, 2u, 4u, 8u}) {
            std::uint64_t sum = checksum(rosko_spmm(packed, b, pl, threads));
            if (!want) want = sum;
            else if (sum != *want) {
                ++failed;
                std::fprintf(stderr, "  checksum diverged at threads=%u (%zux%zux%zu)\n", threads,
                             m, k, n);
            }
        }
    }
    return report(8, failed == 0, "checksums identical across threads {1,2,4,8} on 20 instances");
}

// ---------------------------------------------------------------------------
// 9. report-only performance trend

bool criterion9() {
    const std::size_t edge = 2048;
    const double densities[7] = {0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.005};
    MachineDescriptor mach = preset("intel-i9");
    unsigned threads =
        std::max(1u, std::min<unsigned>(mach.cores, std::thread::hardware_concurrency()));

    std::printf("# report-only trend at %zux%zux%zu, threads=%u (not a hard assertion)\n", edge,
                edge, edge, threads);
    std::printf("%-10s %-12s %-14s %-14s\n", "density", "sparsity", "median_s", "gflops_eff");

    DenseMatrix b = gen_uniform_sparse(edge, edge, 1.0, 1001, ValueMode::Real);
    std::vector<double> walls;
    for (double d : densities) {
        DenseMatrix a = gen_uniform_sparse(edge, edge, d, 1000, ValueMode::Real);
        TileParams params = solve_all(mach, d).params;
        PackedMatrix packed = pack_matrix(a, params);
        ExecPlan pl = plan(edge, edge, edge, edge, params);
        DenseMatrix c;
        TrialStats stats = time_trials(3, [&] { c = rosko_spmm(packed, b, pl, threads); });
        walls.push_back(stats.median_seconds);
        double gflops = 2.0 * static_cast<double>(mac_count(packed, edge)) /
                        stats.median_seconds / 1e9;
        char sparsity[16];
        std::snprintf(sparsity, sizeof(sparsity), "%.1f%%", 100.0 * (1.0 - d));
        std::printf("%-10.3f %-12s %-14.6f %-14.2f\n", d, sparsity, stats.median_seconds, gflops);
    }

    DenseMatrix a_dense = gen_uniform_sparse(edge, edge, 0.1, 1000, ValueMode::Real);
    double t0 = monotonic_seconds();
    DenseMatrix c_ref = dense_mm_ref(a_dense, b);
    double dense_wall = monotonic_seconds() - t0;
    std::printf("dense-ref comparator (1 trial): %.3f s\n", dense_wall);

    bool monotone = true;
    for (std::size_t i = 1; i < walls.size(); ++i)
        if (walls[i] > walls[i - 1] * 1.05) monotone = false;  // 5% timing noise allowance
    bool beats_dense_at_90 = walls[2] < dense_wall;  // d = 0.1, i.e. 90% sparsity
    std::printf("trend: rosko wall non-increasing with sparsity: %s; beats dense-ref at >=90%% "
                "sparsity: %s\n",
                monotone ? "yes" : "no", beats_dense_at_90 ? "yes" : "no");

    // report-only: always passes once the report is produced
    return report(9, true, "sparsity trend emitted for inspection (see table above)");
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    if (only < 0 || only > 9) {
        std::fprintf(stderr, "usage: rosko_acceptance [--criterion 1..9]\n");
        return 2;
    }

    bool (*criteria[9])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                             criterion6, criterion7, criterion8, criterion9};
    bool all_ok = true;
    for (int i = 1; i <= 9; ++i) {
        if (only != 0 && only != i) continue;
        all_ok &= criteria[i - 1]();
    }
    return all_ok ? 0 : 1;
}
