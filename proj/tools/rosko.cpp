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

// rosko -- benchmark and validation harness for the row-skipping SpMM engine.
//
// Subcommands: presets, tiles, gen, pack, run, sweep, pack-bench.
// CSV goes to stdout unless --csv names a file; human-readable status lines
// go to stderr.  Exit codes: 0 success, 1 check failure, 2 usage/config.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "rosko/rosko.hpp"

namespace {

using namespace rosko;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// -- small helpers -------------------------------------------------------------

std::vector<std::size_t> parse_dims(const std::string& s, std::size_t want) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, 'x')) out.push_back(std::stoull(tok));
    if (out.size() != want)
        throw std::runtime_error("expected " + std::to_string(want) +
                                 " 'x'-separated sizes, got '" + s + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<unsigned> parse_unsigned_list(const std::string& s) {
    std::vector<unsigned> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(static_cast<unsigned>(std::stoul(tok)));
    return out;
}

std::vector<std::string> parse_string_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

/// CSV sink: stdout by default, file when --csv was given.
class CsvSink {
public:
    explicit CsvSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open csv output '" + path + "'");
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

unsigned env_threads_override(unsigned threads) {
    if (const char* env = std::getenv("ROSKO_THREADS")) {
        try {
            unsigned t = static_cast<unsigned>(std::stoul(env));
            if (t >= 1) return t;
        } catch (...) {
            throw std::runtime_error("ROSKO_THREADS is not a positive integer");
        }
    }
    return threads;
}

DenseMatrix load_dense_any(const std::string& smtx, const std::string& mtx,
                           const std::string& bin) {
    if (!smtx.empty()) return to_dense(read_smtx(smtx));
    if (!mtx.empty()) return to_dense(read_matrix_market(mtx));
    return read_dense_bin(bin);
}

void require_density(double d) {
    if (d < 0.0 || d > 1.0)
        throw std::runtime_error("density must lie in [0, 1], got " + std::to_string(d));
}

// -- tiles -----------------------------------------------------------------------

constexpr const char* kTilesCsvHeader =
    "# rosko-tiles v1\n"
    "machine,density,alpha,m_c,k_c,m_r,n_r,io_elems,t_peak_units,t_seconds,"
    "bw_bytes_per_peak_mac,bw_bytes_per_s,ai_sparse,ai_dense\n";

int cmd_tiles(const std::string& machine_name, double density, std::uint32_t forced_m_r,
              double alpha, const std::string& csv_path) {
    if (density <= 0.0 || density > 1.0)
        throw std::runtime_error("tiles: density must lie in (0, 1], got " +
                                 std::to_string(density));
    MachineDescriptor mach = resolve_machine(machine_name);

    TileParams t;
    if (forced_m_r != 0) {
        // explicit register-height override: cache solve at that m_r, n_r by
        // intensity under the L1 budget only (the register-file budget is the
        // override's responsibility)
        auto [m_c, k_c] = solve_cache_tiles(mach, density, forced_m_r, alpha);
        t.m_c = m_c;
        t.k_c = k_c;
        t.m_r = forced_m_r;
        t.p = mach.cores;
        t.d = density;
        t.alpha = alpha;
        std::uint32_t best_n = 0;
        double best_obj = -1.0;
        for (std::uint32_t n = mach.lane_elems; n <= 4096; n += mach.lane_elems) {
            if (l1_budget_lhs_elems(density, forced_m_r, k_c, n) >
                alpha * static_cast<double>(mach.l1_elems()))
                break;
            double obj = density * forced_m_r * n / (density * forced_m_r + n);
            if (obj > best_obj) {
                best_obj = obj;
                best_n = n;
            }
        }
        if (best_n == 0)
            throw tile_error("tiles: no n_r fits L1 with m_r=" + std::to_string(forced_m_r));
        t.n_r = best_n;
        validate_params(t, mach);
    } else {
        t = solve_all(mach, density, alpha).params;
    }
    ModelOutputs mo = model_outputs(mach, t);

    double t_peak_units = block_time(t.d, t.p, t.m_c, t.k_c, 1.0);  // MAC units
    double bw_per_peak = mo.io_elems * mach.elem_bytes / t_peak_units;

    CsvSink sink(csv_path);
    sink.out() << kTilesCsvHeader;
    char row[512];
    std::snprintf(row, sizeof(row),
                  "%s,%.17g,%.17g,%u,%u,%u,%u,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  mach.name.c_str(), t.d, t.alpha, t.m_c, t.k_c, t.m_r, t.n_r, mo.io_elems,
                  t_peak_units, mo.t_seconds, bw_per_peak, mo.bw_bytes_per_s, mo.ai_sparse,
                  mo.ai_dense);
    sink.out() << row;

    std::cerr << "machine=" << mach.name << " d=" << t.d << " alpha=" << t.alpha
              << " m_c=" << t.m_c << " k_c=" << t.k_c << " m_r=" << t.m_r << " n_r=" << t.n_r
              << "\n"
              << "per-block io=" << mo.io_elems << " elems, t=" << t_peak_units
              << " peak-MAC-units (" << mo.t_seconds << " s), bw=" << bw_per_peak
              << " bytes/peak-MAC (" << mo.bw_bytes_per_s << " B/s), ai_sparse=" << mo.ai_sparse
              << "\n";
    return kExitOk;
}

// -- gen -------------------------------------------------------------------------

int cmd_gen(const std::string& dims, double density, std::uint64_t seed, const std::string& mode,
            const std::string& out_path) {
    require_density(density);
    auto d = parse_dims(dims, 2);
    DenseMatrix m = gen_uniform_sparse(d[0], d[1], density, seed, value_mode_from_string(mode));
    if (out_path.ends_with(".smtx")) write_smtx(to_csr(m), out_path);
    else write_dense_bin(m, out_path);
    std::cerr << "wrote " << d[0] << "x" << d[1] << " d=" << rosko::density(m)
              << " nnz=" << count_nonzeros(m) << " -> " << out_path << "\n";
    return kExitOk;
}

// -- pack ------------------------------------------------------------------------

int cmd_pack(const std::string& machine_name, const std::string& smtx, const std::string& mtx,
             const std::string& bin, double density_override, const std::string& out_path) {
    MachineDescriptor mach = resolve_machine(machine_name);
    DenseMatrix a = load_dense_any(smtx, mtx, bin);
    double d_solve = density_override > 0.0 ? density_override : density(a);
    TileParams params = solve_all(mach, std::max(d_solve, kMinSolveDensity)).params;

    double t0 = monotonic_seconds();
    PackedMatrix pm = pack_matrix(a, params);
    double pack_s = monotonic_seconds() - t0;
    save_packed(pm, out_path);
    std::cerr << "packed " << a.rows << "x" << a.cols << " nnz=" << pm.total_nnz << " in "
              << pack_s << " s, " << packed_bytes(pm) << " packed bytes -> " << out_path << "\n";
    return kExitOk;
}

// -- run / sweep shared method driver ---------------------------------------------

struct MethodOutcome {
    BenchRecord record;
    DenseMatrix c;
    std::optional<AuditReport> audit_report;
};

MethodOutcome run_method(const std::string& method, const MachineDescriptor& mach,
                         const DenseMatrix& a, const DenseMatrix& b, const TileParams& params,
                         unsigned threads, unsigned trials, bool instrument,
                         CacheFlusher* flusher) {
    MethodOutcome out;
    BenchRecord& r = out.record;
    r.machine = mach.name;
    r.m = a.rows;
    r.k = a.cols;
    r.n = b.cols;
    r.density = density(a);
    r.threads = threads;
    r.method = method;
    r.trials = trials;

    if (method == "rosko") {
        r.m_c = params.m_c;
        r.k_c = params.k_c;
        r.m_r = params.m_r;
        r.n_r = params.n_r;
        double t0 = monotonic_seconds();
        PackedMatrix packed = pack_matrix(a, params);
        r.pack_seconds = monotonic_seconds() - t0;
        ExecPlan pl = plan(a.rows, a.cols, b.rows, b.cols, params, instrument);
        r.macs = mac_count(packed, b.cols);

        TrialStats stats =
            time_trials(trials, [&] { out.c = rosko_spmm(packed, b, pl, threads); }, flusher);
        r.wall_seconds = stats.median_seconds;
        r.wall_min_seconds = stats.min_seconds;

        if (instrument) {
            IoLedger ledger;
            out.c = rosko_spmm(packed, b, pl, threads, &ledger);
            out.audit_report =
                audit(ledger, params, a.rows, a.cols, b.cols, r.density, mach.elem_bytes);
            r.audit_ratio = out.audit_report->ratio;
        }
    } else if (method == "csr") {
        double t0 = monotonic_seconds();
        CsrMatrix cs = to_csr(a);
        r.pack_seconds = monotonic_seconds() - t0;
        r.macs = cs.nnz() * static_cast<std::uint64_t>(b.cols);
        TrialStats stats = time_trials(trials, [&] { out.c = csr_spmm(cs, b, threads); }, flusher);
        r.wall_seconds = stats.median_seconds;
        r.wall_min_seconds = stats.min_seconds;
    } else if (method == "dense-ref") {
        r.threads = 1;  // the oracle is serial by contract
        r.macs = static_cast<std::uint64_t>(a.rows) * a.cols * b.cols;
        TrialStats stats = time_trials(trials, [&] { out.c = dense_mm_ref(a, b); }, flusher);
        r.wall_seconds = stats.median_seconds;
        r.wall_min_seconds = stats.min_seconds;
    } else {
        throw std::runtime_error("unknown method '" + method + "' (want rosko|csr|dense-ref)");
    }

    r.effective_gflops =
        r.wall_seconds > 0.0 ? 2.0 * static_cast<double>(r.macs) / r.wall_seconds / 1e9 : 0.0;
    r.checksum = checksum(out.c);
    return out;
}

// -- run -------------------------------------------------------------------------

int cmd_run(const std::string& machine_name, const std::string& gen_dims, double density_arg,
            std::uint64_t seed, const std::string& mode, const std::string& smtx,
            const std::string& mtx, const std::string& bin, const std::string& packed_path,
            std::size_t n_cols, const std::string& b_path, unsigned threads, unsigned trials,
            bool check, bool instrument, const std::string& csv_path,
            const std::string& audit_csv_path) {
    MachineDescriptor mach = resolve_machine(machine_name);
    ValueMode vmode = value_mode_from_string(mode);

    // resolve the sparse operand
    DenseMatrix a;
    TileParams params;
    bool have_params = false;
    if (!packed_path.empty()) {
        PackedMatrix pm = load_packed(packed_path);
        a = unpack_matrix(pm);
        params = pm.params;
        have_params = true;
    } else if (!gen_dims.empty()) {
        require_density(density_arg);
        auto dims = parse_dims(gen_dims, 2);
        a = gen_uniform_sparse(dims[0], dims[1], density_arg, seed, vmode);
    } else {
        a = load_dense_any(smtx, mtx, bin);
    }
    if (!have_params) params = solve_all(mach, std::max(density(a), kMinSolveDensity)).params;

    // resolve B
    DenseMatrix b;
    if (!b_path.empty()) b = read_dense_bin(b_path);
    else if (n_cols > 0) b = gen_uniform_sparse(a.cols, n_cols, 1.0, seed + 1, vmode);
    else throw std::runtime_error("run: need --n or --b to shape the dense operand");

    threads = env_threads_override(threads);
    if (threads == 0)
        threads = std::max(1u, std::min<unsigned>(mach.cores, std::thread::hardware_concurrency()));

    CacheFlusher flusher(mach.llc_bytes);
    MethodOutcome outcome =
        run_method("rosko", mach, a, b, params, threads, trials, instrument, &flusher);

    CsvSink sink(csv_path);
    sink.out() << kBenchCsvHeader << outcome.record.to_csv_row() << "\n";
    if (outcome.audit_report) {
        std::ostream* aout = &sink.out();
        std::unique_ptr<CsvSink> audit_sink;
        if (!audit_csv_path.empty()) {
            audit_sink = std::make_unique<CsvSink>(audit_csv_path);
            aout = &audit_sink->out();
        }
        *aout << "# rosko-audit v1\nblock_id,measured_a,measured_b,modeled_io,ratio\n";
        for (const auto& row : outcome.audit_report->rows) {
            char line[256];
            std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.17g\n", row.block_id,
                          row.measured_a, row.measured_b, row.modeled_io, row.ratio);
            *aout << line;
        }
    }

    std::cerr << "rosko " << a.rows << "x" << a.cols << "x" << b.cols
              << " d=" << outcome.record.density << " threads=" << threads
              << " median=" << outcome.record.wall_seconds << " s, "
              << outcome.record.effective_gflops << " effective GFLOP/s\n";

    if (check) {
        const double kCheckLimit = 1e-5;
        const bool huge = static_cast<double>(a.rows) * a.cols * b.cols > 134217728.0;
        DenseMatrix want = huge ? csr_spmm(to_csr(a), b) : dense_mm_ref(a, b);
        double err = max_rel_error(outcome.c, want);
        bool exact_mode = vmode == ValueMode::SmallInt && packed_path.empty() && smtx.empty();
        bool ok = exact_mode ? outcome.c.values == want.values : err <= kCheckLimit;
        std::cerr << "check vs " << (huge ? "csr_spmm" : "dense_mm_ref")
                  << ": max rel err = " << err << (ok ? " (ok)" : " (FAIL)") << "\n";
        if (!ok) return kExitCheckFailed;
    }
    return kExitOk;
}

// -- sweep -----------------------------------------------------------------------

int cmd_sweep(const std::string& machine_name, const std::string& dims_arg,
              const std::string& densities_arg, const std::string& methods_arg,
              const std::string& threads_arg, unsigned trials, std::uint64_t seed,
              const std::string& mode, double check_max_elems, const std::string& csv_path) {
    MachineDescriptor mach = resolve_machine(machine_name);
    auto dims = parse_dims(dims_arg, 3);
    auto densities = parse_double_list(densities_arg);
    auto methods = parse_string_list(methods_arg);
    auto threads_list = parse_unsigned_list(threads_arg);
    ValueMode vmode = value_mode_from_string(mode);
    for (double d : densities) require_density(d);

    CacheFlusher flusher(mach.llc_bytes);
    CsvSink sink(csv_path);
    sink.out() << kBenchCsvHeader;

    unsigned failures = 0;
    for (double d : densities) {
        DenseMatrix a = gen_uniform_sparse(dims[0], dims[1], d, seed, vmode);
        DenseMatrix b = gen_uniform_sparse(dims[1], dims[2], 1.0, seed + 1, vmode);
        TileParams params = solve_all(mach, std::max(d, kMinSolveDensity)).params;
        const bool small = static_cast<double>(dims[0]) * dims[1] * dims[2] <= check_max_elems;
        std::optional<DenseMatrix> oracle;
        if (small) oracle = dense_mm_ref(a, b);
        std::optional<std::uint64_t> rosko_checksum;

        for (unsigned threads : threads_list) {
            for (const auto& method : methods) {
                try {
                    unsigned t = std::min<unsigned>(threads, params.p);
                    MethodOutcome outcome =
                        run_method(method, mach, a, b, params, t, trials, false, &flusher);
                    bool ok = true;
                    if (oracle) {
                        ok = vmode == ValueMode::SmallInt
                                 ? outcome.c.values == oracle->values
                                 : max_rel_error(outcome.c, *oracle) <= 1e-5;
                    } else if (method == "rosko") {
                        // large dims: thread invariance via checksum comparison
                        if (!rosko_checksum) rosko_checksum = outcome.record.checksum;
                        ok = outcome.record.checksum == *rosko_checksum;
                    } else if (rosko_checksum && vmode == ValueMode::SmallInt) {
                        ok = outcome.record.checksum == *rosko_checksum;
                    }
                    if (!ok) {
                        ++failures;
                        std::cerr << "cell FAILED check: method=" << method << " d=" << d
                                  << " threads=" << threads << "\n";
                    }
                    sink.out() << outcome.record.to_csv_row() << "\n";
                    if (method == "rosko" && threads == threads_list.front()) {
                        PackedMatrix pm = pack_matrix(a, params);
                        auto spread = stripe_nnz_spread(pm, 0);
                        std::uint64_t lo = UINT64_MAX, hi = 0;
                        for (auto s : spread) {
                            lo = std::min(lo, s);
                            hi = std::max(hi, s);
                        }
                        sink.out()
                            << "# stripe_nnz_spread block0 min=" << lo << " max=" << hi << "\n";
                    }
                } catch (const std::exception& e) {
                    ++failures;
                    std::cerr << "cell ERROR: method=" << method << " d=" << d
                              << " threads=" << threads << ": " << e.what() << "\n";
                }
            }
        }
    }
    if (failures) {
        std::cerr << failures << " sweep cell(s) failed\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

// -- pack-bench --------------------------------------------------------------------

constexpr const char* kPackBenchCsvHeader =
    "# rosko-packbench v1\n"
    "M,K,density,rosko_pack_seconds,csr_pack_seconds,rosko_bytes,csr_bytes,"
    "rosko_elems_per_s,csr_elems_per_s\n";

int cmd_pack_bench(const std::string& machine_name, const std::string& dims_arg,
                   const std::string& densities_arg, unsigned trials, std::uint64_t seed,
                   const std::string& csv_path) {
    MachineDescriptor mach = resolve_machine(machine_name);
    auto dims = parse_dims(dims_arg, 2);
    auto densities = parse_double_list(densities_arg);
    for (double d : densities) require_density(d);

    CsvSink sink(csv_path);
    sink.out() << kPackBenchCsvHeader;
    for (double d : densities) {
        DenseMatrix a = gen_uniform_sparse(dims[0], dims[1], d, seed, ValueMode::Real);
        TileParams params = solve_all(mach, std::max(d, kMinSolveDensity)).params;

        PackedMatrix pm;
        TrialStats rosko_t = time_trials(trials, [&] { pm = pack_matrix(a, params); });
        CsrMatrix cs;
        TrialStats csr_t = time_trials(trials, [&] { cs = to_csr(a); });

        std::uint64_t rosko_bytes = packed_bytes(pm);
        std::uint64_t csr_bytes = 8ull * (cs.rows + 1) + 4ull * cs.nnz() + 4ull * cs.nnz();
        double elems = static_cast<double>(dims[0]) * dims[1];
        char row[256];
        std::snprintf(row, sizeof(row), "%zu,%zu,%.17g,%.17g,%.17g,%llu,%llu,%.17g,%.17g\n",
                      dims[0], dims[1], d, rosko_t.median_seconds, csr_t.median_seconds,
                      static_cast<unsigned long long>(rosko_bytes),
                      static_cast<unsigned long long>(csr_bytes),
                      elems / std::max(rosko_t.median_seconds, 1e-12),
                      elems / std::max(csr_t.median_seconds, 1e-12));
        sink.out() << row;
    }
    return kExitOk;
}

// -- presets ---------------------------------------------------------------------

int cmd_presets() {
    for (const auto& name : preset_names()) {
        MachineDescriptor m = preset(name);
        std::cout << m.name << ": cores=" << m.cores << " l1=" << m.l1_bytes
                  << " l2=" << m.l2_bytes << (m.l2_shared ? " (shared llc)" : "")
                  << " llc=" << m.llc_bytes << " lane_elems=" << m.lane_elems
                  << " vregs=" << m.vregs << " peak_flops_per_core=" << m.peak_flops_per_core
                  << " dram_bw=" << m.dram_bw_bytes_per_s << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rosko: row-skipping sparse matrix multiply bench/validation harness"};
    app.require_subcommand(1);

    // tiles
    auto* tiles = app.add_subcommand("tiles", "solve tile sizes and print the resource model");
    std::string tiles_machine = "intel-i9", tiles_csv;
    double tiles_density = 0.0, tiles_alpha = kDefaultAlpha;
    std::uint32_t tiles_m_r = 0;
    tiles->add_option("--machine", tiles_machine, "preset name or machine config path");
    tiles->add_option("--density", tiles_density, "nonzero fraction d in (0,1]")->required();
    tiles->add_option("--m-r", tiles_m_r, "override register height (cache solve only)");
    tiles->add_option("--alpha", tiles_alpha, "usable cache fraction");
    tiles->add_option("--csv", tiles_csv, "write CSV here instead of stdout");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a uniform-random sparse matrix file");
    std::string gen_dims, gen_mode = "real", gen_out;
    double gen_density = 0.1;
    std::uint64_t gen_seed = 42;
    gen->add_option("--dims", gen_dims, "MxK")->required();
    gen->add_option("--density", gen_density, "nonzero fraction");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--mode", gen_mode, "real|small-int");
    gen->add_option("--out", gen_out, "output path (.bin dense dump or .smtx)")->required();

    // pack
    auto* packc = app.add_subcommand("pack", "pack a sparse matrix and store it");
    std::string pack_machine = "intel-i9", pack_smtx, pack_mtx, pack_bin, pack_out;
    double pack_density_override = 0.0;
    packc->add_option("--machine", pack_machine, "preset name or machine config path");
    packc->add_option("--smtx", pack_smtx, "input .smtx path");
    packc->add_option("--mtx", pack_mtx, "input matrix market path");
    packc->add_option("--bin", pack_bin, "input dense dump path");
    packc->add_option("--density-override", pack_density_override,
                      "solve tiles for this density instead of the measured one");
    packc->add_option("--out", pack_out, "output .rpk path")->required();

    // run
    auto* run = app.add_subcommand("run", "run one SpMM and emit a bench record");
    std::string run_machine = "intel-i9", run_gen, run_mode = "small-int";
    std::string run_smtx, run_mtx, run_bin, run_packed, run_b, run_csv, run_audit_csv;
    double run_density = 0.1;
    std::uint64_t run_seed = 42;
    std::size_t run_n = 0;
    unsigned run_threads = 0, run_trials = 50;
    bool run_check = false, run_instrument = false;
    run->add_option("--machine", run_machine, "preset name or machine config path");
    run->add_option("--gen", run_gen, "generate the sparse operand, MxK");
    run->add_option("--density", run_density, "density for --gen");
    run->add_option("--seed", run_seed, "seed for --gen and the dense operand");
    run->add_option("--mode", run_mode, "real|small-int value mode for --gen");
    run->add_option("--smtx", run_smtx, "sparse operand from .smtx");
    run->add_option("--mtx", run_mtx, "sparse operand from matrix market");
    run->add_option("--bin", run_bin, "sparse operand from dense dump");
    run->add_option("--packed", run_packed, "sparse operand from a packed .rpk file");
    run->add_option("--n", run_n, "dense operand columns (generated)");
    run->add_option("--b", run_b, "dense operand from dense dump");
    run->add_option("--threads", run_threads, "worker threads (default: min(cores, hw))");
    run->add_option("--trials", run_trials, "timing trials (median reported)");
    run->add_flag("--check", run_check, "compare against the reference oracle");
    run->add_flag("--instrument", run_instrument, "collect the IO ledger and audit");
    run->add_option("--csv", run_csv, "write bench CSV here instead of stdout");
    run->add_option("--audit-csv", run_audit_csv, "write the audit CSV here");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "density x method x threads benchmark grid");
    std::string sweep_machine = "intel-i9", sweep_dims, sweep_densities;
    std::string sweep_methods = "rosko,csr,dense-ref", sweep_threads = "1", sweep_csv;
    std::string sweep_mode = "small-int";
    unsigned sweep_trials = 50;
    std::uint64_t sweep_seed = 42;
    double sweep_check_max = 16777216.0;
    sweep->add_option("--machine", sweep_machine, "preset name or machine config path");
    sweep->add_option("--dims", sweep_dims, "MxKxN")->required();
    sweep->add_option("--densities", sweep_densities, "comma-separated density list")->required();
    sweep->add_option("--methods", sweep_methods, "comma-separated: rosko,csr,dense-ref");
    sweep->add_option("--threads-list", sweep_threads, "comma-separated thread counts");
    sweep->add_option("--trials", sweep_trials, "timing trials per cell");
    sweep->add_option("--seed", sweep_seed, "generator seed");
    sweep->add_option("--mode", sweep_mode, "real|small-int (small-int keeps checks exact)");
    sweep->add_option("--check-max-elems", sweep_check_max,
                      "oracle-check cells when M*K*N is at most this");
    sweep->add_option("--csv", sweep_csv, "write CSV here instead of stdout");

    // pack-bench
    auto* pb = app.add_subcommand("pack-bench", "single-core pack throughput: rosko vs csr");
    std::string pb_machine = "intel-i9", pb_dims, pb_densities, pb_csv;
    unsigned pb_trials = 5;
    std::uint64_t pb_seed = 42;
    pb->add_option("--machine", pb_machine, "preset name or machine config path");
    pb->add_option("--dims", pb_dims, "MxK")->required();
    pb->add_option("--densities", pb_densities, "comma-separated density list")->required();
    pb->add_option("--trials", pb_trials, "timing trials");
    pb->add_option("--seed", pb_seed, "generator seed");
    pb->add_option("--csv", pb_csv, "write CSV here instead of stdout");

    // presets
    app.add_subcommand("presets", "list built-in machine descriptors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand("presets")) return cmd_presets();
        if (app.got_subcommand(tiles))
            return cmd_tiles(tiles_machine, tiles_density, tiles_m_r, tiles_alpha, tiles_csv);
        if (app.got_subcommand(gen))
            return cmd_gen(gen_dims, gen_density, gen_seed, gen_mode, gen_out);
        if (app.got_subcommand(packc)) {
            if (pack_smtx.empty() && pack_mtx.empty() && pack_bin.empty())
                throw std::runtime_error("pack: need one of --smtx/--mtx/--bin");
            return cmd_pack(pack_machine, pack_smtx, pack_mtx, pack_bin, pack_density_override,
                            pack_out);
        }
        if (app.got_subcommand(run)) {
            if (run_gen.empty() && run_smtx.empty() && run_mtx.empty() && run_bin.empty() &&
                run_packed.empty())
                throw std::runtime_error("run: need one of --gen/--smtx/--mtx/--bin/--packed");
            return cmd_run(run_machine, run_gen, run_density, run_seed, run_mode, run_smtx,
                           run_mtx, run_bin, run_packed, run_n, run_b, run_threads, run_trials,
                           run_check, run_instrument, run_csv, run_audit_csv);
        }
        if (app.got_subcommand(sweep))
            return cmd_sweep(sweep_machine, sweep_dims, sweep_densities, sweep_methods,
                             sweep_threads, sweep_trials, sweep_seed, sweep_mode, sweep_check_max,
                             sweep_csv);
        if (app.got_subcommand(pb))
            return cmd_pack_bench(pb_machine, pb_dims, pb_densities, pb_trials, pb_seed, pb_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
