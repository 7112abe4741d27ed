#include <doctest.h>

#include "rosko/baseline.hpp"
#include "rosko/bench.hpp"
#include "rosko/generate.hpp"
#include "rosko/schedule.hpp"
#include "test_util.hpp"

using namespace rosko;

namespace {

// Small synthetic machine so modest dimensions span several blocks.
TileParams small_params(std::uint32_t p = 2) {
    TileParams tp;
    tp.m_c = 12;
    tp.k_c = 16;
    tp.m_r = 4;
    tp.n_r = 8;
    tp.p = p;
    tp.d = 0.2;
    return tp;
}

DenseMatrix run_rosko(const DenseMatrix& a, const DenseMatrix& b, const TileParams& tp,
                      unsigned threads, IoLedger* ledger = nullptr) {
    PackedMatrix packed = pack_matrix(a, tp);
    ExecPlan pl = plan(a.rows, a.cols, b.rows, b.cols, tp, ledger != nullptr);
    return rosko_spmm(packed, b, pl, threads, ledger);
}

} // namespace

TEST_CASE("plan grids") {
    TileParams tp = small_params();  // block span 24
    SUBCASE("exact single block") {
        ExecPlan pl = plan(24, 16, 16, 24, tp);
        CHECK(pl.n_mblocks() == 1);
        CHECK(pl.n_nblocks() == 1);
        CHECK(pl.n_ksteps() == 1);
        CHECK(pl.stripes_in_block(0) == 2);
    }
    SUBCASE("2.5 blocks of M gives 3 blocks with a ragged tail") {
        ExecPlan pl = plan(60, 16, 16, 24, tp);
        CHECK(pl.n_mblocks() == 3);
        CHECK(pl.block_rows(2) == 12);
        CHECK(pl.stripes_in_block(2) == 1);
    }
    SUBCASE("stripe areas tile C exactly") {
        ExecPlan pl = plan(61, 35, 35, 50, tp);
        std::size_t area = 0;
        for (std::size_t nb = 0; nb < pl.n_nblocks(); ++nb)
            for (std::size_t mb = 0; mb < pl.n_mblocks(); ++mb)
                for (std::size_t s = 0; s < pl.stripes_in_block(mb); ++s)
                    area += pl.stripe_rows(mb, s) * pl.block_cols(nb);
        CHECK(area == 61 * 50);
    }
    SUBCASE("inner dimension mismatch is rejected") {
        CHECK_THROWS_AS(plan(24, 16, 17, 24, tp), schedule_error);
    }
}

TEST_CASE("identity times B returns B exactly") {
    TileParams tp = small_params();
    DenseMatrix eye = testutil::identity(30);
    DenseMatrix b = gen_uniform_sparse(30, 40, 1.0, 5, ValueMode::Real);
    DenseMatrix c = run_rosko(eye, b, tp, 2);
    CHECK(c.values == b.values);
}

TEST_CASE("all-zero operand yields zero C, zero MACs, zero A traffic") {
    TileParams tp = small_params();
    DenseMatrix zero(25, 33);
    DenseMatrix b = gen_uniform_sparse(33, 20, 1.0, 6, ValueMode::Real);
    IoLedger ledger;
    DenseMatrix c = run_rosko(zero, b, tp, 2, &ledger);
    for (float v : c.values) CHECK(v == 0.0f);
    CHECK(ledger.mac_count == 0);
    CHECK(ledger.a_value_elems == 0);
    CHECK(ledger.c_write_elems == 25 * 20);
    CHECK(ledger.c_read_elems == 0);
}

TEST_CASE("executor equals the dense oracle across shapes, densities and threads") {
    SplitMix64 rng(90210);
    for (int trial = 0; trial < 30; ++trial) {
        TileParams tp = small_params(1 + rng.next() % 4);
        std::size_t m = 1 + rng.next() % 90;
        std::size_t k = 1 + rng.next() % 70;
        std::size_t n = 1 + rng.next() % 50;
        double d_choices[3] = {0.05, 0.2, 0.5};
        double d = d_choices[rng.next() % 3];
        unsigned threads = 1 + rng.next() % tp.p;
        CAPTURE(m);
        CAPTURE(k);
        CAPTURE(n);
        CAPTURE(threads);

        DenseMatrix a = gen_uniform_sparse(m, k, d, rng.next(), ValueMode::SmallInt);
        DenseMatrix b = gen_uniform_sparse(k, n, 1.0, rng.next(), ValueMode::SmallInt);
        DenseMatrix got = run_rosko(a, b, tp, threads);
        DenseMatrix want = dense_mm_ref(a, b);
        CHECK(got.values == want.values);  // exact in small-int range
    }
}

TEST_CASE("640-cube instances stay exact against the oracle in small-int range") {
    TileParams tp;
    tp.m_c = 48;
    tp.k_c = 64;
    tp.m_r = 16;
    tp.n_r = 8;
    tp.p = 4;
    for (double d : {0.05, 0.2, 0.5}) {
        DenseMatrix a = gen_uniform_sparse(640, 640, d, 640, ValueMode::SmallInt);
        DenseMatrix b = gen_uniform_sparse(640, 640, 1.0, 641, ValueMode::SmallInt);
        tp.d = d;
        DenseMatrix got = run_rosko(a, b, tp, 2);
        CHECK(got.values == dense_mm_ref(a, b).values);
    }
}

TEST_CASE("executor matches the oracle within tolerance on real values") {
    TileParams tp = small_params(2);
    DenseMatrix a = gen_uniform_sparse(64, 64, 0.3, 17, ValueMode::Real);
    DenseMatrix b = gen_uniform_sparse(64, 40, 1.0, 18, ValueMode::Real);
    CHECK(max_rel_error(run_rosko(a, b, tp, 2), dense_mm_ref(a, b)) <= 1e-5);
}

TEST_CASE("results are bitwise identical for every thread count") {
    TileParams tp = small_params(4);
    DenseMatrix a = gen_uniform_sparse(70, 55, 0.25, 40, ValueMode::SmallInt);
    DenseMatrix b = gen_uniform_sparse(55, 45, 1.0, 41, ValueMode::SmallInt);
    DenseMatrix base = run_rosko(a, b, tp, 1);
    for (unsigned t = 2; t <= 4; ++t) CHECK(run_rosko(a, b, tp, t).values == base.values);

    // real values too: per-element accumulation order is thread-independent
    DenseMatrix ar = gen_uniform_sparse(70, 55, 0.25, 42, ValueMode::Real);
    DenseMatrix br = gen_uniform_sparse(55, 45, 1.0, 43, ValueMode::Real);
    DenseMatrix base_r = run_rosko(ar, br, tp, 1);
    for (unsigned t = 2; t <= 4; ++t) CHECK(run_rosko(ar, br, tp, t).values == base_r.values);
}

TEST_CASE("executor validations") {
    TileParams tp = small_params(2);
    DenseMatrix a = gen_uniform_sparse(10, 10, 0.5, 1, ValueMode::Real);
    DenseMatrix b = gen_uniform_sparse(10, 10, 1.0, 2, ValueMode::Real);
    PackedMatrix packed = pack_matrix(a, tp);
    ExecPlan pl = plan(10, 10, 10, 10, tp);

    SUBCASE("thread count above p") {
        CHECK_THROWS_WITH_AS(rosko_spmm(packed, b, pl, 3), doctest::Contains("1..p"),
                             schedule_error);
    }
    SUBCASE("params mismatch between packing and plan") {
        TileParams other = tp;
        other.k_c = 8;
        ExecPlan pl2 = plan(10, 10, 10, 10, other);
        CHECK_THROWS_WITH_AS(rosko_spmm(packed, b, pl2, 1), doctest::Contains("packed"),
                             schedule_error);
    }
    SUBCASE("dimension mismatch") {
        DenseMatrix b2 = gen_uniform_sparse(10, 12, 1.0, 3, ValueMode::Real);
        CHECK_THROWS_AS(rosko_spmm(packed, b2, pl, 1), schedule_error);
    }
}

TEST_CASE("work law: instrumented MACs equal nnz * N") {
    TileParams tp = small_params(3);
    SplitMix64 rng(1001);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t m = 1 + rng.next() % 60;
        std::size_t k = 1 + rng.next() % 60;
        std::size_t n = 1 + rng.next() % 40;
        DenseMatrix a = gen_uniform_sparse(m, k, 0.3, rng.next(), ValueMode::Real);
        DenseMatrix b = gen_uniform_sparse(k, n, 1.0, rng.next(), ValueMode::Real);
        PackedMatrix packed = pack_matrix(a, tp);
        IoLedger ledger;
        ExecPlan pl = plan(m, k, k, n, tp, true);
        rosko_spmm(packed, b, pl, 2 + rng.next() % 2, &ledger);
        CHECK(ledger.mac_count == mac_count(packed, n));
        CHECK(mac_count(packed, n) == count_nonzeros(a) * n);
    }
}

TEST_CASE("mac_count closed forms") {
    TileParams tp = small_params(2);
    DenseMatrix zero(8, 8);
    CHECK(mac_count(pack_matrix(zero, tp), 100) == 0);

    DenseMatrix dense = gen_uniform_sparse(16, 12, 1.0, 5, ValueMode::Real);
    CHECK(mac_count(pack_matrix(dense, tp), 9) == 16ull * 12 * 9);

    tp.m_c = 32;
    tp.k_c = 48;
    tp.m_r = 8;
    DenseMatrix a = gen_uniform_sparse(300, 300, 0.13, 11, ValueMode::SmallInt);
    CHECK(mac_count(pack_matrix(a, tp), 256) == 2995200);
}

TEST_CASE("single write-back per element") {
    TileParams tp = small_params(2);
    DenseMatrix a = gen_uniform_sparse(50, 40, 0.4, 77, ValueMode::Real);
    DenseMatrix b = gen_uniform_sparse(40, 30, 1.0, 78, ValueMode::Real);
    IoLedger ledger;
    run_rosko(a, b, tp, 2, &ledger);
    CHECK(ledger.c_write_elems == 50 * 30);
    CHECK(ledger.c_read_elems == 0);
}

TEST_CASE("per-stripe nnz spread is observable") {
    TileParams tp = small_params(2);
    DenseMatrix a = gen_uniform_sparse(48, 32, 0.3, 3, ValueMode::Real);
    PackedMatrix packed = pack_matrix(a, tp);
    std::uint64_t total = 0;
    for (std::size_t mb = 0; mb < packed.n_mblocks(); ++mb)
        for (std::uint64_t s : stripe_nnz_spread(packed, mb)) total += s;
    CHECK(total == packed.total_nnz);
}
