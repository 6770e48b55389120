#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "slp/pif_solver.hpp"
#include "support.hpp"

using namespace slp;

namespace {

CISystem unit_qpsk_system() {
    ComplexChannel ch{1, 1, {cplx(1.0, 0.0)}};
    ConstellationSpec spec = make_constellation(ModKind::PSK, 4);
    return build_ci_system(ch, {0}, spec, Vec{1.0}, Vec{1.0});
}

}  // namespace

TEST_CASE("benchmarked parameter presets") {
    PJADMMConfig c = default_config(8, 8, ModKind::PSK);
    CHECK(c.rho == doctest::Approx(0.3));
    CHECK(c.delta_tol == doctest::Approx(1e-2));
    CHECK(c.max_iters == 100);
    CHECK(c.preset_tuned);
    CHECK_FALSE(c.fixed_iters.has_value());

    c = default_config(8, 8, ModKind::SquareQAM, SlpMode::PowerMin);
    CHECK(c.rho == doctest::Approx(0.8));
    CHECK(c.delta_tol == doctest::Approx(1e-7));
    CHECK(c.max_iters == 4000);

    c = default_config(8, 8, ModKind::SquareQAM, SlpMode::SinrBalance);
    CHECK(c.delta_tol == doctest::Approx(1e-4));
    CHECK(c.max_iters == 300);

    c = default_config(12, 12, ModKind::SquareQAM, SlpMode::PowerMin);
    CHECK(c.rho == doctest::Approx(0.8));
    CHECK(c.delta_tol == doctest::Approx(1e-6));

    c = default_config(12, 16, ModKind::PSK);
    CHECK(c.rho == doctest::Approx(0.075));
    CHECK(c.beta == doctest::Approx(1.65));
    REQUIRE(c.fixed_iters.has_value());
    CHECK(*c.fixed_iters == 40);

    c = default_config(12, 16, ModKind::SquareQAM);
    CHECK(c.rho == doctest::Approx(0.07));
    CHECK(c.beta == doctest::Approx(1.1));
    CHECK(*c.fixed_iters == 150);

    c = default_config(24, 32, ModKind::PSK);
    CHECK(c.rho == doctest::Approx(0.03));
    c = default_config(48, 64, ModKind::PSK);
    CHECK(c.rho == doctest::Approx(0.015));

    // Unbenchmarked size: scaled penalty, conservative stopping, flagged.
    c = default_config(4, 8, ModKind::PSK);
    CHECK(c.rho == doctest::Approx(0.06 * 192.0 / 32.0));
    CHECK(c.delta_tol == doctest::Approx(1e-8));
    CHECK_FALSE(c.preset_tuned);

    CHECK_THROWS_AS(default_config(0, 8, ModKind::PSK), std::invalid_argument);
}

TEST_CASE("config validation") {
    CISystem sys = unit_qpsk_system();
    PJADMMConfig cfg;
    cfg.rho = 0.0;
    CHECK_THROWS_AS(solve_pm(sys, cfg), std::invalid_argument);
    cfg.rho = 1.0;
    cfg.beta = 2.0;
    CHECK_THROWS_AS(solve_pm(sys, cfg), std::invalid_argument);
    cfg.beta = 1.0;
    cfg.tau = -0.5;
    CHECK_THROWS_AS(solve_pm(sys, cfg), std::invalid_argument);
    cfg.tau.reset();
    cfg.fixed_iters = 0;
    CHECK_THROWS_AS(solve_pm(sys, cfg), std::invalid_argument);
    cfg.fixed_iters.reset();
    cfg.partition = PartitionStrategy::Contiguous;
    cfg.n_blocks = 99;
    CHECK_THROWS_AS(solve_pm(sys, cfg), std::invalid_argument);
}

TEST_CASE("first iteration on the unit system, by hand") {
    // rho = 1, tau = 1.6: c1 = 0 (all rows start short of threshold),
    // r = b = (1, 1), x1 = rho * A^T r / 3.6 = (sqrt2/3.6, sqrt2/3.6),
    // lambda1 = 1 - 2/3.6 = 4/9 per row.
    CISystem sys = unit_qpsk_system();
    PJADMMConfig cfg;
    cfg.rho = 1.0;
    cfg.tau = 1.6;
    cfg.fixed_iters = 1;
    PifResult res = solve_pm(sys, cfg);
    const double x1 = 1.4142135623730951 / 3.6;
    CHECK(res.x[0] == doctest::Approx(x1).epsilon(1e-12));
    CHECK(res.x[1] == doctest::Approx(x1).epsilon(1e-12));
    CHECK(res.c == Vec{0.0, 0.0});
    CHECK(res.lambda[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(res.lambda[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(res.report.iters == 1);
    CHECK_FALSE(res.report.hit_delta_tol);
    CHECK(res.report.tau == doctest::Approx(1.6));
}

TEST_CASE("unit system converges to the known optimum") {
    CISystem sys = unit_qpsk_system();
    PJADMMConfig cfg;
    cfg.rho = 1.0;
    cfg.delta_tol = 1e-12;
    cfg.max_iters = 5000;
    PifResult res = solve_pm(sys, cfg);
    CHECK(res.report.hit_delta_tol);
    const double inv_sqrt2 = 0.7071067811865476;
    CHECK(res.x[0] == doctest::Approx(inv_sqrt2).epsilon(1e-9));
    CHECK(res.x[1] == doctest::Approx(inv_sqrt2).epsilon(1e-9));
    CHECK(res.report.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.lambda[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.lambda[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.report.max_infeas < 1e-9);
    CHECK(res.report.kkt_residual < 1e-8);
    // tau defaulted to 0.8 * rho * ||A||^2 with ||A|| = sqrt(2).
    CHECK(res.report.tau == doctest::Approx(1.6).epsilon(1e-6));
    CHECK(res.report.a_norm == doctest::Approx(1.4142135623730951).epsilon(1e-6));
}

TEST_CASE("one driver iteration equals the composed updates") {
    CISystem sys = testsup::random_system(31, 4, 6, ModKind::PSK, 4);
    PJADMMConfig cfg;
    cfg.rho = 0.2;
    cfg.tau = 3.0;
    cfg.fixed_iters = 1;
    PifResult drv = solve_pm(sys, cfg);

    SolverState st = init_state(sys);
    update_c(st, sys, cfg.rho, false);
    st.x = update_x_blocks(st, sys, cfg.rho, *cfg.tau);
    st.ax = matvec(sys.A, st.x);
    update_lambda(st, sys, cfg.rho, cfg.beta);

    CHECK(drv.x == st.x);
    CHECK(drv.c == st.c);
    CHECK(drv.lambda == st.lambda);
}

TEST_CASE("iterates are identical for every partition") {
    CISystem sys = testsup::random_system(37, 4, 8, ModKind::SquareQAM, 16);
    auto run = [&](PartitionStrategy p, int blocks) {
        PJADMMConfig cfg;
        cfg.rho = 0.5;
        cfg.fixed_iters = 30;
        cfg.partition = p;
        cfg.n_blocks = blocks;
        return solve_pm(sys, cfg);
    };
    PifResult base = run(PartitionStrategy::Contiguous, 1);
    PifResult scalar = run(PartitionStrategy::PerScalar, 1);
    PifResult ant = run(PartitionStrategy::PerAntenna, 1);
    PifResult five = run(PartitionStrategy::Contiguous, 5);
    CHECK(base.x == scalar.x);
    CHECK(base.x == ant.x);
    CHECK(base.x == five.x);
    CHECK(base.lambda == scalar.lambda);
    CHECK(base.lambda == five.lambda);
}

TEST_CASE("generic and dedicated row paths produce the same bits") {
    CISystem sys = testsup::random_system(41, 4, 8, ModKind::PSK, 4);
    REQUIRE(std::none_of(sys.eq_mask.begin(), sys.eq_mask.end(), [](auto m) { return m != 0; }));
    PJADMMConfig cfg;
    cfg.rho = 0.36;
    cfg.fixed_iters = 40;
    std::vector<IterationRecord> tr_fast, tr_generic;
    PifResult fast = solve_pm(sys, cfg, &tr_fast);
    cfg.force_generic_rows = true;
    PifResult gen = solve_pm(sys, cfg, &tr_generic);
    CHECK(fast.x == gen.x);
    CHECK(fast.c == gen.c);
    CHECK(fast.lambda == gen.lambda);
    REQUIRE(tr_fast.size() == tr_generic.size());
    for (std::size_t i = 0; i < tr_fast.size(); ++i) {
        CHECK(tr_fast[i].objective == tr_generic[i].objective);
        CHECK(tr_fast[i].delta == tr_generic[i].delta);
    }
}

TEST_CASE("iterates scale linearly with the thresholds") {
    RandomStream st(43, 0);
    ComplexChannel ch = gen_channel(3, 6, st);
    ConstellationSpec spec = make_constellation(ModKind::PSK, 4);
    CISystem one = build_ci_system(ch, {0, 2, 3}, spec, Vec{1.0}, Vec{1.0});
    CISystem nine = build_ci_system(ch, {0, 2, 3}, spec, Vec{9.0}, Vec{1.0});  // b exactly tripled
    PJADMMConfig cfg;
    cfg.rho = 0.4;
    cfg.fixed_iters = 60;
    PifResult r1 = solve_pm(one, cfg);
    PifResult r3 = solve_pm(nine, cfg);
    for (int i = 0; i < one.cols(); ++i) CHECK(r3.x[i] == doctest::Approx(3.0 * r1.x[i]).epsilon(1e-10));
    CHECK(r3.report.objective == doctest::Approx(9.0 * r1.report.objective).epsilon(1e-10));
}

TEST_CASE("divergence guard trips on a hopeless penalty") {
    CISystem sys = testsup::random_system(47, 2, 4, ModKind::PSK, 4);
    PJADMMConfig cfg;
    cfg.rho = 1e10;
    cfg.tau = 0.0;
    cfg.max_iters = 50;
    CHECK_THROWS_AS(solve_pm(sys, cfg), DivergenceError);
    try {
        solve_pm(sys, cfg);
    } catch (const DivergenceError& e) {
        CHECK(e.iteration >= 1);
        CHECK(e.iteration <= 50);
    }
}

TEST_CASE("trace matches the report") {
    CISystem sys = testsup::random_system(53, 3, 5, ModKind::PSK, 8);
    PJADMMConfig cfg;
    cfg.rho = 0.3;
    cfg.fixed_iters = 25;
    std::vector<IterationRecord> trace;
    PifResult res = solve_pm(sys, cfg, &trace);
    REQUIRE(trace.size() == 25);
    CHECK(trace.front().iter == 1);
    CHECK(trace.back().iter == 25);
    CHECK(trace.back().objective == res.report.objective);
    CHECK(trace.back().delta == res.report.final_delta);
    CHECK(trace.back().kkt_residual == res.report.kkt_residual);
    CHECK(trace.back().max_infeas == res.report.max_infeas);
    // The flop ledger counts only iteration arithmetic, linear in iters.
    long long m = sys.rows(), n = sys.cols();
    CHECK(res.report.flop_estimate == 25 * (4 * m * n + 11 * m + 7 * n + 1));
}

TEST_CASE("equality rows are honored at convergence") {
    // Force interior symbols so both rows of one user are equalities.
    ConstellationSpec spec = make_constellation(ModKind::SquareQAM, 16);
    RandomStream st(59, 0);
    ComplexChannel ch = gen_channel(2, 5, st);
    CISystem sys = build_ci_system(ch, {5, 10}, spec, Vec{1.0}, Vec{1.0});
    REQUIRE(std::count(sys.eq_mask.begin(), sys.eq_mask.end(), 1) == 4);
    PJADMMConfig cfg;
    cfg.rho = 0.4;
    cfg.delta_tol = 1e-11;
    cfg.max_iters = 60000;
    PifResult res = solve_pm(sys, cfg);
    REQUIRE(res.report.hit_delta_tol);
    Vec r = evaluate_constraints(sys, res.x);
    for (int j = 0; j < sys.rows(); ++j)
        if (sys.eq_mask[j]) CHECK(std::fabs(r[j]) < 1e-7);
}
