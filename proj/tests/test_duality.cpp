#include <stdexcept>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "slp/duality.hpp"
#include "slp/oracle.hpp"
#include "support.hpp"

using namespace slp;

namespace {

CISystem margin_system() {
    CISystem sys;
    sys.users = 1;
    sys.antennas = 1;
    sys.rows_per_user = 3;  // not a built shape, but the evaluators only read rows
    sys.A = Mat(3, 2);
    sys.A(0, 0) = 1.0;
    sys.A(1, 1) = 1.0;
    sys.A(2, 0) = 1.0;
    sys.A(2, 1) = 1.0;
    sys.b = {1.0, 1.0, 2.0};
    sys.eq_mask = {0, 0, 0};
    sys.gamma = {1.0};
    sys.sigma = {1.0};
    return sys;
}

}  // namespace

TEST_CASE("balance level is the worst row ratio") {
    CISystem sys = margin_system();
    CHECK(evaluate_balance(sys, {2.0, 3.0}) == doctest::Approx(2.0));  // rows give 2, 3, 2.5

    // An equality row drops out of the minimum but reports its deviation.
    sys.eq_mask = {0, 1, 0};
    double dev = -1.0;
    double mu = evaluate_balance(sys, {2.0, 3.0}, &dev);
    CHECK(mu == doctest::Approx(2.0));
    CHECK(dev == doctest::Approx(1.0));  // |3 - 2 * 1|

    // All-equality systems fall back to the plain minimum.
    sys.eq_mask = {1, 1, 1};
    CHECK(evaluate_balance(sys, {2.0, 3.0}) == doctest::Approx(2.0));

    sys.eq_mask = {0, 0, 0};
    sys.b[1] = 0.0;
    CHECK_THROWS_AS(evaluate_balance(sys, {2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("power scaling identities") {
    Vec x_pm = {1.0, 2.0};
    double p_pm = 5.0;
    SBResult sb = pm_to_sb(x_pm, p_pm, 20.0);
    CHECK(sb.mu == doctest::Approx(2.0));
    CHECK(sb.x[0] == doctest::Approx(2.0));
    CHECK(sb.x[1] == doctest::Approx(4.0));
    CHECK(sb.power_used == doctest::Approx(20.0).epsilon(1e-14));

    auto [x_back, p_back] = sb_to_pm(sb.x, sb.mu, 20.0);
    CHECK(x_back[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x_back[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p_back == doctest::Approx(5.0).epsilon(1e-14));

    CHECK_THROWS_AS(pm_to_sb(x_pm, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pm_to_sb(x_pm, 1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(sb_to_pm(x_pm, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("bisection lands on the scaled power-minimal solution") {
    ComplexChannel ch{1, 1, {cplx(1.0, 0.0)}};
    ConstellationSpec spec = make_constellation(ModKind::PSK, 4);
    CISystem sys = build_ci_system(ch, {0}, spec, Vec{1.0}, Vec{1.0});
    // Power-minimal power is 1, so a budget of 4 doubles every margin.
    SBResult sb = bisection_sb(sys, 4.0, oracle_pm_solver(1e-10, 500000, true), 1e-4);
    CHECK(std::fabs(sb.mu - 2.0) < 1e-3);
    CHECK(sb.power_used == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sb.pm_solves > 2);
}

TEST_CASE("bisection margin matches the duality prediction on random systems") {
    for (auto [kind, order] : {std::pair{ModKind::PSK, 4}, {ModKind::SquareQAM, 16}}) {
        CISystem sys = testsup::random_system(900 + order, 3, 6, kind, order);
        auto solve = oracle_pm_solver(1e-9, 2000000, true);
        auto [x_pm, p_pm] = solve(sys);
        SBResult sb = bisection_sb(sys, 1.0, solve, 1e-4);
        CHECK(std::fabs(sb.mu - std::sqrt(1.0 / p_pm)) < 1e-3);
        CHECK(sb.power_used == doctest::Approx(1.0).epsilon(1e-12));
        // The direct identity gives the same transmit vector up to the
        // bisection tolerance.
        SBResult direct = pm_to_sb(x_pm, p_pm, 1.0);
        double diff = 0.0;
        for (std::size_t i = 0; i < sb.x.size(); ++i) diff = std::max(diff, std::fabs(sb.x[i] - direct.x[i]));
        CHECK(diff < 1e-3);
    }
}

TEST_CASE("bisection input validation") {
    CISystem sys = margin_system();
    auto solve = oracle_pm_solver();
    CHECK_THROWS_AS(bisection_sb(sys, 0.0, solve), std::invalid_argument);
    CHECK_THROWS_AS(bisection_sb(sys, 1.0, solve, 0.0), std::invalid_argument);

    // A solver claiming zero power means the margin is unbounded.
    PmSolver free_solver = [](const CISystem& s) { return std::pair<Vec, double>(Vec(s.cols(), 0.0), 0.0); };
    CHECK_THROWS_AS(bisection_sb(sys, 1.0, free_solver), std::runtime_error);
}
