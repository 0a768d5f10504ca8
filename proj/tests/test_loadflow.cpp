#include <gtest/gtest.h>

#include <random>

#include "gridlocus/loadflow.hpp"
#include "gridlocus/loss.hpp"
#include "oracles.hpp"

using namespace gridlocus;

namespace {

GridCase single_pq(double p, double q, double r = 0.01, double x = 0.1) {
  return GridCase::create({{0, BusKind::Swing}, {1, BusKind::PQ, p, q}}, {{0, 1, r, x}});
}

Eigen::MatrixXd fd_of_mismatch(const GridCase& grid, const StateVector& x, const InjectionVector& s) {
  return oracle::fd_jacobian(
      [&](const Eigen::VectorXd& xs) { return mismatch(grid, StateVector::from_stacked(xs), s).f; }, x.stacked(),
      1e-6);
}

}  // namespace

TEST(Mismatch, FlatStartZeroInjectionsIsExactlyZero) {
  const GridCase grid = oracle::load_fixture("zero_injection.json");
  const Mismatch m = mismatch(grid, flat_start(grid), case_injections(grid));
  EXPECT_EQ(m.f, Eigen::VectorXd::Zero(4));
}

TEST(Mismatch, FlatStartEqualsMinusInjection) {
  const GridCase grid = single_pq(-0.5, -0.2);
  const Mismatch m = mismatch(grid, flat_start(grid), case_injections(grid));
  EXPECT_NEAR(m.f[0], 0.5, 1e-15);
  EXPECT_NEAR(m.f[1], 0.2, 1e-15);
}

TEST(Mismatch, MatchesComplexPowerOracle) {
  std::mt19937 rng(21);
  const GridCase two = oracle::load_fixture("two_bus.json");
  for (int trial = 0; trial < 60; ++trial) {
    const GridCase grid = trial < 10 ? two : oracle::random_case(rng);
    const StateVector x = oracle::random_state(rng, grid.n());
    const InjectionVector s = case_injections(grid);
    const Mismatch m = mismatch(grid, x, s);
    const auto power = oracle::complex_power(grid, x);
    for (int i = 0; i < grid.n(); ++i) {
      EXPECT_NEAR(m.s_calc.p[i], power[static_cast<std::size_t>(i + 1)].real(), 1e-12);
      EXPECT_NEAR(m.s_calc.q[i], power[static_cast<std::size_t>(i + 1)].imag(), 1e-12);
      EXPECT_DOUBLE_EQ(m.f[i], m.s_calc.p[i] - s.p[i]);
      EXPECT_DOUBLE_EQ(m.f[grid.n() + i], m.s_calc.q[i] - s.q[i]);
    }
  }
}

TEST(Mismatch, DimensionMismatch) {
  const GridCase grid = single_pq(-0.5, -0.2);
  const StateVector bad{Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)};
  try {
    mismatch(grid, bad, case_injections(grid));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  const InjectionVector bad_s{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
  EXPECT_THROW(mismatch(grid, flat_start(grid), bad_s), Error);
  EXPECT_THROW(jacobian(grid, bad), Error);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const GridCase grid = oracle::random_case(rng);
    const StateVector x = oracle::random_state(rng, grid.n());
    const InjectionVector s = case_injections(grid);
    const Eigen::MatrixXd j = jacobian(grid, x);
    const Eigen::MatrixXd fd = fd_of_mismatch(grid, x, s);
    for (Eigen::Index k = 0; k < j.cols(); ++k) {
      EXPECT_LE(oracle::rel_error(j.col(k), fd.col(k)), 1e-6) << "trial " << trial << " column " << k;
    }
  }
}

TEST(Jacobian, LosslessFlatStartBlockVanishes) {
  const GridCase grid = single_pq(0.0, 0.0, 0.0, 0.1);
  const StateVector x = flat_start(grid);
  const Eigen::MatrixXd j = jacobian(grid, x);
  const Eigen::MatrixXd fd = fd_of_mismatch(grid, x, case_injections(grid));
  EXPECT_EQ(j(0, 0), 0.0);
  EXPECT_NEAR(fd(0, 0), 0.0, 1e-9);
  EXPECT_NEAR(j(1, 1), 0.0, 1e-12);
  EXPECT_NEAR(j(0, 1), 10.0, 1e-12);
  EXPECT_NEAR(j(1, 0), 10.0, 1e-12);
  EXPECT_LE((j - fd).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Jacobian, PermutationEquivariant) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const GridCase grid = oracle::random_case(rng);
    std::vector<Bus> buses(grid.buses().begin(), grid.buses().end());
    std::shuffle(buses.begin() + 1, buses.end(), rng);
    std::vector<Branch> branches;
    for (auto br : grid.branches()) {
      br.from = grid.external_id(br.from);
      br.to = grid.external_id(br.to);
      branches.push_back(br);
    }
    const GridCase permuted = GridCase::create(buses, branches);
    const int n = grid.n();
    const StateVector x = oracle::random_state(rng, n);
    StateVector px{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    std::vector<int> map(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      map[static_cast<std::size_t>(i)] = permuted.internal_index(grid.external_id(i + 1)) - 1;
      px.u[map[static_cast<std::size_t>(i)]] = x.u[i];
      px.v[map[static_cast<std::size_t>(i)]] = x.v[i];
    }
    const Eigen::MatrixXd a = jacobian(grid, x);
    const Eigen::MatrixXd b = jacobian(permuted, px);
    for (int r = 0; r < 2 * n; ++r) {
      for (int c = 0; c < 2 * n; ++c) {
        const int pr = (r / n) * n + map[static_cast<std::size_t>(r % n)];
        const int pc = (c / n) * n + map[static_cast<std::size_t>(c % n)];
        EXPECT_NEAR(a(r, c), b(pr, pc), 1e-12);
      }
    }
  }
}

TEST(FlatStart, Profiles) {
  const GridCase grid = oracle::load_fixture("ring16_base.json");
  const StateVector x = flat_start(grid);
  EXPECT_EQ(x.u, Eigen::VectorXd::Ones(15));
  EXPECT_EQ(x.v, Eigen::VectorXd::Zero(15));

  const GridCase raised =
      GridCase::create({{0, BusKind::Swing, 0, 0, {1.05, 0.0}}, {1, BusKind::PQ}, {2, BusKind::PQ}},
                       {{0, 1, 0.01, 0.1}, {1, 2, 0.01, 0.1}});
  EXPECT_EQ(flat_start(raised).u, Eigen::VectorXd::Constant(2, 1.05));

  const GridCase alone = GridCase::create({{0, BusKind::Swing}}, {});
  EXPECT_EQ(flat_start(alone).size(), 0);
  EXPECT_EQ(newton_solve(alone, case_injections(alone), flat_start(alone)).iterations, 0);
}

TEST(NewtonSolve, ZeroInjectionsConvergeImmediately) {
  const GridCase grid = oracle::load_fixture("zero_injection.json");
  const LoadFlowSolution sol = newton_solve(grid, case_injections(grid), flat_start(grid));
  EXPECT_LE(sol.iterations, 1);
  EXPECT_EQ(sol.x.u, Eigen::VectorXd::Ones(2));
  EXPECT_EQ(sol.x.v, Eigen::VectorXd::Zero(2));
}

TEST(NewtonSolve, TwoBusMatchesClosedForm) {
  const oracle::TwoBus tb;
  const GridCase grid = tb.grid();
  const LoadFlowSolution sol = newton_solve(grid, case_injections(grid), flat_start(grid));
  const std::complex<double> expected = tb.voltage();
  EXPECT_LE(std::abs(std::complex<double>(sol.x.u[0], sol.x.v[0]) - expected), 1e-8);
  EXPECT_LT(sol.residual_history.back(), 1e-8);
  EXPECT_EQ(sol.residual_history.size(), static_cast<std::size_t>(sol.iterations + 1));
}

TEST(NewtonSolve, TwoBusClosedFormAcrossLoads) {
  for (double scale : {0.2, 1.0, 3.0, 5.0, 6.0}) {
    oracle::TwoBus tb;
    tb.s *= scale;
    ASSERT_TRUE(tb.solvable());
    const GridCase grid = tb.grid();
    const LoadFlowSolution sol = newton_solve(grid, case_injections(grid), flat_start(grid));
    EXPECT_LE(std::abs(std::complex<double>(sol.x.u[0], sol.x.v[0]) - tb.voltage()), 1e-8) << scale;
  }
}

TEST(NewtonSolve, BeyondTwoBusLimitFails) {
  const oracle::TwoBus base;
  const double limit = base.limit_scale();
  EXPECT_NEAR(limit, 6.3203, 1e-3);
  for (double factor : {1.01, 1.5, 3.0}) {
    oracle::TwoBus tb;
    tb.s *= factor * limit;
    ASSERT_FALSE(tb.solvable());
    const GridCase grid = tb.grid();
    try {
      newton_solve(grid, case_injections(grid), flat_start(grid));
      FAIL() << "converged beyond the limit, factor " << factor;
    } catch (const NoConvergenceError& e) {
      EXPECT_EQ(e.last().iterations, 20);
      EXPECT_EQ(e.last().residual_history.size(), 21u);
    } catch (const SingularJacobianError& e) {
      EXPECT_EQ(e.bus_id(), 1);
    }
  }
}

TEST(JacobianLU, DegeneratePivotNamesBus) {
  const GridCase grid =
      GridCase::create({{10, BusKind::Swing}, {20, BusKind::PQ}, {30, BusKind::PQ}}, {{10, 20, 0.01, 0.1}, {20, 30, 0.01, 0.1}});
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m.col(3).setZero();
  try {
    JacobianLU lu(grid, m, "test");
    FAIL();
  } catch (const SingularJacobianError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularJacobian);
    EXPECT_EQ(e.bus_id(), 30);
    EXPECT_EQ(e.component(), 'v');
  }
  m = Eigen::MatrixXd::Identity(4, 4);
  m.col(0) = m.col(2);
  try {
    JacobianLU lu(grid, m, "test");
    FAIL();
  } catch (const SingularJacobianError& e) {
    EXPECT_TRUE(e.bus_id() == 20) << e.what();
  }
}

TEST(JacobianLU, TransposedSolve) {
  std::mt19937 rng(26);
  const GridCase grid = oracle::random_case(rng);
  const Eigen::MatrixXd j = jacobian(grid, oracle::random_state(rng, grid.n()));
  const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(j.rows(), -1.0, 2.0);
  const JacobianLU lu(grid, j, "test");
  EXPECT_LE((j.transpose() * lu.solve_transposed(rhs) - rhs).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((j * lu.solve(rhs) - rhs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(NewtonSolve, OptionValidation) {
  const GridCase grid = single_pq(-0.1, 0.0);
  EXPECT_THROW(newton_solve(grid, case_injections(grid), flat_start(grid), {0.0, 20}), Error);
  EXPECT_THROW(newton_solve(grid, case_injections(grid), flat_start(grid), {1e-8, 0}), Error);
}

TEST(NewtonSolve, PowerBalanceClosesWithLosses) {
  std::mt19937 rng(24);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const GridCase grid = oracle::random_case(rng, {10, false, false});
    const InjectionVector s = case_injections(grid);
    LoadFlowSolution sol;
    try {
      sol = newton_solve(grid, s, flat_start(grid));
    } catch (const Error&) {
      continue;
    }
    ++solved;
    const double balance = swing_injection(grid, sol.x).real() + s.p.sum() - oracle::losses(grid, sol.x);
    EXPECT_LE(std::abs(balance), 1e-7) << "trial " << trial;
  }
  EXPECT_GE(solved, 50);
}

TEST(NewtonSolve, IndependentOfBusOrder) {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const GridCase grid = oracle::random_case(rng, {10, true, false});
    std::vector<Bus> buses(grid.buses().begin(), grid.buses().end());
    std::reverse(buses.begin() + 1, buses.end());
    std::vector<Branch> branches;
    for (auto br : grid.branches()) {
      br.from = grid.external_id(br.from);
      br.to = grid.external_id(br.to);
      branches.insert(branches.begin(), br);
    }
    const GridCase reordered = GridCase::create(buses, branches);
    LoadFlowSolution a;
    try {
      a = newton_solve(grid, case_injections(grid), flat_start(grid));
    } catch (const Error&) {
      continue;
    }
    const LoadFlowSolution b = newton_solve(reordered, case_injections(reordered), flat_start(reordered));
    for (int i = 0; i < grid.n(); ++i) {
      const int j = reordered.internal_index(grid.external_id(i + 1)) - 1;
      EXPECT_NEAR(a.x.u[i], b.x.u[j], 1e-9);
      EXPECT_NEAR(a.x.v[i], b.x.v[j], 1e-9);
    }
  }
}

TEST(ConditionNumber, Basics) {
  EXPECT_DOUBLE_EQ(condition_number(Eigen::MatrixXd::Identity(3, 3)), 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 0.5;
  EXPECT_DOUBLE_EQ(condition_number(d), 8.0);
}
