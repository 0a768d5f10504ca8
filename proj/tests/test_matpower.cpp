#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gridlocus/loadflow.hpp"
#include "gridlocus/matpower.hpp"
#include "oracles.hpp"

using namespace gridlocus;

TEST(ImportMatpower, UnitConversion) {
  const GridCase grid = import_matpower(oracle::read_text(oracle::data_path("two_bus.m")));
  ASSERT_EQ(grid.n(), 1);
  EXPECT_EQ(grid.external_id(1), 2);
  EXPECT_DOUBLE_EQ(grid.buses()[1].p, -0.5);
  EXPECT_DOUBLE_EQ(grid.buses()[1].q, -0.2);
}

TEST(ImportMatpower, TapAndShifterUnsupported) {
  for (const char* name : {"two_bus_tap.m", "two_bus_shifter.m"}) {
    try {
      import_matpower(oracle::read_text(oracle::data_path(name)));
      FAIL() << name << " imported";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::UnsupportedFeature) << name;
    }
  }
}

TEST(ImportMatpower, MultipleReferenceBusesUnsupported) {
  const char* text = R"(mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.1 0.9;
  2 3 50 20 0 0 1 1 0 135 1 1.1 0.9;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 100 0; ];
mpc.branch = [ 1 2 0.01 0.1 0 100 100 100 0 0 1 -360 360; ];
)";
  try {
    import_matpower(text);
    FAIL() << "imported";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedFeature);
  }
}

TEST(ImportMatpower, OutOfServiceElementsIgnored) {
  const char* text = R"(mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.1 0.9;
  2 1 50 20 0 0 1 1 0 135 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 100 -100 1 100 1 100 0;
  2 40 10 100 -100 1 100 0 100 0;
];
mpc.branch = [
  1 2 0.01 0.1 0 100 100 100 0 0 1 -360 360;
  1 2 0.02 0.2 0 100 100 100 0.95 0 0 -360 360;
];
)";
  const GridCase grid = import_matpower(text);
  EXPECT_EQ(grid.branches().size(), 1u);
  EXPECT_DOUBLE_EQ(grid.buses()[1].p, -0.5);
}

// Reference: the 9-bus case solved by an established power-flow package with
// generator reactive outputs then held fixed (bus 1 slack).
TEST(ImportMatpower, NineBusMatchesReferenceSolution) {
  const GridCase grid = import_matpower(oracle::read_text(oracle::data_path("case9_pq.m")));
  ASSERT_EQ(grid.n(), 8);
  const LoadFlowSolution sol = newton_solve(grid, case_injections(grid), flat_start(grid), {1e-10, 20});

  const double vm[9] = {1.0, 1.0, 1.0, 0.987006852392, 0.975472177085, 1.003375436453,
                        0.985644881725, 0.996185245809, 0.95762104043};
  const double va[9] = {0.0, 9.668741126628, 4.771073237177, -2.406643919519, -4.017264326708,
                        1.925601686829, 0.621544555389, 3.799120192692, -4.349933576561};
  const Eigen::VectorXcd u = bus_voltages(grid, sol.x);
  for (int i = 0; i <= grid.n(); ++i) {
    const int id = grid.external_id(i);
    EXPECT_NEAR(std::abs(u[i]), vm[id - 1], 1e-8) << "bus " << id;
    EXPECT_NEAR(std::arg(u[i]) * 180.0 / std::numbers::pi, va[id - 1], 1e-7) << "bus " << id;
  }
}
