#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gridlocus/errors.hpp"
#include "gridlocus/network.hpp"

namespace gridlocus {

/// Rectangular voltages of the non-swing buses: U_i = u_i + j v_i for
/// internal bus i+1. The swing voltage lives in the GridCase.
struct StateVector {
  Eigen::VectorXd u;
  Eigen::VectorXd v;

  int size() const noexcept { return static_cast<int>(u.size()); }
  /// (u, v) stacked into one vector of length 2n.
  Eigen::VectorXd stacked() const;
  static StateVector from_stacked(const Eigen::Ref<const Eigen::VectorXd>& x);
};

/// Net injections (generation positive) of the non-swing buses.
struct InjectionVector {
  Eigen::VectorXd p;
  Eigen::VectorXd q;

  int size() const noexcept { return static_cast<int>(p.size()); }
  Eigen::VectorXd stacked() const;
  static InjectionVector from_stacked(const Eigen::Ref<const Eigen::VectorXd>& s);
};

/// F(x, S) = s_calc(x) - S, ordered (dP_1..dP_n, dQ_1..dQ_n).
struct Mismatch {
  Eigen::VectorXd f;
  InjectionVector s_calc;
};

struct NewtonOptions {
  double tol = 1e-8;  // on the infinity norm of the mismatch
  int max_iter = 20;
};

struct LoadFlowSolution {
  StateVector x;
  int iterations = 0;
  std::vector<double> residual_history;  // infinity norms, one per visited iterate
};

/// Newton's method ran out of iterations. Carries the last iterate.
class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(LoadFlowSolution last);

  const LoadFlowSolution& last() const noexcept { return last_; }

 private:
  LoadFlowSolution last_;
};

/// Specified injections read from the case's PQ buses.
InjectionVector case_injections(const GridCase& grid);

/// u = |v_swing|, v = 0 on every non-swing bus.
StateVector flat_start(const GridCase& grid);

/// Complex voltages of all n+1 buses (swing first).
Eigen::VectorXcd bus_voltages(const GridCase& grid, const StateVector& x);

Mismatch mismatch(const GridCase& grid, const StateVector& x, const InjectionVector& s);

/// Analytic dF/dx, 2n x 2n, rows ordered as Mismatch, columns as (u, v).
Eigen::MatrixXd jacobian(const GridCase& grid, const AdmittanceMatrix& adm, const StateVector& x);
Eigen::MatrixXd jacobian(const GridCase& grid, const StateVector& x);

/// Complex power injected by the swing bus, U_0 conj(sum_k Y_0k U_k).
std::complex<double> swing_injection(const GridCase& grid, const StateVector& x);

/// Newton-Raphson on F(x, S) = 0 with a halving backstep (up to 8 halvings)
/// whenever the full step would increase the residual norm.
/// Throws SingularJacobianError or NoConvergenceError.
LoadFlowSolution newton_solve(const GridCase& grid, const InjectionVector& s, const StateVector& x0,
                              const NewtonOptions& opts = {});

/// LU factorization of a Jacobian that reports degenerate pivots by bus.
class JacobianLU {
 public:
  /// Throws SingularJacobianError if a pivot is numerically zero.
  JacobianLU(const GridCase& grid, const Eigen::MatrixXd& j, const char* context);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }
  /// Solves J^T y = rhs.
  Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

/// 2-norm condition number of a square matrix (infinite when singular).
double condition_number(const Eigen::MatrixXd& m);

void check_dimensions(const GridCase& grid, const StateVector& x);
void check_dimensions(const GridCase& grid, const InjectionVector& s);

}  // namespace gridlocus
