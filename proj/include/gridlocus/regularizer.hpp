#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gridlocus/errors.hpp"
#include "gridlocus/loadflow.hpp"
#include "gridlocus/network.hpp"

namespace gridlocus {

struct RegularizerOptions {
  double alpha = 0.1;
  double grad_tol = 1e-8;
  int max_iter = 200;
  std::optional<StateVector> warm_start;  // flat start when empty
};

struct TraceEntry {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step_length = 0.0;  // 0 for the starting point
};

struct StationaryPoint {
  StateVector x_star;
  double alpha = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;  // ||grad Phi(x*)||_inf
  Mismatch residual;       // F(x*, S)
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(StationaryPoint last, const std::string& reason);

  const StationaryPoint& last() const noexcept { return last_; }

 private:
  StationaryPoint last_;
};

/// Phi(x) = 1/2 ||F(x, S)||^2 + alpha L(x).
double objective(const GridCase& grid, const InjectionVector& s, const StateVector& x, double alpha);

/// J(x)^T F(x, S) + alpha grad_x L(x).
Eigen::VectorXd objective_grad(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                               double alpha);

/// sum_i f_i Hess F_i, the second-order part of the Hessian of 1/2 ||F||^2.
/// F is quadratic in x, so this depends on x only through f.
Eigen::MatrixXd residual_curvature(const GridCase& grid, const AdmittanceMatrix& adm,
                                   const Eigen::VectorXd& f);

/// Damped Newton descent on Phi. The direction comes from the full Hessian of
/// Phi when it is positive definite, else from J^T J + alpha Hess L, else from
/// steepest descent; steps are Armijo-backtracked (1e-4, halving, 30 tries).
/// Throws NotConvergedError or Error(NonDescentDirection).
StationaryPoint minimize(const GridCase& grid, const InjectionVector& s, const RegularizerOptions& opts);

}  // namespace gridlocus
