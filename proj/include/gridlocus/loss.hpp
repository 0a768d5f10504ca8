#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridlocus/loadflow.hpp"
#include "gridlocus/network.hpp"

namespace gridlocus {

struct LossSensitivities {
  double value = 0.0;
  Eigen::VectorXd grad_x;  // 2n, (u, v) ordering
  Eigen::VectorXd grad_s;  // 2n, (P, Q) ordering
  Eigen::VectorXd mlc;     // marginal loss coefficients, -grad_s
};

struct LossHessianX {
  Eigen::MatrixXd h;  // blockdiag(2 Lap, 2 Lap) on the non-swing buses
  double min_eig = 0.0;
  bool strong_convexity_lost = false;  // some branch has r = 0
  std::vector<std::string> warnings;
};

struct LossHessianS {
  Eigen::MatrixXd h;  // symmetrized
  double min_eig = 0.0;
  double asymmetry = 0.0;  // ||h_raw - h_raw^T||_inf
};

/// Options for the perturbed re-solves behind loss_hess_s.
inline constexpr NewtonOptions kResolveOptions{1e-10, 20};

/// Weighted Laplacian sum_branches g (e_r - e_k)(e_r - e_k)^T over all
/// n+1 buses, g = r / (r^2 + x^2).
Eigen::MatrixXd loss_laplacian(const GridCase& grid);

double loss_value(const GridCase& grid, const StateVector& x);
Eigen::VectorXd loss_grad_x(const GridCase& grid, const StateVector& x);
LossHessianX loss_hess_x(const GridCase& grid);

/// Solves J(x)^T g = grad_x L(x). Throws SingularJacobianError.
LossSensitivities loss_grad_s(const GridCase& grid, const StateVector& x);

/// Central differences of loss_grad_s between states re-solved at
/// s +- h_step e_r from the warm start x, one column per r, symmetrized.
/// Columns are computed in parallel; the first failing column (lowest index)
/// has its SingularJacobianError or NoConvergenceError rethrown.
LossHessianS loss_hess_s(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                         double h_step = 1e-5);

/// Single-threaded reference for loss_hess_s; results are bitwise identical.
LossHessianS loss_hess_s_serial(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                                double h_step = 1e-5);

}  // namespace gridlocus
