#include "gridlocus/loss.hpp"

#include <exception>
#include <vector>

#include "gridlocus/parallel.hpp"

namespace gridlocus {

namespace {

Eigen::VectorXd hess_s_column(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                              double h_step, int column) {
  Eigen::VectorXd plus = s.stacked();
  Eigen::VectorXd minus = plus;
  plus[column] += h_step;
  minus[column] -= h_step;
  const StateVector xp = newton_solve(grid, InjectionVector::from_stacked(plus), x, kResolveOptions).x;
  const StateVector xm = newton_solve(grid, InjectionVector::from_stacked(minus), x, kResolveOptions).x;
  return (loss_grad_s(grid, xp).grad_s - loss_grad_s(grid, xm).grad_s) / (2.0 * h_step);
}

void check_hess_s_args(const GridCase& grid, const InjectionVector& s, const StateVector& x, double h_step) {
  check_dimensions(grid, s);
  check_dimensions(grid, x);
  if (!(h_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_step must be positive");
}

LossHessianS finish(const Eigen::MatrixXd& raw) {
  LossHessianS out;
  out.h = 0.5 * (raw + raw.transpose());
  if (raw.size() == 0) return out;
  out.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  out.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.h, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
  return out;
}

}  // namespace

Eigen::MatrixXd loss_laplacian(const GridCase& grid) {
  const int size = grid.n() + 1;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(size, size);
  for (const auto& br : grid.branches()) {
    const double g = loss_weight(br);
    lap(br.from, br.from) += g;
    lap(br.to, br.to) += g;
    lap(br.from, br.to) -= g;
    lap(br.to, br.from) -= g;
  }
  return lap;
}

double loss_value(const GridCase& grid, const StateVector& x) {
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  double total = 0.0;
  for (const auto& br : grid.branches()) {
    total += std::norm(voltages[br.from] - voltages[br.to]) * loss_weight(br);
  }
  return total;
}

Eigen::VectorXd loss_grad_x(const GridCase& grid, const StateVector& x) {
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(voltages.size());
  for (const auto& br : grid.branches()) {
    const std::complex<double> term = 2.0 * loss_weight(br) * (voltages[br.from] - voltages[br.to]);
    full[br.from] += term;
    full[br.to] -= term;
  }
  const int n = grid.n();
  Eigen::VectorXd grad(2 * n);
  grad << full.tail(n).real(), full.tail(n).imag();
  return grad;
}

LossHessianX loss_hess_x(const GridCase& grid) {
  const int n = grid.n();
  const Eigen::MatrixXd reduced = 2.0 * loss_laplacian(grid).bottomRightCorner(n, n);
  LossHessianX out;
  out.h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.h.topLeftCorner(n, n) = reduced;
  out.h.bottomRightCorner(n, n) = reduced;
  if (n > 0) {
    out.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(reduced, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .minCoeff();
  }
  for (const auto& br : grid.branches()) {
    if (br.r == 0.0) {
      out.strong_convexity_lost = true;
      out.warnings.push_back("StrongConvexityLost: branch " + std::to_string(grid.external_id(br.from)) +
                             "-" + std::to_string(grid.external_id(br.to)) + " has zero resistance");
    }
  }
  return out;
}

LossSensitivities loss_grad_s(const GridCase& grid, const StateVector& x) {
  LossSensitivities out;
  out.value = loss_value(grid, x);
  out.grad_x = loss_grad_x(grid, x);
  const JacobianLU lu(grid, jacobian(grid, x), "loss sensitivity");
  out.grad_s = lu.solve_transposed(out.grad_x);
  out.mlc = -out.grad_s;
  return out;
}

LossHessianS loss_hess_s_serial(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                                double h_step) {
  check_hess_s_args(grid, s, x, h_step);
  const int m = 2 * grid.n();
  Eigen::MatrixXd raw(m, m);
  for (int r = 0; r < m; ++r) raw.col(r) = hess_s_column(grid, s, x, h_step, r);
  return finish(raw);
}

LossHessianS loss_hess_s(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                         double h_step) {
  check_hess_s_args(grid, s, x, h_step);
  const int m = 2 * grid.n();
  Eigen::MatrixXd raw(m, m);
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(dynamic) num_threads(thread_count(m))
  for (int r = 0; r < m; ++r) {
    try {
      raw.col(r) = hess_s_column(grid, s, x, h_step, r);
    } catch (...) {
      failures[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }

  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return finish(raw);
}

}  // namespace gridlocus
