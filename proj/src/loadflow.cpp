#include "gridlocus/loadflow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

namespace gridlocus {

namespace {

std::string dims(const char* what, int got, int want) {
  return std::string(what) + " has length " + std::to_string(got) + ", case has n = " +
         std::to_string(want);
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

std::string no_convergence_message(const LoadFlowSolution& last) {
  std::ostringstream msg;
  msg << "Newton iteration stopped after " << last.iterations << " iterations with residual "
      << std::setprecision(6) << (last.residual_history.empty() ? 0.0 : last.residual_history.back());
  return msg.str();
}

/// Nodal currents summed branch by branch, so equal voltages carry exactly zero flow.
Eigen::VectorXcd bus_currents(const GridCase& grid, const Eigen::VectorXcd& voltages) {
  Eigen::VectorXcd current = Eigen::VectorXcd::Zero(voltages.size());
  for (const auto& br : grid.branches()) {
    const std::complex<double> flow = (voltages[br.from] - voltages[br.to]) / std::complex<double>(br.r, br.x);
    const std::complex<double> shunt(0.0, br.b / 2.0);
    current[br.from] += flow + shunt * voltages[br.from];
    current[br.to] += shunt * voltages[br.to] - flow;
  }
  return current;
}

}  // namespace

Eigen::VectorXd StateVector::stacked() const {
  Eigen::VectorXd x(u.size() + v.size());
  x << u, v;
  return x;
}

StateVector StateVector::from_stacked(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "stacked state has odd length");
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n)};
}

Eigen::VectorXd InjectionVector::stacked() const {
  Eigen::VectorXd s(p.size() + q.size());
  s << p, q;
  return s;
}

InjectionVector InjectionVector::from_stacked(const Eigen::Ref<const Eigen::VectorXd>& s) {
  if (s.size() % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "stacked injections have odd length");
  const Eigen::Index n = s.size() / 2;
  return {s.head(n), s.tail(n)};
}

NoConvergenceError::NoConvergenceError(LoadFlowSolution last)
    : Error(ErrorCode::NoConvergence, no_convergence_message(last)),
      last_(std::move(last)) {}

void check_dimensions(const GridCase& grid, const StateVector& x) {
  if (x.u.size() != grid.n() || x.v.size() != grid.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                dims("state", static_cast<int>(std::max(x.u.size(), x.v.size())), grid.n()));
  }
  if (!x.u.allFinite() || !x.v.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "state has non-finite entries");
  }
}

void check_dimensions(const GridCase& grid, const InjectionVector& s) {
  if (s.p.size() != grid.n() || s.q.size() != grid.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                dims("injection vector", static_cast<int>(std::max(s.p.size(), s.q.size())), grid.n()));
  }
  if (!s.p.allFinite() || !s.q.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "injection vector has non-finite entries");
  }
}

InjectionVector case_injections(const GridCase& grid) {
  const int n = grid.n();
  InjectionVector s{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const Bus& bus = grid.buses()[static_cast<std::size_t>(i + 1)];
    s.p[i] = bus.p;
    s.q[i] = bus.q;
  }
  return s;
}

StateVector flat_start(const GridCase& grid) {
  const int n = grid.n();
  return {Eigen::VectorXd::Constant(n, std::abs(grid.swing_voltage())), Eigen::VectorXd::Zero(n)};
}

Eigen::VectorXcd bus_voltages(const GridCase& grid, const StateVector& x) {
  check_dimensions(grid, x);
  const int n = grid.n();
  Eigen::VectorXcd voltages(n + 1);
  voltages[0] = grid.swing_voltage();
  for (int i = 0; i < n; ++i) voltages[i + 1] = {x.u[i], x.v[i]};
  return voltages;
}

Mismatch mismatch(const GridCase& grid, const StateVector& x, const InjectionVector& s) {
  check_dimensions(grid, s);
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  const Eigen::VectorXcd current = bus_currents(grid, voltages);
  const int n = grid.n();
  Mismatch out{Eigen::VectorXd(2 * n), {Eigen::VectorXd(n), Eigen::VectorXd(n)}};
  for (int i = 0; i < n; ++i) {
    const std::complex<double> power = voltages[i + 1] * std::conj(current[i + 1]);
    out.s_calc.p[i] = power.real();
    out.s_calc.q[i] = power.imag();
  }
  out.f << out.s_calc.p - s.p, out.s_calc.q - s.q;
  return out;
}

Eigen::MatrixXd jacobian(const GridCase& grid, const AdmittanceMatrix& adm, const StateVector& x) {
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  const Eigen::VectorXcd current = bus_currents(grid, voltages);
  const int n = grid.n();

  const Eigen::MatrixXd g = adm.y.real().bottomRightCorner(n, n);
  const Eigen::MatrixXd b = adm.y.imag().bottomRightCorner(n, n);
  const Eigen::VectorXd ia = current.tail(n).real();
  const Eigen::VectorXd ib = current.tail(n).imag();
  const auto du = x.u.asDiagonal();
  const auto dv = x.v.asDiagonal();

  Eigen::MatrixXd j(2 * n, 2 * n);
  j.topLeftCorner(n, n) = du * g + dv * b;
  j.topRightCorner(n, n) = dv * g - du * b;
  j.bottomLeftCorner(n, n) = dv * g - du * b;
  j.bottomRightCorner(n, n) = -(dv * b) - du * g;
  j.topLeftCorner(n, n).diagonal() += ia;
  j.topRightCorner(n, n).diagonal() += ib;
  j.bottomLeftCorner(n, n).diagonal() -= ib;
  j.bottomRightCorner(n, n).diagonal() += ia;
  return j;
}

Eigen::MatrixXd jacobian(const GridCase& grid, const StateVector& x) {
  return jacobian(grid, build_admittance(grid), x);
}

std::complex<double> swing_injection(const GridCase& grid, const StateVector& x) {
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  return voltages[0] * std::conj(bus_currents(grid, voltages)[0]);
}

JacobianLU::JacobianLU(const GridCase& grid, const Eigen::MatrixXd& j, const char* context) : lu_(j) {
  const Eigen::Index size = j.rows();
  if (size == 0) return;
  const Eigen::VectorXd pivots = lu_.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  Eigen::Index worst = 0;
  const double smallest = pivots.minCoeff(&worst);
  const double threshold = largest * static_cast<double>(size) * std::numeric_limits<double>::epsilon();
  if (!std::isfinite(largest) || largest == 0.0 || smallest <= threshold) {
    const auto column = static_cast<int>(lu_.permutationQ().indices()[worst]);
    const int n = static_cast<int>(size / 2);
    const int internal = column % n + 1;
    throw SingularJacobianError(grid.external_id(internal), column < n ? 'u' : 'v', context);
  }
}

Eigen::VectorXd JacobianLU::solve_transposed(const Eigen::VectorXd& rhs) const {
  return lu_.transpose().solve(rhs);
}

LoadFlowSolution newton_solve(const GridCase& grid, const InjectionVector& s, const StateVector& x0,
                              const NewtonOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (opts.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  check_dimensions(grid, s);
  check_dimensions(grid, x0);

  const AdmittanceMatrix adm = build_admittance(grid);
  LoadFlowSolution sol{x0, 0, {}};
  Eigen::VectorXd x = x0.stacked();
  Eigen::VectorXd f = mismatch(grid, sol.x, s).f;
  double residual = inf_norm(f);
  sol.residual_history.push_back(residual);

  while (residual >= opts.tol) {
    if (sol.iterations >= opts.max_iter || !std::isfinite(residual)) throw NoConvergenceError(sol);
    const JacobianLU lu(grid, jacobian(grid, adm, sol.x), "Newton step");
    const Eigen::VectorXd step = -lu.solve(f);

    double t = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd trial_f;
    double trial_residual = 0.0;
    for (int halving = 0;; ++halving) {
      trial = x + t * step;
      trial_f = mismatch(grid, StateVector::from_stacked(trial), s).f;
      trial_residual = inf_norm(trial_f);
      if (trial_residual < residual || halving == 8) break;
      t *= 0.5;
    }
    x = std::move(trial);
    f = std::move(trial_f);
    residual = trial_residual;
    sol.x = StateVector::from_stacked(x);
    ++sol.iterations;
    sol.residual_history.push_back(residual);
  }
  return sol;
}

double condition_number(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smallest = sv[sv.size() - 1];
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smallest;
}

}  // namespace gridlocus
