#include "gridlocus/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>

#include "gridlocus/loss.hpp"

namespace gridlocus {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxHalvings = 30;
constexpr double kRoundoff = 1e-12;

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

struct Problem {
  const GridCase& grid;
  const InjectionVector& s;
  double alpha;
  AdmittanceMatrix adm;
  Eigen::MatrixXd hess_loss;

  struct Point {
    Eigen::VectorXd x;
    Mismatch residual;
    Eigen::MatrixXd j;
    Eigen::VectorXd grad;
    double phi = 0.0;
  };

  Point evaluate(const Eigen::VectorXd& x) const {
    Point p;
    p.x = x;
    const StateVector state = StateVector::from_stacked(x);
    p.residual = mismatch(grid, state, s);
    p.j = jacobian(grid, adm, state);
    p.grad = p.j.transpose() * p.residual.f + alpha * loss_grad_x(grid, state);
    p.phi = 0.5 * p.residual.f.squaredNorm() + alpha * loss_value(grid, state);
    return p;
  }

  double phi_at(const Eigen::VectorXd& x) const {
    const StateVector state = StateVector::from_stacked(x);
    return 0.5 * mismatch(grid, state, s).f.squaredNorm() + alpha * loss_value(grid, state);
  }

  Eigen::VectorXd direction(const Point& p) const {
    const Eigen::MatrixXd model = p.j.transpose() * p.j + alpha * hess_loss;
    const Eigen::MatrixXd exact = model + residual_curvature(grid, adm, p.residual.f);
    if (Eigen::LLT<Eigen::MatrixXd> llt(exact); llt.info() == Eigen::Success) return -llt.solve(p.grad);

    const double scale = std::max(exact.diagonal().cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(exact.rows(), exact.cols());
    for (double tau = 1e-6 * scale; tau <= 1e6 * scale; tau *= 10.0) {
      Eigen::LLT<Eigen::MatrixXd> llt(exact + tau * identity);
      if (llt.info() == Eigen::Success) return -llt.solve(p.grad);
    }
    if (Eigen::LLT<Eigen::MatrixXd> llt(model); llt.info() == Eigen::Success) return -llt.solve(p.grad);
    return -p.grad;
  }
};

void validate(const GridCase& grid, const InjectionVector& s, const RegularizerOptions& opts) {
  if (!(opts.alpha > 0.0) || !std::isfinite(opts.alpha)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be a positive finite number");
  }
  if (!(opts.grad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tol must be positive");
  if (opts.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  check_dimensions(grid, s);
  if (opts.warm_start) check_dimensions(grid, *opts.warm_start);
}

StationaryPoint snapshot(const Problem::Point& p, double alpha, int iterations, std::vector<TraceEntry> trace) {
  StationaryPoint sp;
  sp.x_star = StateVector::from_stacked(p.x);
  sp.alpha = alpha;
  sp.objective = p.phi;
  sp.grad_norm = inf_norm(p.grad);
  sp.residual = p.residual;
  sp.iterations = iterations;
  sp.trace = std::move(trace);
  return sp;
}

}  // namespace

namespace {

std::string not_converged_message(const StationaryPoint& last, const std::string& reason) {
  std::ostringstream msg;
  msg << reason << " after " << last.iterations << " iterations, gradient norm " << std::setprecision(6)
      << last.grad_norm;
  return msg.str();
}

}  // namespace

NotConvergedError::NotConvergedError(StationaryPoint last, const std::string& reason)
    : Error(ErrorCode::NotConverged, not_converged_message(last, reason)), last_(std::move(last)) {}

double objective(const GridCase& grid, const InjectionVector& s, const StateVector& x, double alpha) {
  return 0.5 * mismatch(grid, x, s).f.squaredNorm() + alpha * loss_value(grid, x);
}

Eigen::VectorXd objective_grad(const GridCase& grid, const InjectionVector& s, const StateVector& x,
                               double alpha) {
  const AdmittanceMatrix adm = build_admittance(grid);
  return jacobian(grid, adm, x).transpose() * mismatch(grid, x, s).f + alpha * loss_grad_x(grid, x);
}

Eigen::MatrixXd residual_curvature(const GridCase& grid, const AdmittanceMatrix& adm,
                                   const Eigen::VectorXd& f) {
  const int n = grid.n();
  if (f.size() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "residual length does not match case");
  const Eigen::MatrixXd g = adm.y.real().bottomRightCorner(n, n);
  const Eigen::MatrixXd b = adm.y.imag().bottomRightCorner(n, n);
  const auto lam = f.head(n).asDiagonal();
  const auto mu = f.tail(n).asDiagonal();

  const Eigen::MatrixXd uu = lam * g + g * lam - (mu * b + b * mu);
  const Eigen::MatrixXd uv = b * lam - lam * b + g * mu - mu * g;
  Eigen::MatrixXd c(2 * n, 2 * n);
  c << uu, uv, uv.transpose(), uu;
  return c;
}

StationaryPoint minimize(const GridCase& grid, const InjectionVector& s, const RegularizerOptions& opts) {
  validate(grid, s, opts);
  const Problem problem{grid, s, opts.alpha, build_admittance(grid), loss_hess_x(grid).h};

  Problem::Point current = problem.evaluate((opts.warm_start ? *opts.warm_start : flat_start(grid)).stacked());
  std::vector<TraceEntry> trace{{0, current.phi, inf_norm(current.grad), 0.0}};

  for (int iter = 0;; ++iter) {
    const double grad_norm = inf_norm(current.grad);
    if (grad_norm < opts.grad_tol) {
      StationaryPoint sp = snapshot(current, opts.alpha, iter, std::move(trace));
      sp.converged = true;
      return sp;
    }
    if (iter == opts.max_iter) {
      throw NotConvergedError(snapshot(current, opts.alpha, iter, std::move(trace)), "iteration cap reached");
    }

    const Eigen::VectorXd d = problem.direction(current);
    const double slope = current.grad.dot(d);
    if (!std::isfinite(slope) || slope >= 0.0) {
      throw Error(ErrorCode::NonDescentDirection,
                  "search direction has slope " + std::to_string(slope) + " at iteration " + std::to_string(iter));
    }

    const double slack = kRoundoff * std::max(1.0, std::abs(current.phi));
    double t = 1.0;
    bool accepted = false;
    if (-slope >= slack) {
      for (int halving = 0; halving <= kMaxHalvings; ++halving) {
        if (problem.phi_at(current.x + t * d) <= current.phi + kArmijo * t * slope) {
          accepted = true;
          break;
        }
        t *= kBacktrack;
      }
    }

    Problem::Point next;
    if (accepted) {
      next = problem.evaluate(current.x + t * d);
    } else {
      // round-off regime: full step if Phi stays within slack and the gradient shrinks
      t = 1.0;
      next = problem.evaluate(current.x + d);
      if (!(next.phi <= current.phi + slack && inf_norm(next.grad) < grad_norm)) {
        throw NotConvergedError(snapshot(current, opts.alpha, iter, std::move(trace)), "line search stalled");
      }
    }
    current = std::move(next);
    trace.push_back({iter + 1, current.phi, inf_norm(current.grad), t});
  }
}

}  // namespace gridlocus
