#include "gridlocus/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <utility>

#include "gridlocus/loss.hpp"
#include "gridlocus/parallel.hpp"

namespace gridlocus {

namespace {

std::vector<BusPair> bus_pairs(const GridCase& grid, const Eigen::VectorXd& stacked) {
  const int n = grid.n();
  std::vector<BusPair> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back({grid.external_id(i + 1), stacked[i], stacked[n + i]});
  std::sort(out.begin(), out.end(), [](const BusPair& a, const BusPair& b) { return a.bus_id < b.bus_id; });
  return out;
}

Diagnosis describe(const GridCase& grid, const StationaryPoint& point, double alpha) {
  Diagnosis d;
  d.alpha = alpha;
  d.x_star = point.x_star;
  d.s_bar = point.residual.s_calc;
  d.residual_profile = bus_pairs(grid, point.residual.f);
  d.ranking = rank_suspects(d.residual_profile);
  d.objective = point.objective;
  d.grad_norm = point.grad_norm;
  d.iterations = point.iterations;
  d.v_min = bus_voltages(grid, point.x_star).cwiseAbs().minCoeff();

  const Eigen::MatrixXd j = jacobian(grid, point.x_star);
  d.jacobian_condition = condition_number(j);
  try {
    d.mlc_profile = bus_pairs(grid, loss_grad_s(grid, point.x_star).mlc);
  } catch (const SingularJacobianError&) {
    d.mlc_profile.reset();
  }
  return d;
}

SweepEntry run_entry(const GridCase& grid, const InjectionVector& s, double alpha, const SweepOptions& opts) {
  SweepEntry entry;
  entry.alpha = alpha;
  try {
    const StationaryPoint sp = minimize(grid, s, {alpha, opts.grad_tol, opts.max_iter, std::nullopt});
    entry.diagnosis = classify(grid, sp, alpha, opts.h_step);
    if (entry.diagnosis->classification == Classification::Unknown) {
      entry.status = EntryStatus::HessianUnavailable;
      entry.error = entry.diagnosis->hessian_error;
    } else {
      entry.status = EntryStatus::Converged;
    }
  } catch (const NotConvergedError& e) {
    entry.status = EntryStatus::NotConverged;
    entry.error = e.what();
    entry.last_iterate = e.last();
    entry.diagnosis = describe(grid, e.last(), alpha);
    entry.diagnosis->hessian_error = "stationary point not reached";
  } catch (const std::exception& e) {
    entry.status = EntryStatus::Failed;
    entry.error = e.what();
  }
  return entry;
}

std::vector<double> checked_alphas(std::vector<double> alphas) {
  if (alphas.empty()) throw Error(ErrorCode::InvalidArgument, "alpha list is empty");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::InvalidArgument, "alpha values must be positive finite numbers");
    }
  }
  std::sort(alphas.begin(), alphas.end());
  if (std::adjacent_find(alphas.begin(), alphas.end()) != alphas.end()) {
    throw Error(ErrorCode::InvalidArgument, "alpha list contains duplicates");
  }
  return alphas;
}

double stability(const GridCase& grid, const std::vector<SweepEntry>& entries) {
  const std::size_t k = std::min<std::size_t>(2, static_cast<std::size_t>(grid.n()));
  if (k == 0) return 1.0;
  std::optional<std::set<int>> common;
  for (const auto& e : entries) {
    if (e.status != EntryStatus::Converged && e.status != EntryStatus::HessianUnavailable) continue;
    std::set<int> top;
    for (std::size_t i = 0; i < k; ++i) top.insert(e.diagnosis->ranking[i].bus_id);
    if (!common) {
      common = std::move(top);
    } else {
      std::set<int> both;
      std::set_intersection(common->begin(), common->end(), top.begin(), top.end(),
                            std::inserter(both, both.begin()));
      common = std::move(both);
    }
  }
  if (!common) return 0.0;
  return static_cast<double>(common->size()) / static_cast<double>(k);
}

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::ConvexGreen: return "convex_green";
    case Classification::IndefiniteRed: return "indefinite_red";
    case Classification::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(EntryStatus status) {
  switch (status) {
    case EntryStatus::Converged: return "converged";
    case EntryStatus::HessianUnavailable: return "hessian_unavailable";
    case EntryStatus::NotConverged: return "not_converged";
    case EntryStatus::Failed: return "failed";
  }
  return "failed";
}

InjectionVector corrected_injections(const InjectionVector& s, const StationaryPoint& stationary) {
  if (!stationary.converged) throw Error(ErrorCode::NotConverged, "stationary point is not converged");
  const Eigen::Index n = s.p.size();
  if (stationary.residual.f.size() != 2 * n) {
    throw Error(ErrorCode::DimensionMismatch, "residual length does not match injections");
  }
  return {s.p + stationary.residual.f.head(n), s.q + stationary.residual.f.tail(n)};
}

std::vector<Suspect> rank_suspects(const std::vector<BusPair>& residual_profile) {
  std::vector<Suspect> ranking;
  ranking.reserve(residual_profile.size());
  for (const auto& bp : residual_profile) ranking.push_back({bp.bus_id, std::max(std::abs(bp.p), std::abs(bp.q))});
  std::sort(ranking.begin(), ranking.end(), [](const Suspect& a, const Suspect& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.bus_id < b.bus_id;
  });
  return ranking;
}

HessianClass classify_hessian(const Eigen::MatrixXd& h_s, double alpha) {
  HessianClass out;
  if (h_s.size() == 0) {
    out.min_eig_prop3 = 1.0;
    out.classification = Classification::ConvexGreen;
    return out;
  }
  const Eigen::MatrixXd sym = 0.5 * (h_s + h_s.transpose());
  using Solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>;
  out.min_eig_ls = Solver(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  const Eigen::MatrixXd prop3 = Eigen::MatrixXd::Identity(sym.rows(), sym.cols()) + alpha * sym;
  out.min_eig_prop3 = Solver(prop3, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  out.classification = out.min_eig_ls >= kGreenThreshold ? Classification::ConvexGreen : Classification::IndefiniteRed;
  return out;
}

Diagnosis classify(const GridCase& grid, const StationaryPoint& stationary, double alpha, double h_step) {
  if (!stationary.converged) throw Error(ErrorCode::NotConverged, "stationary point is not converged");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  Diagnosis d = describe(grid, stationary, alpha);
  try {
    const LossHessianS hs = loss_hess_s(grid, d.s_bar, stationary.x_star, h_step);
    const HessianClass hc = classify_hessian(hs.h, alpha);
    d.min_eig_ls = hc.min_eig_ls;
    d.min_eig_prop3 = hc.min_eig_prop3;
    d.hessian_asymmetry = hs.asymmetry;
    d.classification = hc.classification;
  } catch (const SingularJacobianError& e) {
    d.hessian_error = std::string("HessianUnavailable: ") + e.what();
  } catch (const NoConvergenceError& e) {
    d.hessian_error = std::string("HessianUnavailable: ") + e.what();
  }
  return d;
}

std::vector<BusPair> residual_profile(const GridCase& grid, const StationaryPoint& point) {
  return bus_pairs(grid, point.residual.f);
}

SweepResult alpha_sweep_serial(const GridCase& grid, const InjectionVector& s, std::vector<double> alphas,
                               const SweepOptions& opts) {
  check_dimensions(grid, s);
  alphas = checked_alphas(std::move(alphas));
  SweepResult result;
  for (double a : alphas) result.entries.push_back(run_entry(grid, s, a, opts));
  result.stability = stability(grid, result.entries);
  return result;
}

SweepResult alpha_sweep(const GridCase& grid, const InjectionVector& s, std::vector<double> alphas,
                        const SweepOptions& opts) {
  check_dimensions(grid, s);
  alphas = checked_alphas(std::move(alphas));
  const int m = static_cast<int>(alphas.size());
  SweepResult result;
  result.entries.resize(alphas.size());

#pragma omp parallel for schedule(dynamic) num_threads(thread_count(m, m))
  for (int i = 0; i < m; ++i) {
    result.entries[static_cast<std::size_t>(i)] = run_entry(grid, s, alphas[static_cast<std::size_t>(i)], opts);
  }

  result.stability = stability(grid, result.entries);
  return result;
}

}  // namespace gridlocus
