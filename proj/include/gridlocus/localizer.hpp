#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gridlocus/loadflow.hpp"
#include "gridlocus/network.hpp"
#include "gridlocus/regularizer.hpp"

namespace gridlocus {

enum class Classification { ConvexGreen, IndefiniteRed, Unknown };

std::string_view to_string(Classification c);

/// A per-bus (P, Q) pair keyed by external id.
struct BusPair {
  int bus_id = 0;
  double p = 0.0;
  double q = 0.0;
};

struct Suspect {
  int bus_id = 0;
  double score = 0.0;  // max(|dP|, |dQ|)
};

struct HessianClass {
  double min_eig_ls = 0.0;     // lambda_min(H_S)
  double min_eig_prop3 = 0.0;  // lambda_min(I + alpha H_S)
  Classification classification = Classification::Unknown;
};

inline constexpr double kGreenThreshold = 1e-8;

struct Diagnosis {
  double alpha = 0.0;
  InjectionVector s_bar;
  std::vector<BusPair> residual_profile;            // PQ buses, ascending external id
  std::optional<std::vector<BusPair>> mlc_profile;  // empty if J(x*) is singular
  std::vector<Suspect> ranking;
  Classification classification = Classification::Unknown;
  std::optional<double> min_eig_ls;
  std::optional<double> min_eig_prop3;
  std::optional<double> hessian_asymmetry;
  std::string hessian_error;  // why the classification is unknown
  double v_min = 0.0;
  double jacobian_condition = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  StateVector x_star;
};

/// S_bar = s + F(x*, s). Rejects non-converged input with NotConverged.
InjectionVector corrected_injections(const InjectionVector& s, const StationaryPoint& stationary);

/// Descending score, ties by ascending external id.
std::vector<Suspect> rank_suspects(const std::vector<BusPair>& residual_profile);

/// Green iff lambda_min(h_s) >= kGreenThreshold, red otherwise.
HessianClass classify_hessian(const Eigen::MatrixXd& h_s, double alpha);

/// Builds the diagnosis at a converged stationary point, including the
/// injection-space Hessian at S_bar. A failed Hessian re-solve leaves the
/// classification Unknown with the reason in `hessian_error`.
Diagnosis classify(const GridCase& grid, const StationaryPoint& stationary, double alpha, double h_step = 1e-5);

struct SweepOptions {
  double grad_tol = 1e-8;
  int max_iter = 200;
  double h_step = 1e-5;
};

enum class EntryStatus { Converged, HessianUnavailable, NotConverged, Failed };

std::string_view to_string(EntryStatus status);

struct SweepEntry {
  double alpha = 0.0;
  EntryStatus status = EntryStatus::Failed;
  std::optional<Diagnosis> diagnosis;  // absent only when status is Failed
  std::optional<StationaryPoint> last_iterate;  // set when status is NotConverged
  std::string error;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // ascending alpha
  double stability = 0.0;           // |common top-2 buses| / 2 over minimized entries
};

inline const std::vector<double> kDefaultAlphas{1e-3, 1e-2, 1e-1, 1.0, 10.0};

/// One flat-start minimize + classify per alpha, entries in parallel.
/// Alphas are sorted; duplicates or non-positive values are InvalidArgument.
SweepResult alpha_sweep(const GridCase& grid, const InjectionVector& s, std::vector<double> alphas,
                        const SweepOptions& opts = {});

/// Single-threaded reference for alpha_sweep; results are identical.
SweepResult alpha_sweep_serial(const GridCase& grid, const InjectionVector& s, std::vector<double> alphas,
                               const SweepOptions& opts = {});

/// Residual profile of a (possibly non-converged) stationary point.
std::vector<BusPair> residual_profile(const GridCase& grid, const StationaryPoint& point);

}  // namespace gridlocus
