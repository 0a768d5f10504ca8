#pragma once

#include <string>
#include <vector>

#include "gridlocus/loadflow.hpp"
#include "gridlocus/localizer.hpp"
#include "gridlocus/loss.hpp"
#include "gridlocus/network.hpp"

namespace gridlocus {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_number(double value);

/// Load-flow solution (or last Newton iterate when !converged): per-bus id,
/// u, v, vm, angle_deg in case order, plus residual_inf, iterations,
/// converged and residual_history.
std::string solution_json(const GridCase& grid, const LoadFlowSolution& sol, bool converged);
/// id,u,v,vm,angle_deg
std::string solution_csv(const GridCase& grid, const StateVector& x);
/// iteration,residual_inf
std::string residual_history_csv(const std::vector<double>& history);

/// external_bus_id,mlc_p,mlc_q for the PQ buses, ascending id.
std::string mlc_csv(const std::vector<BusPair>& mlc);

/// Feasible localize payload: the solution and its marginal loss coefficients.
std::string feasible_json(const GridCase& grid, const LoadFlowSolution& sol, const LossSensitivities* sens);

std::string diagnosis_json(const GridCase& grid, const Diagnosis& d);

/// alpha,external_bus_id,delta_p,delta_q,mlc_p,mlc_q,status; one row per
/// (alpha, PQ bus). Missing values are empty fields.
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_json(const GridCase& grid, const SweepResult& sweep);

/// iter,objective,grad_norm,step_length
std::string trace_csv(const std::vector<TraceEntry>& trace);

}  // namespace gridlocus
