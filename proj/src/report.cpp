#include "gridlocus/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace gridlocus {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

ordered_json optional_number(const std::optional<double>& value) {
  if (!value) return nullptr;
  return number(*value);
}

ordered_json bus_table(const GridCase& grid, const StateVector& x) {
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < voltages.size(); ++i) {
    const std::complex<double> u = voltages[i];
    rows.push_back({{"id", grid.external_id(static_cast<int>(i))},
                    {"u", number(u.real())},
                    {"v", number(u.imag())},
                    {"vm", number(std::abs(u))},
                    {"angle_deg", number(std::arg(u) * 180.0 / std::numbers::pi)}});
  }
  return rows;
}

ordered_json pairs(const std::vector<BusPair>& values, const char* p_key, const char* q_key) {
  ordered_json rows = ordered_json::array();
  for (const auto& bp : values) rows.push_back({{"bus_id", bp.bus_id}, {p_key, number(bp.p)}, {q_key, number(bp.q)}});
  return rows;
}

ordered_json injections(const GridCase& grid, const InjectionVector& s) {
  std::vector<BusPair> values;
  for (int i = 0; i < grid.n(); ++i) values.push_back({grid.external_id(i + 1), s.p[i], s.q[i]});
  std::sort(values.begin(), values.end(), [](const BusPair& a, const BusPair& b) { return a.bus_id < b.bus_id; });
  return pairs(values, "p", "q");
}

ordered_json solution_object(const GridCase& grid, const LoadFlowSolution& sol, bool converged) {
  ordered_json history = ordered_json::array();
  for (double r : sol.residual_history) history.push_back(number(r));
  return {{"converged", converged},
          {"iterations", sol.iterations},
          {"residual_inf", sol.residual_history.empty() ? ordered_json(nullptr) : number(sol.residual_history.back())},
          {"residual_history", history},
          {"buses", bus_table(grid, sol.x)}};
}

ordered_json diagnosis_object(const GridCase& grid, const Diagnosis& d) {
  ordered_json ranking = ordered_json::array();
  for (const auto& s : d.ranking) ranking.push_back({{"bus_id", s.bus_id}, {"score", number(s.score)}});
  ordered_json out = {{"alpha", number(d.alpha)},
                      {"classification", std::string(to_string(d.classification))},
                      {"min_eig_Ls", optional_number(d.min_eig_ls)},
                      {"min_eig_prop3", optional_number(d.min_eig_prop3)},
                      {"hessian_asymmetry", optional_number(d.hessian_asymmetry)},
                      {"hessian_error", d.hessian_error.empty() ? ordered_json(nullptr) : ordered_json(d.hessian_error)},
                      {"v_min", number(d.v_min)},
                      {"jacobian_condition", number(d.jacobian_condition)},
                      {"objective", number(d.objective)},
                      {"grad_norm", number(d.grad_norm)},
                      {"iterations", d.iterations},
                      {"ranking", ranking},
                      {"s_bar", injections(grid, d.s_bar)},
                      {"residual_profile", pairs(d.residual_profile, "delta_p", "delta_q")},
                      {"mlc_profile", d.mlc_profile ? pairs(*d.mlc_profile, "mlc_p", "mlc_q") : ordered_json(nullptr)},
                      {"voltages", bus_table(grid, d.x_star)}};
  return out;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string solution_json(const GridCase& grid, const LoadFlowSolution& sol, bool converged) {
  return dump(solution_object(grid, sol, converged));
}

std::string solution_csv(const GridCase& grid, const StateVector& x) {
  const Eigen::VectorXcd voltages = bus_voltages(grid, x);
  std::ostringstream out;
  out << "id,u,v,vm,angle_deg\n";
  for (Eigen::Index i = 0; i < voltages.size(); ++i) {
    const std::complex<double> u = voltages[i];
    out << grid.external_id(static_cast<int>(i)) << ',' << format_number(u.real()) << ','
        << format_number(u.imag()) << ',' << format_number(std::abs(u)) << ','
        << format_number(std::arg(u) * 180.0 / std::numbers::pi) << '\n';
  }
  return out.str();
}

std::string residual_history_csv(const std::vector<double>& history) {
  std::ostringstream out;
  out << "iteration,residual_inf\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << format_number(history[i]) << '\n';
  return out.str();
}

std::string mlc_csv(const std::vector<BusPair>& mlc) {
  std::ostringstream out;
  out << "external_bus_id,mlc_p,mlc_q\n";
  for (const auto& bp : mlc) out << bp.bus_id << ',' << format_number(bp.p) << ',' << format_number(bp.q) << '\n';
  return out.str();
}

std::string feasible_json(const GridCase& grid, const LoadFlowSolution& sol, const LossSensitivities* sens) {
  ordered_json doc = {{"feasible", true}, {"solution", solution_object(grid, sol, true)}};
  if (sens) {
    std::vector<BusPair> mlc;
    const int n = grid.n();
    for (int i = 0; i < n; ++i) mlc.push_back({grid.external_id(i + 1), sens->mlc[i], sens->mlc[n + i]});
    std::sort(mlc.begin(), mlc.end(), [](const BusPair& a, const BusPair& b) { return a.bus_id < b.bus_id; });
    doc["loss"] = number(sens->value);
    doc["mlc"] = pairs(mlc, "mlc_p", "mlc_q");
  } else {
    doc["loss"] = nullptr;
    doc["mlc"] = nullptr;
  }
  return dump(doc);
}

std::string diagnosis_json(const GridCase& grid, const Diagnosis& d) {
  ordered_json doc = {{"feasible", false}, {"diagnosis", diagnosis_object(grid, d)}};
  return dump(doc);
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "alpha,external_bus_id,delta_p,delta_q,mlc_p,mlc_q,status\n";
  for (const auto& e : sweep.entries) {
    const std::string status(to_string(e.status));
    if (!e.diagnosis) {
      out << format_number(e.alpha) << ",,,,,," << status << '\n';
      continue;
    }
    const Diagnosis& d = *e.diagnosis;
    for (std::size_t i = 0; i < d.residual_profile.size(); ++i) {
      const BusPair& r = d.residual_profile[i];
      out << format_number(e.alpha) << ',' << r.bus_id << ',' << format_number(r.p) << ',' << format_number(r.q) << ',';
      if (d.mlc_profile) {
        out << format_number((*d.mlc_profile)[i].p) << ',' << format_number((*d.mlc_profile)[i].q);
      } else {
        out << ',';
      }
      out << ',' << status << '\n';
    }
  }
  return out.str();
}

std::string sweep_json(const GridCase& grid, const SweepResult& sweep) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : sweep.entries) {
    entries.push_back({{"alpha", number(e.alpha)},
                       {"status", std::string(to_string(e.status))},
                       {"error", e.error.empty() ? ordered_json(nullptr) : ordered_json(e.error)},
                       {"diagnosis", e.diagnosis ? diagnosis_object(grid, *e.diagnosis) : ordered_json(nullptr)}});
  }
  return dump({{"stability", number(sweep.stability)}, {"entries", entries}});
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  out << "iter,objective,grad_norm,step_length\n";
  for (const auto& t : trace) {
    out << t.iter << ',' << format_number(t.objective) << ',' << format_number(t.grad_norm) << ','
        << format_number(t.step_length) << '\n';
  }
  return out.str();
}

}  // namespace gridlocus
