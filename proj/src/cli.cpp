#include "gridlocus/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridlocus/errors.hpp"
#include "gridlocus/loadflow.hpp"
#include "gridlocus/localizer.hpp"
#include "gridlocus/loss.hpp"
#include "gridlocus/matpower.hpp"
#include "gridlocus/network.hpp"
#include "gridlocus/regularizer.hpp"
#include "gridlocus/report.hpp"

namespace gridlocus {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GridCase load_case(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_case(text);
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

std::optional<LoadFlowSolution> try_solve(const GridCase& grid, const InjectionVector& s, const NewtonOptions& opts,
                                          std::ostream& err) {
  try {
    return newton_solve(grid, s, flat_start(grid), opts);
  } catch (const NoConvergenceError& e) {
    err << "gridlocus: " << e.what() << '\n';
  } catch (const SingularJacobianError& e) {
    err << "gridlocus: " << e.what() << '\n';
  }
  return std::nullopt;
}

struct SolveArgs {
  std::string path;
  double tol = 1e-8;
  int max_iter = 20;
  std::string format = "json";
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  require(a.tol > 0.0, "--tol must be positive");
  require(a.max_iter >= 1, "--max-iter must be at least 1");
  const GridCase grid = load_case(a.path);
  const InjectionVector s = case_injections(grid);
  err << "gridlocus: solving " << a.path << " (" << grid.n() << " PQ buses)\n";
  try {
    const LoadFlowSolution sol = newton_solve(grid, s, flat_start(grid), {a.tol, a.max_iter});
    err << "gridlocus: converged in " << sol.iterations << " iterations\n";
    out << (a.format == "csv" ? solution_csv(grid, sol.x) : solution_json(grid, sol, true));
    return kExitSuccess;
  } catch (const NoConvergenceError& e) {
    err << "gridlocus: " << e.what() << '\n';
    out << (a.format == "csv" ? residual_history_csv(e.last().residual_history) : solution_json(grid, e.last(), false));
    return kExitInfeasible;
  } catch (const SingularJacobianError& e) {
    err << "gridlocus: " << e.what() << '\n';
    if (a.format == "csv") {
      out << "bus_id,component,error\n" << e.bus_id() << ',' << e.component() << ",SingularJacobian\n";
    } else {
      nlohmann::ordered_json doc = {{"converged", false},
                                    {"error", "SingularJacobian"},
                                    {"bus_id", e.bus_id()},
                                    {"component", std::string(1, e.component())}};
      out << doc.dump(2) << '\n';
    }
    return kExitInfeasible;
  }
}

struct LocalizeArgs {
  std::string path;
  double alpha = 0.1;
  double h_step = 1e-5;
  std::string format = "json";
};

std::string diagnosis_payload(const GridCase& grid, const Diagnosis& d, const std::string& format) {
  if (format == "json") return diagnosis_json(grid, d);
  SweepResult single;
  single.entries.push_back({d.alpha,
                            d.classification == Classification::Unknown ? EntryStatus::HessianUnavailable
                                                                        : EntryStatus::Converged,
                            d, std::nullopt, d.hessian_error});
  return sweep_csv(single);
}

int cmd_localize(const LocalizeArgs& a, std::ostream& out, std::ostream& err) {
  require(a.alpha > 0.0 && std::isfinite(a.alpha), "--alpha must be a positive number");
  require(a.h_step > 0.0 && std::isfinite(a.h_step), "--h-step must be a positive number");
  const GridCase grid = load_case(a.path);
  const InjectionVector s = case_injections(grid);

  if (const auto sol = try_solve(grid, s, {}, err)) {
    err << "gridlocus: case is solvable, reporting marginal loss coefficients\n";
    std::optional<LossSensitivities> sens;
    try {
      sens = loss_grad_s(grid, sol->x);
    } catch (const SingularJacobianError& e) {
      err << "gridlocus: " << e.what() << '\n';
    }
    if (a.format == "csv") {
      std::vector<BusPair> mlc;
      if (sens) {
        const int n = grid.n();
        for (int i = 0; i < n; ++i) mlc.push_back({grid.external_id(i + 1), sens->mlc[i], sens->mlc[n + i]});
        std::sort(mlc.begin(), mlc.end(), [](const BusPair& x, const BusPair& y) { return x.bus_id < y.bus_id; });
      }
      out << mlc_csv(mlc);
    } else {
      out << feasible_json(grid, *sol, sens ? &*sens : nullptr);
    }
    return kExitSuccess;
  }

  err << "gridlocus: case is not solvable, minimizing the regularized residual (alpha " << format_number(a.alpha)
      << ")\n";
  try {
    const StationaryPoint sp = minimize(grid, s, {a.alpha, 1e-8, 200, std::nullopt});
    const Diagnosis d = classify(grid, sp, a.alpha, a.h_step);
    err << "gridlocus: stationary point after " << sp.iterations << " iterations, classification "
        << to_string(d.classification) << '\n';
    if (!d.hessian_error.empty()) err << "gridlocus: " << d.hessian_error << '\n';
    out << diagnosis_payload(grid, d, a.format);
    return kExitInfeasible;
  } catch (const NotConvergedError& e) {
    err << "gridlocus: " << e.what() << '\n';
    return kExitInternalFailure;
  }
}

struct SweepArgs {
  std::string path;
  std::string alphas = "1e-3,1e-2,0.1,1,10";
  double h_step = 1e-5;
  std::string format = "csv";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> alphas;
  try {
    alphas = parse_alpha_list(a.alphas);
  } catch (const Error& e) {
    throw InputError(std::string("--alphas: ") + e.what());
  }
  require(a.h_step > 0.0 && std::isfinite(a.h_step), "--h-step must be a positive number");
  const GridCase grid = load_case(a.path);
  const InjectionVector s = case_injections(grid);

  const bool feasible = try_solve(grid, s, {}, err).has_value();
  err << "gridlocus: case is " << (feasible ? "solvable" : "not solvable") << ", sweeping " << alphas.size()
      << " alpha values\n";
  const SweepResult sweep = alpha_sweep(grid, s, alphas, {1e-8, 200, a.h_step});

  int code = kExitSuccess;
  for (const auto& e : sweep.entries) {
    err << "gridlocus: alpha " << format_number(e.alpha) << ": " << to_string(e.status);
    if (!e.error.empty()) err << " (" << e.error << ')';
    err << '\n';
    const bool minimized = e.status == EntryStatus::Converged || e.status == EntryStatus::HessianUnavailable;
    code = std::max<int>(code, minimized ? (feasible ? kExitSuccess : kExitInfeasible) : kExitInternalFailure);
  }
  err << "gridlocus: top-2 stability " << format_number(sweep.stability) << '\n';
  out << (a.format == "json" ? sweep_json(grid, sweep) : sweep_csv(sweep));
  return code;
}

int cmd_convert(const std::string& path, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(path);
  try {
    const GridCase grid = import_matpower(text);
    out << serialize_case(grid);
    err << "gridlocus: converted " << path << " (" << grid.n() + 1 << " buses, " << grid.branches().size()
        << " branches)\n";
    return kExitSuccess;
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double value = 0.0;
    const char* first = item.data();
    const char* last = item.data() + item.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (item.empty() || ec != std::errc{} || ptr != last) {
      throw Error(ErrorCode::InvalidArgument, "'" + item + "' is not a number");
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::InvalidArgument, "alpha " + item + " is not positive");
    }
    values.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Load-flow solvability diagnostics", "gridlocus"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Newton load flow from a flat start");
  solve->add_option("case", solve_args.path, "JSON case file")->required();
  solve->add_option("--tol", solve_args.tol, "Mismatch tolerance (infinity norm)");
  solve->add_option("--max-iter", solve_args.max_iter, "Newton iteration cap");
  solve->add_option("--format", solve_args.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  LocalizeArgs loc_args;
  auto* localize = app.add_subcommand("localize", "Locate the buses responsible for an unsolvable case");
  localize->add_option("case", loc_args.path, "JSON case file")->required();
  localize->add_option("--alpha", loc_args.alpha, "Regularization weight on the loss term");
  localize->add_option("--h-step", loc_args.h_step, "Injection step for the loss Hessian");
  localize->add_option("--format", loc_args.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Localize over a list of regularization weights");
  sweep->add_option("case", sweep_args.path, "JSON case file")->required();
  sweep->add_option("--alphas", sweep_args.alphas, "Comma-separated regularization weights");
  sweep->add_option("--h-step", sweep_args.h_step, "Injection step for the loss Hessian");
  sweep->add_option("--format", sweep_args.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string convert_path;
  auto* convert = app.add_subcommand("convert", "Convert a MATPOWER case file to the JSON case format");
  convert->add_option("matpower_file", convert_path, "MATPOWER .m case file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitInputError;
  }

  try {
    if (*solve) return cmd_solve(solve_args, out, err);
    if (*localize) return cmd_localize(loc_args, out, err);
    if (*sweep) return cmd_sweep(sweep_args, out, err);
    return cmd_convert(convert_path, out, err);
  } catch (const InputError& e) {
    err << "gridlocus: " << e.what() << '\n';
    return kExitInputError;
  } catch (const Error& e) {
    err << "gridlocus: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidArgument ? kExitInputError : kExitInternalFailure;
  } catch (const std::exception& e) {
    err << "gridlocus: internal failure: " << e.what() << '\n';
    return kExitInternalFailure;
  }
}

}  // namespace gridlocus
