#include "qcomb/cli.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcomb/objective.hpp"
#include "qcomb/operator_file.hpp"
#include "qcomb/optimizer.hpp"

namespace qcomb {

namespace {

struct GlobalFlags {
  double tol = 0.0;
  bool tol_given = false;
  std::uint64_t seed = 0;
  bool json = false;
  bool force = false;
  bool progress = false;
  int max_iters = 50000;
  std::string out;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence: return kExitNoConvergence;
    case ErrorCode::NotHermitian:
    case ErrorCode::NotPSD:
    case ErrorCode::InvalidBranchSum:
    case ErrorCode::BoundUnavailable:
      return kExitDomainFailure;
    default: return kExitInputError;
  }
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + std::to_string(xs[k]);
  return s;
}

std::vector<int> parse_int_list(const std::string& text, char sep) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorCode::ParseError, "'" + item + "' is not an integer");
    out.push_back(v);
  }
  if (!text.empty() && text.back() == sep) throw Error(ErrorCode::ParseError, "trailing separator in '" + text + "'");
  return out;
}

// "2:2,2:3" -> {(2,2), (2,3)}
std::vector<std::pair<int, int>> parse_dim_pairs(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  for (const auto& pair : [&] {
         std::vector<std::string> parts;
         std::stringstream ss(text);
         std::string item;
         while (std::getline(ss, item, ',')) parts.push_back(item);
         return parts;
       }()) {
    const auto dims = parse_int_list(pair, ':');
    if (dims.size() != 2) throw Error(ErrorCode::ParseError, "tooth dims '" + pair + "' must read in:out");
    if (dims[0] < 1 || dims[1] < 1) throw Error(ErrorCode::InvalidArgument, "dimensions must be positive");
    out.emplace_back(dims[0], dims[1]);
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "no teeth given");
  return out;
}

double feasibility_residual(const CausalityReport& report) {
  return std::max(report.max_residual(), std::max(0.0, -report.min_eigenvalue));
}

// Writes (or only serializes) the operator, reads it back and verifies it.
OperatorFile roundtrip(const OperatorFile& file, const GlobalFlags& g) {
  if (g.out.empty()) return parse_operator_file(serialize(file));
  write_operator_file(g.out, file, g.force);
  return read_operator_file(g.out);
}

void print_report(std::ostream& out, const CausalityReport& report) {
  out << std::scientific << std::setprecision(3);
  for (std::size_t n = 0; n < report.residuals.size(); ++n)
    out << "  level " << n << " residual " << report.residuals[n] << (report.residuals[n] > report.tol ? "  FAIL" : "")
        << '\n';
  out << "  min eigenvalue " << report.min_eigenvalue << '\n';
  out << std::defaultfloat;
}

struct SolveTask {
  std::string task;
  std::map<std::string, double> parameters;
  std::map<std::string, std::string> metadata;
  PerformanceOperator objective;
  CombStructure structure;
  std::optional<double> reference;
  ReferenceSource reference_source = ReferenceSource::None;
  std::optional<double> estimation;
};

int run_solve_task(SolveTask t, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  const double tol = g.tol_given ? g.tol : 1e-6;
  SdpProblem problem(t.objective, t.structure);
  problem.tol_feas = tol;
  problem.tol_gap = tol;
  problem.seed = g.seed;
  problem.max_iters = g.max_iters;
  SolverOptions options;
  if (g.progress)
    options.progress = [&err](const TraceRow& row) {
      err << "iter " << row.iteration << "  value " << std::setprecision(10) << row.value << "  residual "
          << std::scientific << std::setprecision(2) << row.residual << std::defaultfloat << "  best "
          << std::setprecision(10) << row.best_feasible << '\n';
    };

  const auto start = std::chrono::steady_clock::now();
  const SdpSolution sol = solve(problem, options);

  t.metadata["task"] = t.task;
  t.metadata["seed"] = std::to_string(g.seed);
  t.metadata["teeth"] = format_teeth(t.structure);
  const OperatorFile reread = roundtrip({kOperatorFormatVersion, sol.r_star.op(), t.metadata}, g);
  const CausalityReport report = verify_causality(reread.op, t.structure, tol);
  const double value = trace_product(reread.op, t.objective.omega).real();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ResultRecord rec;
  rec.task = t.task;
  rec.parameters = t.parameters;
  rec.parameters["tol_feas"] = tol;
  rec.parameters["tol_gap"] = tol;
  rec.parameters["seed"] = static_cast<double>(g.seed);
  rec.value = value;
  rec.reference_value = t.reference;
  rec.reference_source = t.reference ? t.reference_source : ReferenceSource::None;
  rec.estimation_reference = t.estimation;
  rec.feas_residual = feasibility_residual(report);
  rec.upper_bound = sol.upper_bound;
  if (sol.upper_bound) rec.gap_bound = std::max(0.0, *sol.upper_bound - value);
  rec.iterations = sol.iterations;
  rec.converged = sol.converged;
  rec.wall_time = wall;
  rec.backend = sol.backend;
  rec.operator_path = g.out;
  if (!g.out.empty()) write_text_file(g.out + ".result.json", serialize(rec), g.force);

  if (g.json) {
    out << serialize(rec);
  } else {
    out << t.objective.description << '\n' << std::setprecision(10);
    out << "value                 " << value << '\n';
    if (t.reference)
      out << "reference             " << *t.reference << " (" << to_string(rec.reference_source) << "), difference "
          << std::scientific << std::setprecision(2) << value - *t.reference << std::defaultfloat
          << std::setprecision(10) << '\n';
    if (t.estimation)
      out << "estimation reference  " << *t.estimation << (value > *t.estimation ? " (exceeded)" : " (not exceeded)")
          << '\n';
    if (sol.upper_bound)
      out << "upper bound           " << *sol.upper_bound << "  gap " << std::scientific << std::setprecision(2)
          << *rec.gap_bound << std::defaultfloat << '\n';
    out << "feasibility residual  " << std::scientific << std::setprecision(2) << rec.feas_residual
        << std::defaultfloat << (report.pass ? "" : "  (verification FAILED)") << '\n';
    out << "iterations            " << sol.iterations << (sol.converged ? "" : "  (not converged)") << '\n';
    out << "wall time             " << std::fixed << std::setprecision(2) << wall << " s" << std::defaultfloat << '\n';
    if (!g.out.empty()) out << "operator              " << g.out << '\n';
  }

  if (!sol.converged) {
    err << "solver did not converge within " << problem.max_iters << " iterations\n";
    return kExitNoConvergence;
  }
  if (!report.pass) {
    err << "re-read operator failed verification at tolerance " << tol << '\n';
    return kExitDomainFailure;
  }
  return kExitOk;
}

int cmd_clone(int n, int m, int d, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  SolveTask t{"clone", {{"n", n}, {"m", m}, {"d", d}}, {{"n", std::to_string(n)}, {"m", std::to_string(m)}, {"d", std::to_string(d)}},
              cloning_objective(n, m, d), cloning_structure(n, m, d), std::nullopt, ReferenceSource::None, std::nullopt};
  if (n == 1 && m == 2) {
    t.reference = cloning_closed_form(d);
    t.reference_source = ReferenceSource::ClosedForm;
    t.estimation = estimation_reference(n, m, d);
  }
  return run_solve_task(std::move(t), g, out, err);
}

int cmd_learn(int uses, int d, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  SolveTask t{"learn", {{"uses", uses}, {"d", d}}, {{"uses", std::to_string(uses)}, {"d", std::to_string(d)}},
              learning_objective(uses, d), learning_structure(uses, d), learning_reference(uses, d),
              ReferenceSource::ClosedForm, std::nullopt};
  return run_solve_task(std::move(t), g, out, err);
}

int cmd_verify(const std::string& path, const std::string& teeth, const GlobalFlags& g, std::ostream& out,
               std::ostream& err) {
  const double tol = g.tol_given ? g.tol : kCausalityTol;
  const OperatorFile file = read_operator_file(path);
  std::string spec = teeth;
  if (spec.empty()) {
    const auto it = file.metadata.find("teeth");
    if (it == file.metadata.end()) {
      err << "no --teeth given and the file records none\n";
      return kExitInputError;
    }
    spec = it->second;
  }
  const CombStructure s = parse_teeth(spec, file.op.wires());
  const CausalityReport report = verify_causality(file.op, s, tol);

  if (g.json) {
    nlohmann::json doc;
    doc["file"] = path;
    doc["teeth"] = format_teeth(s);
    doc["tol"] = tol;
    doc["residuals"] = report.residuals;
    doc["min_eigenvalue"] = report.min_eigenvalue;
    doc["first_failing_level"] = report.first_failing_level;
    doc["pass"] = report.pass;
    out << doc.dump(2) << '\n';
  } else {
    out << path << " with teeth " << format_teeth(s) << '\n';
    print_report(out, report);
    if (report.pass)
      out << "PASS at tolerance " << tol << '\n';
    else if (report.first_failing_level >= 0)
      out << "FAIL: causality violated at level " << report.first_failing_level << '\n';
    else
      out << "FAIL: not positive semidefinite\n";
  }
  return report.pass ? kExitOk : kExitDomainFailure;
}

int cmd_random_comb(const std::string& dims, const std::string& memory, const GlobalFlags& g, std::ostream& out,
                    std::ostream& err) {
  const double tol = g.tol_given ? g.tol : 1e-10;
  const CombStructure s = CombStructure::sequential(parse_dim_pairs(dims));
  std::vector<int> mem = memory.empty() ? std::vector<int>(s.slots(), 2) : parse_int_list(memory, ',');
  const QuantumComb comb = random_comb(s, mem, g.seed);

  OperatorFile file{kOperatorFormatVersion, comb.op(),
                    {{"task", "random-comb"}, {"seed", std::to_string(g.seed)}, {"memory_dims", join(mem)},
                     {"teeth", format_teeth(s)}}};
  const OperatorFile reread = roundtrip(file, g);
  const CausalityReport report = verify_causality(reread.op, s, tol);

  if (g.out.empty()) {
    out << serialize(reread);
  } else if (g.json) {
    nlohmann::json doc;
    doc["file"] = g.out;
    doc["teeth"] = format_teeth(s);
    doc["residuals"] = report.residuals;
    doc["min_eigenvalue"] = report.min_eigenvalue;
    doc["pass"] = report.pass;
    out << doc.dump(2) << '\n';
  } else {
    out << "wrote " << g.out << " (D = " << s.dimension() << ", teeth " << format_teeth(s) << ")\n";
    print_report(out, report);
  }
  if (!report.pass) {
    err << "generated comb failed verification at tolerance " << tol << '\n';
    return kExitDomainFailure;
  }
  return kExitOk;
}

int configure_threads(std::ostream& err) {
  const char* env = std::getenv("QCOMB_THREADS");
  if (env == nullptr || *env == '\0') return kExitOk;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    err << "QCOMB_THREADS must be a positive integer\n";
    return kExitInputError;
  }
  Eigen::setNbThreads(static_cast<int>(n));
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum comb toolkit: build, verify and optimize circuit boards with open slots.", "qcomb"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--tol", g.tol, "tolerance (solver feasibility and gap, or verification)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--json", g.json, "print the machine-readable record");
  app.add_option("--out", g.out, "operator output path; the result record goes to <out>.result.json");
  app.add_flag("--force", g.force, "overwrite existing output files");
  app.add_flag("--progress", g.progress, "print solver progress to stderr");
  app.add_option("--max-iters", g.max_iters, "solver iteration budget")->check(CLI::PositiveNumber)->capture_default_str();

  int n = 1, m = 2, d = 2, uses = 1;
  auto* clone = app.add_subcommand("clone", "optimal N -> M cloning of an unknown unitary");
  clone->add_option("--n", n, "uses of the unknown gate")->required()->check(CLI::PositiveNumber);
  clone->add_option("--m", m, "requested copies")->required()->check(CLI::PositiveNumber);
  clone->add_option("--dim", d, "system dimension")->required()->check(CLI::Range(2, 1024));

  auto* learn = app.add_subcommand("learn", "optimal storage and retrieval of an unknown unitary");
  learn->add_option("--uses", uses, "uses of the unknown gate")->required()->check(CLI::PositiveNumber);
  learn->add_option("--dim", d, "system dimension")->required()->check(CLI::Range(2, 1024));

  std::string file, teeth;
  auto* verify = app.add_subcommand("verify", "check the causality conditions of a serialized operator");
  verify->add_option("--file", file, "operator file")->required();
  verify->add_option("--teeth", teeth, "teeth as in:out label pairs, e.g. 0:1,2:3 (default: from the file)");

  std::string dims = "2:2,2:2", memory;
  auto* random = app.add_subcommand("random-comb", "generate a random deterministic comb");
  random->add_option("--dims", dims, "tooth dimensions as in:out pairs, e.g. 2:2,2:2")->capture_default_str();
  random->add_option("--memory", memory, "memory dimensions between teeth, comma separated (default 2)");

  for (auto* sub : {clone, learn, verify, random}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  g.tol_given = app.get_option("--tol")->count() > 0;
  if (const int code = configure_threads(err); code != kExitOk) return code;

  try {
    if (*clone) return cmd_clone(n, m, d, g, out, err);
    if (*learn) return cmd_learn(uses, d, g, out, err);
    if (*verify) return cmd_verify(file, teeth, g, out, err);
    if (*random) return cmd_random_comb(dims, memory, g, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qcomb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qcomb
