#pragma once

// Maximization of Tr[R Omega] over deterministic combs R (R >= 0 plus the
// causality constraints), and of sum_i Tr[R_i Omega_i] over probabilistic
// combs {R_i}.
//
// The solver is an over-relaxed ADMM splitting between the affine constraint
// set (closed-form projection, see CombProjector) and the PSD cone
// (eigenvalue clipping). Reported values are always evaluated at a point that
// has been pushed back into the feasible set by restore_feasibility.
//
// Upper bounds come from weak duality: for any K orthogonal to the affine
// set's directions with K >= Omega_i for all i, every feasible point obeys
// sum_i Tr[R_i Omega_i] <= Tr[R_0 K] = c (Tr K / D), where R_0 = c I / D.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/comb.hpp"
#include "qcomb/objective.hpp"

namespace qcomb {

struct SdpProblem {
  LabeledOperator omega;  // Hermitian, on the structure's wires
  CombStructure structure;
  double tol_feas = 1e-6;
  double tol_gap = 1e-6;
  int max_iters = 50000;
  std::uint64_t seed = 0;

  SdpProblem(LabeledOperator omega_, CombStructure structure_) : omega(std::move(omega_)), structure(std::move(structure_)) {}
  SdpProblem(const PerformanceOperator& p, CombStructure structure_) : SdpProblem(p.omega, std::move(structure_)) {}
};

struct TraceRow {
  int iteration = 0;
  double value = 0.0;          // Tr[X Omega] at the affine iterate
  double residual = 0.0;       // ||X - Z||_F between the affine and PSD iterates
  double best_feasible = 0.0;  // best value at a restored feasible point so far
};

struct SolverOptions {
  double over_relaxation = 1.6;
  double rho = 1.0;           // initial penalty, in normalized units
  int check_interval = 10;    // iterations between feasible-point evaluations
  int bound_interval = 50;    // iterations between dual-bound evaluations
  int window = 50;            // stalling window of the stopping rule
  std::function<void(const TraceRow&)> progress;  // called every check_interval iterations
};

struct SdpSolution {
  explicit SdpSolution(QuantumComb r) : r_star(std::move(r)) {}

  QuantumComb r_star;
  double value = 0.0;
  double feas_residual = 0.0;  // max causality residual and negative part of min eigenvalue
  std::optional<double> upper_bound;
  std::optional<double> gap_bound;  // upper_bound - value
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace_log;
  std::optional<Matrix> dual_candidate;  // Omega - rho U at the last iterate, structure order
  std::string backend = "admm";
};

/// Throws LabelMismatch, InvalidArgument or DimOverflow for malformed problems.
/// Non-convergence is reported through `converged`, never thrown.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

/// Upper bound certified by the solution's dual candidate. Throws
/// BoundUnavailable when the candidate is missing or not finite.
double dual_bound(const SdpProblem& problem, const SdpSolution& candidate);

/// c * lambda_max(Omega): the bound from the dual point K = 0.
double trivial_dual_bound(const SdpProblem& problem);

/// Upper bound from an arbitrary Hermitian candidate K~ (projected and shifted
/// into the dual-feasible set). Valid for any K~.
double upper_bound_from(const CombProjector& projector, const std::vector<Matrix>& omegas, const Matrix& candidate);

struct ProbabilisticSolution {
  explicit ProbabilisticSolution(ProbabilisticComb c) : comb(std::move(c)) {}

  ProbabilisticComb comb;
  double value = 0.0;
  std::vector<double> branch_values;
  double feas_residual = 0.0;
  std::optional<double> upper_bound;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace_log;
};

struct SdpTolerances {
  double tol_feas = 1e-6;
  double tol_gap = 1e-6;
  int max_iters = 50000;
};

/// Maximizes sum_i Tr[R_i Omega_i] with R_i >= 0 and sum_i R_i a deterministic comb.
/// Branch ids are "0", "1", ...
ProbabilisticSolution solve_probabilistic(const std::vector<LabeledOperator>& omegas, const CombStructure& structure,
                                          const SdpTolerances& tols = {}, const SolverOptions& options = {});

}  // namespace qcomb
