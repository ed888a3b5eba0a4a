#include "qcomb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace qcomb {

namespace {

double real_trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

Matrix clip_negative(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

double lambda_min(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double lambda_max(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

// Blocks summing to a point of the affine set, each mixed with I/D just enough
// to be positive semidefinite.
struct FeasibleBlocks {
  std::vector<Matrix> blocks;
  double mixing = 0.0;
  double min_eigenvalue = 0.0;
};

FeasibleBlocks restore_blocks(const CombProjector& projector, const std::vector<Matrix>& z) {
  const std::size_t k = z.size();
  Matrix sum = Matrix::Zero(z[0].rows(), z[0].cols());
  for (const auto& b : z) sum += b;
  const Matrix correction = (projector.project(sum) - sum) / static_cast<double>(k);
  FeasibleBlocks out;
  std::vector<double> mins;
  for (const auto& b : z) {
    out.blocks.push_back(hermitize(b + correction));
    mins.push_back(lambda_min(out.blocks.back()));
  }
  const double mixed = projector.structure().trace_normalization() / static_cast<double>(z[0].rows()) /
                       static_cast<double>(k);
  for (double lm : mins)
    if (lm < 0.0) out.mixing = std::max(out.mixing, -lm / (mixed - lm));
  if (out.mixing > 0.0)
    for (auto& b : out.blocks) {
      b *= (1.0 - out.mixing);
      b.diagonal().array() += out.mixing * mixed;
    }
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i)
    out.min_eigenvalue = std::min(out.min_eigenvalue, (1.0 - out.mixing) * mins[i] + out.mixing * mixed);
  return out;
}

struct AdmmResult {
  std::vector<Matrix> blocks;
  std::vector<double> branch_values;
  double value = -std::numeric_limits<double>::infinity();
  std::optional<double> upper_bound;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace_log;
  Matrix dual_candidate;
};

AdmmResult run_admm(const std::vector<Matrix>& omegas, const CombStructure& structure, double tol_feas,
                    double tol_gap, int max_iters, const SolverOptions& opt) {
  const CombProjector projector(structure);
  const std::size_t k = omegas.size();
  const Index dim = omegas[0].rows();
  const double c = structure.trace_normalization();

  double omega_scale = 0.0;
  for (const auto& w : omegas) omega_scale = std::max(omega_scale, w.norm());
  const double r0_norm = c / std::sqrt(static_cast<double>(dim));
  double rho = opt.rho * std::max(omega_scale, 1e-300) / r0_norm;

  std::vector<Matrix> z(k), u(k), x(k), xr(k);
  const Matrix mixed = maximally_mixed_comb(structure).matrix() / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    z[i] = mixed;
    u[i] = Matrix::Zero(dim, dim);
  }

  AdmmResult res;
  auto evaluate = [&](const std::vector<Matrix>& blocks) {
    double v = 0.0;
    for (std::size_t i = 0; i < k; ++i) v += real_trace_product(blocks[i], omegas[i]);
    return v;
  };
  auto dual_candidate = [&] {
    Matrix cand = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < k; ++i) cand += omegas[i] - rho * u[i];
    return Matrix(hermitize(cand / static_cast<double>(k)));
  };
  auto take_feasible = [&](const std::vector<Matrix>& from) {
    FeasibleBlocks fb = restore_blocks(projector, from);
    const double v = evaluate(fb.blocks);
    if (v > res.value || res.blocks.empty()) {
      res.value = v;
      res.blocks = std::move(fb.blocks);
    }
  };

  if (omega_scale == 0.0) {
    take_feasible(z);
    res.upper_bound = 0.0;
    res.converged = true;
    res.dual_candidate = Matrix::Zero(dim, dim);
    res.trace_log.push_back({0, 0.0, 0.0, res.value});
    return res;
  }

  take_feasible(z);
  std::deque<double> history;  // best feasible value at each check, newest last
  const std::size_t window_checks = static_cast<std::size_t>(std::max(1, opt.window / opt.check_interval));
  int it = 0;
  for (; it < max_iters; ++it) {
    std::vector<Matrix> v(k);
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < k; ++i) {
      v[i] = z[i] - u[i] + omegas[i] / rho;
      sum += v[i];
    }
    const Matrix correction = (projector.project(hermitize(sum)) - sum) / static_cast<double>(k);
    double primal = 0.0, dual = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = hermitize(v[i] + correction);
      xr[i] = opt.over_relaxation * x[i] + (1.0 - opt.over_relaxation) * z[i];
      const Matrix z_new = clip_negative(xr[i] + u[i]);
      u[i] += xr[i] - z_new;
      primal += (x[i] - z_new).squaredNorm();
      dual += (z_new - z[i]).squaredNorm();
      z[i] = z_new;
    }
    primal = std::sqrt(primal);
    dual = rho * std::sqrt(dual);

    TraceRow row{it + 1, evaluate(x), primal, res.value};

    const bool check = (it + 1) % opt.check_interval == 0;
    if (check) {
      take_feasible(z);
      row.best_feasible = res.value;
      history.push_back(res.value);
      if (history.size() > window_checks + 1) history.pop_front();
    }
    res.trace_log.push_back(row);
    if (check && opt.progress) opt.progress(row);

    if (check) {
      const double scale = tol_gap * (1.0 + std::abs(res.value));
      bool done = false;
      if ((it + 1) % opt.bound_interval == 0) {
        const double bound = upper_bound_from(projector, omegas, dual_candidate());
        if (!res.upper_bound || bound < *res.upper_bound) res.upper_bound = bound;
        done = *res.upper_bound - res.value <= scale;
      }
      const bool stalled = history.size() == window_checks + 1 && history.back() - history.front() <= scale;
      const double dual_feas = dual / (rho * std::max(1.0, r0_norm));
      done = done || (stalled && primal <= tol_feas && dual_feas <= tol_feas);
      if (done) {
        res.converged = true;
        ++it;
        break;
      }
    }

    // Residual balancing; u is the scaled multiplier, so it rescales with rho.
    if ((it + 1) % 25 == 0) {
      const double primal_rel = primal / r0_norm;
      const double dual_rel = dual / std::max(omega_scale, 1e-300);
      if (primal_rel > 10.0 * dual_rel) {
        rho *= 2.0;
        for (auto& ui : u) ui /= 2.0;
      } else if (dual_rel > 10.0 * primal_rel) {
        rho /= 2.0;
        for (auto& ui : u) ui *= 2.0;
      }
    }
  }
  res.iterations = it;
  if (!res.converged || !res.upper_bound) {
    take_feasible(z);
    const double bound = upper_bound_from(projector, omegas, dual_candidate());
    if (!res.upper_bound || bound < *res.upper_bound) res.upper_bound = bound;
  }
  res.dual_candidate = dual_candidate();
  res.branch_values.clear();
  for (std::size_t i = 0; i < k; ++i) res.branch_values.push_back(real_trace_product(res.blocks[i], omegas[i]));
  return res;
}

void validate(const LabeledOperator& omega, const CombStructure& s) {
  if (label_set(omega.wires()) != label_set(s.wires()))
    throw Error(ErrorCode::LabelMismatch, "objective wires do not match the comb structure");
  if (s.dimension() > kMaxDimension)
    throw Error(ErrorCode::DimOverflow, "problem dimension " + std::to_string(s.dimension()) + " exceeds " +
                                            std::to_string(kMaxDimension));
  if (!omega.is_hermitian()) throw Error(ErrorCode::NotHermitian, "objective must be Hermitian");
}

void validate_tolerances(double tol_feas, double tol_gap, int max_iters) {
  if (!(tol_feas > 0.0) || !(tol_gap > 0.0) || max_iters < 1)
    throw Error(ErrorCode::InvalidArgument, "tolerances and iteration budget must be positive");
}

double feasibility_residual(const LabeledOperator& total, const CombStructure& s, double block_min_eig) {
  const CausalityReport report = verify_causality(total, s, std::numeric_limits<double>::infinity());
  return std::max(report.max_residual(), std::max(0.0, -block_min_eig));
}

}  // namespace

double upper_bound_from(const CombProjector& projector, const std::vector<Matrix>& omegas, const Matrix& candidate) {
  const Matrix k = hermitize(projector.project_normal(hermitize(candidate)));
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& w : omegas) shift = std::max(shift, lambda_max(w - k));
  const double c = projector.structure().trace_normalization();
  return c * (k.trace().real() / static_cast<double>(k.rows()) + shift);
}

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  validate(problem.omega, problem.structure);
  validate_tolerances(problem.tol_feas, problem.tol_gap, problem.max_iters);
  const Wires wires = problem.structure.wires();
  const Matrix omega = hermitize(problem.omega.aligned_to(wires).matrix());

  AdmmResult res = run_admm({omega}, problem.structure, problem.tol_feas, problem.tol_gap, problem.max_iters, options);
  LabeledOperator r(wires, res.blocks[0]);
  const double min_eig = lambda_min(res.blocks[0]);

  SdpSolution sol{QuantumComb(r, problem.structure)};
  sol.value = res.value;
  sol.feas_residual = feasibility_residual(r, problem.structure, min_eig);
  sol.upper_bound = res.upper_bound;
  if (res.upper_bound) sol.gap_bound = *res.upper_bound - res.value;
  sol.iterations = res.iterations;
  sol.converged = res.converged && sol.feas_residual <= problem.tol_feas;
  sol.trace_log = std::move(res.trace_log);
  sol.dual_candidate = std::move(res.dual_candidate);
  return sol;
}

double dual_bound(const SdpProblem& problem, const SdpSolution& candidate) {
  if (!candidate.dual_candidate || !candidate.dual_candidate->allFinite())
    throw Error(ErrorCode::BoundUnavailable, "solution carries no usable dual candidate");
  const Index dim = problem.structure.dimension();
  if (candidate.dual_candidate->rows() != dim || candidate.dual_candidate->cols() != dim)
    throw Error(ErrorCode::BoundUnavailable, "dual candidate has the wrong shape");
  const CombProjector projector(problem.structure);
  const Matrix omega = problem.omega.aligned_to(problem.structure.wires()).matrix();
  const double bound = upper_bound_from(projector, {omega}, *candidate.dual_candidate);
  if (!std::isfinite(bound)) throw Error(ErrorCode::BoundUnavailable, "dual bound is not finite");
  return bound;
}

double trivial_dual_bound(const SdpProblem& problem) {
  validate(problem.omega, problem.structure);
  return problem.structure.trace_normalization() * lambda_max(problem.omega.matrix());
}

ProbabilisticSolution solve_probabilistic(const std::vector<LabeledOperator>& omegas, const CombStructure& structure,
                                          const SdpTolerances& tols, const SolverOptions& options) {
  if (omegas.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one branch objective");
  validate_tolerances(tols.tol_feas, tols.tol_gap, tols.max_iters);
  const Wires wires = structure.wires();
  std::vector<Matrix> aligned;
  for (const auto& w : omegas) {
    validate(w, structure);
    aligned.push_back(hermitize(w.aligned_to(wires).matrix()));
  }

  AdmmResult res = run_admm(aligned, structure, tols.tol_feas, tols.tol_gap, tols.max_iters, options);
  std::vector<std::pair<std::string, LabeledOperator>> branches;
  LabeledOperator total = LabeledOperator::zero(wires);
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.blocks.size(); ++i) {
    LabeledOperator op(wires, res.blocks[i]);
    min_eig = std::min(min_eig, lambda_min(res.blocks[i]));
    total += op;
    branches.emplace_back(std::to_string(i), std::move(op));
  }
  ProbabilisticSolution sol{ProbabilisticComb(std::move(branches), structure)};
  sol.value = res.value;
  sol.branch_values = std::move(res.branch_values);
  sol.feas_residual = feasibility_residual(total, structure, min_eig);
  sol.upper_bound = res.upper_bound;
  sol.iterations = res.iterations;
  sol.converged = res.converged && sol.feas_residual <= tols.tol_feas;
  sol.trace_log = std::move(res.trace_log);
  return sol;
}

}  // namespace qcomb
