#pragma once

// Quantum combs: Choi operators of circuit boards with ordered slots.
//
// A comb with N slots has N+1 teeth; tooth n takes the input group in_n and
// emits the output group out_n. Conventional labels are "2n" for inputs and
// "2n+1" for outputs, but any distinct labels work, and either group may hold
// several wires (a composite system) or none (a trivial system).
//
// R is a deterministic comb iff R >= 0 and, for n = N..0,
//   Tr_{out_n} R^(n) = I_{in_n} (x) R^(n-1),   R^(N) = R,  R^(-1) = 1,
// where R^(n-1) = Tr_{in_n, out_n} R^(n) / d_{in_n}.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/choi.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

struct Tooth {
  Wires inputs;
  Wires outputs;
};

class CombStructure {
 public:
  /// Throws DuplicateLabel for repeated labels, InvalidArgument for zero teeth.
  explicit CombStructure(std::vector<Tooth> teeth);

  /// Single-wire teeth labeled "0","1","2",... with the given (in, out) dims.
  static CombStructure sequential(const std::vector<std::pair<int, int>>& dims);

  const std::vector<Tooth>& teeth() const { return teeth_; }
  int slots() const { return static_cast<int>(teeth_.size()) - 1; }

  /// in_0, out_0, in_1, out_1, ...
  Wires wires() const;
  Index dimension() const { return total_dimension(wires()); }
  Index input_dimension(int n) const { return total_dimension(teeth_.at(n).inputs); }
  Index output_dimension(int n) const { return total_dimension(teeth_.at(n).outputs); }

  /// prod_n d_{in_n}, the trace of every deterministic comb on this structure.
  double trace_normalization() const;

 private:
  std::vector<Tooth> teeth_;
};

/// Structure left after filling the given slots; filled slot s merges teeth s and s+1.
CombStructure residual_structure(const CombStructure& s, const std::vector<int>& filled_slots);

class QuantumComb {
 public:
  /// Aligns R to the structure's wire order. Throws LabelMismatch.
  QuantumComb(const LabeledOperator& r, CombStructure structure);

  const LabeledOperator& op() const { return r_; }
  const CombStructure& structure() const { return structure_; }

 private:
  LabeledOperator r_;
  CombStructure structure_;
};

struct CausalityReport {
  bool pass = false;
  std::vector<double> residuals;  // residuals[n] for level n = 0..N
  double min_eigenvalue = 0.0;
  int first_failing_level = -1;  // -1 when every level passes
  double tol = 0.0;

  double max_residual() const;
};

inline constexpr double kCausalityTol = 1e-9;

/// R^(n) for n = -1..N. Throws IndexOutOfRange.
LabeledOperator reduced_comb(const LabeledOperator& r, const CombStructure& s, int n);

/// Throws LabelMismatch when R's wires differ from the structure's.
CausalityReport verify_causality(const LabeledOperator& r, const CombStructure& s,
                                 double tol = kCausalityTol);

/// (prod d_in / D) I, the maximally mixed deterministic comb.
LabeledOperator maximally_mixed_comb(const CombStructure& s);

/// Orthogonal projection onto the affine span of the causality constraints.
///
/// With T_S(W) = I_S/d_S (x) Tr_S W and L_n the wires of teeth after n, the
/// maps E_n = T_{out_n, L_n} - T_{in_n, out_n, L_n} are mutually orthogonal
/// projections, so the projection is W - sum_n E_n(W) + (c - Tr W) I / D.
class CombProjector {
 public:
  explicit CombProjector(CombStructure structure);

  const CombStructure& structure() const { return structure_; }

  /// Projects a Hermitian operator on the structure's wires (in that order).
  Matrix project(const Matrix& w) const;
  /// Same projection onto the linear subspace (trace is left free).
  Matrix project_linear(const Matrix& w) const;
  /// Projection onto the orthogonal complement of the affine set's direction
  /// space: sum_n E_n(W) + (Tr W / D) I.
  Matrix project_normal(const Matrix& w) const;

 private:
  Matrix trace_and_replace(const Matrix& w, const LabelSet& labels) const;

  CombStructure structure_;
  Wires wires_;
  struct Level {
    LabelSet with_input;
    LabelSet without_input;
    bool trivial = false;  // d_in == 1
  };
  std::vector<Level> levels_;
};

/// Projects w onto the affine set, then mixes in the maximally mixed comb
/// just enough to clear negative eigenvalues. The result is a deterministic
/// comb up to roundoff; `mixing` reports the weight used.
struct FeasibleRestoration {
  Matrix r;
  double mixing = 0.0;
};
FeasibleRestoration restore_feasibility(const CombProjector& projector, const Matrix& w);

struct ProjectionResult {
  QuantumComb comb;
  bool converged = false;
  int iterations = 0;
  double gap = 0.0;  // final Frobenius gap between the two projections
  CausalityReport report;
};

/// Dykstra alternating projections between the PSD cone and the affine
/// constraint set, finished with restore_feasibility. Never throws for
/// non-convergence; inspect `converged`.
ProjectionResult project_to_comb(const LabeledOperator& x, const CombStructure& s, int iters = 5000,
                                 double tol = 1e-10);

/// Random comb built as a chain of N+1 random channels with memory. Channel n
/// maps (in_n, mem_{n-1}) to (out_n, mem_n) through a Haar isometry with an
/// environment of full Kraus rank that is discarded.
QuantumComb random_comb(const CombStructure& s, const std::vector<int>& memory_dims,
                        std::uint64_t seed);

/// C' = C_1 * ... * C_k * R. The input placed in slot s must have
/// teeth[s].outputs among its inputs and teeth[s+1].inputs among its outputs.
ChoiOperator supermap_apply(const QuantumComb& comb, const std::vector<ChoiOperator>& inputs,
                            const std::vector<int>& slots);

class ProbabilisticComb {
 public:
  /// Throws InvalidArgument (empty / duplicate ids), LabelMismatch or NotPSD.
  ProbabilisticComb(std::vector<std::pair<std::string, LabeledOperator>> branches,
                    CombStructure structure, double tol = kCausalityTol);

  const std::vector<std::pair<std::string, LabeledOperator>>& branches() const { return branches_; }
  const CombStructure& structure() const { return structure_; }
  LabeledOperator sum() const;

 private:
  std::vector<std::pair<std::string, LabeledOperator>> branches_;
  CombStructure structure_;
};

/// R~ = sum_i R_i (x) |i><i| with the register appended to the last output
/// group. Throws InvalidBranchSum when sum_i R_i is not a deterministic comb.
QuantumComb register_comb(const ProbabilisticComb& p, const std::string& register_label = "reg",
                          double tol = kCausalityTol);

/// R~ * |i><i| on the register wire.
LabeledOperator postselect_branch(const LabeledOperator& register_comb_op,
                                  const std::string& register_label, int outcome);

}  // namespace qcomb
