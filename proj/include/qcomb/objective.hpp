#pragma once

// Haar-averaged performance operators: the figure of merit of a comb R is the
// linear functional F(R) = Tr[R Omega].
//
// Inserting U into a slot happens through the link product, which transposes
// the slot factor: the slot therefore carries |U*><U*| = (conj(U) (x) I)|Omega><Omega|(...)^dagger
// on (slot output, slot input), while target factors carry |U><U| on
// (board output, board input).

#include <optional>
#include <string>

#include "qcomb/comb.hpp"
#include "qcomb/twirl.hpp"

namespace qcomb {

struct PerformanceOperator {
  LabeledOperator omega;   // on the comb's wires, structure order
  TwirlSpec twirl;         // symmetry the operator is invariant under
  std::string description;
};

/// Board for N -> M cloning: tooth 0 takes the M inputs ("0.k", or "0" when M = 1)
/// and feeds slot 1 through "1"; slot n returns on "2n"; the last tooth emits the
/// M outputs ("(2N+1).k").
CombStructure cloning_structure(int n, int m, int d);

/// Board for learning from N uses: tooth 0 has no input and feeds "1"; the last
/// tooth receives "2N" together with the fresh input "psi" and emits "2N+1".
CombStructure learning_structure(int n, int d);

/// Omega = d^{-2M} E_U[(|U><U|)^{(x)M} on targets (x) (|U*><U*|)^{(x)N} on slots],
/// so Tr[R Omega] is the Haar-averaged channel fidelity with U^{(x)M}.
PerformanceOperator cloning_objective(int n, int m, int d, AveragingScheme scheme = AveragingScheme::Auto);

/// Omega = d^{-2} E_U[(|U*><U*|)^{(x)N} on slots (x) |U><U| on (2N+1, psi)].
PerformanceOperator learning_objective(int n, int d, AveragingScheme scheme = AveragingScheme::Auto);

/// (d + sqrt(d^2 - 1)) / d^3, the optimal 1 -> 2 cloning fidelity.
double cloning_closed_form(int d);

/// 2/d^2 for one use and 3/d^2 for two uses; empty otherwise.
std::optional<double> learning_reference(int n, int d);

/// Stored fidelity of the estimate-and-reprepare strategy for 1 -> 2 cloning:
/// 5/16 for qubits, 6/d^4 for d > 2. Throws Unsupported for other (N, M).
double estimation_reference(int n, int m, int d);

}  // namespace qcomb
