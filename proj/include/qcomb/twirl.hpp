#pragma once

// Exact Haar averages of W(U) X W(U)^dagger, where W(U) applies U, conj(U) or
// the identity to each wire.

#include <map>
#include <string>
#include <vector>

#include "qcomb/tensor.hpp"

namespace qcomb {

enum class TwirlTag { None, U, UConj };

enum class AveragingScheme {
  Auto,            // Clifford design when it is exact, Weingarten otherwise
  PauliDesign,     // qubit Pauli group, exact for degree <= 1
  CliffordDesign,  // single-qubit Clifford group (24 elements), exact for degree <= 3
  Weingarten,      // projection onto span{permutation operators}, exact for any degree
};

struct TwirlSpec {
  int d = 2;
  std::map<std::string, TwirlTag, std::less<>> pattern;  // untagged wires are left alone
  AveragingScheme scheme = AveragingScheme::Auto;

  /// Number of tagged wires: the degree in U (and in conj(U)) of the integrand.
  int degree() const;
};

/// Largest degree the scheme averages exactly (for d = 2 where relevant).
int exact_degree(AveragingScheme scheme);

/// W(U) on the given wires, in their order.
Matrix twirl_unitary(const TwirlSpec& spec, const Wires& wires, const Matrix& u);

/// W(U) X W(U)^dagger.
LabeledOperator conjugate_by(const TwirlSpec& spec, const LabeledOperator& x, const Matrix& u);

/// E_U[W(U) X W(U)^dagger] over the Haar measure on U(d), computed exactly.
/// Throws DesignInsufficient, NotHermitian, UnknownLabel or DimMismatch.
LabeledOperator haar_average(const TwirlSpec& spec, const LabeledOperator& base);

/// The 24 single-qubit Clifford unitaries modulo phase.
const std::vector<Matrix>& qubit_clifford_group();

}  // namespace qcomb
