#pragma once

#include <cstdint>
#include <random>

#include "qcomb/tensor.hpp"

namespace qcomb {

using Rng = std::mt19937_64;

/// Matrix with i.i.d. standard complex Gaussian entries.
Matrix ginibre(Index rows, Index cols, Rng& rng);

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
Matrix haar_unitary(Index dim, Rng& rng);

/// First `cols` columns of a Haar unitary of size rows x rows.
Matrix haar_isometry(Index rows, Index cols, Rng& rng);

/// Hermitian operator with Gaussian entries (GUE-like), Frobenius norm ~ dim.
LabeledOperator random_hermitian(const Wires& wires, Rng& rng);

/// Positive operator G G^dagger with G of the given rank.
LabeledOperator random_psd(const Wires& wires, Index rank, Rng& rng);

/// Unit-trace positive operator of full rank.
LabeledOperator random_density(const Wires& wires, Rng& rng);

}  // namespace qcomb
