#pragma once

// Choi-Jamiolkowski correspondence. A ChoiOperator stores its wires as
// [outputs..., inputs...]; a group of several wires on either side is treated
// as one composite system in Kronecker order.

#include <vector>

#include "qcomb/tensor.hpp"

namespace qcomb {

class KrausMap {
 public:
  /// Each Kraus matrix is dim(out) x dim(in). Throws InvalidArgument when the
  /// map is trace increasing beyond kHermitianTol.
  KrausMap(Wires out_wires, Wires in_wires, std::vector<Matrix> kraus);

  const Wires& out_wires() const { return out_; }
  const Wires& in_wires() const { return in_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  /// sum_k K_k rho K_k^dagger, directly on matrices.
  Matrix apply(const Matrix& rho) const;

 private:
  Wires out_;
  Wires in_;
  std::vector<Matrix> kraus_;
};

class ChoiOperator {
 public:
  ChoiOperator(const LabeledOperator& op, const std::vector<std::string>& out_labels,
               const std::vector<std::string>& in_labels);

  const LabeledOperator& op() const { return op_; }
  Wires out_wires() const;
  Wires in_wires() const;
  std::vector<std::string> out_labels() const;
  std::vector<std::string> in_labels() const;

 private:
  LabeledOperator op_;
  std::size_t n_out_ = 0;
};

/// |Omega> = sum_n |n>|n> over two (groups of) wires of equal total dimension.
LabeledVector max_entangled(const Wires& first, const Wires& second);
LabeledVector max_entangled(int d, const Wire& first, const Wire& second);

/// |K>> = (K (x) I)|Omega> on [out..., in...].
LabeledVector double_ket(const Matrix& k, const Wires& out_wires, const Wires& in_wires);

ChoiOperator kraus_to_choi(const KrausMap& m);
ChoiOperator unitary_choi(const Matrix& u, const Wires& out_wires, const Wires& in_wires);

/// C(rho) = Tr_in[(I_out (x) rho^T) C]. rho must live exactly on the input wires.
LabeledOperator apply_choi(const ChoiOperator& c, const LabeledOperator& rho);

/// Kraus operators sqrt(lambda) * reshape(v) for eigenpairs with lambda > 1e-12.
KrausMap choi_to_kraus(const ChoiOperator& c);

struct ChannelCheck {
  bool is_channel = false;
  double trace_residual = 0.0;  // ||Tr_out C - I_in||_F
  double min_eigenvalue = 0.0;
};

ChannelCheck is_channel(const ChoiOperator& c, double tol = 1e-9);

}  // namespace qcomb
