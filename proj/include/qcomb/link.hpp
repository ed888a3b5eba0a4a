#pragma once

// Link product of Choi operators, C = A * B = Tr_J[A^{T_J} B], where J is the
// set of labels shared by A and B and the product pads both sides with
// identities. The result lives on A's unshared wires followed by B's.

#include <vector>

#include "qcomb/tensor.hpp"

namespace qcomb {

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b);

/// Same contraction computed by padding to the union of the label sets,
/// transposing A on J, multiplying and tracing J. O(D_union^3); for testing.
LabeledOperator link_product_literal(const LabeledOperator& a, const LabeledOperator& b);

class Network {
 public:
  /// Throws TripleLabel if a label occurs in three or more parts.
  explicit Network(std::vector<LabeledOperator> parts);

  const std::vector<LabeledOperator>& parts() const { return parts_; }
  LabelSet connected_labels() const;
  LabelSet open_labels() const;

 private:
  std::vector<LabeledOperator> parts_;
};

enum class AssembleOrder {
  Sequential,  // left fold in the given order
  Greedy,      // repeatedly link the pair with the smallest result dimension
};

LabeledOperator assemble(const Network& net, AssembleOrder order = AssembleOrder::Sequential);

}  // namespace qcomb
