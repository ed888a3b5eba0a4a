#pragma once

#include "oracles.hpp"
#include "qcomb/tensor.hpp"

namespace testing {

inline oracle::Op to_oracle(const qcomb::LabeledOperator& a) {
  oracle::Op out;
  for (const auto& w : a.wires()) {
    out.labels.push_back(w.label);
    out.dims.push_back(w.dim);
  }
  out.m = a.matrix();
  return out;
}

inline qcomb::LabeledOperator from_oracle(const oracle::Op& a) {
  qcomb::Wires wires;
  for (std::size_t k = 0; k < a.labels.size(); ++k) wires.push_back({a.labels[k], a.dims[k]});
  return {wires, a.m};
}

// Frobenius distance after aligning b's wire order to a's.
inline double gap(const qcomb::LabeledOperator& a, const oracle::Op& b) {
  return (a.matrix() - oracle::permute(b, a.labels()).m).norm();
}

}  // namespace testing
