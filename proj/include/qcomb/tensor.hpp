#pragma once

// Labeled dense operator algebra. Every operator lives on an ordered list of
// named wires; the matrix is stored in Kronecker order with the leftmost wire
// as the most significant index block. Transposes and conjugates always refer
// to the computational basis {|0>, ..., |dim-1>} of each wire.

#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qcomb/error.hpp"

namespace qcomb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Relative Frobenius tolerance used when deciding whether an operator is Hermitian.
inline constexpr double kHermitianTol = 1e-9;

/// Largest total dimension accepted by the comb, objective and optimizer layers.
inline constexpr Index kMaxDimension = 1024;

struct Wire {
  std::string label;
  int dim = 1;

  friend bool operator==(const Wire&, const Wire&) = default;
};

using Wires = std::vector<Wire>;
using LabelSet = std::set<std::string, std::less<>>;

Index total_dimension(const Wires& wires);
std::vector<std::string> labels_of(const Wires& wires);
LabelSet label_set(const Wires& wires);

class LabeledVector {
 public:
  LabeledVector() : entries_(Vector::Ones(1)) {}
  LabeledVector(Wires wires, Vector entries);

  const Wires& wires() const { return wires_; }
  const Vector& vector() const { return entries_; }
  Index dimension() const { return entries_.size(); }

 private:
  Wires wires_;
  Vector entries_;
};

class LabeledOperator {
 public:
  /// The scalar 1 on the empty wire list.
  LabeledOperator() : entries_(Matrix::Ones(1, 1)) {}
  LabeledOperator(Wires wires, Matrix entries);

  static LabeledOperator identity(Wires wires);
  static LabeledOperator zero(Wires wires);
  static LabeledOperator scalar(Complex value);
  /// |v><v|
  static LabeledOperator projector(const LabeledVector& v);

  const Wires& wires() const { return wires_; }
  const Matrix& matrix() const { return entries_; }
  Index dimension() const { return entries_.rows(); }
  std::vector<std::string> labels() const { return labels_of(wires_); }
  bool has_label(std::string_view label) const;
  const Wire& wire(std::string_view label) const;
  bool is_scalar() const { return wires_.empty(); }

  Complex trace() const { return entries_.trace(); }
  double norm() const { return entries_.norm(); }

  LabeledOperator adjoint() const { return {wires_, entries_.adjoint()}; }
  LabeledOperator conjugate() const { return {wires_, entries_.conjugate()}; }
  LabeledOperator transpose() const { return {wires_, entries_.transpose()}; }
  /// (A + A^dagger) / 2
  LabeledOperator hermitian_part() const;

  bool is_hermitian(double rel_tol = kHermitianTol) const;
  double hermiticity_defect() const;

  /// Same operator with the wires reordered to match `order` (labels must agree).
  LabeledOperator aligned_to(const Wires& order) const;

  LabeledOperator& operator+=(const LabeledOperator& rhs);
  LabeledOperator& operator-=(const LabeledOperator& rhs);
  LabeledOperator& operator*=(Complex s);

 private:
  Wires wires_;
  Matrix entries_;
};

LabeledOperator operator+(LabeledOperator lhs, const LabeledOperator& rhs);
LabeledOperator operator-(LabeledOperator lhs, const LabeledOperator& rhs);
LabeledOperator operator*(LabeledOperator lhs, Complex s);
LabeledOperator operator*(Complex s, LabeledOperator rhs);

/// Kronecker product; wires of `a` followed by wires of `b`.
LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b);
LabeledVector tensor(const LabeledVector& a, const LabeledVector& b);

LabeledOperator permute_wires(const LabeledOperator& a, const std::vector<std::string>& order);
LabeledVector permute_wires(const LabeledVector& v, const std::vector<std::string>& order);

/// Traces out the listed wires. Tracing every wire yields a scalar operator.
LabeledOperator partial_trace(const LabeledOperator& a, const LabelSet& labels);

/// Transposes the tensor factors of the listed wires.
LabeledOperator partial_transpose(const LabeledOperator& a, const LabelSet& labels);

/// Product in the tensor fashion: both factors are padded with identities on
/// the wires they lack. Result wires: a's wires, then b's wires missing from a.
LabeledOperator multiply(const LabeledOperator& a, const LabeledOperator& b);

/// Tr[a b] for operators on the same label set.
Complex trace_product(const LabeledOperator& a, const LabeledOperator& b);

/// ||a - b||_F after aligning b to a's wire order.
double distance(const LabeledOperator& a, const LabeledOperator& b);

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns, in the operator's wire order
};

HermitianEigen eig_hermitian(const LabeledOperator& a);
double min_eigenvalue(const LabeledOperator& a);

/// Frobenius-nearest positive semidefinite operator (eigenvalue clipping).
LabeledOperator psd_project(const LabeledOperator& a);

}  // namespace qcomb
