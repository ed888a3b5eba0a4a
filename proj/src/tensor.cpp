#include "qcomb/tensor.hpp"

#include <algorithm>
#include <unordered_map>

namespace qcomb {

namespace {

void check_wires(const Wires& wires) {
  LabelSet seen;
  for (const auto& w : wires) {
    if (w.dim < 1) throw Error(ErrorCode::InvalidArgument, "wire '" + w.label + "' has dim < 1");
    if (!seen.insert(w.label).second)
      throw Error(ErrorCode::DuplicateLabel, "label '" + w.label + "' appears twice");
  }
}

std::vector<Index> strides_of(const Wires& wires) {
  std::vector<Index> strides(wires.size());
  Index s = 1;
  for (std::size_t k = wires.size(); k-- > 0;) {
    strides[k] = s;
    s *= wires[k].dim;
  }
  return strides;
}

// Linear offsets of every multi-index over `dims` (row-major enumeration) into
// a larger index space whose corresponding strides are `strides`.
std::vector<Index> offsets(const std::vector<int>& dims, const std::vector<Index>& strides) {
  std::vector<Index> out{0};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    std::vector<Index> next;
    next.reserve(out.size() * dims[k]);
    for (Index base : out)
      for (int digit = 0; digit < dims[k]; ++digit) next.push_back(base + digit * strides[k]);
    out = std::move(next);
  }
  return out;
}

std::size_t position_of(const Wires& wires, std::string_view label) {
  for (std::size_t k = 0; k < wires.size(); ++k)
    if (wires[k].label == label) return k;
  throw Error(ErrorCode::UnknownLabel, "no wire labeled '" + std::string(label) + "'");
}

void check_subset(const Wires& wires, const LabelSet& labels) {
  for (const auto& l : labels) position_of(wires, l);
}

// Splits the wire positions into (selected, rest), each keeping the original order.
struct Split {
  std::vector<int> sel_dims, rest_dims;
  std::vector<Index> sel_strides, rest_strides;
  Wires sel_wires, rest_wires;
};

Split split_wires(const Wires& wires, const LabelSet& labels) {
  check_subset(wires, labels);
  const auto strides = strides_of(wires);
  Split s;
  for (std::size_t k = 0; k < wires.size(); ++k) {
    if (labels.contains(wires[k].label)) {
      s.sel_dims.push_back(wires[k].dim);
      s.sel_strides.push_back(strides[k]);
      s.sel_wires.push_back(wires[k]);
    } else {
      s.rest_dims.push_back(wires[k].dim);
      s.rest_strides.push_back(strides[k]);
      s.rest_wires.push_back(wires[k]);
    }
  }
  return s;
}

std::vector<Index> permutation_map(const Wires& wires, const std::vector<std::string>& order,
                                   Wires& new_wires) {
  if (order.size() != wires.size())
    throw Error(ErrorCode::NotAPermutation, "order has " + std::to_string(order.size()) +
                                                " labels, operator has " + std::to_string(wires.size()));
  const auto strides = strides_of(wires);
  std::vector<int> dims;
  std::vector<Index> old_strides;
  LabelSet used;
  new_wires.clear();
  for (const auto& l : order) {
    const auto pos = position_of(wires, l);
    if (!used.insert(l).second) throw Error(ErrorCode::NotAPermutation, "label '" + l + "' repeated");
    new_wires.push_back(wires[pos]);
    dims.push_back(wires[pos].dim);
    old_strides.push_back(strides[pos]);
  }
  return offsets(dims, old_strides);
}

}  // namespace

Index total_dimension(const Wires& wires) {
  Index d = 1;
  for (const auto& w : wires) d *= w.dim;
  return d;
}

std::vector<std::string> labels_of(const Wires& wires) {
  std::vector<std::string> out;
  out.reserve(wires.size());
  for (const auto& w : wires) out.push_back(w.label);
  return out;
}

LabelSet label_set(const Wires& wires) {
  LabelSet out;
  for (const auto& w : wires) out.insert(w.label);
  return out;
}

LabeledVector::LabeledVector(Wires wires, Vector entries)
    : wires_(std::move(wires)), entries_(std::move(entries)) {
  check_wires(wires_);
  if (entries_.size() != total_dimension(wires_))
    throw Error(ErrorCode::DimMismatch, "vector length does not match wire dimensions");
}

LabeledOperator::LabeledOperator(Wires wires, Matrix entries)
    : wires_(std::move(wires)), entries_(std::move(entries)) {
  check_wires(wires_);
  const Index d = total_dimension(wires_);
  if (entries_.rows() != d || entries_.cols() != d)
    throw Error(ErrorCode::DimMismatch, "matrix is " + std::to_string(entries_.rows()) + "x" +
                                            std::to_string(entries_.cols()) + ", wires require " +
                                            std::to_string(d));
}

LabeledOperator LabeledOperator::identity(Wires wires) {
  const Index d = total_dimension(wires);
  return {std::move(wires), Matrix::Identity(d, d)};
}

LabeledOperator LabeledOperator::zero(Wires wires) {
  const Index d = total_dimension(wires);
  return {std::move(wires), Matrix::Zero(d, d)};
}

LabeledOperator LabeledOperator::scalar(Complex value) { return {{}, Matrix::Constant(1, 1, value)}; }

LabeledOperator LabeledOperator::projector(const LabeledVector& v) {
  return {v.wires(), v.vector() * v.vector().adjoint()};
}

bool LabeledOperator::has_label(std::string_view label) const {
  return std::any_of(wires_.begin(), wires_.end(), [&](const Wire& w) { return w.label == label; });
}

const Wire& LabeledOperator::wire(std::string_view label) const {
  return wires_[position_of(wires_, label)];
}

LabeledOperator LabeledOperator::hermitian_part() const {
  return {wires_, (entries_ + entries_.adjoint()) * 0.5};
}

double LabeledOperator::hermiticity_defect() const { return (entries_ - entries_.adjoint()).norm(); }

bool LabeledOperator::is_hermitian(double rel_tol) const {
  return hermiticity_defect() <= rel_tol * entries_.norm();
}

LabeledOperator LabeledOperator::aligned_to(const Wires& order) const {
  if (order == wires_) return *this;
  if (label_set(order) != label_set(wires_))
    throw Error(ErrorCode::LabelMismatch, "operators live on different label sets");
  for (const auto& w : order)
    if (wire(w.label).dim != w.dim)
      throw Error(ErrorCode::DimMismatch, "wire '" + w.label + "' has mismatched dimension");
  return permute_wires(*this, labels_of(order));
}

LabeledOperator& LabeledOperator::operator+=(const LabeledOperator& rhs) {
  entries_ += rhs.aligned_to(wires_).entries_;
  return *this;
}

LabeledOperator& LabeledOperator::operator-=(const LabeledOperator& rhs) {
  entries_ -= rhs.aligned_to(wires_).entries_;
  return *this;
}

LabeledOperator& LabeledOperator::operator*=(Complex s) {
  entries_ *= s;
  return *this;
}

LabeledOperator operator+(LabeledOperator lhs, const LabeledOperator& rhs) { return lhs += rhs; }
LabeledOperator operator-(LabeledOperator lhs, const LabeledOperator& rhs) { return lhs -= rhs; }
LabeledOperator operator*(LabeledOperator lhs, Complex s) { return lhs *= s; }
LabeledOperator operator*(Complex s, LabeledOperator rhs) { return rhs *= s; }

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b) {
  Wires wires = a.wires();
  wires.insert(wires.end(), b.wires().begin(), b.wires().end());
  const Index da = a.dimension(), db = b.dimension();
  Matrix out(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return {std::move(wires), std::move(out)};
}

LabeledVector tensor(const LabeledVector& a, const LabeledVector& b) {
  Wires wires = a.wires();
  wires.insert(wires.end(), b.wires().begin(), b.wires().end());
  const Index db = b.dimension();
  Vector out(a.dimension() * db);
  for (Index i = 0; i < a.dimension(); ++i) out.segment(i * db, db) = a.vector()(i) * b.vector();
  return {std::move(wires), std::move(out)};
}

LabeledOperator permute_wires(const LabeledOperator& a, const std::vector<std::string>& order) {
  Wires new_wires;
  const auto map = permutation_map(a.wires(), order, new_wires);
  const Index d = a.dimension();
  Matrix out(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) out(i, j) = a.matrix()(map[i], map[j]);
  return {std::move(new_wires), std::move(out)};
}

LabeledVector permute_wires(const LabeledVector& v, const std::vector<std::string>& order) {
  Wires new_wires;
  const auto map = permutation_map(v.wires(), order, new_wires);
  Vector out(v.dimension());
  for (Index i = 0; i < v.dimension(); ++i) out(i) = v.vector()(map[i]);
  return {std::move(new_wires), std::move(out)};
}

LabeledOperator partial_trace(const LabeledOperator& a, const LabelSet& labels) {
  const Split s = split_wires(a.wires(), labels);
  const auto keep = offsets(s.rest_dims, s.rest_strides);
  const auto traced = offsets(s.sel_dims, s.sel_strides);
  const Index dk = static_cast<Index>(keep.size());
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = a.matrix();
  for (Index j = 0; j < dk; ++j)
    for (Index i = 0; i < dk; ++i) {
      Complex acc = 0.0;
      for (Index t : traced) acc += m(keep[i] + t, keep[j] + t);
      out(i, j) = acc;
    }
  return {s.rest_wires, std::move(out)};
}

LabeledOperator partial_transpose(const LabeledOperator& a, const LabelSet& labels) {
  const Split s = split_wires(a.wires(), labels);
  const auto rest = offsets(s.rest_dims, s.rest_strides);
  const auto sel = offsets(s.sel_dims, s.sel_strides);
  const Index d = a.dimension();
  std::vector<Index> rest_part(d), sel_part(d);
  for (Index r : rest)
    for (Index t : sel) {
      rest_part[r + t] = r;
      sel_part[r + t] = t;
    }
  Matrix out(d, d);
  const Matrix& m = a.matrix();
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) out(i, j) = m(rest_part[i] + sel_part[j], rest_part[j] + sel_part[i]);
  return {a.wires(), std::move(out)};
}

LabeledOperator multiply(const LabeledOperator& a, const LabeledOperator& b) {
  Wires missing_in_a, missing_in_b;
  for (const auto& w : b.wires()) {
    if (!a.has_label(w.label))
      missing_in_a.push_back(w);
    else if (a.wire(w.label).dim != w.dim)
      throw Error(ErrorCode::DimMismatch, "wire '" + w.label + "' has mismatched dimension");
  }
  for (const auto& w : a.wires())
    if (!b.has_label(w.label)) missing_in_b.push_back(w);
  const LabeledOperator pa = tensor(a, LabeledOperator::identity(missing_in_a));
  const LabeledOperator pb = tensor(b, LabeledOperator::identity(missing_in_b)).aligned_to(pa.wires());
  return {pa.wires(), pa.matrix() * pb.matrix()};
}

Complex trace_product(const LabeledOperator& a, const LabeledOperator& b) {
  const Matrix bm = b.aligned_to(a.wires()).matrix();
  // Tr[A B] = sum_ij A_ij B_ji
  return (a.matrix().transpose().cwiseProduct(bm)).sum();
}

double distance(const LabeledOperator& a, const LabeledOperator& b) {
  return (a.matrix() - b.aligned_to(a.wires()).matrix()).norm();
}

HermitianEigen eig_hermitian(const LabeledOperator& a) {
  const double defect = a.hermiticity_defect();
  if (defect > kHermitianTol * a.norm())
    throw Error(ErrorCode::NotHermitian,
                "||A - A^dagger||_F = " + std::to_string(defect) + " exceeds tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.hermitian_part().matrix());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const LabeledOperator& a) {
  const double defect = a.hermiticity_defect();
  if (defect > kHermitianTol * a.norm())
    throw Error(ErrorCode::NotHermitian, "min_eigenvalue of non-Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.hermitian_part().matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

LabeledOperator psd_project(const LabeledOperator& a) {
  const HermitianEigen e = eig_hermitian(a);
  const Eigen::VectorXd clipped = e.values.cwiseMax(0.0);
  Matrix out = e.vectors * clipped.asDiagonal() * e.vectors.adjoint();
  out = (out + out.adjoint()).eval() * 0.5;
  return {a.wires(), std::move(out)};
}

}  // namespace qcomb
