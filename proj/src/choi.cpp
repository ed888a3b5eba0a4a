#include "qcomb/choi.hpp"

#include <algorithm>

namespace qcomb {

namespace {

// Eigenvalues below this are treated as numerical zeros when extracting Kraus operators.
constexpr double kKrausRankCutoff = 1e-12;

Wires concat(const Wires& a, const Wires& b) {
  Wires out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

KrausMap::KrausMap(Wires out_wires, Wires in_wires, std::vector<Matrix> kraus)
    : out_(std::move(out_wires)), in_(std::move(in_wires)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw Error(ErrorCode::InvalidArgument, "Kraus list is empty");
  const Index dout = total_dimension(out_), din = total_dimension(in_);
  Matrix sum = Matrix::Zero(din, din);
  for (const auto& k : kraus_) {
    if (k.rows() != dout || k.cols() != din)
      throw Error(ErrorCode::DimMismatch, "Kraus matrix shape does not match wires");
    sum += k.adjoint() * k;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > 1.0 + kHermitianTol * std::max<double>(1.0, din))
    throw Error(ErrorCode::InvalidArgument, "Kraus map is trace increasing");
}

Matrix KrausMap::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(total_dimension(out_), total_dimension(out_));
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

ChoiOperator::ChoiOperator(const LabeledOperator& op, const std::vector<std::string>& out_labels,
                           const std::vector<std::string>& in_labels)
    : n_out_(out_labels.size()) {
  std::vector<std::string> order = out_labels;
  order.insert(order.end(), in_labels.begin(), in_labels.end());
  if (order.size() != op.wires().size())
    throw Error(ErrorCode::LabelMismatch, "in/out labels must partition the operator's wires");
  op_ = permute_wires(op, order);
}

Wires ChoiOperator::out_wires() const { return {op_.wires().begin(), op_.wires().begin() + n_out_}; }
Wires ChoiOperator::in_wires() const { return {op_.wires().begin() + n_out_, op_.wires().end()}; }
std::vector<std::string> ChoiOperator::out_labels() const { return labels_of(out_wires()); }
std::vector<std::string> ChoiOperator::in_labels() const { return labels_of(in_wires()); }

LabeledVector max_entangled(const Wires& first, const Wires& second) {
  const Index d = total_dimension(first);
  if (total_dimension(second) != d)
    throw Error(ErrorCode::DimMismatch, "maximally entangled vector needs equal dimensions");
  Vector v = Vector::Zero(d * d);
  for (Index n = 0; n < d; ++n) v(n * d + n) = 1.0;
  return {concat(first, second), std::move(v)};
}

LabeledVector max_entangled(int d, const Wire& first, const Wire& second) {
  if (first.dim != d || second.dim != d)
    throw Error(ErrorCode::DimMismatch, "both wires must have dimension " + std::to_string(d));
  return max_entangled(Wires{first}, Wires{second});
}

LabeledVector double_ket(const Matrix& k, const Wires& out_wires, const Wires& in_wires) {
  const Index dout = total_dimension(out_wires), din = total_dimension(in_wires);
  if (k.rows() != dout || k.cols() != din)
    throw Error(ErrorCode::DimMismatch, "matrix shape does not match wires");
  Vector v(dout * din);
  for (Index o = 0; o < dout; ++o)
    for (Index i = 0; i < din; ++i) v(o * din + i) = k(o, i);
  return {concat(out_wires, in_wires), std::move(v)};
}

ChoiOperator kraus_to_choi(const KrausMap& m) {
  const Wires wires = concat(m.out_wires(), m.in_wires());
  const Index d = total_dimension(wires);
  Matrix c = Matrix::Zero(d, d);
  for (const auto& k : m.kraus()) {
    const Vector v = double_ket(k, m.out_wires(), m.in_wires()).vector();
    c += v * v.adjoint();
  }
  return {LabeledOperator(wires, std::move(c)), labels_of(m.out_wires()), labels_of(m.in_wires())};
}

ChoiOperator unitary_choi(const Matrix& u, const Wires& out_wires, const Wires& in_wires) {
  return kraus_to_choi(KrausMap(out_wires, in_wires, {u}));
}

LabeledOperator apply_choi(const ChoiOperator& c, const LabeledOperator& rho) {
  const Wires in = c.in_wires();
  if (label_set(rho.wires()) != label_set(in))
    throw Error(ErrorCode::LabelMismatch, "state does not live on the channel's input wires");
  for (const auto& w : rho.wires())
    if (c.op().wire(w.label).dim != w.dim)
      throw Error(ErrorCode::LabelMismatch, "state wire '" + w.label + "' has the wrong dimension");
  const LabeledOperator padded = multiply(rho.transpose(), c.op());
  return permute_wires(partial_trace(padded, label_set(in)), c.out_labels());
}

KrausMap choi_to_kraus(const ChoiOperator& c) {
  const HermitianEigen e = eig_hermitian(c.op());
  const double scale = std::max(1.0, c.op().norm());
  if (e.values(0) < -kHermitianTol * scale)
    throw Error(ErrorCode::NotPSD, "Choi operator has eigenvalue " + std::to_string(e.values(0)));
  const Wires out = c.out_wires(), in = c.in_wires();
  const Index dout = total_dimension(out), din = total_dimension(in);
  std::vector<Matrix> kraus;
  for (Index j = e.values.size(); j-- > 0;) {
    const double lambda = e.values(j);
    if (lambda <= kKrausRankCutoff) break;
    Matrix k(dout, din);
    for (Index o = 0; o < dout; ++o)
      for (Index i = 0; i < din; ++i) k(o, i) = std::sqrt(lambda) * e.vectors(o * din + i, j);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) kraus.push_back(Matrix::Zero(dout, din));
  return KrausMap(out, in, std::move(kraus));
}

ChannelCheck is_channel(const ChoiOperator& c, double tol) {
  ChannelCheck r;
  const Wires in = c.in_wires();
  const LabeledOperator reduced = partial_trace(c.op(), label_set(c.out_wires()));
  r.trace_residual = distance(reduced, LabeledOperator::identity(in));
  r.min_eigenvalue = min_eigenvalue(c.op());
  r.is_channel = r.trace_residual <= tol && r.min_eigenvalue >= -tol;
  return r;
}

}  // namespace qcomb
