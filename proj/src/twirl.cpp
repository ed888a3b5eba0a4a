#include "qcomb/twirl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace qcomb {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void validate(const TwirlSpec& spec, const LabeledOperator& base) {
  for (const auto& [label, tag] : spec.pattern) {
    const Wire& w = base.wire(label);
    if (tag != TwirlTag::None && w.dim != spec.d)
      throw Error(ErrorCode::DimMismatch, "twirled wire '" + label + "' must have dimension " + std::to_string(spec.d));
  }
}

TwirlTag tag_of(const TwirlSpec& spec, const std::string& label) {
  const auto it = spec.pattern.find(label);
  return it == spec.pattern.end() ? TwirlTag::None : it->second;
}

const std::vector<Matrix>& qubit_pauli_group() {
  static const std::vector<Matrix> paulis = [] {
    Matrix i = Matrix::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    return std::vector<Matrix>{i, x, y, z};
  }();
  return paulis;
}

LabeledOperator design_average(const TwirlSpec& spec, const LabeledOperator& base,
                               const std::vector<Matrix>& group) {
  Matrix acc = Matrix::Zero(base.dimension(), base.dimension());
  for (const auto& g : group) {
    const Matrix w = twirl_unitary(spec, base.wires(), g);
    acc += w * base.matrix() * w.adjoint();
  }
  acc /= static_cast<double>(group.size());
  return {base.wires(), (acc + acc.adjoint()) * 0.5};
}

// Projection onto span{P_sigma (x) B(rest)}: the commutant of U^{(x)t} (x) I.
LabeledOperator weingarten_average(const TwirlSpec& spec, const LabeledOperator& base) {
  LabelSet conj_labels;
  std::vector<std::string> tagged, rest;
  for (const auto& w : base.wires()) {
    const TwirlTag tag = tag_of(spec, w.label);
    if (tag == TwirlTag::None) {
      rest.push_back(w.label);
    } else {
      tagged.push_back(w.label);
      if (tag == TwirlTag::UConj) conj_labels.insert(w.label);
    }
  }
  if (tagged.empty()) return base;

  // conj(U) Y U^T = (U Y^T U^dagger)^T, so conjugate wires become ordinary ones
  // under a partial transpose.
  std::vector<std::string> order = tagged;
  order.insert(order.end(), rest.begin(), rest.end());
  const LabeledOperator x = permute_wires(partial_transpose(base, conj_labels), order);

  const int t = static_cast<int>(tagged.size());
  const Index d = spec.d;
  Index dt = 1;
  for (int k = 0; k < t; ++k) dt *= d;
  const Index dr = x.dimension() / dt;

  std::vector<int> sigma(t);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<Index>> perms;  // P_sigma e_j = e_{perm[j]}
  do {
    std::vector<Index> perm(dt);
    std::vector<Index> digits(t);
    for (Index j = 0; j < dt; ++j) {
      Index rem = j;
      for (int k = t - 1; k >= 0; --k) {
        digits[k] = rem % d;
        rem /= d;
      }
      Index target = 0;
      for (int k = 0; k < t; ++k) target = target * d + digits[sigma[k]];
      perm[j] = target;
    }
    perms.push_back(std::move(perm));
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  const Index np = static_cast<Index>(perms.size());
  // Gram[s, r] = Tr[P_s^dagger P_r] = #{j : perm_s[j] == perm_r[j]}
  Eigen::MatrixXd gram(np, np);
  for (Index s = 0; s < np; ++s)
    for (Index r = 0; r < np; ++r) {
      Index fixed = 0;
      for (Index j = 0; j < dt; ++j) fixed += perms[s][j] == perms[r][j];
      gram(s, r) = static_cast<double>(fixed);
    }
  const Eigen::MatrixXd gram_pinv = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(gram).pseudoInverse();

  // b_s = Tr_tagged[(P_s^dagger (x) I) X]; (P^dagger X)(j, :) = X(perm[j], :).
  std::vector<Matrix> b(np, Matrix::Zero(dr, dr));
  const Matrix& xm = x.matrix();
  for (Index s = 0; s < np; ++s)
    for (Index j = 0; j < dt; ++j) b[s] += xm.block(perms[s][j] * dr, j * dr, dr, dr);

  Matrix out = Matrix::Zero(x.dimension(), x.dimension());
  for (Index r = 0; r < np; ++r) {
    Matrix coeff = Matrix::Zero(dr, dr);
    for (Index s = 0; s < np; ++s) coeff += gram_pinv(r, s) * b[s];
    for (Index j = 0; j < dt; ++j) out.block(perms[r][j] * dr, j * dr, dr, dr) += coeff;
  }

  const LabeledOperator averaged(x.wires(), (out + out.adjoint()) * 0.5);
  return partial_transpose(averaged, conj_labels).aligned_to(base.wires());
}

}  // namespace

int TwirlSpec::degree() const {
  return static_cast<int>(std::count_if(pattern.begin(), pattern.end(),
                                        [](const auto& kv) { return kv.second != TwirlTag::None; }));
}

int exact_degree(AveragingScheme scheme) {
  switch (scheme) {
    case AveragingScheme::PauliDesign: return 1;
    case AveragingScheme::CliffordDesign: return 3;
    case AveragingScheme::Auto:
    case AveragingScheme::Weingarten: return std::numeric_limits<int>::max();
  }
  return 0;
}

Matrix twirl_unitary(const TwirlSpec& spec, const Wires& wires, const Matrix& u) {
  Matrix w = Matrix::Ones(1, 1);
  for (const auto& wire : wires) {
    switch (tag_of(spec, wire.label)) {
      case TwirlTag::None: w = kron(w, Matrix::Identity(wire.dim, wire.dim)); break;
      case TwirlTag::U: w = kron(w, u); break;
      case TwirlTag::UConj: w = kron(w, u.conjugate()); break;
    }
  }
  return w;
}

LabeledOperator conjugate_by(const TwirlSpec& spec, const LabeledOperator& x, const Matrix& u) {
  validate(spec, x);
  const Matrix w = twirl_unitary(spec, x.wires(), u);
  return {x.wires(), w * x.matrix() * w.adjoint()};
}

const std::vector<Matrix>& qubit_clifford_group() {
  static const std::vector<Matrix> group = [] {
    Matrix h(2, 2), s(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    s << 1, 0, 0, Complex(0, 1);
    auto key = [](const Matrix& u) {
      Index k = 0;
      while (std::abs(u(k % 2, k / 2)) < 1e-9) ++k;
      const Complex z = u(k % 2, k / 2);
      const Complex phase = z / std::abs(z);
      std::vector<long long> out;
      for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < 2; ++i) {
          const Complex v = u(i, j) / phase;
          out.push_back(std::llround(v.real() * 1e6));
          out.push_back(std::llround(v.imag() * 1e6));
        }
      return out;
    };
    std::vector<Matrix> elements{Matrix::Identity(2, 2)};
    std::set<std::vector<long long>> seen{key(elements[0])};
    for (std::size_t next = 0; next < elements.size(); ++next)
      for (const Matrix* g : {&h, &s}) {
        Matrix candidate = *g * elements[next];
        if (seen.insert(key(candidate)).second) elements.push_back(std::move(candidate));
      }
    return elements;
  }();
  return group;
}

LabeledOperator haar_average(const TwirlSpec& spec, const LabeledOperator& base) {
  validate(spec, base);
  if (!base.is_hermitian()) throw Error(ErrorCode::NotHermitian, "twirl base must be Hermitian");
  const int t = spec.degree();
  AveragingScheme scheme = spec.scheme;
  if (scheme == AveragingScheme::Auto)
    scheme = (spec.d == 2 && t <= exact_degree(AveragingScheme::CliffordDesign)) ? AveragingScheme::CliffordDesign
                                                                                 : AveragingScheme::Weingarten;
  if (scheme == AveragingScheme::PauliDesign || scheme == AveragingScheme::CliffordDesign) {
    if (t > 0 && spec.d != 2)
      throw Error(ErrorCode::DesignInsufficient, "qubit designs cannot average dimension " + std::to_string(spec.d));
    if (t > exact_degree(scheme))
      throw Error(ErrorCode::DesignInsufficient, "design is exact up to degree " +
                                                     std::to_string(exact_degree(scheme)) + ", need " +
                                                     std::to_string(t));
    return design_average(spec, base,
                          scheme == AveragingScheme::PauliDesign ? qubit_pauli_group() : qubit_clifford_group());
  }
  return weingarten_average(spec, base);
}

}  // namespace qcomb
