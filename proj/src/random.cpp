#include "qcomb/random.hpp"

namespace qcomb {

Matrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  return g;
}

Matrix haar_unitary(Index dim, Rng& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    q.col(k) *= mag > 0.0 ? diag / mag : Complex(1.0);
  }
  return q;
}

Matrix haar_isometry(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw Error(ErrorCode::InvalidArgument, "isometry needs cols <= rows");
  return haar_unitary(rows, rng).leftCols(cols);
}

LabeledOperator random_hermitian(const Wires& wires, Rng& rng) {
  const Index d = total_dimension(wires);
  const Matrix g = ginibre(d, d, rng);
  return {wires, (g + g.adjoint()) * 0.5};
}

LabeledOperator random_psd(const Wires& wires, Index rank, Rng& rng) {
  const Index d = total_dimension(wires);
  const Matrix g = ginibre(d, rank, rng);
  return {wires, g * g.adjoint()};
}

LabeledOperator random_density(const Wires& wires, Rng& rng) {
  LabeledOperator p = random_psd(wires, total_dimension(wires), rng);
  return p * Complex(1.0 / p.trace().real());
}

}  // namespace qcomb
