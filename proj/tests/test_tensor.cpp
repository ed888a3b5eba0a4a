#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qcomb/random.hpp"
#include "qcomb/tensor.hpp"

using namespace qcomb;

TEST_CASE("constructor validates wires and shape") {
  CHECK_THROWS_AS(LabeledOperator({{"a", 2}, {"a", 2}}, Matrix::Identity(4, 4)), Error);
  CHECK_THROWS_AS(LabeledOperator({{"a", 2}}, Matrix::Identity(3, 3)), Error);
  try {
    LabeledOperator({{"a", 2}, {"a", 2}}, Matrix::Identity(4, 4));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateLabel);
  }
  const LabeledOperator scalar;
  CHECK(scalar.is_scalar());
  CHECK(scalar.trace() == Complex(1.0));
}

TEST_CASE("tensor matches a hand Kronecker product") {
  Rng rng(1);
  const auto a = random_hermitian({{"a", 2}, {"b", 3}}, rng);
  const auto b = random_hermitian({{"c", 2}}, rng);
  const auto ab = tensor(a, b);
  CHECK(ab.labels() == std::vector<std::string>{"a", "b", "c"});
  CHECK((ab.matrix() - oracle::kron(a.matrix(), b.matrix())).norm() < 1e-12);
  CHECK_THROWS_AS(tensor(a, a), Error);
}

TEST_CASE("permute_wires agrees with the index-loop permutation") {
  Rng rng(2);
  const auto a = random_hermitian({{"a", 2}, {"b", 3}, {"c", 2}}, rng);
  const std::vector<std::string> order{"c", "a", "b"};
  const auto p = permute_wires(a, order);
  CHECK((p.matrix() - oracle::permute(testing::to_oracle(a), order).m).norm() < 1e-12);
  CHECK(distance(a, p) < 1e-12);
  CHECK_THROWS_AS(permute_wires(a, {"a", "b"}), Error);
  CHECK_THROWS_AS(permute_wires(a, {"a", "b", "z"}), Error);
}

TEST_CASE("partial trace agrees with explicit index sums") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_hermitian({{"a", 2}, {"b", 3}, {"c", 2}}, rng);
    for (const auto& traced : std::vector<std::vector<std::string>>{{"a"}, {"b"}, {"a", "c"}, {"a", "b", "c"}}) {
      const auto t = partial_trace(a, LabelSet(traced.begin(), traced.end()));
      CHECK(testing::gap(t, oracle::partial_trace(testing::to_oracle(a), traced)) < 1e-12);
    }
  }
  const auto a = random_hermitian({{"a", 2}}, rng);
  CHECK_THROWS_AS(partial_trace(a, {"q"}), Error);
}

TEST_CASE("partial transpose is an involution and transposes the chosen factor") {
  Rng rng(4);
  const auto a = random_hermitian({{"a", 2}}, rng);
  const auto b = random_hermitian({{"b", 3}}, rng);
  const auto ab = tensor(a, b);
  const auto t = partial_transpose(ab, {"b"});
  CHECK(distance(t, tensor(a, b.transpose())) < 1e-12);
  CHECK(distance(partial_transpose(t, {"b"}), ab) < 1e-12);
  CHECK(distance(partial_transpose(ab, {"a", "b"}), ab.transpose()) < 1e-12);
}

TEST_CASE("multiply pads missing wires with identities") {
  Rng rng(5);
  const auto a = random_hermitian({{"a", 2}, {"b", 2}}, rng);
  const auto b = random_hermitian({{"b", 2}, {"c", 3}}, rng);
  const auto ab = multiply(a, b);
  const auto pa = tensor(a, LabeledOperator::identity({{"c", 3}}));
  const auto pb = tensor(LabeledOperator::identity({{"a", 2}}), b);
  CHECK((ab.aligned_to(pa.wires()).matrix() - pa.matrix() * pb.matrix()).norm() < 1e-12);
  CHECK_THROWS_AS(multiply(a, LabeledOperator::identity({{"b", 3}})), Error);
}

TEST_CASE("trace_product and distance respect labels, not positions") {
  Rng rng(6);
  const auto a = random_hermitian({{"a", 2}, {"b", 3}}, rng);
  const auto b = random_hermitian({{"a", 2}, {"b", 3}}, rng);
  const auto bp = permute_wires(b, {"b", "a"});
  CHECK(std::abs(trace_product(a, bp) - (a.matrix() * b.matrix()).trace()) < 1e-12);
  CHECK(distance(b, bp) < 1e-14);
}

TEST_CASE("Hermitian eigensolver and PSD projection") {
  Rng rng(7);
  const auto a = random_hermitian({{"a", 3}, {"b", 2}}, rng);
  const auto e = eig_hermitian(a);
  for (Index k = 1; k < e.values.size(); ++k) CHECK(e.values(k) >= e.values(k - 1));
  CHECK((e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - a.matrix()).norm() < 1e-10);

  const auto p = psd_project(a);
  CHECK(min_eigenvalue(p) > -1e-12);
  // Frobenius-nearest: a - p is negative semidefinite and orthogonal to p.
  CHECK(eig_hermitian(a - p).values.maxCoeff() < 1e-10);
  CHECK(std::abs(trace_product(a - p, p)) < 1e-10);
  for (int k = 0; k < 20; ++k) {
    const auto q = random_psd(a.wires(), 3, rng);
    CHECK(distance(a, p) <= distance(a, q) + 1e-12);
  }

  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_hermitian(LabeledOperator({{"a", 2}}, skew)), Error);
}

TEST_CASE("maximally entangled projector examples") {
  Matrix v = Matrix::Zero(4, 1);
  v(0, 0) = v(3, 0) = 1.0;
  const LabeledOperator omega({{"a", 2}, {"b", 2}}, v * v.adjoint());
  CHECK(distance(partial_trace(omega, {"b"}), LabeledOperator::identity({{"a", 2}})) < 1e-14);

  Matrix swap = Matrix::Zero(4, 4);
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m) swap(n * 2 + m, m * 2 + n) = 1.0;
  CHECK((partial_transpose(omega, {"b"}).matrix() - swap).norm() < 1e-14);

  const auto e = eig_hermitian(omega);
  CHECK(e.values.head(3).norm() < 1e-12);
  CHECK(e.values(3) == doctest::Approx(2.0));

  Eigen::VectorXd diag(3);
  diag << 3, 1, 2;
  const auto sorted = eig_hermitian(LabeledOperator({{"a", 3}}, diag.cast<Complex>().asDiagonal())).values;
  CHECK(sorted(0) == doctest::Approx(1.0));
  CHECK(sorted(1) == doctest::Approx(2.0));
  CHECK(sorted(2) == doctest::Approx(3.0));
}

TEST_CASE("psd_project examples") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  const auto p = psd_project(LabeledOperator({{"a", 2}}, m));
  CHECK(std::abs(p.matrix()(0, 0) - 1.0) < 1e-14);
  CHECK(p.matrix().cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK(psd_project(LabeledOperator::identity({{"a", 3}}) * Complex(-1.0)).norm() < 1e-14);
  Rng rng(8);
  const auto q = random_psd({{"a", 3}}, 2, rng);
  CHECK(distance(psd_project(q), q) < 1e-12);
}

TEST_CASE("tensor, trace and transpose invariants on random operators") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_hermitian({{"a", 2}, {"b", 3}}, rng);
    const auto b = random_hermitian({{"c", 2}}, rng);
    const Complex lhs = tensor(a, b).trace(), rhs = a.trace() * b.trace();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));

    const auto ab = tensor(a, b);
    CHECK(distance(partial_trace(partial_trace(ab, {"a"}), {"c"}), partial_trace(ab, {"a", "c"})) < 1e-12);

    const auto t = partial_transpose(ab, {"b", "c"});
    CHECK(std::abs(t.trace() - ab.trace()) < 1e-12);
    CHECK(std::abs(t.norm() - ab.norm()) < 1e-12);

    const auto ev = eig_hermitian(ab).values;
    const auto evp = eig_hermitian(permute_wires(ab, {"c", "a", "b"})).values;
    CHECK((ev - evp).norm() < 1e-10);

    const auto p = psd_project(ab);
    CHECK(distance(psd_project(p), p) < 1e-10);
    const auto other = random_hermitian(ab.wires(), rng);
    CHECK(distance(psd_project(other), p) <= distance(other, ab) + 1e-10);
  }
}
