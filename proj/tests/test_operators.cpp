#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "proxmm/operators.hpp"

using namespace proxmm;

TEST_CASE("identity and dense operators") {
  const LinearOperator id = LinearOperator::identity(3);
  Vector x(3);
  x << 1.0, -2.0, 5.0;
  CHECK((id.apply(x) - x).norm() == 0.0);
  CHECK((id.adjoint_apply(x) - x).norm() == 0.0);

  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  const LinearOperator op = LinearOperator::dense(a);
  CHECK(op.domain_dim() == 3);
  CHECK(op.codomain_dim() == 2);
  CHECK((op.apply(x) - a * x).norm() == 0.0);
  Vector y(2);
  y << 1.0, -1.0;
  CHECK((op.adjoint_apply(y) - a.transpose() * y).norm() == 0.0);
  CHECK_THROWS_AS((void)op.apply(y), std::invalid_argument);
}

TEST_CASE("periodic gradient annihilates constants") {
  for (Index side : {1, 2, 3, 5}) {
    const LinearOperator grad = LinearOperator::grad2d_periodic(side);
    CHECK(grad.apply(Vector::Constant(side * side, 3.7)).norm() == 0.0);
  }
}

TEST_CASE("periodic gradient matches its kronecker-product form") {
  // D1 = I kron D acts within image columns, D2 = D kron I across them, for
  // the dense periodic difference D; verified entrywise on small sides.
  for (Index side : {2, 3, 4}) {
    const Matrix d = oracles::forward_difference_dense(side);
    const Matrix id = Matrix::Identity(side, side);
    Matrix expected(2 * side * side, side * side);
    expected.topRows(side * side) = oracles::kron(id, d);
    expected.bottomRows(side * side) = oracles::kron(d, id);
    const Matrix got = oracles::materialize_operator(LinearOperator::grad2d_periodic(side));
    CHECK((got - expected).norm() <= 1e-14);
  }
}

TEST_CASE("vstack stacks ranges over a common domain") {
  Matrix a(1, 2);
  a << 2.0, -1.0;
  const LinearOperator op = LinearOperator::vstack(
      {LinearOperator::identity(2), LinearOperator::dense(a)});
  CHECK(op.domain_dim() == 2);
  CHECK(op.codomain_dim() == 3);
  Vector x(2);
  x << 3.0, 1.0;
  Vector ex = op.apply(x);
  CHECK(ex[0] == 3.0);
  CHECK(ex[1] == 1.0);
  CHECK(ex[2] == 5.0);
  CHECK_THROWS_AS(LinearOperator::vstack({LinearOperator::identity(2),
                                          LinearOperator::identity(3)}),
                  std::invalid_argument);
}

TEST_CASE("adjoints agree with the inner-product identity") {
  // <E x, y> == <x, E^T y> for random vectors across all variants.
  std::mt19937_64 g(101);
  std::vector<LinearOperator> ops;
  ops.push_back(LinearOperator::identity(7));
  ops.push_back(LinearOperator::dense(oracles::random_matrix(g, 5, 9)));
  ops.push_back(LinearOperator::grad2d_periodic(4));
  ops.push_back(LinearOperator::vstack(
      {LinearOperator::identity(16), LinearOperator::grad2d_periodic(4),
       LinearOperator::dense(oracles::random_matrix(g, 3, 16))}));
  for (const auto& op : ops) {
    for (int rep = 0; rep < 25; ++rep) {
      const Vector x = oracles::random_vector(g, op.domain_dim());
      const Vector y = oracles::random_vector(g, op.codomain_dim());
      const double lhs = op.apply(x).dot(y);
      const double rhs = x.dot(op.adjoint_apply(y));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("operator norm bound: identity") {
  CHECK(LinearOperator::identity(6).opnorm_sq_upper() == doctest::Approx(1.01));
}

TEST_CASE("operator norm bound: periodic gradient vs dense eigenvalues") {
  // ||E||^2 for the side-4 gradient equals the largest eigenvalue of the
  // dense E^T E; the bound must sit within the 1.01 inflation of it.
  const LinearOperator grad = LinearOperator::grad2d_periodic(4);
  const Matrix e = oracles::materialize_operator(grad);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(e.transpose() * e);
  const double exact = es.eigenvalues().maxCoeff();
  CHECK(exact == doctest::Approx(8.0));
  const double bound = grad.opnorm_sq_upper();
  CHECK(bound >= exact - 1e-9);
  CHECK(bound <= 1.01 * exact + 1e-9);
  CHECK(bound == doctest::Approx(8.08).epsilon(1e-3));
}

TEST_CASE("operator norm bound: diagonal dense example") {
  Matrix d(2, 2);
  d << 3.0, 0.0, 0.0, 1.0;
  CHECK(LinearOperator::dense(d).opnorm_sq_upper() == doctest::Approx(9.09).epsilon(1e-6));
}

TEST_CASE("operator norm bound: zero operator and determinism") {
  Matrix z = Matrix::Zero(3, 3);
  CHECK(LinearOperator::dense(z).opnorm_sq_upper() == 0.0);
  const LinearOperator grad = LinearOperator::grad2d_periodic(5);
  CHECK(grad.opnorm_sq_upper() == grad.opnorm_sq_upper());
  CHECK_THROWS_AS((void)grad.opnorm_sq_upper(0), std::invalid_argument);
}

TEST_CASE("operator norm bound dominates random rayleigh quotients") {
  std::mt19937_64 g(102);
  const LinearOperator op = LinearOperator::vstack(
      {LinearOperator::grad2d_periodic(3), LinearOperator::dense(oracles::random_matrix(g, 4, 9))});
  const double bound = op.opnorm_sq_upper();
  for (int rep = 0; rep < 50; ++rep) {
    Vector x = oracles::random_vector(g, op.domain_dim());
    x /= x.norm();
    CHECK(op.apply(x).squaredNorm() <= bound + 1e-10);
  }
}
