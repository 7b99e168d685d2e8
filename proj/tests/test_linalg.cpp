#include <doctest.h>

#include "hdgmg/linalg.hpp"
#include "support.hpp"

using namespace hdg;

namespace {

std::vector<Triplet> random_triplets(Index rows, Index cols, int count, std::mt19937& rng) {
  std::uniform_int_distribution<Index> ri(0, rows - 1), ci(0, cols - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (int i = 0; i < count; ++i) t.push_back({ri(rng), ci(rng), u(rng)});
  return t;
}

Eigen::MatrixXd dense_from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (const Triplet& e : t) m(e.row, e.col) += e.value;
  return m;
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and matches a dense oracle") {
  std::mt19937 rng(5u);
  const std::vector<Triplet> t = random_triplets(17, 23, 400, rng);
  const CsrMatrix a = assemble_from_triplets(17, 23, t);
  const Eigen::MatrixXd ref = dense_from_triplets(17, 23, t);
  CHECK((test::to_eigen_dense(a) - ref).norm() < 1e-13);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = a.row_ptr()[i] + 1; p < a.row_ptr()[i + 1]; ++p) CHECK(a.col_idx()[p - 1] < a.col_idx()[p]);
  }
  CHECK(a.at(3, 4) == doctest::Approx(ref(3, 4)));

  std::vector<double> x(23), y(17), z(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x) v = u(rng);
  a.multiply(x, y);
  CHECK((test::to_eigen(y) - ref * test::to_eigen(x)).norm() < 1e-13);
  a.multiply_transpose(y, z);
  CHECK((test::to_eigen(z) - ref.transpose() * test::to_eigen(y)).norm() < 1e-12);
  CHECK((test::to_eigen_dense(a.transpose()) - ref.transpose()).norm() < 1e-13);
  CHECK(a.max_abs() == doctest::Approx(ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("assembly is bit-reproducible and validates indices") {
  std::mt19937 rng(9u);
  const std::vector<Triplet> t = random_triplets(30, 30, 500, rng);
  const CsrMatrix a = assemble_from_triplets(30, 30, t);
  const CsrMatrix b = assemble_from_triplets(30, 30, t);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_THROWS_AS(assemble_from_triplets(3, 3, {{3, 0, 1.0}}), std::out_of_range);
  CHECK_THROWS_AS(assemble_from_triplets(3, 3, {{0, -1, 1.0}}), std::out_of_range);
}

TEST_CASE("symmetry probe, diagonal and sums") {
  const CsrMatrix s = assemble_from_triplets(3, 3, {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}, {2, 2, 4}});
  CHECK(s.is_symmetric());
  const CsrMatrix n = assemble_from_triplets(3, 3, {{0, 1, 1}, {1, 0, 1.1}});
  CHECK_FALSE(n.is_symmetric());
  CHECK(s.diagonal() == std::vector<double>{2, 3, 4});
  const CsrMatrix c = add(s, n, -2.0);
  CHECK(c.at(0, 1) == doctest::Approx(-1.0));
  CHECK(c.at(1, 0) == doctest::Approx(-1.2));
  CHECK(c.at(2, 2) == doctest::Approx(4.0));
}

TEST_CASE("dense Cholesky solves SPD systems and rejects indefinite ones") {
  std::mt19937 rng(1u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 12;
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = u(rng);
  }
  const Eigen::MatrixXd spd = b * b.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<double> a(spd.data(), spd.data() + n * n);
  const DenseCholesky chol(n, a);
  Eigen::VectorXd rhs = Eigen::VectorXd::Random(n);
  std::vector<double> x = test::from_eigen(rhs);
  chol.solve(x);
  CHECK((spd * test::to_eigen(x) - rhs).norm() < 1e-12 * rhs.norm() * spd.norm());
  std::vector<double> indefinite{1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_AS(DenseCholesky(2, indefinite), std::runtime_error);
}

TEST_CASE("vector helpers") {
  std::vector<double> x{1, 2, 3}, y{4, 5, 6};
  CHECK(dot(x, y) == doctest::Approx(32.0));
  CHECK(norm2(x) == doctest::Approx(std::sqrt(14.0)));
  axpy(2.0, x, y);
  CHECK(y == std::vector<double>{6, 9, 12});
  const CsrMatrix a = assemble_from_triplets(2, 2, {{0, 0, 1}, {1, 0, 2}, {1, 1, 3}});
  CHECK(to_dense(a) == std::vector<double>{1, 0, 2, 3});
  std::vector<double> out(2);
  as_operator(a)(std::vector<double>{1, 1}, out);
  CHECK(out == std::vector<double>{1, 5});
}
