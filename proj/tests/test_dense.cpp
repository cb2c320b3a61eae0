#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cqed/dense.hpp"

using namespace cqed;

namespace {

ComplexMatrix random_matrix(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = cplx(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("parallel matmul kernel is bitwise identical to the serial reference") {
  for (int n : {3, 17, 64}) {
    const auto a = random_matrix(n, 10 + n);
    const auto b = random_matrix(n, 20 + n);
    ComplexMatrix cs(n), cp(n);
    matmul_serial(a, b, cs);
    matmul_parallel(a, b, cp);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(cs.at(i, j).real() == cp.at(i, j).real());
        CHECK(cs.at(i, j).imag() == cp.at(i, j).imag());
      }
  }
}

TEST_CASE("matmul against hand values") {
  ComplexMatrix a(2), b(2);
  a.at(0, 0) = {1, 1};
  a.at(0, 1) = {0, 2};
  a.at(1, 0) = {3, 0};
  a.at(1, 1) = {0, -1};
  b.at(0, 0) = {2, 0};
  b.at(0, 1) = {0, 1};
  b.at(1, 0) = {1, 0};
  b.at(1, 1) = {1, 1};
  const auto c = a * b;
  CHECK(c.at(0, 0) == cplx(2, 4));
  CHECK(c.at(0, 1) == cplx(-3, 3));
  CHECK(c.at(1, 0) == cplx(6, -1));
  CHECK(c.at(1, 1) == cplx(1, 2));
}

TEST_CASE("adjoint, trace and trace_of_product identities") {
  const auto a = random_matrix(12, 1);
  const auto b = random_matrix(12, 2);
  const auto ab = a * b;
  const cplx t1 = ab.trace();
  const cplx t2 = trace_of_product(a, b);
  CHECK(std::abs(t1 - t2) < 1e-12 * std::abs(t1));

  const auto adj = a.adjoint();
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) CHECK(adj.at(i, j) == std::conj(a.at(j, i)));
}

TEST_CASE("kron mixed-product identity") {
  const auto a = random_matrix(3, 3);
  const auto b = random_matrix(4, 4);
  const auto c = random_matrix(3, 5);
  const auto d = random_matrix(4, 6);
  const auto lhs = kron(a, b) * kron(c, d);
  const auto rhs = kron(a * c, b * d);
  double diff = 0;
  for (int i = 0; i < lhs.dim(); ++i)
    for (int j = 0; j < lhs.dim(); ++j)
      diff = std::max(diff, std::abs(lhs.at(i, j) - rhs.at(i, j)));
  CHECK(diff < 1e-12 * rhs.norm_inf());
}

TEST_CASE("hermitian eigenvalues: fixed and random checks") {
  ComplexMatrix m(2);
  m.at(0, 0) = 1.0;
  m.at(1, 1) = 3.0;
  m.at(0, 1) = cplx(0.0, -2.0);
  m.at(1, 0) = cplx(0.0, 2.0);
  const auto ev = hermitian_eigenvalues(m);
  // eigenvalues of [[1, -2i], [2i, 3]] are 2 +- sqrt(5)
  CHECK(ev[0] == doctest::Approx(2.0 - std::sqrt(5.0)).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0 + std::sqrt(5.0)).epsilon(1e-12));

  // positive semidefinite G G^dag has nonnegative spectrum summing to its trace
  const auto g = random_matrix(10, 77);
  auto gram = g * g.adjoint();
  const auto spec = hermitian_eigenvalues(gram);
  double sum = 0;
  for (double v : spec) {
    CHECK(v >= -1e-10 * gram.norm_inf());
    sum += v;
  }
  CHECK(sum == doctest::Approx(gram.trace().real()).epsilon(1e-10));
}

TEST_CASE("kernel switch is restored") {
  const bool before = parallel_kernels_enabled();
  set_parallel_kernels(false);
  CHECK_FALSE(parallel_kernels_enabled());
  set_parallel_kernels(before);
}
