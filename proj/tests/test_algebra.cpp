#include "doctest.h"

#include <stdexcept>

#include "nld/algebra.hpp"

using namespace nld;

namespace {

const cx I(0.0, 1.0);

// Plain 2x2 / 4x4 product written out independently of MatrixC::operator*.
std::vector<cx> matmul(const std::vector<cx>& x, const std::vector<cx>& y, int n) {
  std::vector<cx> r(static_cast<size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r[static_cast<size_t>(i * n + j)] += x[static_cast<size_t>(i * n + k)] * y[static_cast<size_t>(k * n + j)];
  return r;
}

}  // namespace

TEST_CASE("pauli matrices") {
  CHECK(pauli(1) == MatrixC(2, 2, {0, 1, 1, 0}));
  CHECK(pauli(3) == MatrixC(2, 2, {1, 0, 0, -1}));
  CHECK(pauli(2) == MatrixC(2, 2, {0, -I, I, 0}));
  CHECK(pauli(2) * pauli(2) == MatrixC::identity(2));
  CHECK_THROWS_AS(pauli(0), std::out_of_range);
  CHECK_THROWS_AS(pauli(4), std::out_of_range);
}

TEST_CASE("alpha_beta families") {
  const auto ab1 = alpha_beta(1);
  REQUIRE(ab1.alpha.size() == 1);
  CHECK(ab1.alpha[0] == MatrixC(2, 2, {0, I, -I, 0}));
  CHECK(ab1.beta == MatrixC(2, 2, {1, 0, 0, -1}));

  const auto ab2 = alpha_beta(2);
  REQUIRE(ab2.alpha.size() == 2);
  CHECK((ab2.alpha[0] * ab2.beta + ab2.beta * ab2.alpha[0]).is_zero());

  const auto ab3 = alpha_beta(3);
  REQUIRE(ab3.alpha.size() == 3);
  CHECK((ab3.alpha[0] * ab3.alpha[1] + ab3.alpha[1] * ab3.alpha[0]).is_zero());
  CHECK(ab3.beta == MatrixC(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1}));
  // alpha^2 = [[0, sigma^2], [sigma^2, 0]]
  CHECK(ab3.alpha[1](0, 3) == -I);
  CHECK(ab3.alpha[1](3, 0) == I);

  CHECK_THROWS_AS(alpha_beta(0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_beta(4), std::invalid_argument);
}

TEST_CASE("anticommutation by independent multiplication") {
  for (int n = 1; n <= 3; ++n) {
    const auto ab = alpha_beta(n);
    const int N = ab.beta.rows;
    std::vector<std::vector<cx>> mats;
    for (const auto& a : ab.alpha) mats.push_back(a.a);
    for (size_t j = 0; j < mats.size(); ++j) {
      for (size_t k = 0; k < mats.size(); ++k) {
        const auto p = matmul(mats[j], mats[k], N);
        const auto q = matmul(mats[k], mats[j], N);
        for (int r = 0; r < N; ++r)
          for (int c = 0; c < N; ++c) {
            const cx expect = (j == k && r == c) ? cx(2.0) : cx(0.0);
            CHECK(p[static_cast<size_t>(r * N + c)] + q[static_cast<size_t>(r * N + c)] == expect);
          }
      }
      const auto p = matmul(mats[j], ab.beta.a, N);
      const auto q = matmul(ab.beta.a, mats[j], N);
      for (size_t e = 0; e < p.size(); ++e) CHECK(p[e] + q[e] == cx(0.0));
    }
  }
}

TEST_CASE("split_alpha") {
  const auto s = split_alpha(-1.0 * pauli(2));
  CHECK(s.alpha_r.is_zero());
  CHECK(s.alpha_i == MatrixC(2, 2, {0, 1, -1, 0}));
  const auto s1 = split_alpha(pauli(1));
  CHECK(s1.alpha_r == pauli(1));
  CHECK(s1.alpha_i.is_zero());
  for (int n = 1; n <= 3; ++n)
    for (const auto& a : alpha_beta(n).alpha) {
      const auto sp = split_alpha(a);
      CHECK(sp.alpha_r.transpose() == sp.alpha_r);
      CHECK(sp.alpha_i.transpose() == -1.0 * sp.alpha_i);
      CHECK(sp.alpha_r + I * sp.alpha_i == a);
    }
  CHECK_THROWS_AS(split_alpha(pauli(1) + pauli(2)), std::invalid_argument);
}

TEST_CASE("check_clifford is exact for every supported dimension") {
  for (int n = 1; n <= 3; ++n) {
    const auto rep = check_clifford(n);
    CHECK(rep.pass());
    CHECK(rep.max_defect() == 0.0);
    CHECK(rep.relations.size() >= 6);
  }
  CHECK_THROWS(check_clifford(5));
}

TEST_CASE("swapped split violates the square relation") {
  // alpha^1 = -sigma^2 is purely imaginary; declaring it real by mistake gives
  // (alpha_r)^2 - (alpha_i)^2 = -I instead of I.
  const auto good = split_alpha(alpha_beta(1).alpha[0]);
  const AlphaSplit wrong{good.alpha_i, good.alpha_r};
  const MatrixC sq = wrong.alpha_r * wrong.alpha_r - wrong.alpha_i * wrong.alpha_i;
  CHECK(sq == -1.0 * MatrixC::identity(2));
  const MatrixC sq_good = good.alpha_r * good.alpha_r - good.alpha_i * good.alpha_i;
  CHECK(sq_good == MatrixC::identity(2));
}
