#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/matrix.hpp"

#include <random>

using namespace gkm;

namespace {

Matrix from_rows(const std::vector<std::vector<int>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = Rat(rows[i][j]);
  return m;
}

Matrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c) {
  std::uniform_int_distribution<int> d(-3, 3);
  Matrix m(r, c);
  for (auto& x : m.a) x = Rat(d(rng));
  return m;
}

} // namespace

TEST_CASE("rational string round trip") {
  CHECK(rat_to_string(Rat(-7, 2)) == "-7/2");
  CHECK(rat_to_string(Rat(5)) == "5");
  CHECK(rat_from_string("3/9") == Rat(1, 3));
  CHECK(rat_from_string("-4") == Rat(-4));
}

TEST_CASE("rref of a known system") {
  Matrix m = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  RrefResult r = rref(m);
  CHECK(r.rank == 2);
  CHECK(r.pivots == std::vector<std::size_t>{0, 1});
  // leading entries are 1 and pivot columns are cleared
  CHECK(r.m.at(0, 0) == Rat(1));
  CHECK(r.m.at(1, 1) == Rat(1));
  CHECK(r.m.at(0, 1) == Rat(0));
}

TEST_CASE("kernel of a single row") {
  Matrix m = from_rows({{1, 1, 0}});
  Matrix k = kernel_basis(m);
  REQUIRE(k.cols == 2);
  for (std::size_t j = 0; j < k.cols; ++j) {
    Rat s = m.at(0, 0) * k.at(0, j) + m.at(0, 1) * k.at(1, j) +
            m.at(0, 2) * k.at(2, j);
    CHECK(s == Rat(0));
  }
}

TEST_CASE("column space basis is canonical under respanning") {
  std::mt19937 rng(7);
  for (int it = 0; it < 50; ++it) {
    Matrix m = random_matrix(rng, 4, 3);
    // append random combinations of the existing columns
    Matrix wide(4, 6);
    std::uniform_int_distribution<int> d(-2, 2);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 3; ++j) wide.at(i, j) = m.at(i, j);
    for (std::size_t j = 3; j < 6; ++j) {
      int c0 = d(rng), c1 = d(rng), c2 = d(rng);
      for (std::size_t i = 0; i < 4; ++i)
        wide.at(i, j) =
            Rat(c0) * m.at(i, 0) + Rat(c1) * m.at(i, 1) + Rat(c2) * m.at(i, 2);
    }
    CHECK(column_space_basis(m) == column_space_basis(wide));
  }
}

TEST_CASE("intersection of column spaces") {
  // span{e1, e2} meet span{e2, e3} = span{e2}
  Matrix a = from_rows({{1, 0}, {0, 1}, {0, 0}});
  Matrix b = from_rows({{0, 0}, {1, 0}, {0, 1}});
  Matrix i = intersect_column_spaces(a, b);
  REQUIRE(i.cols == 1);
  CHECK(i.at(0, 0) == Rat(0));
  CHECK(i.at(1, 0) != Rat(0));
  CHECK(i.at(2, 0) == Rat(0));
}

TEST_CASE("solve membership and failure") {
  Matrix a = from_rows({{1, 0}, {0, 1}, {1, 1}});
  Matrix inside = from_rows({{2}, {3}, {5}});
  Matrix x;
  REQUIRE(solve(a, inside, &x));
  CHECK(x.at(0, 0) == Rat(2));
  CHECK(x.at(1, 0) == Rat(3));
  Matrix outside = from_rows({{1}, {0}, {0}});
  CHECK_FALSE(solve(a, outside, &x));
}

TEST_CASE("random properties: kernel, idempotence, rank symmetry") {
  std::mt19937 rng(12345);
  for (int it = 0; it < 100; ++it) {
    Matrix m = random_matrix(rng, 3 + it % 3, 4 + it % 2);
    RrefResult r = rref(m);
    // rref is idempotent
    CHECK(rref(r.m).m == r.m);
    // kernel columns are annihilated and count matches rank-nullity
    Matrix k = kernel_basis(m);
    CHECK(k.cols == m.cols - r.rank);
    if (k.cols) CHECK(m.mul(k).is_zero());
    // row rank equals column rank
    CHECK(rank(m) == rank(m.transpose()));
    // column space meets itself in itself
    Matrix cs = column_space_basis(m);
    CHECK(column_space_basis(intersect_column_spaces(m, m)) == cs);
  }
}
