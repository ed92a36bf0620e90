#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/ambient.hpp"

#include <random>

using namespace gkm;

namespace {

GradedElement random_element(std::mt19937& rng, const AmbientSpec& spec, int d) {
  auto tab = monomial_table(spec, d);
  std::uniform_int_distribution<int> c(-3, 3);
  GradedElement e;
  e.spec = spec;
  e.degree = d;
  for (const Mono& m : tab->monos) e.add_term(m, Rat(c(rng)));
  return e;
}

Matrix random_invertible(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> c(-2, 2);
  while (true) {
    Matrix m(n, n);
    for (auto& x : m.a) x = Rat(c(rng));
    if (rank(m) == (std::size_t)n) return m;
  }
}

} // namespace

TEST_CASE("piece dimensions match the closed count") {
  // dim_d(Lambda(t*)^{(x)g} (x) S(t*)) = sum over exterior degree k of
  // (#k-subsets spread over g slots) * (#symmetric monomials of degree (d-k)/2)
  for (int r = 1; r <= 3; ++r)
    for (int g = 0; g <= 2; ++g)
      for (int d = 0; d <= 6; ++d) {
        long long want = 0;
        // enumerate exterior degree by brute force over all mask tuples
        std::vector<std::uint32_t> masks(std::max(g, 1), 0);
        long long tuples = 1;
        for (int i = 0; i < g; ++i) tuples *= 1u << r;
        for (long long t = 0; t < tuples; ++t) {
          long long x = t;
          int k = 0;
          for (int i = 0; i < g; ++i) {
            k += std::popcount((std::uint32_t)(x % (1u << r)));
            x /= 1u << r;
          }
          if (k <= d && (d - k) % 2 == 0) want += sym_monomial_count(r, (d - k) / 2);
        }
        AmbientSpec spec(r, g);
        CHECK(piece_dimension(spec, d) == want);
        CHECK((long long)monomial_table(spec, d)->dim() == want);
      }
}

TEST_CASE("monomial table order is stable and indexable") {
  AmbientSpec spec(2, 1);
  auto t1 = monomial_table(spec, 4);
  auto t2 = monomial_table(spec, 4);
  CHECK(t1->monos == t2->monos);
  for (std::size_t i = 0; i < t1->dim(); ++i) CHECK(t1->find(t1->monos[i]) == i);
  for (std::size_t i = 0; i + 1 < t1->dim(); ++i)
    CHECK(mono_less(t1->monos[i], t1->monos[i + 1]));
}

TEST_CASE("exterior sign rules") {
  AmbientSpec spec(2, 2);
  GradedElement x0 = GradedElement::variable(spec, 0, 0);
  GradedElement y0 = GradedElement::variable(spec, 1, 0);
  GradedElement x1 = GradedElement::variable(spec, 0, 1);
  CHECK(multiply(x0, x0).is_zero());
  // degree-1 elements anticommute, in the same slot and across slots
  CHECK(add(multiply(x0, y0), multiply(y0, x0)).is_zero());
  CHECK(add(multiply(x0, x1), multiply(x1, x0)).is_zero());
  // polynomial variables are central
  GradedElement p = GradedElement::variable(spec, 0, -1);
  CHECK(add(multiply(p, x0), multiply(x0, p).scaled(Rat(-1))).is_zero());
}

TEST_CASE("multiplication is associative and degree-additive") {
  std::mt19937 rng(99);
  AmbientSpec spec(2, 1);
  for (int it = 0; it < 20; ++it) {
    GradedElement a = random_element(rng, spec, 1 + it % 2);
    GradedElement b = random_element(rng, spec, 2);
    GradedElement c = random_element(rng, spec, 1);
    GradedElement l = multiply(multiply(a, b), c);
    GradedElement r = multiply(a, multiply(b, c));
    CHECK(add(l, r.scaled(Rat(-1))).is_zero());
    if (!l.is_zero()) CHECK(l.degree == a.degree + b.degree + c.degree);
  }
}

TEST_CASE("substitution is functorial") {
  std::mt19937 rng(4242);
  AmbientSpec spec(2, 1);
  for (int it = 0; it < 20; ++it) {
    Matrix a = random_invertible(rng, 2);
    Matrix b = random_invertible(rng, 2);
    GradedElement e = random_element(rng, spec, 3);
    GradedElement lhs = substitute(substitute(e, {b, false}), {a, false});
    GradedElement rhs = substitute(e, {a.mul(b), false});
    CHECK(add(lhs, rhs.scaled(Rat(-1))).is_zero());
  }
}

TEST_CASE("substitution matrix agrees with substitute") {
  std::mt19937 rng(31);
  AmbientSpec spec(2, 1);
  for (int d = 0; d <= 5; ++d) {
    Matrix s = random_invertible(rng, 2);
    Matrix sm = substitution_matrix(spec, d, {s, false});
    GradedElement e = random_element(rng, spec, d);
    std::vector<Rat> v = e.dense();
    std::vector<Rat> want = substitute(e, {s, false}).dense();
    REQUIRE(sm.cols == v.size());
    for (std::size_t i = 0; i < sm.rows; ++i) {
      Rat acc(0);
      for (std::size_t j = 0; j < sm.cols; ++j) acc += sm.at(i, j) * v[j];
      Rat w = want[i];
      CHECK(acc == w);
    }
  }
}

TEST_CASE("dense round trip") {
  std::mt19937 rng(8);
  AmbientSpec spec(3, 1);
  GradedElement e = random_element(rng, spec, 4);
  GradedElement back = GradedElement::from_dense(spec, 4, e.dense());
  CHECK(add(e, back.scaled(Rat(-1))).is_zero());
}

TEST_CASE("substitution preserves products") {
  std::mt19937 rng(77);
  AmbientSpec spec(2, 1);
  Matrix s = random_invertible(rng, 2);
  GradedElement a = random_element(rng, spec, 2);
  GradedElement b = random_element(rng, spec, 1);
  GradedElement lhs = substitute(multiply(a, b), {s, false});
  GradedElement rhs = multiply(substitute(a, {s, false}), substitute(b, {s, false}));
  CHECK(add(lhs, rhs.scaled(Rat(-1))).is_zero());
}
