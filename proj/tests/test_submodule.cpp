#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/submodule.hpp"

#include <cstdlib>
#include <random>

using namespace gkm;

namespace {

// Independent brute-force slice: every generator times every symmetric
// monomial of the right degree, densified through the public table lookup.
Matrix brute_slice(const Submodule& m, int d) {
  SliceTable st = slice_table(m.space, d);
  std::vector<std::vector<Rat>> cols;
  for (const SpaceElement& g : m.gens) {
    if (g.degree > d || (d - g.degree) % 2 != 0) continue;
    int r = m.space.rank();
    for (const auto& q : sym_monomials(r, (d - g.degree) / 2)) {
      SpaceElement prod = g;
      for (STerm& t : prod.terms)
        for (int i = 0; i < r; ++i) t.m.exp[i] += q[i];
      prod.degree = d;
      prod.normalize();
      cols.push_back(element_dense(prod, st));
    }
  }
  Matrix out(st.dim, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < st.dim; ++i) out.at(i, j) = cols[j][i];
  return column_space_basis(out);
}

SpaceElement random_element(std::mt19937& rng, const BlockSpace& space, int d) {
  SliceTable st = slice_table(space, d);
  std::uniform_int_distribution<int> c(-2, 2);
  std::vector<Rat> coords(st.dim);
  for (auto& x : coords) x = Rat(c(rng));
  return element_from_dense(space, st, coords);
}

Submodule ideal(const AmbientSpec& spec, const std::vector<SpaceElement>& gens) {
  Submodule m;
  m.space = BlockSpace::single(spec);
  m.gens = gens;
  return m;
}

SpaceElement poly_var(const AmbientSpec& spec, int v) {
  SpaceElement e;
  e.degree = 2;
  Mono m;
  m.ext.assign(spec.g, 0);
  m.exp.assign(spec.rank, 0);
  m.exp[v] = 1;
  e.terms.push_back({0, 0, m, Rat(1)});
  return e;
}

} // namespace

TEST_CASE("brute-force slice oracle on random submodules") {
  std::mt19937 rng(2024);
  int done = 0;
  while (done < 100) {
    int g = done % 2; // r = 2, g <= 1
    AmbientSpec spec(2, g);
    BlockSpace space = BlockSpace::single(spec);
    Submodule m;
    m.space = space;
    std::uniform_int_distribution<int> ngen(1, 3), dg(0, 4);
    int n = ngen(rng);
    for (int i = 0; i < n; ++i) {
      SpaceElement e = random_element(rng, space, dg(rng));
      if (!e.is_zero()) m.gens.push_back(e);
    }
    if (m.gens.empty()) continue;
    for (int d = 0; d <= 8; d += 2 + done % 3)
      CHECK(degree_slice(m, d) == brute_slice(m, d));
    ++done;
  }
}

TEST_CASE("hilbert numerator of a shifted free module") {
  AmbientSpec spec(2, 0);
  SpaceElement one;
  one.degree = 0;
  Mono mm;
  mm.exp.assign(2, 0);
  one.terms.push_back({0, 0, mm, Rat(1)});
  // A + A[2] realized as one module with stalk shifts {0,2}
  BlockSpace space;
  space.parts.push_back({"v", FreeModuleSpec{spec, {0, 2}}});
  Submodule m;
  m.space = space;
  SpaceElement g2 = one;
  g2.degree = 2;
  g2.terms[0].gen = 1;
  m.gens = {one, g2};
  HilbertData h = hilbert_numerator(m, 10);
  CHECK(h.coeffs[0] == 1);
  CHECK(h.coeffs[2] == 1);
  CHECK(h.stable);
  for (std::size_t i = 3; i < h.coeffs.size(); ++i) CHECK(h.coeffs[i] == 0);
  FreenessCertificate c = certify_free(m, 10);
  CHECK(c.verdict == FreenessCertificate::Verdict::Free);
  CHECK(c.generator_degrees == std::vector<int>{0, 2});
}

TEST_CASE("maximal ideal is not free, principal ideal is") {
  AmbientSpec spec(2, 0);
  Submodule mxy = ideal(spec, {poly_var(spec, 0), poly_var(spec, 1)});
  FreenessCertificate c = certify_free(mxy, 12);
  CHECK(c.verdict == FreenessCertificate::Verdict::NotFree);
  HilbertData h = hilbert_numerator(mxy, 12);
  CHECK(h.coeffs[2] == 2);
  CHECK(h.coeffs[4] == -1); // the Koszul syzygy
  Submodule mx = ideal(spec, {poly_var(spec, 0)});
  CHECK(certify_free(mx, 12).verdict == FreenessCertificate::Verdict::Free);
}

TEST_CASE("intersection of principal ideals") {
  AmbientSpec spec(2, 0);
  Submodule mx = ideal(spec, {poly_var(spec, 0)});
  Submodule my = ideal(spec, {poly_var(spec, 1)});
  Submodule meet = intersect({&mx, &my}, 12);
  auto gens = minimal_generators(meet, 12);
  REQUIRE(gens.size() == 1);
  CHECK(gens[0].first == 4); // (x) meet (y) = (xy)
  HilbertData h = hilbert_numerator(meet, 12);
  CHECK(h.coeffs[4] == 1);
  CHECK(h.stable);
}

TEST_CASE("minimal generators reproduce the module") {
  std::mt19937 rng(555);
  AmbientSpec spec(2, 1);
  BlockSpace space = BlockSpace::single(spec);
  for (int it = 0; it < 10; ++it) {
    Submodule m;
    m.space = space;
    for (int i = 0; i < 3; ++i) {
      SpaceElement e = random_element(rng, space, 1 + (it + i) % 3);
      if (!e.is_zero()) m.gens.push_back(e);
    }
    if (m.gens.empty()) continue;
    Submodule red;
    red.space = space;
    for (auto& [d, e] : minimal_generators(m, 8)) red.gens.push_back(e);
    for (int d = 0; d <= 8; ++d) CHECK(degree_slice(m, d) == degree_slice(red, d));
  }
}

TEST_CASE("proj_top and exact division") {
  AmbientSpec spec(2, 1);
  // element x (exterior) (x) f: top component f
  GradedElement f;
  f.spec = AmbientSpec(2, 0);
  f.degree = 4;
  Mono mm;
  mm.exp = {1, 1};
  f.add_term(mm, Rat(3));
  GradedElement d;
  d.spec = AmbientSpec(2, 0);
  d.degree = 2;
  Mono dm;
  dm.exp = {1, 0};
  d.add_term(dm, Rat(1));
  GradedElement q;
  REQUIRE(divide_exact(f, d, &q)); // 3xy / x = 3y
  CHECK(q.degree == 2);
  GradedElement nd;
  nd.spec = AmbientSpec(2, 0);
  nd.degree = 2;
  Mono nm;
  nm.exp = {0, 1};
  nd.add_term(nm, Rat(1));
  nd.add_term(dm, Rat(1));
  GradedElement bad;
  bad.spec = AmbientSpec(2, 0);
  bad.degree = 2;
  bad.add_term(dm, Rat(1));
  CHECK_FALSE(divide_exact(bad, nd, &q)); // x not divisible by x + y
}

TEST_CASE("slices are identical across worker counts") {
  std::mt19937 rng(777);
  AmbientSpec spec(2, 1);
  BlockSpace space = BlockSpace::single(spec);
  Submodule m;
  m.space = space;
  for (int i = 0; i < 3; ++i) m.gens.push_back(random_element(rng, space, 1 + i));
  setenv("GKM_WORKERS", "1", 1);
  std::vector<Matrix> ser;
  for (int d = 0; d <= 8; ++d) ser.push_back(degree_slice(m, d));
  HilbertData h1 = hilbert_numerator(m, 8);
  setenv("GKM_WORKERS", "3", 1);
  for (int d = 0; d <= 8; ++d) CHECK(degree_slice(m, d) == ser[d]);
  HilbertData h3 = hilbert_numerator(m, 8);
  CHECK(h1.coeffs == h3.coeffs);
  unsetenv("GKM_WORKERS");
}
