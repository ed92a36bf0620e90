#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/pipeline.hpp"
#include "gkm/sheaf.hpp"

using namespace gkm;

namespace {

Matrix identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Rat(1);
  return m;
}

// Toric S^2: two fixed points, one edge of weight alpha, trivial monodromy.
SheafModel toric_s2(int rank, const std::vector<long long>& alpha) {
  MonodromySpec ms;
  ms.amb = AmbientSpec(rank, 0);
  ms.fiber_degrees = {0};
  ms.vertices = {"n", "s"};
  MonodromyEdge e;
  e.source = "n";
  e.target = "s";
  e.alpha = Weight(alpha);
  e.rho = identity(1);
  ms.edges = {e};
  return from_monodromy(ms);
}

// Franz-Puppe fixture: rank r+1 torus, two vertices joined along every basis
// weight, rank-2 fiber with shifts {0, r-1}, identity monodromy.
SheafModel franz_puppe(int r) {
  MonodromySpec ms;
  ms.amb = AmbientSpec(r + 1, 0);
  ms.fiber_degrees = {0, r - 1};
  ms.vertices = {"p", "q"};
  for (int i = 0; i <= r; ++i) {
    MonodromyEdge e;
    e.source = "p";
    e.target = "q";
    std::vector<long long> a(r + 1, 0);
    a[i] = 1;
    e.alpha = Weight(a);
    e.rho = identity(2);
    ms.edges.push_back(e);
  }
  return from_monodromy(ms);
}

std::vector<long long> trimmed(const HilbertData& h) {
  std::vector<long long> v = h.coeffs;
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

} // namespace

TEST_CASE("toric S^2 sections") {
  SheafModel s = toric_s2(1, {1});
  CHECK_FALSE(validate_model(s));
  Submodule h0 = global_sections(s, 8);
  CHECK(h0.provenance == "crt-monodromy");
  HilbertData h = hilbert_numerator(h0, 8);
  CHECK(h.stable);
  CHECK(trimmed(h) == std::vector<long long>{1, 0, 1});
}

TEST_CASE("closed-form and intersection sections agree") {
  SheafModel s = franz_puppe(2);
  CHECK_FALSE(validate_model(s));
  Submodule fast = global_sections(s, 12);
  CHECK(fast.provenance == "crt-monodromy");
  SheafModel generic = s;
  for (auto& [w, eis] : generic.images)
    for (EdgeImage& ei : eis) ei.monodromy_rho.reset();
  Submodule slow = global_sections(generic, 12);
  CHECK(slow.provenance != "crt-monodromy");
  HilbertData hf = hilbert_numerator(fast, 12);
  HilbertData hs = hilbert_numerator(slow, 12);
  CHECK(hf.coeffs == hs.coeffs);
  // 1 + t^{r-1} + t^{2r+2} + t^{3r+1} at r = 2
  CHECK(trimmed(hf) == std::vector<long long>{1, 1, 0, 0, 0, 0, 1, 1});
  FreenessCertificate c = certify_free(fast, 12);
  CHECK(c.verdict == FreenessCertificate::Verdict::Free);
  CHECK(c.generator_degrees == std::vector<int>{0, 1, 6, 7});
}

TEST_CASE("model validation flags a non-torsion cokernel") {
  SheafModel s = toric_s2(1, {1});
  SheafModel bad = s;
  // drop the (alpha, -alpha) generator: cokernel has a free summand
  bad.images.begin()->second[0].image.gens.resize(1);
  CHECK(validate_model(bad).has_value());
}

TEST_CASE("monodromy input validation") {
  MonodromySpec ms;
  ms.amb = AmbientSpec(1, 0);
  ms.fiber_degrees = {0};
  ms.vertices = {"n", "s"};
  MonodromyEdge e;
  e.source = "n";
  e.target = "s";
  e.alpha = Weight({1});
  e.rho = Matrix(1, 1); // singular
  ms.edges = {e};
  CHECK_THROWS_AS(from_monodromy(ms), std::invalid_argument);
}

TEST_CASE("Braden-MacPherson single edge") {
  BMSheafSpec spec;
  AmbientSpec amb(1, 0);
  spec.stalks.emplace("v", FreeModuleSpec{amb, {0}});
  spec.stalks.emplace("w", FreeModuleSpec{amb, {0}});
  BMEdge e;
  e.source = "v";
  e.target = "w";
  e.alpha = Weight({1});
  GradedElement one;
  one.spec = amb;
  one.degree = 0;
  Mono mm;
  mm.exp = {0};
  one.add_term(mm, Rat(1));
  e.rho_t = {{one}};
  spec.edges = {e};
  SheafModel s = from_bm(spec);
  CHECK_FALSE(validate_model(s));
  HilbertData h = hilbert_numerator(global_sections(s, 8), 8);
  CHECK(trimmed(h) == std::vector<long long>{1, 0, 1});
}

TEST_CASE("exterior product multiplies section series") {
  SheafModel s1 = toric_s2(2, {1, 0});
  SheafModel s2 = toric_s2(2, {0, 1});
  SheafModel p = exterior_product(s1, s2);
  CHECK_FALSE(validate_model(p));
  HilbertData h = hilbert_numerator(global_sections(p, 10), 10);
  CHECK(trimmed(h) == std::vector<long long>{1, 0, 2, 0, 1});
}

TEST_CASE("isotypical pushforward along the vertex swap") {
  SheafModel s = toric_s2(1, {1});
  StalkAction a;
  a.base.element_names = {"e", "s"};
  a.base.mult = {{0, 1}, {1, 0}};
  a.base.vertex_perm = {{{"n", "n"}, {"s", "s"}}, {{"n", "s"}, {"s", "n"}}};
  a.gen_maps = {{{"n", identity(1)}, {"s", identity(1)}},
                {{"n", identity(1)}, {"s", identity(1)}}};
  CHECK_FALSE(validate_stalk_action(s, a));
  SheafModel inv = isotypical_pushforward(s, a, {1, 1});
  CHECK(trimmed(hilbert_numerator(global_sections(inv, 8), 8)) ==
        std::vector<long long>{1});
  SheafModel sgn = isotypical_pushforward(s, a, {1, -1});
  CHECK(trimmed(hilbert_numerator(global_sections(sgn, 8), 8)) ==
        std::vector<long long>{0, 0, 1});
}

TEST_CASE("convolution of rank-one representation sheaves") {
  RootDatum d = build_datum("SO3");
  SheafModel s = representation_sheaf(d, 1);
  CHECK_FALSE(validate_model(s));
  StalkAction a;
  a.base.element_names = {"0", "1"};
  a.base.mult = {{0, 1}, {1, 0}};
  a.base.vertex_perm = {{{"v0", "v0"}, {"v1", "v1"}},
                        {{"v0", "v1"}, {"v1", "v0"}}};
  a.gen_maps = {{{"v0", identity(1)}, {"v1", identity(1)}},
                {{"v0", identity(1)}, {"v1", identity(1)}}};
  CHECK_FALSE(validate_stalk_action(s, a));
  SheafModel conv = convolution(s, s, a, a);
  HilbertData h = hilbert_numerator(global_sections(conv, 12), 12);
  CHECK(trimmed(h) == closed_form_rank_one("SO3", "regular", 2));
}
