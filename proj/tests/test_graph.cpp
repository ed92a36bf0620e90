#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/graph.hpp"

#include <algorithm>

using namespace gkm;

namespace {

GkmHypergraph two_vertex(int rank, const std::vector<long long>& alpha) {
  GkmHypergraph h;
  h.rank = rank;
  h.vertices = {"a", "b"};
  h.partitions.emplace(Weight(alpha), Partition{{"a", "b"}});
  h.sort_canonical();
  return h;
}

FiniteAction swap_action() {
  FiniteAction a;
  a.element_names = {"e", "s"};
  a.mult = {{0, 1}, {1, 0}};
  a.vertex_perm = {{{"a", "a"}, {"b", "b"}}, {{"a", "b"}, {"b", "a"}}};
  return a;
}

} // namespace

TEST_CASE("weights canonicalize to primitive with positive lead") {
  CHECK(Weight({2, -4}).v == std::vector<long long>{1, -2});
  CHECK(Weight({-3, 6}).v == std::vector<long long>{1, -2});
  CHECK(Weight({0, -5}).v == std::vector<long long>{0, 1});
  CHECK_THROWS(Weight({0, 0}));
}

TEST_CASE("validation catches structural defects") {
  GkmHypergraph h = two_vertex(1, {1});
  CHECK_FALSE(validate(h));
  // overlapping blocks in one partition
  GkmHypergraph bad = h;
  bad.partitions[Weight({1})] = {{"a", "b"}, {"b"}};
  CHECK(validate(bad));
  // block mentioning an unknown vertex
  GkmHypergraph bad2 = h;
  bad2.partitions[Weight({1})] = {{"a", "z"}};
  CHECK(validate(bad2));
}

TEST_CASE("product graph carries both partition families") {
  GkmHypergraph h1 = two_vertex(2, {1, 0});
  GkmHypergraph h2 = two_vertex(2, {0, 1});
  GkmHypergraph p = product(h1, h2);
  CHECK_FALSE(validate(p));
  CHECK(p.vertices.size() == 4);
  REQUIRE(p.partitions.count(Weight({1, 0})));
  REQUIRE(p.partitions.count(Weight({0, 1})));
  // the (1,0)-partition pairs vertices with the same second coordinate
  for (const Block& b : p.partitions[Weight({1, 0})]) CHECK(b.size() == 2);
}

TEST_CASE("quotient by the swap collapses the edge") {
  GkmHypergraph h = two_vertex(1, {1});
  FiniteAction a = swap_action();
  CHECK_FALSE(a.validate_table());
  CHECK_FALSE(validate_action(h, a));
  auto [q, phi] = quotient(h, a);
  CHECK(q.vertices.size() == 1);
  CHECK_FALSE(validate(q));
  CHECK(phi.vertex_map.at("a") == phi.vertex_map.at("b"));
  CHECK_FALSE(validate_morphism(h, q, phi));
}

TEST_CASE("identity morphism validates, broken one does not") {
  GkmHypergraph h = two_vertex(1, {1});
  GraphMorphism id;
  id.vertex_map = {{"a", "a"}, {"b", "b"}};
  CHECK_FALSE(validate_morphism(h, h, id));
  GraphMorphism bad;
  bad.vertex_map = {{"a", "a"}}; // missing vertex
  CHECK(validate_morphism(h, h, bad));
}

TEST_CASE("induction along the identity is the identity graph") {
  GkmHypergraph h = two_vertex(1, {1});
  FiniteAction a = swap_action();
  std::vector<int> hom = {0, 1};
  GkmHypergraph ind = induce(h, a, hom, a);
  CHECK_FALSE(validate(ind));
  CHECK(ind.vertices.size() == h.vertices.size());
  REQUIRE(ind.partitions.size() == 1);
  CHECK(ind.partitions.begin()->second.size() == h.partitions.begin()->second.size());
}

TEST_CASE("antidiagonal action acts on the square") {
  GkmHypergraph h = two_vertex(1, {1});
  FiniteAction a = swap_action();
  FiniteAction ad = antidiagonal_action(h, a);
  CHECK_FALSE(ad.validate_table());
  GkmHypergraph sq = product(h, h);
  CHECK_FALSE(validate_action(sq, ad));
  // g.(v, w) = (g v, g^-1 w): the swap moves (a,a) to (b,b)
  std::string aa = product_vertex_id("a", "a");
  std::string bb = product_vertex_id("b", "b");
  CHECK(ad.vertex_perm[1].at(aa) == bb);
}

TEST_CASE("canonical sort deduplicates and orders") {
  GkmHypergraph h;
  h.rank = 1;
  h.vertices = {"b", "a", "b"};
  h.sort_canonical();
  CHECK(h.vertices == std::vector<std::string>{"a", "b"});
}
