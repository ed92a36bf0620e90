#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/rootdata.hpp"

#include <algorithm>
#include <map>

using namespace gkm;

TEST_CASE("every registered datum validates") {
  for (const std::string& key : registry_keys()) {
    CAPTURE(key);
    RootDatum d = build_datum(key);
    CHECK_NOTHROW(validate_datum(d));
    CHECK(d.weyl_order == (long long)weyl_elements(d).size());
  }
}

TEST_CASE("Weyl group orders") {
  std::map<std::string, long long> want = {
      {"A2", 6},  {"B2", 8},   {"G2", 12},  {"A3", 24}, {"A4", 120},
      {"B3", 48}, {"C3", 48},  {"B4", 384}, {"C4", 384}, {"D4", 192},
      {"F4", 1152}, {"SO3", 2}, {"U2", 2}};
  for (auto& [key, n] : want) {
    CAPTURE(key);
    CHECK(build_datum(key).weyl_order == n);
  }
}

TEST_CASE("character orbit sizes") {
  std::map<std::string, std::vector<long long>> want = {
      {"A2", {1, 3}},       {"A3", {1, 4, 3}},       {"A4", {1, 5, 10}},
      {"B2", {1, 2, 1}},    {"B3", {1, 4, 3}},       {"B4", {1, 4, 8, 3}},
      {"C3", {1, 3, 3, 1}}, {"C4", {1, 4, 1, 4, 6}}, {"D4", {1, 4, 4, 4, 3}},
      {"F4", {1, 12, 3}},   {"G2", {1, 3}},          {"SO3", {1, 1}},
      {"U2", {1, 2, 1}}};
  for (auto& [key, sizes] : want) {
    CAPTURE(key);
    RootDatum d = build_datum(key);
    CharTable ct = char_table(d);
    std::vector<long long> got;
    long long total = 0;
    for (const CharOrbit& o : ct.orbits) {
      got.push_back((long long)o.members.size());
      total += (long long)o.members.size();
      // orbit-stabilizer
      CHECK(o.members.size() * o.stabilizer.size() == (std::size_t)d.weyl_order);
      // rep is least member
      for (const Char& c : o.members) CHECK_FALSE(c < o.rep);
    }
    std::sort(got.begin(), got.end());
    std::vector<long long> w = sizes;
    std::sort(w.begin(), w.end());
    CHECK(got == w);
    CHECK(total == 1ll << d.t2_rank);
    // trivial character first
    CHECK(ct.orbits[0].rep == Char(d.t2_rank, 0));
  }
}

TEST_CASE("adapted basis: root column, reflection-fixed complement, invertible") {
  for (const std::string& key : registry_keys()) {
    RootDatum d = build_datum(key);
    for (int ri = 0; ri < d.num_pos_roots(); ++ri) {
      CAPTURE(key);
      CAPTURE(ri);
      LinearSubstitution sub = adapted_basis(d, ri);
      const Matrix& m = sub.m;
      REQUIRE(m.rows == (std::size_t)d.rank);
      CHECK(rank(m) == (std::size_t)d.rank);
      // column 0 is proportional to the root
      for (int i = 0; i < d.rank; ++i)
        CHECK(m.at(i, 0) * Rat((long)d.pos_roots[ri][(i + 1) % d.rank]) ==
              m.at((i + 1) % d.rank, 0) * Rat((long)d.pos_roots[ri][i]));
      Matrix refl = reflection(d, ri);
      Matrix rm = refl.mul(m);
      for (int j = 1; j < d.rank; ++j)
        for (int i = 0; i < d.rank; ++i) CHECK(rm.at(i, j) == m.at(i, j));
      // reflection negates the root column
      for (int i = 0; i < d.rank; ++i) {
        Rat neg = -m.at(i, 0);
        CHECK(rm.at(i, 0) == neg);
      }
    }
  }
}

TEST_CASE("reflections are involutions preserving the root set") {
  for (const std::string& key : {"A2", "B2", "G2", "A3"}) {
    RootDatum d = build_datum(key);
    for (int ri = 0; ri < d.num_pos_roots(); ++ri) {
      Matrix r = reflection(d, ri);
      Matrix r2 = r.mul(r);
      for (int i = 0; i < d.rank; ++i)
        for (int j = 0; j < d.rank; ++j)
          CHECK(r2.at(i, j) == Rat(i == j ? 1 : 0));
    }
  }
}

TEST_CASE("twist element vanishes for the identity central element") {
  for (const std::string& key : registry_keys()) {
    RootDatum d = build_datum(key);
    CentralElement c = central_element(d, "identity");
    for (const WeylElement& w : weyl_elements(d)) {
      std::vector<int> t = twist_element(d, c, w.on_tstar);
      CHECK(t == std::vector<int>(d.t2_rank, 0));
    }
  }
}

TEST_CASE("SO3 half-turn twist") {
  RootDatum d = build_datum("SO3");
  auto names = central_names(d);
  CHECK(std::count(names.begin(), names.end(), "c180") == 1);
  CentralElement c = central_element(d, "c180");
  std::vector<WeylElement> w = weyl_elements(d);
  REQUIRE(w.size() == 2);
  // nontrivial element w: w mu - mu = -1, class (1) mod 2Phi = 2Z
  int seen_nonzero = 0;
  for (const WeylElement& e : w) {
    std::vector<int> t = twist_element(d, c, e.on_tstar);
    if (t == std::vector<int>{1}) ++seen_nonzero;
    // sign on the nontrivial character is chi(t_w)
    Char chi = {1};
    CHECK(twist_sign(d, c, e, chi) == (t[0] ? -1 : 1));
  }
  CHECK(seen_nonzero == 1);
}

TEST_CASE("subgroup generators regenerate the subgroup") {
  RootDatum d = build_datum("A2");
  CharTable ct = char_table(d);
  for (const CharOrbit& o : ct.orbits) {
    auto gens = subgroup_generators(o.stabilizer);
    // close the generating set by repeated multiplication on t*
    std::vector<Matrix> closure;
    auto seen = [&](const Matrix& m) {
      for (const Matrix& x : closure)
        if (x == m) return true;
      return false;
    };
    Matrix id(d.rank, d.rank);
    for (int i = 0; i < d.rank; ++i) id.at(i, i) = Rat(1);
    closure.push_back(id);
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < closure.size(); ++i)
        for (const WeylElement& g : gens) {
          Matrix p = closure[i].mul(g.on_tstar);
          if (!seen(p)) {
            closure.push_back(p);
            grew = true;
          }
        }
    }
    CHECK(closure.size() == o.stabilizer.size());
  }
}

TEST_CASE("character evaluation against coroot classes") {
  RootDatum d = build_datum("U2");
  // trivial character is 1 on every coroot class
  for (int ri = 0; ri < d.num_pos_roots(); ++ri)
    CHECK(eval_char_coroot(d, Char(d.t2_rank, 0), ri) == 1);
  // chi = (1,0) sees the coroot class (1,1) of the single positive root
  CHECK(eval_char_coroot(d, {1, 0}, 0) == -1);
  CHECK(eval_char_coroot(d, {1, 1}, 0) == 1);
}

TEST_CASE("Poincare polynomial of K") {
  // SO3: (1 + t^3)
  RootDatum so3 = build_datum("SO3");
  CHECK(so3.poincare_k() == std::vector<long long>{1, 0, 0, 1});
  // A2/SU3: (1 + t^3)(1 + t^5)
  RootDatum a2 = build_datum("A2");
  CHECK(a2.poincare_k() == std::vector<long long>{1, 0, 0, 1, 0, 1, 0, 0, 1});
}
