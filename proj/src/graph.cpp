#include "gkm/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gkm {

Weight::Weight(std::vector<long long> raw) : v(std::move(raw)) {
  long long g = 0;
  for (long long x : v) g = std::gcd(g, x < 0 ? -x : x);
  if (g == 0) throw std::invalid_argument("zero weight");
  for (long long& x : v) x /= g;
  for (long long x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (long long& y : v) y = -y;
    break;
  }
}

std::string Weight::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

void GkmHypergraph::sort_canonical() {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  for (auto& [w, p] : partitions) {
    for (Block& b : p) std::sort(b.begin(), b.end());
    std::sort(p.begin(), p.end());
  }
}

std::optional<std::string> validate(const GkmHypergraph& h) {
  std::set<std::string> vs(h.vertices.begin(), h.vertices.end());
  if (vs.size() != h.vertices.size()) return "duplicate vertex ids";
  for (const auto& [w, p] : h.partitions) {
    if ((int)w.v.size() != h.rank) return "weight rank mismatch at " + w.str();
    std::set<std::string> seen;
    for (const Block& b : p) {
      if (b.empty()) return "empty block at weight " + w.str();
      for (const std::string& v : b) {
        if (!vs.count(v)) return "unknown vertex " + v + " at weight " + w.str();
        if (!seen.insert(v).second)
          return "vertex " + v + " covered twice at weight " + w.str();
      }
    }
    if (seen.size() != vs.size()) return "partition omits a vertex at weight " + w.str();
  }
  return std::nullopt;
}

namespace {

// block containing v (vertices not listed are implicitly singletons)
Block find_block(const GkmHypergraph& h, const Weight& w, const std::string& v) {
  auto it = h.partitions.find(w);
  if (it != h.partitions.end())
    for (const Block& b : it->second)
      if (std::find(b.begin(), b.end(), v) != b.end()) return b;
  return {v};
}

} // namespace

std::optional<std::string> validate_morphism(const GkmHypergraph& src,
                                             const GkmHypergraph& dst,
                                             const GraphMorphism& phi) {
  for (const std::string& v : src.vertices)
    if (!phi.vertex_map.count(v)) return "vertex " + v + " unmapped";
  std::set<Weight> weights;
  for (auto& [w, _] : src.partitions) weights.insert(w);
  for (auto& [w, _] : dst.partitions) weights.insert(w);
  for (const Weight& w : weights) {
    auto it = src.partitions.find(w);
    Partition sp;
    if (it != src.partitions.end()) sp = it->second;
    for (const Block& b : sp) {
      std::set<std::string> images;
      for (const std::string& v : b) images.insert(phi.vertex_map.at(v));
      // all images must lie in one target block
      Block target = find_block(dst, w, *images.begin());
      for (const std::string& u : images)
        if (std::find(target.begin(), target.end(), u) == target.end())
          return "block at weight " + w.str() + " maps across target blocks";
    }
  }
  return std::nullopt;
}

std::string product_vertex_id(const std::string& a, const std::string& b) {
  return a + "|" + b;
}

GkmHypergraph product(const GkmHypergraph& h1, const GkmHypergraph& h2) {
  if (h1.rank != h2.rank) throw std::invalid_argument("product: rank mismatch");
  GkmHypergraph out;
  out.rank = h1.rank;
  for (const std::string& a : h1.vertices)
    for (const std::string& b : h2.vertices)
      out.vertices.push_back(product_vertex_id(a, b));
  std::set<Weight> support;
  for (auto& [w, _] : h1.partitions) support.insert(w);
  for (auto& [w, _] : h2.partitions) support.insert(w);
  for (const Weight& w : support) {
    Partition p;
    auto blocks_of = [&](const GkmHypergraph& h) {
      Partition bl;
      auto it = h.partitions.find(w);
      if (it != h.partitions.end()) return it->second;
      for (const std::string& v : h.vertices) bl.push_back({v});
      return bl;
    };
    for (const Block& b1 : blocks_of(h1))
      for (const Block& b2 : blocks_of(h2)) {
        Block b;
        for (const std::string& a : b1)
          for (const std::string& c : b2) b.push_back(product_vertex_id(a, c));
        p.push_back(std::move(b));
      }
    out.partitions.emplace(w, std::move(p));
  }
  out.sort_canonical();
  return out;
}

int FiniteAction::inverse(int a) const {
  for (int b = 0; b < size(); ++b)
    if (mult[a][b] == 0) return b;
  throw std::invalid_argument("element without inverse");
}

std::optional<std::string> FiniteAction::validate_table() const {
  int n = size();
  if ((int)mult.size() != n) return "multiplication table size mismatch";
  for (auto& row : mult) {
    if ((int)row.size() != n) return "multiplication table row size mismatch";
    for (int x : row)
      if (x < 0 || x >= n) return "multiplication table entry out of range";
  }
  for (int a = 0; a < n; ++a)
    if (mult[0][a] != a || mult[a][0] != a) return "element 0 is not the identity";
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (mult[mult[a][b]][c] != mult[a][mult[b][c]]) return "non-associative table";
  return std::nullopt;
}

std::optional<std::string> validate_action(const GkmHypergraph& h, const FiniteAction& a) {
  if (auto bad = a.validate_table()) return bad;
  if ((int)a.vertex_perm.size() != a.size()) return "missing vertex permutations";
  for (int e = 0; e < a.size(); ++e) {
    for (const std::string& v : h.vertices) {
      if (!a.vertex_perm[e].count(v)) return "vertex " + v + " unmapped by element";
    }
  }
  // composition check g.(h.v) = (gh).v
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < a.size(); ++y)
      for (const std::string& v : h.vertices)
        if (a.vertex_perm[x].at(a.vertex_perm[y].at(v)) !=
            a.vertex_perm[a.mult[x][y]].at(v))
          return "vertex permutations do not compose with the table";
  // partition equivariance, alpha invariance (untwisted case)
  for (int e = 0; e < a.size(); ++e) {
    for (const auto& [w, p] : h.partitions) {
      for (const Block& b : p) {
        std::set<std::string> img;
        for (const std::string& v : b) img.insert(a.vertex_perm[e].at(v));
        Block target = find_block(h, w, *img.begin());
        if (std::set<std::string>(target.begin(), target.end()) != img)
          return "action does not respect partition at weight " + w.str();
      }
    }
  }
  return std::nullopt;
}

std::pair<GkmHypergraph, GraphMorphism> quotient(const GkmHypergraph& h,
                                                 const FiniteAction& a) {
  if (a.twisted()) throw std::invalid_argument("twisted quotients are not supported");
  if (auto bad = validate_action(h, a))
    throw std::invalid_argument("invalid action: " + *bad);
  // orbit labels: lexicographically least member
  GraphMorphism pi;
  for (const std::string& v : h.vertices) {
    std::string least = v;
    for (int e = 0; e < a.size(); ++e) least = std::min(least, a.vertex_perm[e].at(v));
    pi.vertex_map[v] = least;
  }
  GkmHypergraph q;
  q.rank = h.rank;
  std::set<std::string> qv;
  for (auto& [v, o] : pi.vertex_map) qv.insert(o);
  q.vertices.assign(qv.begin(), qv.end());
  for (const auto& [w, p] : h.partitions) {
    std::set<Block> blocks;
    for (const Block& b : p) {
      std::set<std::string> img;
      for (const std::string& v : b) img.insert(pi.vertex_map.at(v));
      blocks.insert(Block(img.begin(), img.end()));
    }
    Partition qp(blocks.begin(), blocks.end());
    // keep only if not fully discrete
    bool discrete = true;
    for (const Block& b : qp)
      if (b.size() > 1) discrete = false;
    if (!discrete) q.partitions.emplace(w, std::move(qp));
  }
  q.sort_canonical();
  if (auto bad = validate(q))
    throw std::invalid_argument("quotient does not validate: " + *bad);
  return {q, pi};
}

GkmHypergraph induce(const GkmHypergraph& h, const FiniteAction& ah,
                     const std::vector<int>& hom, const FiniteAction& g_table) {
  if ((int)hom.size() != ah.size()) throw std::invalid_argument("hom size mismatch");
  for (int x = 0; x < ah.size(); ++x)
    for (int y = 0; y < ah.size(); ++y)
      if (g_table.mult[hom[x]][hom[y]] != hom[ah.mult[x][y]])
        throw std::invalid_argument("hom is not a homomorphism");
  // G x Gamma
  GkmHypergraph big;
  big.rank = h.rank;
  for (int g = 0; g < g_table.size(); ++g)
    for (const std::string& v : h.vertices)
      big.vertices.push_back(product_vertex_id(g_table.element_names[g], v));
  for (const auto& [w, p] : h.partitions) {
    Partition bp;
    for (int g = 0; g < g_table.size(); ++g)
      for (const Block& b : p) {
        Block nb;
        for (const std::string& v : b)
          nb.push_back(product_vertex_id(g_table.element_names[g], v));
        bp.push_back(std::move(nb));
      }
    big.partitions.emplace(w, std::move(bp));
  }
  big.sort_canonical();
  // anti-diagonal H-action: k.(g, x) = (g phi(k^{-1}), k.x)
  FiniteAction act;
  act.element_names = ah.element_names;
  act.mult = ah.mult;
  act.vertex_perm.resize(ah.size());
  for (int k = 0; k < ah.size(); ++k) {
    int kinv = ah.inverse(k);
    for (int g = 0; g < g_table.size(); ++g)
      for (const std::string& v : h.vertices)
        act.vertex_perm[k][product_vertex_id(g_table.element_names[g], v)] =
            product_vertex_id(g_table.element_names[g_table.mult[g][hom[kinv]]],
                              ah.vertex_perm[k].at(v));
  }
  return quotient(big, act).first;
}

FiniteAction antidiagonal_action(const GkmHypergraph& h, const FiniteAction& a) {
  FiniteAction act;
  act.element_names = a.element_names;
  act.mult = a.mult;
  act.vertex_perm.resize(a.size());
  for (int g = 0; g < a.size(); ++g) {
    int ginv = a.inverse(g);
    for (const std::string& v : h.vertices)
      for (const std::string& w : h.vertices)
        act.vertex_perm[g][product_vertex_id(v, w)] =
            product_vertex_id(a.vertex_perm[g].at(v), a.vertex_perm[ginv].at(w));
  }
  return act;
}

} // namespace gkm
