#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gkm {

/// Primitive integer vector up to sign; canonical form has gcd 1 and first
/// nonzero entry positive.
struct Weight {
  std::vector<long long> v;

  Weight() = default;
  explicit Weight(std::vector<long long> raw); // canonicalizes; throws on zero
  bool operator<(const Weight& o) const { return v < o.v; }
  bool operator==(const Weight& o) const { return v == o.v; }
  std::string str() const;
};

using Block = std::vector<std::string>; // sorted vertex ids
using Partition = std::vector<Block>;

/// Finite vertex set plus a finitely-supported map weight -> partition.
/// Unlisted weights carry the discrete partition.
struct GkmHypergraph {
  int rank = 1;
  std::vector<std::string> vertices; // sorted, unique
  std::map<Weight, Partition> partitions;

  void sort_canonical();
};

/// ok => empty description
std::optional<std::string> validate(const GkmHypergraph& h);

struct GraphMorphism {
  std::map<std::string, std::string> vertex_map;
};

/// Checks alpha-preservation and block containment phi(I(e)) within one block.
std::optional<std::string> validate_morphism(const GkmHypergraph& src,
                                             const GkmHypergraph& dst,
                                             const GraphMorphism& phi);

std::string product_vertex_id(const std::string& a, const std::string& b);

GkmHypergraph product(const GkmHypergraph& h1, const GkmHypergraph& h2);

struct FiniteAction {
  std::vector<std::string> element_names; // index 0 = identity
  std::vector<std::vector<int>> mult;     // mult[a][b] = index of a*b
  std::vector<std::map<std::string, std::string>> vertex_perm; // per element
  // optional twist: per-element integer weight-lattice automorphism
  std::vector<std::vector<std::vector<long long>>> twists;

  int size() const { return (int)element_names.size(); }
  bool twisted() const { return !twists.empty(); }
  int inverse(int a) const;
  std::optional<std::string> validate_table() const;
};

std::optional<std::string> validate_action(const GkmHypergraph& h, const FiniteAction& a);

std::pair<GkmHypergraph, GraphMorphism> quotient(const GkmHypergraph& h,
                                                 const FiniteAction& a);

/// G x_H Gamma: build G x Gamma, act by h.(g, x) = (g phi(h^{-1}), h.x), quotient.
/// hom maps H element indices to G element indices.
GkmHypergraph induce(const GkmHypergraph& h, const FiniteAction& ah,
                     const std::vector<int>& hom, const FiniteAction& g_table);

/// The anti-diagonal/product action of `a` on product(h, h):
/// g.(v, w) = (g v, g^{-1} w). Used by convolution.
FiniteAction antidiagonal_action(const GkmHypergraph& h, const FiniteAction& a);

} // namespace gkm
