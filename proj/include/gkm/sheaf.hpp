#pragma once

#include "gkm/graph.hpp"
#include "gkm/submodule.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gkm {

/// Restriction image at one nondegenerate (weight, block): a submodule of the
/// direct sum of the block's vertex stalks (parts in sorted block order).
/// Singleton blocks may carry an image too (loops produced by pushforward).
struct EdgeImage {
  Block block;
  Submodule image;
  // set by from_monodromy; enables the closed-form section path
  std::optional<Matrix> monodromy_rho;
  std::string monodromy_source;
};

/// GKM-sheaf in normal form: free vertex stalks plus per-(weight, block)
/// restriction images. Blocks absent from `images` are unconstrained.
struct SheafModel {
  GkmHypergraph graph;
  std::map<std::string, FreeModuleSpec> stalks;
  std::map<Weight, std::vector<EdgeImage>> images;

  BlockSpace block_space(const Block& b) const;
  BlockSpace total_space() const; // all vertices, sorted
};

/// Structural checks plus the localization spot-check: at a probe degree the
/// cokernel of each image inside its block sum is killed by a power of the
/// weight. probe < 0 uses max generator degree + 4.
std::optional<std::string> validate_model(const SheafModel& s, int probe = -1);

struct MonodromyEdge {
  std::string source, target;
  Weight alpha;
  Matrix rho; // invertible, shift-preserving on the fiber generators
};

struct MonodromySpec {
  AmbientSpec amb;
  std::vector<int> fiber_degrees;
  std::vector<std::string> vertices;
  std::vector<MonodromyEdge> edges; // at most one block of size 2 per weight chain
};

/// Edge image = columns of [[1, alpha], [rho, -alpha rho]] on the fiber.
SheafModel from_monodromy(const MonodromySpec& spec);

struct BMEdge {
  std::string source, target;
  Weight alpha;
  // image of target generator j in M(source) taken mod alpha:
  // rho_t[j][i] = ambient coefficient on source generator i
  std::vector<std::vector<GradedElement>> rho_t;
};

struct BMSheafSpec {
  std::map<std::string, FreeModuleSpec> stalks;
  std::vector<BMEdge> edges;
};

/// Pure Braden-MacPherson sheaf to normal form; the edge image is the kernel
/// of (m_s, m_t) -> m_s - rho_t(m_t) mod alpha, which is generated by
/// {(rho_t(g_j), g_j)} and {(alpha g_i, 0)} (shape M(v_t) + alpha M(v_s)).
SheafModel from_bm(const BMSheafSpec& spec);

/// H0 up to degree D: intersection over supported weights of the assembled
/// block-diagonal images inside the total vertex sum.
Submodule global_sections(const SheafModel& s, int D);

/// Finite action lifted to the stalks: per element and vertex a constant
/// shift-preserving matrix from gens of stalk(v) to gens of stalk(g.v).
struct StalkAction {
  FiniteAction base;
  std::vector<std::map<std::string, Matrix>> gen_maps;
};

std::optional<std::string> validate_stalk_action(const SheafModel& s,
                                                 const StalkAction& a);

/// chi-isotypical pushforward to the quotient graph: stalks are images of the
/// averaging projector on orbit generator sums; images are projector images of
/// the assembled preimage-block images, rewritten in the new stalk bases.
/// chi lists the +-1 character values per group element.
SheafModel isotypical_pushforward(const SheafModel& s, const StalkAction& a,
                                  const std::vector<int>& chi);

/// Tensor over the product graph: stalk shifts add pairwise, edge images are
/// generated by tensor products of the factors' image generators.
SheafModel exterior_product(const SheafModel& s1, const SheafModel& s2);

/// Induction of the exterior product along the antidiagonal action of a free
/// transitive abelian vertex action, identified back with the original graph
/// through the base vertex (default: lexicographically least vertex).
SheafModel convolution(const SheafModel& s1, const SheafModel& s2,
                       const StalkAction& a1, const StalkAction& a2,
                       const std::string& base_vertex = "");

} // namespace gkm
