#pragma once

#include "gkm/ambient.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gkm {

/// Free graded module over the ambient algebra: a direct sum of shifted
/// copies, one generator per shift. Shift convention M[d]^* = M^{*-d},
/// i.e. the generator of a copy shifted by d sits in cohomological degree d.
struct FreeModuleSpec {
  AmbientSpec amb;
  std::vector<int> shifts{0};

  bool operator==(const FreeModuleSpec& o) const {
    return amb == o.amb && shifts == o.shifts;
  }
};

/// Direct sum of free modules over named vertex copies (block structure).
struct BlockSpace {
  std::vector<std::pair<std::string, FreeModuleSpec>> parts;

  int rank() const; // common t* rank
  bool operator==(const BlockSpace& o) const;
  static BlockSpace single(const AmbientSpec& amb);
};

/// One term of an element of a BlockSpace: coefficient times a basis monomial
/// of one generator of one part.
struct STerm {
  int part = 0;
  int gen = 0;
  Mono m;
  Rat c;
};

struct SpaceElement {
  int degree = 0;
  std::vector<STerm> terms;

  void normalize(); // sort, merge, drop zeros
  bool is_zero() const { return terms.empty(); }
};

/// Basis bookkeeping for the degree-d piece of a BlockSpace.
struct SliceTable {
  struct Seg {
    int part;
    int gen;
    std::shared_ptr<const MonomialTable> tab;
    std::size_t offset;
  };
  int degree = 0;
  std::size_t dim = 0;
  std::vector<Seg> segs;

  std::size_t find(int part, int gen, const Mono& m) const;
  // inverse lookup for a flat index
  void locate(std::size_t i, int* part, int* gen, Mono* m) const;
};

SliceTable slice_table(const BlockSpace& space, int d);

std::vector<Rat> element_dense(const SpaceElement& e, const SliceTable& t);
SpaceElement element_from_dense(const BlockSpace& space, const SliceTable& t,
                                const std::vector<Rat>& coords);

/// Graded A-submodule of a BlockSpace, stored as a finite generator list.
/// The denoted module is the A-span (closure under S(t*)-multiplication).
struct Submodule {
  BlockSpace space;
  std::vector<SpaceElement> gens;
  std::string provenance;
};

/// Raw spanning columns {p * g_i : p monomial, deg matches} of M_d.
Matrix slice_span(const Submodule& m, int d);
/// Canonical linearly-independent column basis of M_d.
Matrix degree_slice(const Submodule& m, int d);

/// Numerator of P_M(t)*(1-t^2)^r, truncated at D.
struct HilbertData {
  std::vector<long long> coeffs; // index = degree, size D+1
  int D = 0;
  bool stable = false; // last `window` coefficients all zero
  int window = 4;

  bool operator==(const HilbertData& o) const { return coeffs == o.coeffs; }
};

HilbertData hilbert_from_dims(const std::vector<long long>& dims, int rank, int D,
                              int window = 4);
HilbertData hilbert_numerator(const Submodule& m, int D, int window = 4);

/// Intersection of submodules of a shared space, slice by slice, minimalized.
Submodule intersect(const std::vector<const Submodule*>& ms, int D);

std::vector<std::pair<int, SpaceElement>> minimal_generators(const Submodule& m,
                                                             int D);

/// Build minimal generators from externally supplied canonical slice bases
/// (columns) for d = 0..D. Used by callers that already hold slices.
std::vector<std::pair<int, SpaceElement>> minimal_generators_from_slices(
    const BlockSpace& space, const std::vector<Matrix>& slices);

struct FreenessCertificate {
  enum class Verdict { Free, NotFree, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::vector<int> generator_degrees;
  int witness_degree = -1;
  std::string reason;
  int D = 0;
};

FreenessCertificate certify_free(const Submodule& m, int D, int window = 4);

/// Same test from precomputed canonical slice bases for d = 0..D.
FreenessCertificate certify_free_slices(const BlockSpace& space,
                                        const std::vector<Matrix>& slices,
                                        int window = 4);

/// Freeness test from dimension data alone, against a base ring with the
/// given even-degree piece dimensions (dim_base(d) for d = 0..D). Generator
/// degrees are inferred greedily; a slice deficit yields NotFree.
FreenessCertificate certify_from_dims(const std::vector<long long>& dims,
                                      const std::function<long long(int)>& dim_base,
                                      int D, int window = 4);

/// Projection to the top exterior component (g = 1 ambients only), identified
/// with a polynomial submodule over the g = 0 ambient.
Submodule proj_top(const Submodule& m);

/// Exact division of polynomial (g=0) homogeneous elements: p = q*d.
bool divide_exact(const GradedElement& p, const GradedElement& d, GradedElement* q);

struct DualityReport {
  bool containment = false;    // all pairwise products land in (d_poly) after proj_top
  bool unipotent = false;      // pairing matrix upper-triangular, nonzero diagonal
  bool nondegenerate = false;  // scalar-extension pairing has full rank
  int top_degree = 0;
  Matrix pairing;              // constant terms of proj(x_i x_j)/d_poly
};

/// Poincare-duality pairing of Lemma-style generator products; m must have
/// exactly 2^r minimal generators up to D (g = 1 pipeline case).
DualityReport duality_pairing_check(const Submodule& m, const GradedElement& d_poly,
                                    int D);

/// Worker pool: bounded by GKM_WORKERS (or hardware concurrency); tasks write
/// to disjoint slots so results are deterministic.
int worker_count();
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace gkm
