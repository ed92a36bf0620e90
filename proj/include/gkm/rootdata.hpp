#pragma once

#include "gkm/ambient.hpp"
#include "gkm/matrix.hpp"

#include <string>
#include <vector>

namespace gkm {

/// Compact-group descriptor: root system data in a fixed integral basis of t*.
/// Roots are coordinate vectors in that basis; coroots are stored in the dual
/// basis, so alpha(h) is the dot product of coordinate vectors.
struct RootDatum {
  std::string label;
  int rank = 1;
  std::vector<std::string> labels; // basis names of t*
  std::vector<std::vector<long long>> pos_roots;
  std::vector<std::vector<long long>> coroots; // same indexing as pos_roots
  std::vector<Matrix> weyl_gens;               // integer matrices on t*
  std::vector<int> degrees;                    // invariant degrees d_i
  long long weyl_order = 0;

  // T2 = 2-torsion of the maximal torus
  int t2_rank = 0;
  bool phi_mod2 = false; // T2 identified with Phi/2Phi (pi_1 of odd order)
  Matrix lattice_basis;  // rank x rank, columns = coroot-lattice basis (dual coords)
  std::vector<std::vector<int>> coroot_t2; // T2 class of exp(pi i h_alpha), per root

  int num_pos_roots() const { return (int)pos_roots.size(); }
  int dim_k() const { return rank + 2 * num_pos_roots(); }
  AmbientSpec ambient(int g) const { return AmbientSpec(rank, g, labels); }
  /// Poincare polynomial coefficients of P_t(K) = prod (1 + t^{2 d_i - 1}).
  std::vector<long long> poincare_k() const;
};

/// Registry keyed by type strings ("A2", ..., "F4", "SO3", "U2", alias "PSU3").
RootDatum build_datum(const std::string& key);
std::vector<std::string> registry_keys();

/// Structural validation of the stored invariants; throws on violation.
void validate_datum(const RootDatum& d);

using Char = std::vector<int>; // bit vector of length t2_rank

struct WeylElement {
  Matrix on_tstar;
  std::vector<std::vector<int>> on_t2; // GF(2) matrix on T2 elements
};

/// Full Weyl group enumeration (matrices on t* with their T2 actions).
std::vector<WeylElement> weyl_elements(const RootDatum& d);

/// chi evaluated on exp(pi i h_alpha) for positive root index ri.
int eval_char_coroot(const RootDatum& d, const Char& chi, int ri);

/// w . chi (the action (w.chi)(x) = chi(w^{-1} x)); for the orbit/stabilizer
/// structure the transpose action over all group elements is equivalent.
Char char_apply(const WeylElement& w, const Char& chi);

struct CharOrbit {
  Char rep;                       // lexicographically least member
  std::vector<Char> members;
  std::vector<WeylElement> stabilizer; // all elements fixing rep
};

struct CharTable {
  std::vector<CharOrbit> orbits; // trivial character's orbit first
};

CharTable char_table(const RootDatum& d);

/// Small generating set of a subgroup given by its full element list.
std::vector<WeylElement> subgroup_generators(const std::vector<WeylElement>& elems);

/// Adapted basis for a positive root: first column alpha_0, remaining columns
/// fixed by the alpha_0-reflection; integer primitive columns.
LinearSubstitution adapted_basis(const RootDatum& d, int ri);

/// Reflection matrix on t* for positive root ri.
Matrix reflection(const RootDatum& d, int ri);

struct CentralElement {
  std::string label;    // "identity" or a registered name
  std::vector<Rat> mu;  // dual coords; exp(pi i mu) is the square root s of c
};

CentralElement central_element(const RootDatum& d, const std::string& name);
std::vector<std::string> central_names(const RootDatum& d);

/// T2 class t_w with w(s) = s t_w, from (w mu - mu) reduced mod 2 Phi.
std::vector<int> twist_element(const RootDatum& d, const CentralElement& c,
                               const Matrix& w_on_tstar);

int twist_sign(const RootDatum& d, const CentralElement& c, const WeylElement& w,
               const Char& chi);

} // namespace gkm
