#pragma once

#include "gkm/matrix.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace gkm {

/// The ambient graded algebra Lambda(t*)^{tensor g} (x) S(t*).
/// Exterior generators sit in degree 1, polynomial variables in degree 2.
struct AmbientSpec {
  int rank = 1;          // dimension of t*
  int g = 0;             // number of exterior tensor factors (0 = S(t*) alone)
  std::vector<std::string> labels; // basis names, defaults x1..xr

  AmbientSpec() = default;
  AmbientSpec(int r, int g_, std::vector<std::string> lab = {});
  bool operator==(const AmbientSpec& o) const {
    return rank == o.rank && g == o.g;
  }
};

/// One basis monomial: g exterior subsets (bitmasks over {0..r-1}) and one
/// exponent vector for the symmetric part.
struct Mono {
  std::vector<std::uint32_t> ext; // size g
  std::vector<std::int32_t> exp;  // size r

  int degree() const;
  bool operator==(const Mono& o) const { return ext == o.ext && exp == o.exp; }
};

/// Canonical order: exterior subsets lexicographically as sorted index lists,
/// factor by factor; then exponent vectors lexicographically with earlier
/// variables dominating (x1^q listed first).
bool mono_less(const Mono& a, const Mono& b);

struct MonoHash {
  std::size_t operator()(const Mono& m) const;
};

/// All basis monomials of one cohomological degree, in canonical order.
struct MonomialTable {
  AmbientSpec spec;
  int degree = 0;
  std::vector<Mono> monos;
  std::unordered_map<Mono, std::size_t, MonoHash> index;

  std::size_t dim() const { return monos.size(); }
  std::size_t find(const Mono& m) const; // throws if absent
};

/// Shared, cached table lookup (thread safe).
std::shared_ptr<const MonomialTable> monomial_table(const AmbientSpec& spec, int d);

long long piece_dimension(const AmbientSpec& spec, int d);

/// Number of degree-q monomials in r variables.
long long sym_monomial_count(int r, int q);
/// Degree-q exponent vectors in canonical (table) order.
std::vector<std::vector<std::int32_t>> sym_monomials(int r, int q);

struct MonoLess {
  bool operator()(const Mono& a, const Mono& b) const { return mono_less(a, b); }
};

/// Homogeneous element, stored sparsely.
struct GradedElement {
  AmbientSpec spec;
  int degree = 0;
  std::map<Mono, Rat, MonoLess> terms;

  void add_term(const Mono& m, const Rat& c); // drops resulting zeros
  bool is_zero() const { return terms.empty(); }

  /// Dense coordinates in the canonical MonomialTable order.
  std::vector<Rat> dense() const;
  static GradedElement from_dense(const AmbientSpec& spec, int d,
                                  const std::vector<Rat>& coords);
  static GradedElement one(const AmbientSpec& spec);
  /// Degree-1 exterior generator of variable v in slot, or the degree-2
  /// polynomial variable when slot < 0.
  static GradedElement variable(const AmbientSpec& spec, int v, int slot);

  GradedElement scaled(const Rat& c) const;
};

GradedElement add(const GradedElement& x, const GradedElement& y);
GradedElement multiply(const GradedElement& x, const GradedElement& y);

/// Linear map on t*, column j = image of basis vector j.
struct LinearSubstitution {
  Matrix m; // rank x rank
  bool involution = false;
};

/// Functorial extension of s to the whole algebra.
GradedElement substitute(const GradedElement& x, const LinearSubstitution& s);

/// Matrix of `substitute(., s)` on the degree-d piece, in table coordinates.
Matrix substitution_matrix(const AmbientSpec& spec, int d, const LinearSubstitution& s);

} // namespace gkm
