#pragma once

#include "gkm/rootdata.hpp"
#include "gkm/sheaf.hpp"
#include "gkm/submodule.hpp"

#include <string>
#include <vector>

namespace gkm {

/// Sections module with its slice data and certification.
struct SectionData {
  Submodule module;           // minimal generators
  std::vector<Matrix> slices; // canonical slice bases, d = 0..D
  std::vector<long long> dims;
  HilbertData numerator;
  FreenessCertificate cert;
  std::string note;
};

/// im(i*_{alpha0}) inside Lambda(t*)^{(x)g} (x) S(t*): generators are the
/// 2^{rg} exterior monomials in the adapted basis, tensored with 1 or with
/// alpha0 by the sign rule, then substituted back to standard coordinates.
Submodule rank_one_image(const RootDatum& d, int ri, const Char& chi, int g);

/// Canonical basis of the degree-dd slice of rank_one_image (via the monomial
/// description in adapted coordinates: excluded monomials are those with an
/// odd sign and no alpha0 factor in the symmetric part).
Matrix rank_one_slice(const RootDatum& d, int ri, const Char& chi, int g, int dd);

/// H0(F_1^chi) = intersection over all positive roots, computed per degree as
/// the kernel of the excluded-coordinate conditions of every root.
SectionData sections_f1_chi(const RootDatum& d, const Char& chi, int D);

/// g-fold generator products of sections_f1_chi (equals H0(F_g^chi) when the
/// g = 1 module is free; labelled otherwise).
SectionData sections_fg_chi(const RootDatum& d, const Char& chi, int g, int D);

/// One character orbit's Weyl-invariant data, relative to A^W.
struct InvariantData {
  Char rep;
  int orbit_size = 1;
  std::vector<long long> inv_dims;          // dim of invariant slices
  std::vector<long long> relative_numerator; // inv series * prod(1 - t^{2 d_i})
  bool stable = false;
  FreenessCertificate cert; // over A^W, from dimension data
  std::string note;
};

/// Twisted (W_c)_chi-invariants of sections_fg_chi per orbit representative.
std::vector<InvariantData> weyl_invariant_sections(const RootDatum& d,
                                                   const CentralElement& c, int g,
                                                   int D);

struct PipelineRequest {
  std::string group;
  int g = 1;
  std::string c = "regular"; // "regular" or a registered central element name
  int D = -1;                // < 0: default g(r + 2|roots|) + 4
  bool weyl = false;         // route through weyl_invariant_sections
  std::string character;     // "" = all orbit representatives, else bits "011"
};

struct OrbitRow {
  Char rep;
  int orbit_size = 1;
  std::vector<long long> numerator;
  FreenessCertificate cert;
  std::string note;
};

struct TableRow {
  std::string group;
  std::string c_label;
  int g = 1;
  int D = 0;
  bool weyl = false;
  std::vector<OrbitRow> orbits;    // trivial character's orbit first
  std::vector<long long> total;    // see normalization note
  std::string normalization;       // denominator description
};

int default_truncation(const RootDatum& d, int g);

TableRow table_row(const PipelineRequest& req);
/// Same with an explicit (possibly custom) root datum; req.group is only a label.
TableRow table_row(const PipelineRequest& req, const RootDatum& datum);

/// Closed rank-one formulas; kind is "SO3" or "U2", variant one of
/// "regular", "identity" (c = 1), "central" (SO3 c != 1 / U2 non-regular).
std::vector<long long> closed_form_rank_one(const std::string& kind,
                                            const std::string& variant, int g);

/// Full (non-isotypical) representation-variety sheaf for c = identity:
/// vertices T2, per positive root either loops (trivial coroot image) or
/// 2-vertex blocks with the reflection monodromy.
SheafModel representation_sheaf(const RootDatum& d, int g);

} // namespace gkm
