#include "gkm/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <stdexcept>

namespace gkm {

namespace {

Matrix invert(const Matrix& m) {
  RrefResult r = rref(m.hstack(Matrix::identity(m.rows)));
  if (r.rank != m.rows) throw std::invalid_argument("singular matrix");
  Matrix inv(m.rows, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.rows; ++j) inv.at(i, j) = r.m.at(i, m.rows + j);
  return inv;
}

/// Exterior monomial (one bitmask per slot), optionally times the first
/// polynomial variable, as an element over `spec` in formal coordinates.
GradedElement formal_monomial(const AmbientSpec& spec,
                              const std::vector<std::uint32_t>& masks, bool with_a0) {
  Mono m;
  m.ext = masks;
  m.exp.assign(spec.rank, 0);
  if (with_a0) m.exp[0] = 1;
  GradedElement e;
  e.spec = spec;
  e.degree = m.degree();
  e.add_term(m, Rat(1));
  return e;
}

int a0_degree(const std::vector<std::uint32_t>& masks) {
  int k = 0;
  for (std::uint32_t m : masks) k += (int)(m & 1u);
  return k;
}

std::vector<std::vector<std::uint32_t>> all_masks(int r, int g) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(g, 0);
  std::uint32_t top = 1u << r;
  // odometer over g bitmasks
  while (true) {
    out.push_back(cur);
    int i = 0;
    while (i < g && ++cur[i] == top) cur[i++] = 0;
    if (i == g) break;
  }
  return out;
}

SpaceElement to_space_element(const GradedElement& e) {
  SpaceElement s;
  s.degree = e.degree;
  for (auto& [m, c] : e.terms) s.terms.push_back({0, 0, m, c});
  return s;
}

std::vector<long long> poly_mul(const std::vector<long long>& a,
                                const std::vector<long long>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<long long> c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<long long> poly_pow(std::vector<long long> p, int g) {
  std::vector<long long> out{1};
  for (int i = 0; i < g; ++i) out = poly_mul(out, p);
  return out;
}

/// prod over invariant degrees of (1 - t^{2 d_i})
std::vector<long long> weyl_denominator_numerator(const RootDatum& d) {
  std::vector<long long> p{1};
  for (int di : d.degrees) {
    std::vector<long long> f(2 * di + 1, 0);
    f[0] = 1;
    f[2 * di] = -1;
    p = poly_mul(p, f);
  }
  return p;
}

/// coefficients of prod 1/(1 - t^{2 d_i}) through degree D
std::vector<long long> weyl_base_dims(const RootDatum& d, int D) {
  std::vector<long long> s(D + 1, 0);
  s[0] = 1;
  for (int di : d.degrees)
    for (int k = 2 * di; k <= D; ++k) s[k] += s[k - 2 * di];
  return s;
}

} // namespace

int default_truncation(const RootDatum& d, int g) {
  return g * (d.rank + 2 * d.num_pos_roots()) + 4;
}

Submodule rank_one_image(const RootDatum& d, int ri, const Char& chi, int g) {
  AmbientSpec spec = d.ambient(g);
  LinearSubstitution sub = adapted_basis(d, ri);
  int chival = eval_char_coroot(d, chi, ri);
  Submodule m;
  m.space = BlockSpace::single(spec);
  m.provenance = "rank-one image, root " + std::to_string(ri);
  for (auto& masks : all_masks(d.rank, g)) {
    int sign = (a0_degree(masks) % 2 ? -1 : 1) * chival;
    GradedElement e = formal_monomial(spec, masks, sign != 1);
    m.gens.push_back(to_space_element(substitute(e, sub)));
  }
  return m;
}

Matrix rank_one_slice(const RootDatum& d, int ri, const Char& chi, int g, int dd) {
  AmbientSpec spec = d.ambient(g);
  LinearSubstitution sub = adapted_basis(d, ri);
  int chival = eval_char_coroot(d, chi, ri);
  Matrix t = substitution_matrix(spec, dd, sub);
  auto tab = monomial_table(spec, dd);
  std::vector<std::size_t> good;
  for (std::size_t i = 0; i < tab->dim(); ++i) {
    const Mono& m = tab->monos[i];
    int sign = (a0_degree(m.ext) % 2 ? -1 : 1) * chival;
    if (sign == 1 || m.exp[0] > 0) good.push_back(i);
  }
  Matrix cols(t.rows, good.size());
  for (std::size_t j = 0; j < good.size(); ++j)
    for (std::size_t i = 0; i < t.rows; ++i) cols.at(i, j) = t.at(i, good[j]);
  return column_space_basis(cols);
}

SectionData sections_f1_chi(const RootDatum& d, const Char& chi, int D) {
  AmbientSpec spec = d.ambient(1);
  BlockSpace space = BlockSpace::single(spec);
  int nroots = d.num_pos_roots();
  std::vector<LinearSubstitution> inv_subs;
  std::vector<int> chivals;
  for (int ri = 0; ri < nroots; ++ri) {
    LinearSubstitution s = adapted_basis(d, ri);
    inv_subs.push_back({invert(s.m), false});
    chivals.push_back(eval_char_coroot(d, chi, ri));
  }
  SectionData out;
  out.slices.assign(D + 1, Matrix());
  out.dims.assign(D + 1, 0);
  parallel_for(D + 1, [&](int dd) {
    auto tab = monomial_table(spec, dd);
    std::size_t n = tab->dim();
    if (n == 0) {
      out.slices[dd] = Matrix(0, 0);
      return;
    }
    // stack the excluded-coordinate conditions of every root
    std::vector<std::vector<Rat>> rows;
    for (int ri = 0; ri < nroots; ++ri) {
      std::vector<std::size_t> bad;
      for (std::size_t i = 0; i < n; ++i) {
        const Mono& m = tab->monos[i];
        int sign = (a0_degree(m.ext) % 2 ? -1 : 1) * chivals[ri];
        if (sign != 1 && m.exp[0] == 0) bad.push_back(i);
      }
      if (bad.empty()) continue;
      Matrix u = substitution_matrix(spec, dd, inv_subs[ri]);
      for (std::size_t b : bad) {
        std::vector<Rat> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = u.at(b, j);
        rows.push_back(std::move(row));
      }
    }
    Matrix cond(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) cond.at(i, j) = std::move(rows[i][j]);
    out.slices[dd] = column_space_basis(kernel_basis(cond));
    out.dims[dd] = (long long)out.slices[dd].cols;
  });
  out.numerator = hilbert_from_dims(out.dims, d.rank, D);
  out.module.space = space;
  out.module.provenance = "sections F1";
  for (auto& [deg, e] : minimal_generators_from_slices(space, out.slices))
    out.module.gens.push_back(e);
  out.cert = certify_free_slices(space, out.slices);
  return out;
}

SectionData sections_fg_chi(const RootDatum& d, const Char& chi, int g, int D) {
  if (g < 1) throw std::invalid_argument("g must be >= 1");
  if (g == 1) return sections_f1_chi(d, chi, D);
  SectionData f1 = sections_f1_chi(d, chi, default_truncation(d, 1));
  AmbientSpec spec = d.ambient(g);
  BlockSpace space = BlockSpace::single(spec);
  // one-factor generators as ambient elements
  std::vector<GradedElement> factors;
  for (const SpaceElement& e : f1.module.gens) {
    GradedElement x;
    x.spec = d.ambient(1);
    x.degree = e.degree;
    for (const STerm& t : e.terms) x.add_term(t.m, t.c);
    factors.push_back(std::move(x));
  }
  SectionData out;
  out.module.space = space;
  out.module.provenance = "sections Fg products";
  if (f1.cert.verdict != FreenessCertificate::Verdict::Free)
    out.note = "product-module, tensor identification unproven";
  // g-fold products, one factor per slot
  std::vector<std::size_t> pick(g, 0);
  while (true) {
    GradedElement prod = GradedElement::one(spec);
    for (int slot = 0; slot < g; ++slot) {
      const GradedElement& f = factors[pick[slot]];
      GradedElement emb;
      emb.spec = spec;
      emb.degree = f.degree;
      for (auto& [m, c] : f.terms) {
        Mono nm;
        nm.ext.assign(g, 0);
        nm.ext[slot] = m.ext[0];
        nm.exp = m.exp;
        emb.add_term(nm, c);
      }
      prod = multiply(prod, emb);
    }
    if (!prod.is_zero()) out.module.gens.push_back(to_space_element(prod));
    int i = 0;
    while (i < g && ++pick[i] == factors.size()) pick[i++] = 0;
    if (i == g) break;
  }
  out.slices.assign(D + 1, Matrix());
  out.dims.assign(D + 1, 0);
  parallel_for(D + 1, [&](int dd) {
    out.slices[dd] = degree_slice(out.module, dd);
    out.dims[dd] = (long long)out.slices[dd].cols;
  });
  out.numerator = hilbert_from_dims(out.dims, d.rank, D);
  {
    Submodule minimal;
    minimal.space = space;
    minimal.provenance = out.module.provenance;
    for (auto& [deg, e] : minimal_generators_from_slices(space, out.slices))
      minimal.gens.push_back(e);
    out.module = std::move(minimal);
  }
  out.cert = certify_free_slices(space, out.slices);
  return out;
}

std::vector<InvariantData> weyl_invariant_sections(const RootDatum& d,
                                                   const CentralElement& c, int g,
                                                   int D) {
  AmbientSpec spec = d.ambient(g);
  CharTable table = char_table(d);
  std::vector<long long> wd = weyl_denominator_numerator(d);
  std::vector<InvariantData> out;
  for (const CharOrbit& orbit : table.orbits) {
    SectionData sd = sections_fg_chi(d, orbit.rep, g, D);
    std::vector<WeylElement> gens = subgroup_generators(orbit.stabilizer);
    InvariantData inv;
    inv.rep = orbit.rep;
    inv.orbit_size = (int)orbit.members.size();
    inv.note = sd.note;
    inv.inv_dims.assign(D + 1, 0);
    parallel_for(D + 1, [&](int dd) {
      const Matrix& b = sd.slices[dd];
      if (b.cols == 0) return;
      if (gens.empty()) {
        inv.inv_dims[dd] = (long long)b.cols;
        return;
      }
      std::vector<Matrix> stack;
      for (const WeylElement& w : gens) {
        int sign = twist_sign(d, c, w, orbit.rep);
        Matrix tw = substitution_matrix(spec, dd, {w.on_tstar, false});
        Matrix m = tw.mul(b);
        for (std::size_t i = 0; i < m.rows; ++i)
          for (std::size_t j = 0; j < m.cols; ++j)
            m.at(i, j) -= Rat(sign) * b.at(i, j);
        stack.push_back(std::move(m));
      }
      std::size_t rows = 0;
      for (auto& m : stack) rows += m.rows;
      Matrix cond(rows, b.cols);
      std::size_t off = 0;
      for (auto& m : stack) {
        for (std::size_t i = 0; i < m.rows; ++i)
          for (std::size_t j = 0; j < m.cols; ++j)
            cond.at(off + i, j) = std::move(m.at(i, j));
        off += m.rows;
      }
      inv.inv_dims[dd] = (long long)b.cols - (long long)rank(cond);
    });
    // relative numerator: invariant dimension series times prod(1 - t^{2 d_i})
    inv.relative_numerator.assign(D + 1, 0);
    for (int k = 0; k <= D; ++k)
      for (std::size_t j = 0; j < wd.size() && (int)j <= k; ++j)
        inv.relative_numerator[k] += wd[j] * inv.inv_dims[k - j];
    inv.stable = true;
    for (int k = D - 3; k <= D; ++k)
      if (k < 0 || inv.relative_numerator[k] != 0) inv.stable = false;
    std::vector<long long> base = weyl_base_dims(d, D);
    inv.cert = certify_from_dims(
        inv.inv_dims, [&base](int e) { return e <= (int)base.size() - 1 ? base[e] : 0; },
        D);
    out.push_back(std::move(inv));
  }
  return out;
}

TableRow table_row(const PipelineRequest& req) {
  return table_row(req, build_datum(req.group));
}

TableRow table_row(const PipelineRequest& req, const RootDatum& datum) {
  if (req.g < 1) throw std::invalid_argument("g must be >= 1");
  int D = req.D >= 0 ? req.D : default_truncation(datum, req.g);
  if (req.weyl && req.D < 0) {
    // invariants sit over A^W; allow for the larger generator degrees
    int dmax = *std::max_element(datum.degrees.begin(), datum.degrees.end());
    D += 2 * dmax;
  }
  static const std::set<std::string> extended{"A4", "B4", "C4", "D4", "F4"};
  if (req.D < 0 && extended.count(req.group))
    throw std::invalid_argument("extended-tier type " + req.group +
                                " requires an explicit truncation degree");
  TableRow row;
  row.group = req.group;
  row.c_label = req.c;
  row.g = req.g;
  row.D = D;
  row.weyl = req.weyl;
  auto want = [&](const Char& rep) {
    if (req.character.empty()) return true;
    if ((int)req.character.size() != datum.t2_rank) return false;
    for (int i = 0; i < datum.t2_rank; ++i)
      if ((req.character[i] == '1' ? 1 : 0) != rep[i]) return false;
    return true;
  };
  if (req.weyl) {
    CentralElement c = central_element(datum, req.c == "regular" ? "identity" : req.c);
    row.c_label = c.label;
    row.normalization = "relative to P_t(BK)";
    row.total.assign(D + 1, 0);
    for (InvariantData& inv : weyl_invariant_sections(datum, c, req.g, D)) {
      for (int k = 0; k <= D; ++k) row.total[k] += inv.relative_numerator[k];
      if (!want(inv.rep)) continue;
      OrbitRow o;
      o.rep = inv.rep;
      o.orbit_size = inv.orbit_size;
      o.numerator = inv.relative_numerator;
      o.cert = inv.cert;
      o.note = inv.note;
      row.orbits.push_back(std::move(o));
    }
  } else {
    if (req.c != "regular")
      throw std::invalid_argument("central c requires the Weyl-invariants route");
    row.normalization = "relative to P_t(BT)";
    row.total.assign(D + 1, 0);
    CharTable table = char_table(datum);
    for (const CharOrbit& orbit : table.orbits) {
      SectionData sd = sections_fg_chi(datum, orbit.rep, req.g, D);
      for (int k = 0; k <= D; ++k)
        row.total[k] += (long long)orbit.members.size() * sd.numerator.coeffs[k];
      if (!want(orbit.rep)) continue;
      OrbitRow o;
      o.rep = orbit.rep;
      o.orbit_size = (int)orbit.members.size();
      o.numerator = sd.numerator.coeffs;
      o.cert = sd.cert;
      o.note = sd.note;
      row.orbits.push_back(std::move(o));
    }
  }
  while (row.total.size() > 1 && row.total.back() == 0) row.total.pop_back();
  return row;
}

std::vector<long long> closed_form_rank_one(const std::string& kind,
                                            const std::string& variant, int g) {
  std::vector<long long> one_t{1, 1};          // 1 + t
  std::vector<long long> one_t3{1, 0, 0, 1};   // 1 + t^3
  std::vector<long long> t_t2{0, 1, 1};        // t + t^2
  std::vector<long long> one_t2{1, 0, 1};      // 1 + t^2
  auto scale = [](std::vector<long long> p, long long c) {
    for (auto& x : p) x *= c;
    return p;
  };
  auto add = [](std::vector<long long> a, const std::vector<long long>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
  };
  if (kind == "SO3") {
    if (variant == "regular" || variant == "identity")
      return scale(poly_pow(one_t3, g), 2);
    if (variant == "central") return poly_mul(poly_pow(one_t3, g), one_t2);
  }
  if (kind == "U2") {
    if (variant == "regular")
      return scale(poly_mul(poly_pow(one_t, g),
                            add(poly_pow(one_t3, g), poly_pow(t_t2, g))),
                   2);
    if (variant == "identity" || variant == "central")
      return poly_mul(poly_pow(one_t, g),
                      add(scale(poly_pow(one_t3, g), 2),
                          poly_mul(poly_pow(t_t2, g), one_t2)));
  }
  throw std::invalid_argument("unknown closed form " + kind + "/" + variant);
}

SheafModel representation_sheaf(const RootDatum& d, int g) {
  AmbientSpec spec = d.ambient(g);
  SheafModel s;
  s.graph.rank = d.rank;
  int n = d.t2_rank;
  auto vname = [n](unsigned bits) {
    std::string v = "v";
    for (int i = 0; i < n; ++i) v += char('0' + ((bits >> i) & 1));
    return v;
  };
  FreeModuleSpec stalk{spec, {0}};
  for (unsigned b = 0; b < (1u << n); ++b) {
    s.graph.vertices.push_back(vname(b));
    s.stalks[vname(b)] = stalk;
  }
  for (int ri = 0; ri < d.num_pos_roots(); ++ri) {
    std::vector<long long> root(d.pos_roots[ri].begin(), d.pos_roots[ri].end());
    Weight w(root);
    unsigned t = 0;
    for (int i = 0; i < n; ++i)
      if (d.coroot_t2[ri][i]) t |= 1u << i;
    LinearSubstitution sub = adapted_basis(d, ri);
    GradedElement alpha;
    alpha.spec = spec;
    alpha.degree = 2;
    {
      Mono m;
      m.ext.assign(g, 0);
      m.exp.assign(d.rank, 0);
      for (int i = 0; i < d.rank; ++i) {
        if (d.pos_roots[ri][i] == 0) continue;
        Mono mm = m;
        mm.exp[i] = 1;
        alpha.add_term(mm, Rat((long)d.pos_roots[ri][i]));
      }
    }
    std::vector<EdgeImage>& eis = s.images[w];
    if (t == 0) {
      // degenerate root: a loop image at every vertex
      Char trivial(n, 0);
      Submodule img = rank_one_image(d, ri, trivial, g);
      for (unsigned b = 0; b < (1u << n); ++b) {
        EdgeImage ei;
        ei.block = {vname(b)};
        ei.image = img;
        ei.image.space.parts[0].first = vname(b);
        ei.image.provenance = "loop root " + std::to_string(ri);
        eis.push_back(std::move(ei));
      }
      continue;
    }
    Partition p;
    for (unsigned b = 0; b < (1u << n); ++b) {
      unsigned bb = b ^ t;
      if (bb < b) continue;
      Block blk{vname(b), vname(bb)};
      std::sort(blk.begin(), blk.end());
      p.push_back(blk);
      EdgeImage ei;
      ei.block = blk;
      ei.image.space = s.block_space(blk);
      ei.image.provenance = "reflection monodromy root " + std::to_string(ri);
      int pv = ei.image.space.parts[0].first == vname(b) ? 0 : 1;
      int pw = 1 - pv;
      for (auto& masks : all_masks(d.rank, g)) {
        int eps = a0_degree(masks) % 2 ? -1 : 1;
        GradedElement m_std = substitute(formal_monomial(spec, masks, false), sub);
        SpaceElement e1;
        e1.degree = m_std.degree;
        for (auto& [mm, cc] : m_std.terms) {
          e1.terms.push_back({pv, 0, mm, cc});
          e1.terms.push_back({pw, 0, mm, Rat(eps) * cc});
        }
        e1.normalize();
        ei.image.gens.push_back(std::move(e1));
        GradedElement am = multiply(alpha, m_std);
        SpaceElement e2;
        e2.degree = am.degree;
        for (auto& [mm, cc] : am.terms) {
          e2.terms.push_back({pv, 0, mm, cc});
          e2.terms.push_back({pw, 0, mm, Rat(-eps) * cc});
        }
        e2.normalize();
        ei.image.gens.push_back(std::move(e2));
      }
      eis.push_back(std::move(ei));
    }
    s.graph.partitions.emplace(w, std::move(p));
  }
  s.graph.sort_canonical();
  return s;
}

} // namespace gkm
