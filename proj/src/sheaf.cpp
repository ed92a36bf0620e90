#include "gkm/sheaf.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace gkm {

namespace {

Mono unit_mono(const AmbientSpec& amb) {
  Mono m;
  m.ext.assign(amb.g, 0);
  m.exp.assign(amb.rank, 0);
  return m;
}

int part_index(const BlockSpace& space, const std::string& name) {
  for (std::size_t i = 0; i < space.parts.size(); ++i)
    if (space.parts[i].first == name) return (int)i;
  throw std::invalid_argument("no part named " + name);
}

/// Re-index an element from one space into another sharing part names.
SpaceElement remap(const SpaceElement& e, const BlockSpace& src,
                   const BlockSpace& dst) {
  SpaceElement out;
  out.degree = e.degree;
  for (const STerm& t : e.terms) {
    STerm nt = t;
    nt.part = part_index(dst, src.parts[t.part].first);
    out.terms.push_back(std::move(nt));
  }
  return out;
}

// only == nullptr selects every part; an empty set selects none
std::vector<SpaceElement> full_stalk_gens(const BlockSpace& space,
                                          const std::set<std::string>* only = nullptr) {
  std::vector<SpaceElement> gens;
  for (std::size_t p = 0; p < space.parts.size(); ++p) {
    if (only && !only->count(space.parts[p].first)) continue;
    const FreeModuleSpec& fm = space.parts[p].second;
    for (std::size_t j = 0; j < fm.shifts.size(); ++j) {
      SpaceElement e;
      e.degree = fm.shifts[j];
      e.terms.push_back({(int)p, (int)j, unit_mono(fm.amb), Rat(1)});
      gens.push_back(std::move(e));
    }
  }
  return gens;
}

/// Multiply an element by a scalar ambient element (same amb in every part).
SpaceElement scale_element(const GradedElement& f, const SpaceElement& e,
                           const BlockSpace& space) {
  SpaceElement out;
  out.degree = e.degree + f.degree;
  for (const STerm& t : e.terms) {
    const AmbientSpec& amb = space.parts[t.part].second.amb;
    GradedElement x;
    x.spec = amb;
    x.degree = e.degree - space.parts[t.part].second.shifts[t.gen];
    x.add_term(t.m, t.c);
    GradedElement fa;
    fa.spec = amb;
    fa.degree = f.degree;
    for (auto& [m, c] : f.terms) {
      Mono em = m;
      em.ext.assign(amb.g, 0);
      fa.add_term(em, c);
    }
    GradedElement prod = multiply(fa, x);
    for (auto& [m, c] : prod.terms) out.terms.push_back({t.part, t.gen, m, c});
  }
  out.normalize();
  return out;
}

GradedElement weight_poly(const AmbientSpec& amb, const Weight& w) {
  GradedElement f;
  f.spec = amb;
  f.degree = 2;
  for (int i = 0; i < amb.rank; ++i) {
    if (w.v[i] == 0) continue;
    Mono m = unit_mono(amb);
    m.exp[i] = 1;
    f.add_term(m, Rat((long)w.v[i]));
  }
  return f;
}

} // namespace

BlockSpace SheafModel::block_space(const Block& b) const {
  Block sorted = b;
  std::sort(sorted.begin(), sorted.end());
  BlockSpace s;
  for (const std::string& v : sorted) s.parts.emplace_back(v, stalks.at(v));
  return s;
}

BlockSpace SheafModel::total_space() const {
  Block all = graph.vertices;
  std::sort(all.begin(), all.end());
  return block_space(all);
}

std::optional<std::string> validate_model(const SheafModel& s, int probe) {
  if (auto bad = validate(s.graph)) return bad;
  for (const std::string& v : s.graph.vertices)
    if (!s.stalks.count(v)) return "vertex " + v + " has no stalk";
  int maxgen = 0;
  for (auto& [_, fm] : s.stalks)
    for (int d : fm.shifts) maxgen = std::max(maxgen, d);
  if (probe < 0) probe = maxgen + 4;
  for (auto& [w, eis] : s.images) {
    if ((int)w.v.size() != s.graph.rank) return "image weight rank mismatch";
    std::set<std::string> seen;
    for (const EdgeImage& ei : eis) {
      for (const std::string& v : ei.block) {
        if (!s.stalks.count(v)) return "image block names unknown vertex " + v;
        if (!seen.insert(v).second) return "vertex " + v + " in two images at " + w.str();
      }
      BlockSpace bs = s.block_space(ei.block);
      if (!(ei.image.space == bs)) return "image space mismatch at " + w.str();
      // localization spot-check: alpha^k . (full slice) lands in the image
      GradedElement f = weight_poly(bs.parts[0].second.amb, w);
      bool killed = false;
      for (int k = 1; k <= 8 && !killed; ++k) {
        Matrix img = degree_slice(ei.image, probe + 2 * k);
        SliceTable hi = slice_table(bs, probe + 2 * k);
        GradedElement fk = f;
        for (int i = 1; i < k; ++i) fk = multiply(fk, f);
        std::vector<std::vector<Rat>> cc;
        SliceTable lo = slice_table(bs, probe);
        for (std::size_t i = 0; i < lo.dim; ++i) {
          std::vector<Rat> col(lo.dim);
          col[i] = 1;
          SpaceElement x = element_from_dense(bs, lo, col);
          cc.push_back(element_dense(scale_element(fk, x, bs), hi));
        }
        Matrix cols(hi.dim, cc.size());
        for (std::size_t j = 0; j < cc.size(); ++j)
          for (std::size_t i = 0; i < hi.dim; ++i) cols.at(i, j) = cc[j][i];
        killed = rank(img.hstack(cols)) == rank(img);
      }
      if (!killed)
        return "cokernel at weight " + w.str() + " not killed by a weight power";
    }
  }
  return std::nullopt;
}

SheafModel from_monodromy(const MonodromySpec& spec) {
  SheafModel s;
  s.graph.rank = spec.amb.rank;
  s.graph.vertices = spec.vertices;
  s.graph.sort_canonical();
  FreeModuleSpec fiber{spec.amb, spec.fiber_degrees};
  for (const std::string& v : s.graph.vertices) s.stalks[v] = fiber;
  std::size_t n = spec.fiber_degrees.size();
  for (const MonodromyEdge& e : spec.edges) {
    if (e.rho.rows != n || e.rho.cols != n)
      throw std::invalid_argument("monodromy matrix size mismatch");
    if (rank(e.rho) != n) throw std::invalid_argument("singular monodromy matrix");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (sgn(e.rho.at(i, j)) != 0 &&
            spec.fiber_degrees[i] != spec.fiber_degrees[j])
          throw std::invalid_argument("monodromy matrix must preserve degrees");
    Block b{e.source, e.target};
    std::sort(b.begin(), b.end());
    if (b[0] == b[1]) throw std::invalid_argument("monodromy loop edge");
    auto& eis = s.images[e.alpha];
    std::set<std::string> used;
    for (auto& prev : eis)
      for (auto& v : prev.block) used.insert(v);
    if (used.count(b[0]) || used.count(b[1]))
      throw std::invalid_argument("two edges of one weight share a vertex");
    EdgeImage ei;
    ei.block = b;
    ei.monodromy_rho = e.rho;
    ei.monodromy_source = e.source;
    ei.image.space = s.block_space(b);
    ei.image.provenance = "monodromy";
    int ps = part_index(ei.image.space, e.source);
    int pt = part_index(ei.image.space, e.target);
    GradedElement alpha = weight_poly(spec.amb, e.alpha);
    for (std::size_t k = 0; k < n; ++k) {
      // column (1; rho) e_k and column (alpha; -alpha rho) e_k
      SpaceElement c1;
      c1.degree = spec.fiber_degrees[k];
      c1.terms.push_back({ps, (int)k, unit_mono(spec.amb), Rat(1)});
      SpaceElement rho_k;
      rho_k.degree = spec.fiber_degrees[k];
      for (std::size_t i = 0; i < n; ++i)
        if (sgn(e.rho.at(i, k)) != 0)
          rho_k.terms.push_back({pt, (int)i, unit_mono(spec.amb), e.rho.at(i, k)});
      for (auto& t : rho_k.terms) c1.terms.push_back(t);
      c1.normalize();
      ei.image.gens.push_back(c1);
      SpaceElement c2src;
      c2src.degree = spec.fiber_degrees[k];
      c2src.terms.push_back({ps, (int)k, unit_mono(spec.amb), Rat(1)});
      SpaceElement c2 = scale_element(alpha, c2src, ei.image.space);
      SpaceElement c2t = scale_element(alpha, rho_k, ei.image.space);
      for (auto& t : c2t.terms) {
        t.c = -t.c;
        c2.terms.push_back(t);
      }
      c2.normalize();
      ei.image.gens.push_back(c2);
    }
    eis.push_back(std::move(ei));
  }
  // partitions: blocks of size 2 per weight, singletons elsewhere
  for (auto& [w, eis] : s.images) {
    Partition p;
    std::set<std::string> used;
    for (auto& ei : eis) {
      p.push_back(ei.block);
      for (auto& v : ei.block) used.insert(v);
    }
    for (const std::string& v : s.graph.vertices)
      if (!used.count(v)) p.push_back({v});
    s.graph.partitions.emplace(w, std::move(p));
  }
  s.graph.sort_canonical();
  return s;
}

SheafModel from_bm(const BMSheafSpec& spec) {
  SheafModel s;
  s.stalks = spec.stalks;
  for (auto& [v, _] : spec.stalks) s.graph.vertices.push_back(v);
  if (spec.stalks.empty()) throw std::invalid_argument("empty BM spec");
  s.graph.rank = spec.stalks.begin()->second.amb.rank;
  s.graph.sort_canonical();
  for (const BMEdge& e : spec.edges) {
    const FreeModuleSpec& ms = spec.stalks.at(e.source);
    const FreeModuleSpec& mt = spec.stalks.at(e.target);
    if (e.rho_t.size() != mt.shifts.size())
      throw std::invalid_argument("rho_t row count mismatch");
    Block b{e.source, e.target};
    std::sort(b.begin(), b.end());
    EdgeImage ei;
    ei.block = b;
    ei.image.space = s.block_space(b);
    ei.image.provenance = "bm";
    int ps = part_index(ei.image.space, e.source);
    int pt = part_index(ei.image.space, e.target);
    GradedElement alpha = weight_poly(ms.amb, e.alpha);
    // generators (rho_t(g_j), g_j)
    for (std::size_t j = 0; j < mt.shifts.size(); ++j) {
      if (e.rho_t[j].size() != ms.shifts.size())
        throw std::invalid_argument("rho_t column count mismatch");
      SpaceElement g;
      g.degree = mt.shifts[j];
      g.terms.push_back({pt, (int)j, unit_mono(mt.amb), Rat(1)});
      for (std::size_t i = 0; i < ms.shifts.size(); ++i) {
        const GradedElement& c = e.rho_t[j][i];
        if (c.is_zero()) continue;
        if (c.degree + ms.shifts[i] != mt.shifts[j])
          throw std::invalid_argument("rho_t entry degree mismatch");
        for (auto& [m, cc] : c.terms) g.terms.push_back({ps, (int)i, m, cc});
      }
      g.normalize();
      ei.image.gens.push_back(std::move(g));
    }
    // generators (alpha g_i, 0)
    for (std::size_t i = 0; i < ms.shifts.size(); ++i) {
      SpaceElement g;
      g.degree = ms.shifts[i];
      g.terms.push_back({ps, (int)i, unit_mono(ms.amb), Rat(1)});
      ei.image.gens.push_back(scale_element(alpha, g, ei.image.space));
    }
    s.images[e.alpha].push_back(std::move(ei));
  }
  for (auto& [w, eis] : s.images) {
    Partition p;
    std::set<std::string> used;
    for (auto& ei : eis) {
      p.push_back(ei.block);
      for (auto& v : ei.block) used.insert(v);
    }
    for (const std::string& v : s.graph.vertices)
      if (!used.count(v)) p.push_back({v});
    s.graph.partitions.emplace(w, std::move(p));
  }
  s.graph.sort_canonical();
  return s;
}

namespace {

/// Closed-form sections for a 2-vertex model whose weights are pairwise
/// independent and share one monodromy matrix: pairs (a, rho(b)) with
/// a = b mod every weight, i.e. mod their product f. Free with generators
/// (g_k, rho g_k) and (0, f rho g_k).
bool crt_fast_path(const SheafModel& s, Submodule* out) {
  if (s.graph.vertices.size() != 2 || s.images.empty()) return false;
  const Matrix* rho = nullptr;
  std::string source;
  for (auto& [w, eis] : s.images) {
    if (eis.size() != 1 || eis[0].block.size() != 2 || !eis[0].monodromy_rho)
      return false;
    if (!rho) {
      rho = &*eis[0].monodromy_rho;
      source = eis[0].monodromy_source;
    } else if (!(*rho == *eis[0].monodromy_rho) || source != eis[0].monodromy_source) {
      return false;
    }
  }
  BlockSpace total = s.total_space();
  const FreeModuleSpec& fiber = total.parts[0].second;
  if (!(total.parts[1].second == fiber)) return false;
  const AmbientSpec& amb = fiber.amb;
  GradedElement f = GradedElement::one(amb);
  for (auto& [w, _] : s.images) f = multiply(f, weight_poly(amb, w));
  int ps = part_index(total, source);
  int pt = 1 - ps;
  Submodule m;
  m.space = total;
  m.provenance = "crt-monodromy";
  std::size_t n = fiber.shifts.size();
  for (std::size_t k = 0; k < n; ++k) {
    SpaceElement rho_k;
    rho_k.degree = fiber.shifts[k];
    for (std::size_t i = 0; i < n; ++i)
      if (sgn(rho->at(i, k)) != 0)
        rho_k.terms.push_back({pt, (int)i, unit_mono(amb), rho->at(i, k)});
    SpaceElement c1 = rho_k;
    c1.terms.push_back({ps, (int)k, unit_mono(amb), Rat(1)});
    c1.normalize();
    m.gens.push_back(std::move(c1));
    m.gens.push_back(scale_element(f, rho_k, total));
  }
  *out = std::move(m);
  return true;
}

} // namespace

Submodule global_sections(const SheafModel& s, int D) {
  BlockSpace total = s.total_space();
  {
    Submodule fast;
    if (crt_fast_path(s, &fast)) return fast;
  }
  std::vector<Submodule> per_weight;
  for (auto& [w, eis] : s.images) {
    Submodule sub;
    sub.space = total;
    sub.provenance = "weight " + w.str();
    std::set<std::string> covered;
    for (const EdgeImage& ei : eis) {
      for (const std::string& v : ei.block) covered.insert(v);
      for (const SpaceElement& g : ei.image.gens)
        sub.gens.push_back(remap(g, ei.image.space, total));
    }
    std::set<std::string> rest;
    for (auto& [v, _] : total.parts)
      if (!covered.count(v)) rest.insert(v);
    for (SpaceElement& g : full_stalk_gens(total, &rest)) sub.gens.push_back(g);
    per_weight.push_back(std::move(sub));
  }
  if (per_weight.empty()) {
    Submodule full;
    full.space = total;
    full.gens = full_stalk_gens(total);
    full.provenance = "free";
    return full;
  }
  std::vector<const Submodule*> ptrs;
  for (auto& m : per_weight) ptrs.push_back(&m);
  return intersect(ptrs, D);
}

std::optional<std::string> validate_stalk_action(const SheafModel& s,
                                                 const StalkAction& a) {
  if (auto bad = validate_action(s.graph, a.base)) return bad;
  if ((int)a.gen_maps.size() != a.base.size()) return "missing stalk matrices";
  for (int g = 0; g < a.base.size(); ++g) {
    for (const std::string& v : s.graph.vertices) {
      auto it = a.gen_maps[g].find(v);
      if (it == a.gen_maps[g].end()) return "no stalk matrix for " + v;
      const std::string& gv = a.base.vertex_perm[g].at(v);
      const auto& src = s.stalks.at(v).shifts;
      const auto& dst = s.stalks.at(gv).shifts;
      const Matrix& m = it->second;
      if (m.rows != dst.size() || m.cols != src.size())
        return "stalk matrix size mismatch at " + v;
      for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
          if (sgn(m.at(i, j)) != 0 && dst[i] != src[j])
            return "stalk matrix not degree-preserving at " + v;
    }
  }
  // composition with the group table
  for (int x = 0; x < a.base.size(); ++x)
    for (int y = 0; y < a.base.size(); ++y)
      for (const std::string& v : s.graph.vertices) {
        const std::string& yv = a.base.vertex_perm[y].at(v);
        Matrix lhs = a.gen_maps[x].at(yv).mul(a.gen_maps[y].at(v));
        if (!(lhs == a.gen_maps[a.base.mult[x][y]].at(v)))
          return "stalk matrices do not compose with the table";
      }
  // equivariance: each image maps into the image of the translated block
  for (auto& [w, eis] : s.images) {
    for (int g = 0; g < a.base.size(); ++g) {
      for (const EdgeImage& ei : eis) {
        Block tb;
        for (const std::string& v : ei.block) tb.push_back(a.base.vertex_perm[g].at(v));
        std::sort(tb.begin(), tb.end());
        const EdgeImage* target = nullptr;
        for (const EdgeImage& cand : eis)
          if (cand.block == tb) target = &cand;
        if (!target) {
          if (tb == ei.block) target = &ei;
          else return "image block orbit leaves the image list at " + w.str();
        }
        BlockSpace tspace = s.block_space(tb);
        for (const SpaceElement& gen : ei.image.gens) {
          SpaceElement img;
          img.degree = gen.degree;
          for (const STerm& t : gen.terms) {
            const std::string& v = ei.image.space.parts[t.part].first;
            const std::string& gv = a.base.vertex_perm[g].at(v);
            const Matrix& m = a.gen_maps[g].at(v);
            int tp = part_index(tspace, gv);
            for (std::size_t i = 0; i < m.rows; ++i)
              if (sgn(m.at(i, t.gen)) != 0)
                img.terms.push_back({tp, (int)i, t.m, t.c * m.at(i, t.gen)});
          }
          img.normalize();
          Matrix sl = degree_slice(target->image, img.degree);
          SliceTable tab = slice_table(tspace, img.degree);
          std::vector<Rat> dv = element_dense(img, tab);
          Matrix rhs(tab.dim, 1);
          for (std::size_t i = 0; i < tab.dim; ++i) rhs.at(i, 0) = dv[i];
          Matrix x;
          if (!solve(sl, rhs, &x))
            return "image not preserved by the action at " + w.str();
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

struct OrbitData {
  std::vector<std::string> members; // sorted
  std::vector<std::size_t> offsets; // generator offset per member
  std::size_t total = 0;
  Matrix projector; // averaging projector on the orbit generator space
  Matrix embed;     // columns: degree-layered basis of im(projector)
  std::vector<int> new_shifts;
};

OrbitData orbit_data(const SheafModel& s, const StalkAction& a,
                     const std::vector<int>& chi,
                     const std::vector<std::string>& members) {
  OrbitData o;
  o.members = members;
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < members.size(); ++i) pos[members[i]] = i;
  for (const std::string& v : members) {
    o.offsets.push_back(o.total);
    o.total += s.stalks.at(v).shifts.size();
  }
  Matrix p(o.total, o.total);
  Rat inv(1, a.base.size());
  for (int g = 0; g < a.base.size(); ++g) {
    Rat c = inv * chi[g];
    for (std::size_t vi = 0; vi < members.size(); ++vi) {
      const std::string& v = members[vi];
      const std::string& gv = a.base.vertex_perm[g].at(v);
      const Matrix& m = a.gen_maps[g].at(v);
      std::size_t ro = o.offsets[pos.at(gv)], co = o.offsets[vi];
      for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
          p.at(ro + i, co + j) += c * m.at(i, j);
    }
  }
  o.projector = p;
  // degree layers
  std::vector<int> shift_of(o.total);
  {
    std::size_t k = 0;
    for (const std::string& v : members)
      for (int d : s.stalks.at(v).shifts) shift_of[k++] = d;
  }
  std::set<int> layers(shift_of.begin(), shift_of.end());
  std::vector<std::vector<Rat>> cols;
  for (int d : layers) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < o.total; ++i)
      if (shift_of[i] == d) idx.push_back(i);
    Matrix sub(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        sub.at(i, j) = p.at(idx[i], idx[j]);
    Matrix basis = column_space_basis(sub);
    for (std::size_t j = 0; j < basis.cols; ++j) {
      std::vector<Rat> col(o.total);
      for (std::size_t i = 0; i < idx.size(); ++i) col[idx[i]] = basis.at(i, j);
      cols.push_back(std::move(col));
      o.new_shifts.push_back(d);
    }
  }
  o.embed = Matrix(o.total, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < o.total; ++i) o.embed.at(i, j) = cols[j][i];
  return o;
}

} // namespace

SheafModel isotypical_pushforward(const SheafModel& s, const StalkAction& a,
                                  const std::vector<int>& chi) {
  if ((int)chi.size() != a.base.size())
    throw std::invalid_argument("character length mismatch");
  for (int c : chi)
    if (c != 1 && c != -1) throw std::invalid_argument("character values must be +-1");
  if (chi[0] != 1) throw std::invalid_argument("character must send identity to 1");
  if (auto bad = validate_stalk_action(s, a))
    throw std::invalid_argument("invalid stalk action: " + *bad);
  auto [qgraph, pi] = quotient(s.graph, a.base);
  SheafModel out;
  out.graph = qgraph;
  // orbits keyed by quotient label
  std::map<std::string, OrbitData> orbits;
  for (const std::string& v : s.graph.vertices) {
    std::string o = pi.vertex_map.at(v);
    orbits[o].members.push_back(v);
  }
  for (auto& [o, od] : orbits) {
    std::sort(od.members.begin(), od.members.end());
    od = orbit_data(s, a, chi, od.members);
    FreeModuleSpec fm;
    fm.amb = s.stalks.at(od.members[0]).amb;
    fm.shifts = od.new_shifts;
    out.stalks[o] = fm;
  }
  // rewrite helper: element over a list of original vertices -> quotient coords
  auto rewrite = [&](const SpaceElement& e, const BlockSpace& src,
                     const BlockSpace& dst) {
    // apply the projector orbit-wise, then solve against the embeddings
    std::map<std::pair<std::string, Mono>, std::vector<Rat>,
             bool (*)(const std::pair<std::string, Mono>&,
                      const std::pair<std::string, Mono>&)>
        buckets(+[](const std::pair<std::string, Mono>& x,
                    const std::pair<std::string, Mono>& y) {
          if (x.first != y.first) return x.first < y.first;
          return mono_less(x.second, y.second);
        });
    for (const STerm& t : e.terms) {
      const std::string& v = src.parts[t.part].first;
      const std::string& o = pi.vertex_map.at(v);
      const OrbitData& od = orbits.at(o);
      std::size_t base = 0;
      for (std::size_t i = 0; i < od.members.size(); ++i)
        if (od.members[i] == v) base = od.offsets[i];
      auto& vec = buckets[{o, t.m}];
      if (vec.empty()) vec.assign(od.total, Rat(0));
      // projector column for (v, gen)
      for (std::size_t i = 0; i < od.total; ++i)
        vec[i] += t.c * od.projector.at(i, base + t.gen);
    }
    SpaceElement outl;
    outl.degree = e.degree;
    for (auto& [key, vec] : buckets) {
      const OrbitData& od = orbits.at(key.first);
      Matrix rhs(od.total, 1);
      for (std::size_t i = 0; i < od.total; ++i) rhs.at(i, 0) = vec[i];
      Matrix x;
      if (!solve(od.embed, rhs, &x))
        throw std::logic_error("projected element outside the isotypical image");
      int p = part_index(dst, key.first);
      for (std::size_t k = 0; k < od.new_shifts.size(); ++k)
        if (sgn(x.at(k, 0)) != 0) outl.terms.push_back({p, (int)k, key.second, x.at(k, 0)});
    }
    outl.normalize();
    return outl;
  };
  // images per original weight, grouped by quotient block
  for (auto& [w, eis] : s.images) {
    std::map<Block, std::vector<const EdgeImage*>> grouped;
    for (const EdgeImage& ei : eis) {
      std::set<Block::value_type> qb;
      for (const std::string& v : ei.block) qb.insert(pi.vertex_map.at(v));
      grouped[Block(qb.begin(), qb.end())].push_back(&ei);
    }
    std::vector<EdgeImage> qeis;
    for (auto& [qb, srcs] : grouped) {
      // full preimage vertex set of the quotient block
      std::set<std::string> pre;
      for (const std::string& v : s.graph.vertices)
        if (std::find(qb.begin(), qb.end(), pi.vertex_map.at(v)) != qb.end())
          pre.insert(v);
      BlockSpace src;
      for (const std::string& v : pre) src.parts.emplace_back(v, s.stalks.at(v));
      EdgeImage qe;
      qe.block = qb;
      qe.image.space = out.block_space(qb);
      qe.image.provenance = "pushforward";
      std::set<std::string> covered;
      for (const EdgeImage* ei : srcs) {
        for (const std::string& v : ei->block) covered.insert(v);
        for (const SpaceElement& g : ei->image.gens) {
          SpaceElement lifted = remap(g, ei->image.space, src);
          SpaceElement q = rewrite(lifted, src, qe.image.space);
          if (!q.is_zero()) qe.image.gens.push_back(std::move(q));
        }
      }
      std::set<std::string> rest;
      for (const std::string& v : pre)
        if (!covered.count(v)) rest.insert(v);
      for (const SpaceElement& g : full_stalk_gens(src, &rest)) {
        SpaceElement q = rewrite(g, src, qe.image.space);
        if (!q.is_zero()) qe.image.gens.push_back(std::move(q));
      }
      qeis.push_back(std::move(qe));
    }
    if (!qeis.empty()) out.images.emplace(w, std::move(qeis));
  }
  // re-add partitions for weights whose quotient partition became discrete
  for (auto& [w, qeis] : out.images) {
    if (out.graph.partitions.count(w)) continue;
    Partition p;
    std::set<std::string> used;
    for (auto& ei : qeis) {
      p.push_back(ei.block);
      for (auto& v : ei.block) used.insert(v);
    }
    for (const std::string& v : out.graph.vertices)
      if (!used.count(v)) p.push_back({v});
    out.graph.partitions.emplace(w, std::move(p));
  }
  out.graph.sort_canonical();
  return out;
}

namespace {

SpaceElement tensor_elements(const SpaceElement& e1, const BlockSpace& s1,
                             const SpaceElement& e2, const BlockSpace& s2,
                             const SheafModel& prod, const BlockSpace& dst) {
  SpaceElement out;
  out.degree = e1.degree + e2.degree;
  for (const STerm& t1 : e1.terms) {
    const std::string& v1 = s1.parts[t1.part].first;
    const AmbientSpec& a1 = s1.parts[t1.part].second.amb;
    for (const STerm& t2 : e2.terms) {
      const std::string& v2 = s2.parts[t2.part].first;
      std::string pv = product_vertex_id(v1, v2);
      int p = part_index(dst, pv);
      std::size_t n2 = s2.parts[t2.part].second.shifts.size();
      STerm t;
      t.part = p;
      t.gen = t1.gen * (int)n2 + t2.gen;
      t.m.ext = t1.m.ext;
      t.m.ext.insert(t.m.ext.end(), t2.m.ext.begin(), t2.m.ext.end());
      t.m.exp.resize(a1.rank);
      for (int i = 0; i < a1.rank; ++i) t.m.exp[i] = t1.m.exp[i] + t2.m.exp[i];
      t.c = t1.c * t2.c;
      (void)prod;
      out.terms.push_back(std::move(t));
    }
  }
  out.normalize();
  return out;
}

/// The image submodule at (w, block b) if listed, else the full block sum.
Submodule image_or_full(const SheafModel& s, const Weight& w, const Block& b) {
  auto it = s.images.find(w);
  if (it != s.images.end())
    for (const EdgeImage& ei : it->second)
      if (ei.block == b) return ei.image;
  Submodule full;
  full.space = s.block_space(b);
  full.gens = full_stalk_gens(full.space);
  full.provenance = "free";
  return full;
}

bool has_image(const SheafModel& s, const Weight& w, const Block& b) {
  auto it = s.images.find(w);
  if (it == s.images.end()) return false;
  for (const EdgeImage& ei : it->second)
    if (ei.block == b) return true;
  return false;
}

Partition partition_or_discrete(const GkmHypergraph& h, const Weight& w) {
  auto it = h.partitions.find(w);
  if (it != h.partitions.end()) return it->second;
  Partition p;
  for (const std::string& v : h.vertices) p.push_back({v});
  return p;
}

} // namespace

SheafModel exterior_product(const SheafModel& s1, const SheafModel& s2) {
  if (s1.graph.rank != s2.graph.rank)
    throw std::invalid_argument("exterior product: rank mismatch");
  SheafModel out;
  out.graph = product(s1.graph, s2.graph);
  for (const std::string& v1 : s1.graph.vertices)
    for (const std::string& v2 : s2.graph.vertices) {
      const FreeModuleSpec& f1 = s1.stalks.at(v1);
      const FreeModuleSpec& f2 = s2.stalks.at(v2);
      if (f1.amb.rank != f2.amb.rank)
        throw std::invalid_argument("exterior product: stalk rank mismatch");
      FreeModuleSpec fm;
      fm.amb = AmbientSpec(f1.amb.rank, f1.amb.g + f2.amb.g, f1.amb.labels);
      fm.shifts.clear();
      for (int d1 : f1.shifts)
        for (int d2 : f2.shifts) fm.shifts.push_back(d1 + d2);
      out.stalks[product_vertex_id(v1, v2)] = fm;
    }
  std::set<Weight> support;
  for (auto& [w, _] : s1.images) support.insert(w);
  for (auto& [w, _] : s2.images) support.insert(w);
  for (const Weight& w : support) {
    std::vector<EdgeImage> eis;
    for (const Block& b1 : partition_or_discrete(s1.graph, w))
      for (const Block& b2 : partition_or_discrete(s2.graph, w)) {
        if (!has_image(s1, w, b1) && !has_image(s2, w, b2)) continue;
        Submodule m1 = image_or_full(s1, w, b1);
        Submodule m2 = image_or_full(s2, w, b2);
        EdgeImage ei;
        for (const std::string& a : b1)
          for (const std::string& c : b2) ei.block.push_back(product_vertex_id(a, c));
        std::sort(ei.block.begin(), ei.block.end());
        ei.image.space = out.block_space(ei.block);
        ei.image.provenance = "tensor";
        for (const SpaceElement& g1 : m1.gens)
          for (const SpaceElement& g2 : m2.gens)
            ei.image.gens.push_back(
                tensor_elements(g1, m1.space, g2, m2.space, out, ei.image.space));
        eis.push_back(std::move(ei));
      }
    if (!eis.empty()) out.images.emplace(w, std::move(eis));
  }
  // ensure every image weight has a partition (union support case)
  for (auto& [w, eis] : out.images) {
    if (out.graph.partitions.count(w)) continue;
    Partition p;
    std::set<std::string> used;
    for (auto& ei : eis) {
      p.push_back(ei.block);
      for (auto& v : ei.block) used.insert(v);
    }
    for (const std::string& v : out.graph.vertices)
      if (!used.count(v)) p.push_back({v});
    out.graph.partitions.emplace(w, std::move(p));
  }
  out.graph.sort_canonical();
  return out;
}

SheafModel convolution(const SheafModel& s1, const SheafModel& s2,
                       const StalkAction& a1, const StalkAction& a2,
                       const std::string& base_vertex) {
  if (!(s1.graph.vertices == s2.graph.vertices))
    throw std::invalid_argument("convolution: sheaves over different graphs");
  if (a1.base.element_names != a2.base.element_names || a1.base.mult != a2.base.mult)
    throw std::invalid_argument("convolution: actions of different groups");
  const FiniteAction& G = a1.base;
  int n = G.size();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (G.mult[x][y] != G.mult[y][x])
        throw std::invalid_argument("convolution: group must be abelian");
  if ((int)s1.graph.vertices.size() != n)
    throw std::invalid_argument("convolution: action must be free and transitive");
  std::string base = base_vertex.empty() ? s1.graph.vertices.front() : base_vertex;
  // identify vertices with group elements through the base vertex
  std::map<std::string, int> elem_of;
  for (int g = 0; g < n; ++g) {
    const std::string& v = G.vertex_perm[g].at(base);
    if (!elem_of.emplace(v, g).second)
      throw std::invalid_argument("convolution: action is not free");
  }
  if ((int)elem_of.size() != n)
    throw std::invalid_argument("convolution: action is not transitive");
  // antidiagonal action on the product with tensored stalk matrices
  SheafModel prod = exterior_product(s1, s2);
  StalkAction act;
  act.base = antidiagonal_action(s1.graph, G);
  act.gen_maps.resize(n);
  for (int g = 0; g < n; ++g) {
    int ginv = G.inverse(g);
    for (const std::string& v : s1.graph.vertices)
      for (const std::string& w : s1.graph.vertices) {
        const Matrix& m1 = a1.gen_maps[g].at(v);
        const Matrix& m2 = a2.gen_maps[ginv].at(w);
        Matrix t(m1.rows * m2.rows, m1.cols * m2.cols);
        for (std::size_t i1 = 0; i1 < m1.rows; ++i1)
          for (std::size_t j1 = 0; j1 < m1.cols; ++j1)
            for (std::size_t i2 = 0; i2 < m2.rows; ++i2)
              for (std::size_t j2 = 0; j2 < m2.cols; ++j2)
                t.at(i1 * m2.rows + i2, j1 * m2.cols + j2) =
                    m1.at(i1, j1) * m2.at(i2, j2);
        act.gen_maps[g][product_vertex_id(v, w)] = t;
      }
  }
  std::vector<int> trivial(n, 1);
  SheafModel push = isotypical_pushforward(prod, act, trivial);
  // relabel orbit vertices back to the original graph: orbit of (v, w) with
  // v = a.base, w = b.base goes to (ab).base
  std::map<std::string, std::string> rename;
  for (const std::string& v : s1.graph.vertices)
    for (const std::string& w : s1.graph.vertices) {
      std::string pv = product_vertex_id(v, w);
      // quotient label of pv
      std::string least = pv;
      for (int g = 0; g < n; ++g)
        least = std::min(least, act.base.vertex_perm[g].at(pv));
      rename[least] =
          G.vertex_perm[G.mult[elem_of.at(v)][elem_of.at(w)]].at(base);
    }
  SheafModel out;
  out.graph.rank = push.graph.rank;
  for (const std::string& v : push.graph.vertices)
    out.graph.vertices.push_back(rename.at(v));
  for (auto& [w, p] : push.graph.partitions) {
    Partition np;
    for (const Block& b : p) {
      Block nb;
      for (const std::string& v : b) nb.push_back(rename.at(v));
      np.push_back(std::move(nb));
    }
    out.graph.partitions.emplace(w, std::move(np));
  }
  for (auto& [v, fm] : push.stalks) out.stalks[rename.at(v)] = fm;
  for (auto& [w, eis] : push.images) {
    std::vector<EdgeImage> neis;
    for (const EdgeImage& ei : eis) {
      EdgeImage ne;
      for (const std::string& v : ei.block) ne.block.push_back(rename.at(v));
      std::sort(ne.block.begin(), ne.block.end());
      ne.image.space = ei.image.space;
      for (auto& part : ne.image.space.parts) part.first = rename.at(part.first);
      // parts must stay sorted for block_space consistency
      std::vector<int> order(ne.image.space.parts.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
      std::sort(order.begin(), order.end(), [&](int x, int y) {
        return ne.image.space.parts[x].first < ne.image.space.parts[y].first;
      });
      std::vector<int> inv(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) inv[order[i]] = (int)i;
      BlockSpace sorted;
      for (int i : order) sorted.parts.push_back(ne.image.space.parts[i]);
      ne.image.space = sorted;
      ne.image.provenance = "convolution";
      for (const SpaceElement& g : ei.image.gens) {
        SpaceElement ng = g;
        for (STerm& t : ng.terms) t.part = inv[t.part];
        ng.normalize();
        ne.image.gens.push_back(std::move(ng));
      }
      neis.push_back(std::move(ne));
    }
    out.images.emplace(w, std::move(neis));
  }
  out.graph.sort_canonical();
  return out;
}

} // namespace gkm
