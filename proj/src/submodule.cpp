#include "gkm/submodule.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <thread>

namespace gkm {

int BlockSpace::rank() const {
  if (parts.empty()) throw std::invalid_argument("empty block space");
  int r = parts[0].second.amb.rank;
  for (auto& [_, fm] : parts)
    if (fm.amb.rank != r) throw std::invalid_argument("mixed ranks in block space");
  return r;
}

bool BlockSpace::operator==(const BlockSpace& o) const {
  if (parts.size() != o.parts.size()) return false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].first != o.parts[i].first) return false;
    if (!(parts[i].second == o.parts[i].second)) return false;
  }
  return true;
}

BlockSpace BlockSpace::single(const AmbientSpec& amb) {
  BlockSpace s;
  s.parts.emplace_back("", FreeModuleSpec{amb, {0}});
  return s;
}

void SpaceElement::normalize() {
  auto key_less = [](const STerm& a, const STerm& b) {
    if (a.part != b.part) return a.part < b.part;
    if (a.gen != b.gen) return a.gen < b.gen;
    return mono_less(a.m, b.m);
  };
  std::sort(terms.begin(), terms.end(), key_less);
  std::vector<STerm> out;
  for (auto& t : terms) {
    if (!out.empty() && out.back().part == t.part && out.back().gen == t.gen &&
        out.back().m == t.m) {
      out.back().c += t.c;
    } else {
      out.push_back(t);
    }
  }
  terms.clear();
  for (auto& t : out)
    if (sgn(t.c) != 0) terms.push_back(std::move(t));
}

std::size_t SliceTable::find(int part, int gen, const Mono& m) const {
  for (const Seg& s : segs)
    if (s.part == part && s.gen == gen) return s.offset + s.tab->find(m);
  throw std::invalid_argument("slice table: no such (part, gen)");
}

void SliceTable::locate(std::size_t i, int* part, int* gen, Mono* m) const {
  for (const Seg& s : segs) {
    if (i < s.offset + s.tab->dim()) {
      *part = s.part;
      *gen = s.gen;
      *m = s.tab->monos[i - s.offset];
      return;
    }
  }
  throw std::invalid_argument("slice table: index out of range");
}

SliceTable slice_table(const BlockSpace& space, int d) {
  SliceTable t;
  t.degree = d;
  std::size_t off = 0;
  for (std::size_t p = 0; p < space.parts.size(); ++p) {
    const FreeModuleSpec& fm = space.parts[p].second;
    for (std::size_t gidx = 0; gidx < fm.shifts.size(); ++gidx) {
      int dd = d - fm.shifts[gidx];
      if (dd < 0) continue;
      auto tab = monomial_table(fm.amb, dd);
      if (tab->dim() == 0) continue;
      t.segs.push_back({(int)p, (int)gidx, tab, off});
      off += tab->dim();
    }
  }
  t.dim = off;
  return t;
}

std::vector<Rat> element_dense(const SpaceElement& e, const SliceTable& t) {
  std::vector<Rat> v(t.dim);
  for (const STerm& term : e.terms) v[t.find(term.part, term.gen, term.m)] += term.c;
  return v;
}

SpaceElement element_from_dense(const BlockSpace&, const SliceTable& t,
                                const std::vector<Rat>& coords) {
  if (coords.size() != t.dim)
    throw std::invalid_argument("element_from_dense: length mismatch");
  SpaceElement e;
  e.degree = t.degree;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (sgn(coords[i]) == 0) continue;
    STerm term;
    term.c = coords[i];
    t.locate(i, &term.part, &term.gen, &term.m);
    e.terms.push_back(std::move(term));
  }
  return e;
}

Matrix slice_span(const Submodule& m, int d) {
  SliceTable t = slice_table(m.space, d);
  int r = m.space.rank();
  std::vector<std::vector<Rat>> cols;
  for (const SpaceElement& g : m.gens) {
    int gap = d - g.degree;
    if (gap < 0 || gap % 2) continue;
    for (auto& p : sym_monomials(r, gap / 2)) {
      std::vector<Rat> col(t.dim);
      for (const STerm& term : g.terms) {
        Mono mm = term.m;
        for (int i = 0; i < r; ++i) mm.exp[i] += p[i];
        col[t.find(term.part, term.gen, mm)] += term.c;
      }
      cols.push_back(std::move(col));
    }
  }
  Matrix out(t.dim, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < t.dim; ++i) out.at(i, j) = std::move(cols[j][i]);
  return out;
}

Matrix degree_slice(const Submodule& m, int d) {
  return column_space_basis(slice_span(m, d));
}

HilbertData hilbert_from_dims(const std::vector<long long>& dims, int rank, int D,
                              int window) {
  if ((int)dims.size() < D + 1)
    throw std::invalid_argument("hilbert_from_dims: need dims through D");
  // binomial(rank, j) with sign
  std::vector<long long> binom(rank + 1);
  binom[0] = 1;
  for (int k = 1; k <= rank; ++k) binom[k] = binom[k - 1] * (rank - k + 1) / k;
  HilbertData h;
  h.D = D;
  h.window = window;
  h.coeffs.assign(D + 1, 0);
  for (int d = 0; d <= D; ++d) {
    long long c = 0;
    for (int j = 0; j <= rank && 2 * j <= d; ++j)
      c += (j % 2 ? -1 : 1) * binom[j] * dims[d - 2 * j];
    h.coeffs[d] = c;
  }
  h.stable = D + 1 >= window;
  for (int d = D - window + 1; d <= D && h.stable; ++d)
    if (d < 0 || h.coeffs[d] != 0) h.stable = false;
  return h;
}

HilbertData hilbert_numerator(const Submodule& m, int D, int window) {
  std::vector<long long> dims(D + 1, 0);
  parallel_for(D + 1, [&](int d) { dims[d] = (long long)rank(slice_span(m, d)); });
  return hilbert_from_dims(dims, m.space.rank(), D, window);
}

namespace {

// leading positions of the canonical (row-)reduced basis of a span of columns
std::set<std::size_t> lead_positions(const Matrix& columns) {
  RrefResult r = rref(columns.transpose());
  return {r.pivots.begin(), r.pivots.end()};
}

} // namespace

std::vector<std::pair<int, SpaceElement>> minimal_generators_from_slices(
    const BlockSpace& space, const std::vector<Matrix>& slices) {
  Submodule partial;
  partial.space = space;
  std::vector<std::pair<int, SpaceElement>> out;
  for (int d = 0; d < (int)slices.size(); ++d) {
    const Matrix& v = slices[d];
    if (v.cols == 0) continue;
    std::set<std::size_t> have = lead_positions(slice_span(partial, d));
    RrefResult rv = rref(v.transpose());
    SliceTable t = slice_table(space, d);
    for (std::size_t row = 0; row < rv.rank; ++row) {
      if (have.count(rv.pivots[row])) continue;
      std::vector<Rat> coords(t.dim);
      for (std::size_t j = 0; j < t.dim; ++j) coords[j] = rv.m.at(row, j);
      SpaceElement e = element_from_dense(space, t, coords);
      out.emplace_back(d, e);
      partial.gens.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<std::pair<int, SpaceElement>> minimal_generators(const Submodule& m,
                                                             int D) {
  std::vector<Matrix> slices(D + 1);
  parallel_for(D + 1, [&](int d) { slices[d] = degree_slice(m, d); });
  return minimal_generators_from_slices(m.space, slices);
}

Submodule intersect(const std::vector<const Submodule*>& ms, int D) {
  if (ms.empty()) throw std::invalid_argument("intersect: empty list");
  const BlockSpace& space = ms[0]->space;
  for (const Submodule* m : ms)
    if (!(m->space == space)) throw std::invalid_argument("intersect: ambient mismatch");
  std::vector<Matrix> slices(D + 1);
  parallel_for(D + 1, [&](int d) {
    Matrix cur = degree_slice(*ms[0], d);
    for (std::size_t i = 1; i < ms.size() && cur.cols > 0; ++i)
      cur = intersect_column_spaces(cur, degree_slice(*ms[i], d));
    slices[d] = column_space_basis(cur);
  });
  Submodule out;
  out.space = space;
  out.provenance = "intersection";
  for (auto& [d, e] : minimal_generators_from_slices(space, slices))
    out.gens.push_back(e);
  return out;
}

FreenessCertificate certify_free(const Submodule& m, int D, int window) {
  std::vector<Matrix> slices(D + 1);
  parallel_for(D + 1, [&](int d) { slices[d] = degree_slice(m, d); });
  return certify_free_slices(m.space, slices, window);
}

FreenessCertificate certify_free_slices(const BlockSpace& space,
                                        const std::vector<Matrix>& slices,
                                        int window) {
  int D = (int)slices.size() - 1;
  auto gens = minimal_generators_from_slices(space, slices);
  std::vector<long long> dims(D + 1);
  for (int d = 0; d <= D; ++d) dims[d] = (long long)slices[d].cols;
  int r = space.rank();
  auto dim_base = [r](int e) { return e % 2 ? 0ll : sym_monomial_count(r, e / 2); };

  FreenessCertificate cert;
  cert.D = D;
  for (auto& [d, _] : gens) cert.generator_degrees.push_back(d);
  HilbertData h = hilbert_from_dims(dims, r, D, window);
  for (int d = 0; d <= D; ++d) {
    if (h.coeffs[d] < 0) {
      cert.verdict = FreenessCertificate::Verdict::NotFree;
      cert.witness_degree = d;
      cert.reason = "negative numerator coefficient at t^" + std::to_string(d);
      return cert;
    }
  }
  for (int d = 0; d <= D; ++d) {
    long long expect = 0;
    for (int gd : cert.generator_degrees) expect += dim_base(d - gd >= 0 ? d - gd : -1);
    if (dims[d] < expect) {
      cert.verdict = FreenessCertificate::Verdict::NotFree;
      cert.witness_degree = d;
      cert.reason = "slice dimension deficit at degree " + std::to_string(d);
      return cert;
    }
  }
  if (!h.stable) {
    cert.verdict = FreenessCertificate::Verdict::Inconclusive;
    cert.reason = "no trailing-zero stability window at D";
    return cert;
  }
  cert.verdict = FreenessCertificate::Verdict::Free;
  return cert;
}

FreenessCertificate certify_from_dims(const std::vector<long long>& dims,
                                      const std::function<long long(int)>& dim_base,
                                      int D, int window) {
  FreenessCertificate cert;
  cert.D = D;
  std::vector<long long> covered(D + 1, 0);
  for (int d = 0; d <= D; ++d) {
    long long expect = 0;
    for (int gd : cert.generator_degrees)
      expect += d - gd >= 0 ? dim_base(d - gd) : 0;
    if (dims[d] < expect) {
      cert.verdict = FreenessCertificate::Verdict::NotFree;
      cert.witness_degree = d;
      cert.reason = "slice dimension deficit at degree " + std::to_string(d);
      return cert;
    }
    for (long long k = 0; k < dims[d] - expect; ++k)
      cert.generator_degrees.push_back(d);
  }
  bool stable = true;
  for (int d = D - window + 1; d <= D; ++d)
    if (d < 0 || (!cert.generator_degrees.empty() &&
                  std::count(cert.generator_degrees.begin(),
                             cert.generator_degrees.end(), d) > 0))
      stable = false;
  if (!stable) {
    cert.verdict = FreenessCertificate::Verdict::Inconclusive;
    cert.reason = "no trailing-zero stability window at D";
    return cert;
  }
  cert.verdict = FreenessCertificate::Verdict::Free;
  return cert;
}

Submodule proj_top(const Submodule& m) {
  for (auto& [_, fm] : m.space.parts)
    if (fm.amb.g != 1)
      throw std::invalid_argument("proj_top requires g = 1 ambients");
  std::uint32_t full = 0;
  int r = m.space.rank();
  for (int i = 0; i < r; ++i) full |= 1u << i;
  Submodule out;
  BlockSpace sp;
  for (auto& [name, fm] : m.space.parts) {
    FreeModuleSpec nf;
    nf.amb = AmbientSpec(fm.amb.rank, 0, fm.amb.labels);
    nf.shifts = fm.shifts;
    sp.parts.emplace_back(name, nf);
  }
  out.space = sp;
  out.provenance = "proj_top(" + m.provenance + ")";
  for (const SpaceElement& g : m.gens) {
    SpaceElement e;
    e.degree = g.degree - r;
    for (const STerm& t : g.terms) {
      if (t.m.ext[0] != full) continue;
      STerm nt = t;
      nt.m.ext.clear();
      e.terms.push_back(std::move(nt));
    }
    e.normalize();
    if (!e.is_zero()) out.gens.push_back(std::move(e));
  }
  return out;
}

bool divide_exact(const GradedElement& p, const GradedElement& d, GradedElement* q) {
  if (p.spec.g != 0 || d.spec.g != 0)
    throw std::invalid_argument("divide_exact expects polynomial elements");
  if (p.is_zero()) {
    if (q) *q = GradedElement::one(p.spec).scaled(Rat(0));
    if (q) q->degree = 0;
    return true;
  }
  int qdeg = p.degree - d.degree;
  if (qdeg < 0 || qdeg % 2) return false;
  auto qt = monomial_table(p.spec, qdeg);
  auto pt = monomial_table(p.spec, p.degree);
  Matrix mult(pt->dim(), qt->dim());
  for (std::size_t j = 0; j < qt->dim(); ++j) {
    for (const auto& [dm, dc] : d.terms) {
      Mono mm = qt->monos[j];
      for (std::size_t i = 0; i < mm.exp.size(); ++i) mm.exp[i] += dm.exp[i];
      mult.at(pt->find(mm), j) += dc;
    }
  }
  Matrix rhs(pt->dim(), 1);
  for (const auto& [pm, pc] : p.terms) rhs.at(pt->find(pm), 0) = pc;
  Matrix sol;
  if (!solve(mult, rhs, &sol)) return false;
  if (q) {
    std::vector<Rat> coords(qt->dim());
    for (std::size_t i = 0; i < qt->dim(); ++i) coords[i] = sol.at(i, 0);
    *q = GradedElement::from_dense(p.spec, qdeg, coords);
  }
  return true;
}

DualityReport duality_pairing_check(const Submodule& m, const GradedElement& d_poly,
                                    int D) {
  if (m.space.parts.size() != 1 || m.space.parts[0].second.amb.g != 1)
    throw std::invalid_argument("duality pairing: single-part g = 1 case only");
  const AmbientSpec& amb = m.space.parts[0].second.amb;
  int r = amb.rank;
  auto gens = minimal_generators(m, D);
  std::size_t n = gens.size();
  if (n != (std::size_t)(1u << r))
    throw std::invalid_argument("duality pairing: expected 2^r minimal generators");
  // generators already sorted by (degree, canonical coordinate order)
  auto as_element = [&](const SpaceElement& e) {
    GradedElement x;
    x.spec = amb;
    x.degree = e.degree;
    for (const STerm& t : e.terms) x.add_term(t.m, t.c);
    return x;
  };
  AmbientSpec poly(r, 0, amb.labels);
  std::uint32_t full = (1u << r) - 1;
  DualityReport rep;
  rep.top_degree = d_poly.degree + r;
  rep.pairing = Matrix(n, n);
  rep.containment = true;
  Matrix consts(n, n); // full scalar-extension pairing
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      GradedElement prod = multiply(as_element(gens[i].second), as_element(gens[j].second));
      // top-exterior coefficient polynomial
      GradedElement top;
      top.spec = poly;
      top.degree = prod.degree - r;
      bool any = false;
      for (const auto& [mm, c] : prod.terms) {
        if (mm.ext[0] != full) continue;
        Mono pm;
        pm.exp = mm.exp;
        top.add_term(pm, c);
        any = true;
      }
      if (!any || top.is_zero()) continue;
      GradedElement quot;
      if (!divide_exact(top, d_poly, &quot)) {
        rep.containment = false;
        continue;
      }
      if (quot.degree == 0 && !quot.is_zero()) consts.at(i, j) = quot.terms.begin()->second;
    }
  }
  // pairing in the duality order: column j pairs generator n-1-j
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rep.pairing.at(i, j) = consts.at(i, n - 1 - j);
  rep.unipotent = true;
  for (std::size_t i = 0; i < n && rep.unipotent; ++i) {
    if (sgn(rep.pairing.at(i, i)) == 0) rep.unipotent = false;
    for (std::size_t j = 0; j < i; ++j)
      if (sgn(rep.pairing.at(i, j)) != 0) rep.unipotent = false;
  }
  rep.nondegenerate = rank(consts) == n;
  return rep;
}

int worker_count() {
  if (const char* env = std::getenv("GKM_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? (int)hc : 1;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  int w = std::min(worker_count(), n);
  if (w <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

} // namespace gkm
