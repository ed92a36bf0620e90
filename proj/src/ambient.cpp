#include "gkm/ambient.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace gkm {

AmbientSpec::AmbientSpec(int r, int g_, std::vector<std::string> lab)
    : rank(r), g(g_), labels(std::move(lab)) {
  if (r < 1) throw std::invalid_argument("ambient rank must be >= 1");
  if (g_ < 0) throw std::invalid_argument("ambient g must be >= 0");
  if (labels.empty())
    for (int i = 1; i <= r; ++i) labels.push_back("x" + std::to_string(i));
  if ((int)labels.size() != r)
    throw std::invalid_argument("label count must equal rank");
}

int Mono::degree() const {
  int d = 0;
  for (std::uint32_t s : ext) d += __builtin_popcount(s);
  for (std::int32_t e : exp) d += 2 * e;
  return d;
}

namespace {

// lexicographic comparison of bitmask subsets as sorted index lists
int cmp_subset(std::uint32_t a, std::uint32_t b) {
  while (a || b) {
    if (!a) return -1; // prefix is smaller
    if (!b) return 1;
    int ia = __builtin_ctz(a), ib = __builtin_ctz(b);
    if (ia != ib) return ia < ib ? -1 : 1;
    a &= a - 1;
    b &= b - 1;
  }
  return 0;
}

int cmp_mono(const Mono& a, const Mono& b) {
  for (std::size_t i = 0; i < a.ext.size(); ++i) {
    int c = cmp_subset(a.ext[i], b.ext[i]);
    if (c) return c;
  }
  // x1-dominant lex: larger exponent on the earliest variable comes first
  for (std::size_t i = 0; i < a.exp.size(); ++i)
    if (a.exp[i] != b.exp[i]) return a.exp[i] > b.exp[i] ? -1 : 1;
  return 0;
}

} // namespace

bool mono_less(const Mono& a, const Mono& b) { return cmp_mono(a, b) < 0; }

std::size_t MonoHash::operator()(const Mono& m) const {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (std::uint32_t s : m.ext) h = h * 1099511628211ull ^ s;
  for (std::int32_t e : m.exp) h = h * 1099511628211ull ^ (std::size_t)(e + 7);
  return h;
}

std::size_t MonomialTable::find(const Mono& m) const {
  auto it = index.find(m);
  if (it == index.end()) throw std::invalid_argument("monomial not in table");
  return it->second;
}

long long sym_monomial_count(int r, int q) {
  if (q < 0) return 0;
  // binomial(q + r - 1, r - 1)
  long long n = 1;
  for (int i = 1; i <= r - 1; ++i) n = n * (q + i) / i;
  return n;
}

std::vector<std::vector<std::int32_t>> sym_monomials(int r, int q) {
  std::vector<std::vector<std::int32_t>> out;
  if (q < 0) return out;
  std::vector<std::int32_t> cur(r, 0);
  // recursive lex enumeration, earliest variable takes the largest power first
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == r - 1) {
      cur[pos] = rem;
      out.push_back(cur);
      return;
    }
    for (int e = rem; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, rem - e);
    }
  };
  rec(rec, 0, q);
  return out;
}

namespace {

// all subsets of {0..r-1} in canonical (sorted-list lex) order
std::vector<std::uint32_t> subsets_in_order(int r) {
  std::vector<std::uint32_t> all;
  for (std::uint32_t s = 0; s < (1u << r); ++s) all.push_back(s);
  std::sort(all.begin(), all.end(),
            [](std::uint32_t a, std::uint32_t b) { return cmp_subset(a, b) < 0; });
  return all;
}

std::shared_ptr<const MonomialTable> build_table(const AmbientSpec& spec, int d) {
  auto t = std::make_shared<MonomialTable>();
  t->spec = spec;
  t->degree = d;
  if (d < 0) return t;
  auto subs = subsets_in_order(spec.rank);
  std::vector<std::vector<std::uint32_t>> tuples{{}};
  for (int slot = 0; slot < spec.g; ++slot) {
    std::vector<std::vector<std::uint32_t>> next;
    for (const auto& pre : tuples)
      for (std::uint32_t s : subs) {
        auto cp = pre;
        cp.push_back(s);
        next.push_back(std::move(cp));
      }
    tuples = std::move(next);
  }
  // tuples are in product-lex order because subs is ordered
  for (const auto& tu : tuples) {
    int e = 0;
    for (std::uint32_t s : tu) e += __builtin_popcount(s);
    int rem = d - e;
    if (rem < 0 || rem % 2) continue;
    for (auto& ex : sym_monomials(spec.rank, rem / 2)) {
      Mono m;
      m.ext = tu;
      m.exp = ex;
      t->index.emplace(m, t->monos.size());
      t->monos.push_back(std::move(m));
    }
  }
  return t;
}

std::mutex g_table_mutex;
std::map<std::tuple<int, int, int>, std::shared_ptr<const MonomialTable>> g_tables;

} // namespace

std::shared_ptr<const MonomialTable> monomial_table(const AmbientSpec& spec, int d) {
  std::tuple<int, int, int> key{spec.rank, spec.g, d};
  {
    std::lock_guard<std::mutex> lk(g_table_mutex);
    auto it = g_tables.find(key);
    if (it != g_tables.end()) return it->second;
  }
  auto t = build_table(spec, d);
  std::lock_guard<std::mutex> lk(g_table_mutex);
  auto [it, _] = g_tables.emplace(key, t);
  return it->second;
}

long long piece_dimension(const AmbientSpec& spec, int d) {
  if (d < 0) return 0;
  // coefficient of t^e in (sum_k C(r,k) t^k)^g, convolved with sym counts
  std::vector<long long> extcnt{1};
  std::vector<long long> binom(spec.rank + 1);
  binom[0] = 1;
  for (int k = 1; k <= spec.rank; ++k)
    binom[k] = binom[k - 1] * (spec.rank - k + 1) / k;
  for (int slot = 0; slot < spec.g; ++slot) {
    std::vector<long long> nx(extcnt.size() + spec.rank, 0);
    for (std::size_t i = 0; i < extcnt.size(); ++i)
      for (int k = 0; k <= spec.rank; ++k) nx[i + k] += extcnt[i] * binom[k];
    extcnt = std::move(nx);
  }
  long long total = 0;
  for (std::size_t e = 0; e < extcnt.size(); ++e) {
    if ((int)e > d || ((d - (int)e) % 2)) continue;
    total += extcnt[e] * sym_monomial_count(spec.rank, (d - (int)e) / 2);
  }
  return total;
}

void GradedElement::add_term(const Mono& m, const Rat& c) {
  if (sgn(c) == 0) return;
  auto it = terms.find(m);
  if (it == terms.end()) {
    terms.emplace(m, c);
  } else {
    it->second += c;
    if (sgn(it->second) == 0) terms.erase(it);
  }
}

std::vector<Rat> GradedElement::dense() const {
  auto t = monomial_table(spec, degree);
  std::vector<Rat> v(t->dim());
  for (const auto& [m, c] : terms) v[t->find(m)] = c;
  return v;
}

GradedElement GradedElement::from_dense(const AmbientSpec& spec, int d,
                                        const std::vector<Rat>& coords) {
  auto t = monomial_table(spec, d);
  if (coords.size() != t->dim())
    throw std::invalid_argument("dense coordinate length mismatch");
  GradedElement e;
  e.spec = spec;
  e.degree = d;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (sgn(coords[i]) != 0) e.terms.emplace(t->monos[i], coords[i]);
  return e;
}

GradedElement GradedElement::one(const AmbientSpec& spec) {
  GradedElement e;
  e.spec = spec;
  e.degree = 0;
  Mono m;
  m.ext.assign(spec.g, 0);
  m.exp.assign(spec.rank, 0);
  e.terms.emplace(m, Rat(1));
  return e;
}

GradedElement GradedElement::variable(const AmbientSpec& spec, int v, int slot) {
  if (v < 0 || v >= spec.rank) throw std::invalid_argument("variable out of range");
  GradedElement e;
  e.spec = spec;
  Mono m;
  m.ext.assign(spec.g, 0);
  m.exp.assign(spec.rank, 0);
  if (slot < 0) {
    m.exp[v] = 1;
    e.degree = 2;
  } else {
    if (slot >= spec.g) throw std::invalid_argument("slot out of range");
    m.ext[slot] = 1u << v;
    e.degree = 1;
  }
  e.terms.emplace(m, Rat(1));
  return e;
}

GradedElement GradedElement::scaled(const Rat& c) const {
  GradedElement e;
  e.spec = spec;
  e.degree = degree;
  if (sgn(c) == 0) return e;
  for (const auto& [m, x] : terms) e.terms.emplace(m, x * c);
  return e;
}

GradedElement add(const GradedElement& x, const GradedElement& y) {
  if (!(x.spec == y.spec) || x.degree != y.degree)
    throw std::invalid_argument("add: incompatible elements");
  GradedElement r = x;
  for (const auto& [m, c] : y.terms) r.add_term(m, c);
  return r;
}

namespace {

// sign of merging two disjoint sorted index sets; 0 if they intersect
int merge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  int sign = 1;
  std::uint32_t rest = a;
  while (rest) {
    std::uint32_t bit = rest & -rest;
    // elements of b smaller than this element of a cause a transposition each
    if (__builtin_popcount(b & (bit - 1)) % 2) sign = -sign;
    rest &= rest - 1;
  }
  return sign;
}

} // namespace

GradedElement multiply(const GradedElement& x, const GradedElement& y) {
  if (!(x.spec == y.spec))
    throw std::invalid_argument("multiply: ambient mismatch");
  GradedElement r;
  r.spec = x.spec;
  r.degree = x.degree + y.degree;
  Rat tmp;
  for (const auto& [mx, cx] : x.terms) {
    for (const auto& [my, cy] : y.terms) {
      int sign = 1;
      Mono m;
      m.ext.resize(mx.ext.size());
      bool dead = false;
      // sign: within each slot, merge; crossing slots commutes because every
      // element of Lambda^{(x)g} used here is a product of slot-local factors
      // assembled left to right (parity bookkeeping: moving my's slot-i part
      // past mx's slots j>i costs (-1)^{|mx_j||my_i|})
      int parity = 0;
      for (std::size_t i = 0; i < mx.ext.size(); ++i) {
        int s = merge_sign(mx.ext[i], my.ext[i]);
        if (s == 0) {
          dead = true;
          break;
        }
        sign *= s;
        int my_i = __builtin_popcount(my.ext[i]);
        int mx_after = 0;
        for (std::size_t j = i + 1; j < mx.ext.size(); ++j)
          mx_after += __builtin_popcount(mx.ext[j]);
        parity += my_i * mx_after;
        m.ext[i] = mx.ext[i] | my.ext[i];
      }
      if (dead) continue;
      if (parity % 2) sign = -sign;
      m.exp.resize(mx.exp.size());
      for (std::size_t i = 0; i < mx.exp.size(); ++i)
        m.exp[i] = mx.exp[i] + my.exp[i];
      tmp = cx;
      tmp *= cy;
      if (sign < 0) tmp = -tmp;
      r.add_term(m, tmp);
    }
  }
  return r;
}

namespace {

// image of a single exterior subset under s, as (subset, coefficient) pairs:
// wedge of the images = sum over same-size subsets T of det(s[T, S]).
std::vector<std::pair<std::uint32_t, Rat>> subset_image(std::uint32_t S,
                                                        const Matrix& s) {
  int r = (int)s.rows;
  std::vector<int> src;
  for (int i = 0; i < r; ++i)
    if (S & (1u << i)) src.push_back(i);
  int k = (int)src.size();
  std::vector<std::pair<std::uint32_t, Rat>> out;
  if (k == 0) {
    out.emplace_back(0u, Rat(1));
    return out;
  }
  // enumerate size-k subsets T
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    // minor determinant via Laplace on small k (k <= rank <= 9 in practice,
    // but exterior subsets here have k <= rank; use O(k!) only for tiny k,
    // otherwise fraction-free Gauss)
    Matrix minor(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) minor.at(i, j) = s.at(idx[i], src[j]);
    // determinant by Gaussian elimination
    Rat det = 1;
    bool zero = false;
    for (int c = 0; c < k && !zero; ++c) {
      int piv = -1;
      for (int i = c; i < k; ++i)
        if (sgn(minor.at(i, c)) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) {
        zero = true;
        break;
      }
      if (piv != c) {
        for (int j = c; j < k; ++j) swap(minor.at(c, j), minor.at(piv, j));
        det = -det;
      }
      det *= minor.at(c, c);
      for (int i = c + 1; i < k; ++i) {
        if (sgn(minor.at(i, c)) == 0) continue;
        Rat f = minor.at(i, c) / minor.at(c, c);
        for (int j = c; j < k; ++j) minor.at(i, j) -= f * minor.at(c, j);
      }
    }
    if (!zero && sgn(det) != 0) {
      std::uint32_t T = 0;
      for (int i = 0; i < k; ++i) T |= 1u << idx[i];
      out.emplace_back(T, det);
    }
    // next combination
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == r - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

} // namespace

GradedElement substitute(const GradedElement& x, const LinearSubstitution& s) {
  if ((int)s.m.rows != x.spec.rank || (int)s.m.cols != x.spec.rank)
    throw std::invalid_argument("substitute: rank mismatch");
  GradedElement r;
  r.spec = x.spec;
  r.degree = x.degree;
  // linear images of the polynomial variables
  for (const auto& [m, c] : x.terms) {
    // start with the constant term carrying c
    GradedElement acc;
    acc.spec = x.spec;
    acc.degree = 0;
    acc = GradedElement::one(x.spec).scaled(c);
    // exterior parts
    for (std::size_t slot = 0; slot < m.ext.size(); ++slot) {
      if (m.ext[slot] == 0) continue;
      GradedElement part;
      part.spec = x.spec;
      part.degree = __builtin_popcount(m.ext[slot]);
      for (auto& [T, det] : subset_image(m.ext[slot], s.m)) {
        Mono mm;
        mm.ext.assign(x.spec.g, 0);
        mm.ext[slot] = T;
        mm.exp.assign(x.spec.rank, 0);
        part.add_term(mm, det);
      }
      acc = multiply(acc, part);
    }
    // symmetric part
    for (int v = 0; v < x.spec.rank; ++v) {
      for (int rep = 0; rep < m.exp[v]; ++rep) {
        GradedElement lin;
        lin.spec = x.spec;
        lin.degree = 2;
        for (int i = 0; i < x.spec.rank; ++i) {
          if (sgn(s.m.at(i, v)) == 0) continue;
          Mono mm;
          mm.ext.assign(x.spec.g, 0);
          mm.exp.assign(x.spec.rank, 0);
          mm.exp[i] = 1;
          lin.add_term(mm, s.m.at(i, v));
        }
        acc = multiply(acc, lin);
      }
    }
    for (const auto& [mm, cc] : acc.terms) r.add_term(mm, cc);
  }
  return r;
}

Matrix substitution_matrix(const AmbientSpec& spec, int d,
                           const LinearSubstitution& s) {
  auto table = monomial_table(spec, d);
  std::size_t n = table->dim();
  Matrix out(n, n);

  // cache symmetric-monomial images per degree: img(exp) computed by
  // multiplying img(exp - e_i) by the image of x_i
  AmbientSpec poly(spec.rank, 0, spec.labels);
  std::map<std::vector<std::int32_t>, GradedElement> sym_img;
  std::vector<GradedElement> var_img(spec.rank);
  for (int v = 0; v < spec.rank; ++v) {
    GradedElement lin;
    lin.spec = poly;
    lin.degree = 2;
    for (int i = 0; i < spec.rank; ++i) {
      if (sgn(s.m.at(i, v)) == 0) continue;
      Mono mm;
      mm.exp.assign(spec.rank, 0);
      mm.exp[i] = 1;
      lin.add_term(mm, s.m.at(i, v));
    }
    var_img[v] = lin;
  }
  std::function<const GradedElement&(const std::vector<std::int32_t>&)> get_sym =
      [&](const std::vector<std::int32_t>& e) -> const GradedElement& {
    auto it = sym_img.find(e);
    if (it != sym_img.end()) return it->second;
    int tot = 0;
    for (int x : e) tot += x;
    GradedElement val;
    if (tot == 0) {
      val = GradedElement::one(poly);
    } else {
      int v = 0;
      while (e[v] == 0) ++v;
      auto prev = e;
      prev[v] -= 1;
      val = multiply(get_sym(prev), var_img[v]);
    }
    auto [ins, _] = sym_img.emplace(e, std::move(val));
    return ins->second;
  };

  // cache subset images per slot-content
  std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, Rat>>> sub_img;
  auto get_sub = [&](std::uint32_t S) -> const std::vector<std::pair<std::uint32_t, Rat>>& {
    auto it = sub_img.find(S);
    if (it != sub_img.end()) return it->second;
    auto [ins, _] = sub_img.emplace(S, subset_image(S, s.m));
    return ins->second;
  };

  Rat coeff;
  for (std::size_t col = 0; col < n; ++col) {
    const Mono& m = table->monos[col];
    // combine: product over slots of subset images, times symmetric image
    std::vector<std::pair<std::vector<std::uint32_t>, Rat>> extparts{{{}, Rat(1)}};
    for (std::size_t slot = 0; slot < m.ext.size(); ++slot) {
      std::vector<std::pair<std::vector<std::uint32_t>, Rat>> nx;
      for (auto& [pre, c] : extparts)
        for (auto& [T, det] : get_sub(m.ext[slot])) {
          auto cp = pre;
          cp.push_back(T);
          nx.emplace_back(std::move(cp), c * det);
        }
      extparts = std::move(nx);
    }
    const GradedElement& sym = get_sym(m.exp);
    for (auto& [ext, ce] : extparts) {
      for (const auto& [sm, cs] : sym.terms) {
        Mono mm;
        mm.ext = ext;
        mm.exp = sm.exp;
        coeff = ce;
        coeff *= cs;
        out.at(table->find(mm), col) += coeff;
      }
    }
  }
  return out;
}

} // namespace gkm
