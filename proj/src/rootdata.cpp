#include "gkm/rootdata.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gkm {

namespace {

Matrix int_matrix(const std::vector<std::vector<long long>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = (long)rows[i][j];
  return m;
}

Matrix inverse(const Matrix& m) {
  RrefResult r = rref(m.hstack(Matrix::identity(m.rows)));
  if (r.rank != m.rows) throw std::invalid_argument("singular matrix");
  Matrix inv(m.rows, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.rows; ++j) inv.at(i, j) = r.m.at(i, m.rows + j);
  return inv;
}

// action on t (dual coordinates) induced by a t*-action
Matrix on_t(const Matrix& w_on_tstar) { return inverse(w_on_tstar).transpose(); }

long long dot(const std::vector<long long>& a, const std::vector<long long>& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// column-style Hermite basis of the integer span of the given vectors
Matrix integer_span_basis(const std::vector<std::vector<long long>>& vecs, int r) {
  std::vector<std::vector<long long>> rows;
  for (auto& v : vecs) rows.push_back(v);
  // integer row echelon via gcd elimination
  int lead = 0;
  for (int c = 0; c < r && lead < (int)rows.size(); ++c) {
    while (true) {
      int nz = -1;
      for (int i = lead; i < (int)rows.size(); ++i)
        if (rows[i][c] != 0) {
          if (nz < 0 || std::abs(rows[i][c]) < std::abs(rows[nz][c])) nz = i;
        }
      if (nz < 0) break;
      std::swap(rows[lead], rows[nz]);
      bool clean = true;
      for (int i = lead + 1; i < (int)rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        long long q = rows[i][c] / rows[lead][c];
        for (int j = 0; j < r; ++j) rows[i][j] -= q * rows[lead][j];
        if (rows[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    bool colzero = true;
    for (int i = lead; i < (int)rows.size(); ++i)
      if (rows[i][c] != 0) colzero = false;
    if (!colzero) ++lead;
  }
  rows.resize(lead);
  if (lead != r) throw std::invalid_argument("coroot lattice is not full rank");
  // columns of the basis matrix = the echelon rows
  Matrix b(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) b.at(j, i) = (long)rows[i][j];
  return b;
}

std::vector<int> reduce_mod2_in_lattice(const Matrix& basis, const std::vector<Rat>& vec) {
  Matrix rhs((std::size_t)vec.size(), 1);
  for (std::size_t i = 0; i < vec.size(); ++i) rhs.at(i, 0) = vec[i];
  Matrix sol;
  if (!solve(basis, rhs, &sol))
    throw std::invalid_argument("vector outside the lattice span");
  std::vector<int> bits(vec.size());
  for (std::size_t i = 0; i < vec.size(); ++i) {
    const Rat& c = sol.at(i, 0);
    if (c.get_den() != 1)
      throw std::invalid_argument("vector not in the integer lattice");
    mpz_class num = c.get_num();
    bits[i] = (int)mpz_tstbit(num.get_mpz_t(), 0);
  }
  return bits;
}

void finish_t2(RootDatum& d) {
  d.t2_rank = d.rank;
  for (auto& h : d.coroots) {
    std::vector<Rat> v(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) v[i] = (long)h[i];
    d.coroot_t2.push_back(reduce_mod2_in_lattice(d.lattice_basis, v));
  }
}

RootDatum build_a(int n) {
  RootDatum d;
  d.label = "A" + std::to_string(n);
  d.rank = n;
  for (int i = 1; i <= n; ++i) d.labels.push_back("x" + std::to_string(i));
  // x_i = alpha_{i,n+1}; roots alpha_{i,j} for i<j<=n+1
  for (int i = 1; i <= n + 1; ++i)
    for (int j = i + 1; j <= n + 1; ++j) {
      std::vector<long long> root(n, 0), h(n, 0);
      if (j <= n) {
        root[i - 1] = 1;
        root[j - 1] = -1;
        h[i - 1] = 1;
        h[j - 1] = -1;
      } else {
        root[i - 1] = 1;
        for (int k = 0; k < n; ++k) h[k] = (k == i - 1) ? 2 : 1;
      }
      d.pos_roots.push_back(root);
      d.coroots.push_back(h);
    }
  // simple reflections s_i = s_{alpha_{i,i+1}}
  for (int i = 1; i <= n; ++i) {
    // locate the simple root alpha_{i,i+1}
    std::vector<long long> root(n, 0), h(n, 0);
    if (i < n) {
      root[i - 1] = 1;
      root[i] = -1;
      h[i - 1] = 1;
      h[i] = -1;
    } else {
      root[n - 1] = 1;
      for (int k = 0; k < n; ++k) h[k] = (k == n - 1) ? 2 : 1;
    }
    Matrix s = Matrix::identity(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) s.at(a, b) -= Rat((long)root[a]) * (long)h[b];
    d.weyl_gens.push_back(s);
  }
  for (int i = 2; i <= n + 1; ++i) d.degrees.push_back(i);
  d.weyl_order = 1;
  for (int i = 2; i <= n + 1; ++i) d.weyl_order *= i;
  d.phi_mod2 = true;
  // lattice basis: simple coroots
  std::vector<std::vector<long long>> simple_h;
  for (int i = 1; i <= n; ++i) {
    std::vector<long long> h(n, 0);
    if (i < n) {
      h[i - 1] = 1;
      h[i] = -1;
    } else {
      for (int k = 0; k < n; ++k) h[k] = (k == n - 1) ? 2 : 1;
    }
    simple_h.push_back(h);
  }
  d.lattice_basis = integer_span_basis(simple_h, n);
  finish_t2(d);
  return d;
}

RootDatum build_b2() {
  RootDatum d;
  d.label = "B2";
  d.rank = 2;
  d.labels = {"e1", "e2"};
  d.pos_roots = {{2, 0}, {0, 2}, {-1, 1}, {1, 1}};
  d.coroots = {{1, 0}, {0, 1}, {-1, 1}, {1, 1}};
  Matrix s1 = Matrix::identity(2), s2 = Matrix::identity(2), s3(2, 2);
  s1.at(0, 0) = -1;
  s2.at(1, 1) = -1;
  s3.at(0, 1) = 1;
  s3.at(1, 0) = 1;
  d.weyl_gens = {s1, s2, s3};
  d.degrees = {2, 4};
  d.weyl_order = 8;
  d.phi_mod2 = true;
  d.lattice_basis = Matrix::identity(2);
  finish_t2(d);
  return d;
}

RootDatum build_g2() {
  // basis x = alpha+beta, y = 2 alpha+beta (alpha, beta the paper's simples)
  RootDatum d;
  d.label = "G2";
  d.rank = 2;
  d.labels = {"x", "y"};
  d.pos_roots = {{-1, 1}, {2, -1}, {1, 0}, {0, 1}, {-1, 2}, {1, 1}};
  // coroots via h_gamma = 2 gamma/(gamma,gamma) in the e-coordinates of the paper
  d.coroots = {{-1, 1}, {1, 0}, {2, 1}, {1, 2}, {0, 1}, {1, 1}};
  d.weyl_gens.clear();
  {
    Matrix salpha(2, 2); // reflection in alpha: swap of x, y
    salpha.at(0, 1) = 1;
    salpha.at(1, 0) = 1;
    Matrix sbeta = Matrix::identity(2); // I - beta h_beta^T
    sbeta.at(0, 0) = -1;
    sbeta.at(1, 0) = 1;
    d.weyl_gens = {salpha, sbeta};
  }
  d.degrees = {2, 6};
  d.weyl_order = 12;
  d.phi_mod2 = true;
  d.lattice_basis = integer_span_basis(d.coroots, 2);
  finish_t2(d);
  return d;
}

RootDatum build_simple_basis(const std::string& label,
                             const std::vector<std::vector<long long>>& cartan,
                             const std::vector<long long>& sym,
                             std::vector<int> degrees, long long worder) {
  int r = (int)cartan.size();
  RootDatum d;
  d.label = label;
  d.rank = r;
  for (int i = 1; i <= r; ++i) d.labels.push_back("a" + std::to_string(i));
  // bilinear form B_ij = sym_i * cartan_ij
  auto form = [&](const std::vector<long long>& a, const std::vector<long long>& b) {
    long long s = 0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) s += a[i] * sym[i] * cartan[i][j] * b[j];
    return s;
  };
  // generate all roots by reflection closure from the simples
  std::set<std::vector<long long>> all;
  std::vector<std::vector<long long>> queue;
  for (int i = 0; i < r; ++i) {
    std::vector<long long> e(r, 0);
    e[i] = 1;
    all.insert(e);
    queue.push_back(e);
  }
  while (!queue.empty()) {
    auto beta = queue.back();
    queue.pop_back();
    for (int i = 0; i < r; ++i) {
      long long pairing = 0; // <beta, h_i> = sum_j beta_j C_ij
      for (int j = 0; j < r; ++j) pairing += beta[j] * cartan[i][j];
      auto refl = beta;
      refl[i] -= pairing;
      if (all.insert(refl).second) queue.push_back(refl);
    }
  }
  for (auto& root : all) {
    bool pos = true, nonzero = false;
    for (long long c : root) {
      if (c < 0) pos = false;
      if (c != 0) nonzero = true;
    }
    if (!pos || !nonzero) continue;
    d.pos_roots.push_back(root);
  }
  std::sort(d.pos_roots.begin(), d.pos_roots.end(),
            [](const std::vector<long long>& a, const std::vector<long long>& b) {
              long long ha = std::accumulate(a.begin(), a.end(), 0ll);
              long long hb = std::accumulate(b.begin(), b.end(), 0ll);
              if (ha != hb) return ha < hb;
              return a < b;
            });
  for (auto& beta : d.pos_roots) {
    long long len = form(beta, beta);
    std::vector<long long> h(r);
    for (int k = 0; k < r; ++k) {
      std::vector<long long> ek(r, 0);
      ek[k] = 1;
      long long num = 2 * form(ek, beta);
      if (num % len) throw std::logic_error("non-integral coroot");
      h[k] = num / len;
    }
    d.coroots.push_back(h);
  }
  for (int i = 0; i < r; ++i) {
    Matrix s = Matrix::identity(r);
    for (int j = 0; j < r; ++j) s.at(i, j) -= (long)cartan[i][j];
    d.weyl_gens.push_back(s);
  }
  d.degrees = std::move(degrees);
  d.weyl_order = worder;
  d.phi_mod2 = true;
  d.lattice_basis = integer_span_basis(d.coroots, r);
  finish_t2(d);
  return d;
}

RootDatum build_so3() {
  RootDatum d;
  d.label = "SO3";
  d.rank = 1;
  d.labels = {"x"};
  d.pos_roots = {{1}};
  d.coroots = {{2}};
  Matrix s(1, 1);
  s.at(0, 0) = -1;
  d.weyl_gens = {s};
  d.degrees = {2};
  d.weyl_order = 2;
  d.phi_mod2 = false; // pi_1 = Z/2; T2 via the coweight lattice of SO(3)
  d.lattice_basis = Matrix::identity(1);
  finish_t2(d); // exp(pi i h) = exp(2 pi i) = 1, class (0)
  return d;
}

RootDatum build_u2() {
  RootDatum d;
  d.label = "U2";
  d.rank = 2;
  d.labels = {"x1", "x2"};
  d.pos_roots = {{1, -1}};
  d.coroots = {{1, -1}};
  Matrix s(2, 2);
  s.at(0, 1) = 1;
  s.at(1, 0) = 1;
  d.weyl_gens = {s};
  d.degrees = {1, 2};
  d.weyl_order = 2;
  d.phi_mod2 = false;
  d.lattice_basis = Matrix::identity(2); // coweight lattice of the U(2) torus
  finish_t2(d); // exp(pi i h) = diag(-1,-1) = epsilon, class (1,1)
  return d;
}

} // namespace

std::vector<long long> RootDatum::poincare_k() const {
  std::vector<long long> p{1};
  for (int di : degrees) {
    std::vector<long long> nx(p.size() + 2 * di - 1, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      nx[i] += p[i];
      nx[i + 2 * di - 1] += p[i];
    }
    p = std::move(nx);
  }
  return p;
}

RootDatum build_datum(const std::string& key) {
  if (key == "A2" || key == "PSU3") {
    RootDatum d = build_a(2);
    if (key == "PSU3") d.label = "PSU3"; // same Phi/2Phi data: pi_1 has odd order
    return d;
  }
  if (key == "A3") return build_a(3);
  if (key == "A4") return build_a(4);
  if (key == "B2") return build_b2();
  if (key == "G2") return build_g2();
  if (key == "SO3") return build_so3();
  if (key == "U2") return build_u2();
  if (key == "B3")
    return build_simple_basis("B3", {{2, -1, 0}, {-1, 2, -1}, {0, -2, 2}},
                              {2, 2, 1}, {2, 4, 6}, 48);
  if (key == "C3")
    return build_simple_basis("C3", {{2, -1, 0}, {-1, 2, -2}, {0, -1, 2}},
                              {1, 1, 2}, {2, 4, 6}, 48);
  if (key == "B4")
    return build_simple_basis(
        "B4", {{2, -1, 0, 0}, {-1, 2, -1, 0}, {0, -1, 2, -1}, {0, 0, -2, 2}},
        {2, 2, 2, 1}, {2, 4, 6, 8}, 384);
  if (key == "C4")
    return build_simple_basis(
        "C4", {{2, -1, 0, 0}, {-1, 2, -1, 0}, {0, -1, 2, -2}, {0, 0, -1, 2}},
        {1, 1, 1, 2}, {2, 4, 6, 8}, 384);
  if (key == "D4")
    return build_simple_basis(
        "D4", {{2, -1, 0, 0}, {-1, 2, -1, -1}, {0, -1, 2, 0}, {0, -1, 0, 2}},
        {1, 1, 1, 1}, {2, 4, 4, 6}, 192);
  if (key == "F4")
    return build_simple_basis(
        "F4", {{2, -1, 0, 0}, {-1, 2, -1, 0}, {0, -2, 2, -1}, {0, 0, -1, 2}},
        {2, 2, 1, 1}, {2, 6, 8, 12}, 1152);
  throw std::invalid_argument("unknown group key: " + key);
}

std::vector<std::string> registry_keys() {
  return {"A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4",
          "D4", "F4", "G2", "PSU3", "SO3", "U2"};
}

namespace {

std::vector<std::vector<int>> t2_matrix_of(const RootDatum& d, const Matrix& w) {
  // action on T2 elements: coweight coords a -> W_t a, in lattice-basis bits
  Matrix wt = on_t(w);
  Matrix conj;
  if (!solve(d.lattice_basis, wt.mul(d.lattice_basis), &conj))
    throw std::logic_error("Weyl action does not preserve the lattice");
  std::vector<std::vector<int>> m(d.t2_rank, std::vector<int>(d.t2_rank));
  for (int i = 0; i < d.t2_rank; ++i)
    for (int j = 0; j < d.t2_rank; ++j) {
      const Rat& c = conj.at(i, j);
      if (c.get_den() != 1) throw std::logic_error("non-integral lattice action");
      mpz_class num = c.get_num();
      m[i][j] = (int)mpz_tstbit(num.get_mpz_t(), 0);
    }
  return m;
}

std::mutex g_weyl_mutex;
std::map<std::string, std::vector<WeylElement>> g_weyl_cache;

std::vector<std::vector<int>> gf2_mul(const std::vector<std::vector<int>>& a,
                                      const std::vector<std::vector<int>>& b) {
  int n = (int)a.size();
  std::vector<std::vector<int>> c(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (a[i][k])
        for (int j = 0; j < n; ++j) c[i][j] ^= b[k][j];
  return c;
}

std::vector<std::vector<int>> gf2_inverse(std::vector<std::vector<int>> a) {
  int n = (int)a.size();
  std::vector<std::vector<int>> inv(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (a[i][c]) {
        piv = i;
        break;
      }
    if (piv < 0) throw std::logic_error("singular GF(2) matrix");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    for (int i = 0; i < n; ++i) {
      if (i == c || !a[i][c]) continue;
      for (int j = 0; j < n; ++j) {
        a[i][j] ^= a[c][j];
        inv[i][j] ^= inv[c][j];
      }
    }
  }
  return inv;
}

} // namespace

std::vector<WeylElement> weyl_elements(const RootDatum& d) {
  {
    std::lock_guard<std::mutex> lk(g_weyl_mutex);
    auto it = g_weyl_cache.find(d.label);
    if (it != g_weyl_cache.end()) return it->second;
  }
  std::vector<Matrix> elems{Matrix::identity(d.rank)};
  std::set<std::vector<std::string>> seen;
  auto keyof = [&](const Matrix& m) {
    std::vector<std::string> k;
    for (const Rat& x : m.a) k.push_back(rat_to_string(x));
    return k;
  };
  seen.insert(keyof(elems[0]));
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const Matrix& g : d.weyl_gens) {
      Matrix nx = g.mul(elems[i]);
      if (seen.insert(keyof(nx)).second) elems.push_back(std::move(nx));
    }
  }
  std::vector<WeylElement> out;
  for (Matrix& m : elems) {
    WeylElement w;
    w.on_t2 = t2_matrix_of(d, m);
    w.on_tstar = std::move(m);
    out.push_back(std::move(w));
  }
  std::lock_guard<std::mutex> lk(g_weyl_mutex);
  g_weyl_cache.emplace(d.label, out);
  return out;
}

int eval_char_coroot(const RootDatum& d, const Char& chi, int ri) {
  int parity = 0;
  for (int i = 0; i < d.t2_rank; ++i) parity ^= chi[i] & d.coroot_t2[ri][i];
  return parity ? -1 : 1;
}

Char char_apply(const WeylElement& w, const Char& chi) {
  // (w.chi)(x) = chi(w^{-1} x) => coordinates (M^{-1})^T chi
  auto minv = gf2_inverse(w.on_t2);
  int n = (int)chi.size();
  Char out(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] ^= minv[j][i] & chi[j];
  return out;
}

CharTable char_table(const RootDatum& d) {
  auto elems = weyl_elements(d);
  if ((long long)elems.size() != d.weyl_order)
    throw std::logic_error("Weyl order mismatch for " + d.label);
  int n = d.t2_rank;
  std::set<Char> remaining;
  std::vector<Char> all;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Char c(n);
    for (int i = 0; i < n; ++i) c[i] = (mask >> i) & 1;
    remaining.insert(c);
  }
  CharTable table;
  while (!remaining.empty()) {
    Char seed = *remaining.begin();
    // orbit
    std::set<Char> orbit{seed};
    std::vector<Char> queue{seed};
    while (!queue.empty()) {
      Char c = queue.back();
      queue.pop_back();
      for (const WeylElement& w : elems) {
        Char nc = char_apply(w, c);
        if (orbit.insert(nc).second) queue.push_back(nc);
      }
    }
    CharOrbit o;
    o.rep = *orbit.begin(); // lexicographically least
    o.members.assign(orbit.begin(), orbit.end());
    for (const WeylElement& w : elems)
      if (char_apply(w, o.rep) == o.rep) o.stabilizer.push_back(w);
    for (const Char& c : orbit) remaining.erase(c);
    table.orbits.push_back(std::move(o));
  }
  // trivial orbit (all-zero rep) first, then by rep
  std::sort(table.orbits.begin(), table.orbits.end(),
            [](const CharOrbit& a, const CharOrbit& b) { return a.rep < b.rep; });
  return table;
}

std::vector<WeylElement> subgroup_generators(const std::vector<WeylElement>& elems) {
  auto keyof = [](const Matrix& m) {
    std::vector<std::string> k;
    for (const Rat& x : m.a) k.push_back(rat_to_string(x));
    return k;
  };
  std::set<std::vector<std::string>> closure;
  std::vector<Matrix> closure_list;
  Matrix id = Matrix::identity(elems.empty() ? 1 : elems[0].on_tstar.rows);
  closure.insert(keyof(id));
  closure_list.push_back(id);
  std::vector<WeylElement> gens;
  for (const WeylElement& e : elems) {
    if (closure.count(keyof(e.on_tstar))) continue;
    gens.push_back(e);
    // regenerate closure
    for (std::size_t i = 0; i < closure_list.size(); ++i)
      for (const WeylElement& g : gens) {
        Matrix nx = g.on_tstar.mul(closure_list[i]);
        if (closure.insert(keyof(nx)).second) closure_list.push_back(std::move(nx));
      }
  }
  return gens;
}

Matrix reflection(const RootDatum& d, int ri) {
  Matrix s = Matrix::identity(d.rank);
  for (int a = 0; a < d.rank; ++a)
    for (int b = 0; b < d.rank; ++b)
      s.at(a, b) -= Rat((long)d.pos_roots[ri][a]) * (long)d.coroots[ri][b];
  return s;
}

LinearSubstitution adapted_basis(const RootDatum& d, int ri) {
  Matrix s = reflection(d, ri);
  // fixed space: kernel of (s - I)
  Matrix diff = s;
  for (int i = 0; i < d.rank; ++i) diff.at(i, i) -= 1;
  Matrix fixed = kernel_basis(diff);
  if ((int)fixed.cols != d.rank - 1)
    throw std::logic_error("reflection fixed space has wrong dimension");
  // canonicalize: reduced rows, scaled to primitive integer vectors
  Matrix rows = rref(fixed.transpose()).m;
  LinearSubstitution sub;
  sub.m = Matrix(d.rank, d.rank);
  for (int i = 0; i < d.rank; ++i) sub.m.at(i, 0) = (long)d.pos_roots[ri][i];
  for (int j = 0; j < d.rank - 1; ++j) {
    mpz_class lcm = 1, gcd = 0;
    for (int i = 0; i < d.rank; ++i)
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), rows.at(j, i).get_den().get_mpz_t());
    for (int i = 0; i < d.rank; ++i) {
      mpz_class num = rows.at(j, i).get_num() * (lcm / rows.at(j, i).get_den());
      mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), num.get_mpz_t());
    }
    if (gcd == 0) gcd = 1;
    for (int i = 0; i < d.rank; ++i)
      sub.m.at(i, j + 1) = Rat(rows.at(j, i).get_num() * (lcm / rows.at(j, i).get_den()) / gcd);
  }
  return sub;
}

void validate_datum(const RootDatum& d) {
  if (d.pos_roots.size() != d.coroots.size())
    throw std::logic_error("root/coroot count mismatch");
  for (int i = 0; i < d.num_pos_roots(); ++i)
    if (dot(d.pos_roots[i], d.coroots[i]) != 2)
      throw std::logic_error("alpha(h_alpha) != 2 in " + d.label);
  // reflections permute the roots up to sign
  std::set<std::vector<std::string>> rootset;
  auto key = [&](const std::vector<Rat>& v) {
    std::vector<std::string> k;
    // sign-canonical
    int s = 0;
    for (const Rat& x : v)
      if (sgn(x) != 0) {
        s = sgn(x);
        break;
      }
    for (const Rat& x : v) k.push_back(rat_to_string(s < 0 ? Rat(-x) : x));
    return k;
  };
  for (auto& root : d.pos_roots) {
    std::vector<Rat> v;
    for (long long c : root) v.push_back(Rat((long)c));
    rootset.insert(key(v));
  }
  for (const Matrix& w : d.weyl_gens) {
    for (auto& root : d.pos_roots) {
      std::vector<Rat> img(d.rank);
      for (int i = 0; i < d.rank; ++i)
        for (int j = 0; j < d.rank; ++j) img[i] += w.at(i, j) * (long)root[j];
      if (!rootset.count(key(img)))
        throw std::logic_error("Weyl generator does not permute roots in " + d.label);
    }
  }
  if ((long long)weyl_elements(d).size() != d.weyl_order)
    throw std::logic_error("Weyl group order mismatch in " + d.label);
}

CentralElement central_element(const RootDatum& d, const std::string& name) {
  if (name == "identity") {
    CentralElement c;
    c.label = "identity";
    c.mu.assign(d.rank, Rat(0));
    return c;
  }
  CentralElement c;
  c.label = name;
  if (d.label == "B2" && name == "eps") {
    c.mu = {Rat(1, 2), Rat(1, 2)}; // mu = (e1+e2)/2, s = exp(pi i mu)
    return c;
  }
  if ((d.label == "A2" || d.label == "PSU3") && name == "eps") {
    // s = eps^2 is itself central; mu = -2 nu with eps = exp(2 pi i nu)
    c.mu = {Rat(-2), Rat(-2)};
    return c;
  }
  if (d.label == "A3" && name == "eps") {
    c.mu = {Rat(1), Rat(1), Rat(1)}; // s = exp(pi i nu), nu = (1,1,1,-3)/4
    return c;
  }
  if (d.label == "A3" && name == "eps2") {
    c.mu = {Rat(2), Rat(2), Rat(2)}; // c = -1, central square root s = eps
    return c;
  }
  if (d.label == "SO3" && name == "c180") {
    // c = rotation by pi, not central but W_c = W; square root s = exp(pi i / 2)
    c.mu = {Rat(1, 2)};
    return c;
  }
  if (d.label == "A4" && name == "eps") {
    c.mu = {Rat(6), Rat(6), Rat(6), Rat(6)}; // central square root eps^3
    return c;
  }
  throw std::invalid_argument("central element " + name + " not registered for " + d.label);
}

std::vector<std::string> central_names(const RootDatum& d) {
  std::vector<std::string> names{"identity"};
  if (d.label == "B2" || d.label == "A2" || d.label == "PSU3" || d.label == "A4")
    names.push_back("eps");
  if (d.label == "A3") {
    names.push_back("eps");
    names.push_back("eps2");
  }
  if (d.label == "SO3") names.push_back("c180");
  return names;
}

std::vector<int> twist_element(const RootDatum& d, const CentralElement& c,
                               const Matrix& w_on_tstar) {
  Matrix wt = on_t(w_on_tstar);
  std::vector<Rat> diff(d.rank, Rat(0));
  for (int i = 0; i < d.rank; ++i) {
    for (int j = 0; j < d.rank; ++j) diff[i] += wt.at(i, j) * c.mu[j];
    diff[i] -= c.mu[i];
  }
  return reduce_mod2_in_lattice(d.lattice_basis, diff);
}

int twist_sign(const RootDatum& d, const CentralElement& c, const WeylElement& w,
               const Char& chi) {
  auto t = twist_element(d, c, w.on_tstar);
  int parity = 0;
  for (int i = 0; i < d.t2_rank; ++i) parity ^= chi[i] & t[i];
  return parity ? -1 : 1;
}

} // namespace gkm
