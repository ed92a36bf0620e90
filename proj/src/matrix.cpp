#include "gkm/matrix.hpp"

#include <stdexcept>

namespace gkm {

std::string rat_to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat rat_from_string(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

Matrix Matrix::mul(const Matrix& o) const {
  if (cols != o.rows) throw std::invalid_argument("matrix dim mismatch in mul");
  Matrix r(rows, o.cols);
  Rat tmp;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      const Rat& x = at(i, k);
      if (sgn(x) == 0) continue;
      const Rat* orow = &o.a[k * o.cols];
      Rat* rrow = &r.a[i * o.cols];
      for (std::size_t j = 0; j < o.cols; ++j) {
        if (sgn(orow[j]) == 0) continue;
        tmp = x;
        tmp *= orow[j];
        rrow[j] += tmp;
      }
    }
  }
  return r;
}

Matrix Matrix::hstack(const Matrix& o) const {
  if (rows != o.rows) throw std::invalid_argument("row count mismatch in hstack");
  Matrix r(rows, cols + o.cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) r.at(i, j) = at(i, j);
    for (std::size_t j = 0; j < o.cols; ++j) r.at(i, cols + j) = o.at(i, j);
  }
  return r;
}

bool Matrix::is_zero() const {
  for (const Rat& x : a)
    if (sgn(x) != 0) return false;
  return true;
}

namespace {

// Rough size measure used for pivot choice: prefer entries with few limbs to
// keep intermediate values small.
std::size_t entry_size(const Rat& q) {
  return mpz_size(q.get_num().get_mpz_t()) + mpz_size(q.get_den().get_mpz_t());
}

} // namespace

RrefResult rref(Matrix m) {
  RrefResult res;
  std::size_t r = 0;
  Rat factor, tmp;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    // choose the smallest nonzero entry in column c at/below row r
    std::size_t best = m.rows;
    std::size_t best_sz = 0;
    for (std::size_t i = r; i < m.rows; ++i) {
      const Rat& x = m.at(i, c);
      if (sgn(x) == 0) continue;
      std::size_t sz = entry_size(x);
      if (best == m.rows || sz < best_sz) {
        best = i;
        best_sz = sz;
        if (sz <= 2) break; // single-limb entry, good enough
      }
    }
    if (best == m.rows) continue;
    if (best != r)
      for (std::size_t j = c; j < m.cols; ++j) swap(m.at(r, j), m.at(best, j));
    // normalize pivot row
    factor = m.at(r, c);
    if (factor != 1)
      for (std::size_t j = c; j < m.cols; ++j)
        if (sgn(m.at(r, j)) != 0) m.at(r, j) /= factor;
    // eliminate the column everywhere else
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r) continue;
      factor = m.at(i, c);
      if (sgn(factor) == 0) continue;
      Rat* ri = &m.a[i * m.cols];
      const Rat* rp = &m.a[r * m.cols];
      ri[c] = 0;
      for (std::size_t j = c + 1; j < m.cols; ++j) {
        if (sgn(rp[j]) == 0) continue;
        tmp = factor;
        tmp *= rp[j];
        ri[j] -= tmp;
      }
    }
    res.pivots.push_back(c);
    ++r;
  }
  res.rank = r;
  res.m = std::move(m);
  return res;
}

std::size_t rank(const Matrix& m) { return rref(m).rank; }

Matrix kernel_basis(const Matrix& m) {
  RrefResult r = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (std::size_t p : r.pivots) is_pivot[p] = true;
  std::size_t nfree = m.cols - r.rank;
  Matrix k(m.cols, nfree);
  std::size_t fi = 0;
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (is_pivot[c]) continue;
    k.at(c, fi) = 1;
    for (std::size_t pr = 0; pr < r.rank; ++pr)
      k.at(r.pivots[pr], fi) = -r.m.at(pr, c);
    ++fi;
  }
  return k;
}

Matrix intersect_column_spaces(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows)
    throw std::invalid_argument("intersect_column_spaces: row count mismatch");
  Matrix block(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) block.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols; ++j) block.at(i, a.cols + j) = -b.at(i, j);
  }
  Matrix k = kernel_basis(block);
  // image of the a-part of each kernel vector
  Matrix u(a.cols, k.cols);
  for (std::size_t i = 0; i < a.cols; ++i)
    for (std::size_t j = 0; j < k.cols; ++j) u.at(i, j) = k.at(i, j);
  return column_space_basis(a.mul(u));
}

Matrix column_space_basis(const Matrix& m) {
  RrefResult r = rref(m.transpose());
  Matrix basis(m.rows, r.rank);
  for (std::size_t i = 0; i < r.rank; ++i)
    for (std::size_t j = 0; j < m.rows; ++j) basis.at(j, i) = r.m.at(i, j);
  return basis;
}

bool solve(const Matrix& a, const Matrix& b, Matrix* x) {
  if (a.rows != b.rows) throw std::invalid_argument("solve: row count mismatch");
  RrefResult r = rref(a.hstack(b));
  // any pivot in the b-part means inconsistency
  for (std::size_t p : r.pivots)
    if (p >= a.cols) return false;
  Matrix sol(a.cols, b.cols);
  for (std::size_t pr = 0; pr < r.rank; ++pr)
    for (std::size_t j = 0; j < b.cols; ++j)
      sol.at(r.pivots[pr], j) = r.m.at(pr, a.cols + j);
  if (x) *x = std::move(sol);
  return true;
}

} // namespace gkm
