#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace gkm {

/// Exact rational scalar. mpq_class already maintains the invariants we need:
/// lowest terms, positive denominator, zero represented as 0/1.
using Rat = mpq_class;

std::string rat_to_string(const Rat& q);   // "p" or "p/q"
Rat rat_from_string(const std::string& s); // accepts "p" and "p/q"

/// Dense row-major matrix of rationals.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rat> a; // rows*cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  Rat& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n);
  Matrix transpose() const;
  Matrix mul(const Matrix& other) const;
  /// Horizontal concatenation [this | other]; row counts must agree.
  Matrix hstack(const Matrix& other) const;
  bool is_zero() const;
  bool operator==(const Matrix& other) const {
    return rows == other.rows && cols == other.cols && a == other.a;
  }
};

struct RrefResult {
  Matrix m;
  std::size_t rank = 0;
  std::vector<std::size_t> pivots; // pivot column per pivot row
};

/// Reduced row-echelon form (Gauss-Jordan with exact pivots).
RrefResult rref(Matrix m);

std::size_t rank(const Matrix& m);

/// Columns span the null space {x : m x = 0}; count = cols - rank.
Matrix kernel_basis(const Matrix& m);

/// Columns span col(a) ∩ col(b), via the kernel of [a | -b].
Matrix intersect_column_spaces(const Matrix& a, const Matrix& b);

/// Canonical basis of the column space: rref of the transpose, transposed back.
/// Deterministic for any input spanning the same space.
Matrix column_space_basis(const Matrix& m);

/// Solve a x = b for each column of b. Returns false if any column is
/// outside col(a); on success x has a.cols rows and b.cols columns.
bool solve(const Matrix& a, const Matrix& b, Matrix* x);

} // namespace gkm
