#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nlscn/types.hpp"

namespace nlscn {

/// Square complex matrix in compressed sparse row layout. Column indices are
/// sorted and unique within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int n, std::vector<int> row_ptr, std::vector<int> col_idx, CVector values);

  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(std::span<const cplx> d);
  /// Zero-valued matrix with the given sorted, duplicate-free column lists.
  static SparseMatrix from_pattern(const std::vector<std::vector<int>>& rows);
  /// Row-major dense input; exact zeros are dropped (diagonal kept).
  static SparseMatrix from_dense(int n, std::span<const cplx> dense);

  int size() const { return n_; }
  std::size_t nnz() const { return col_idx_.size(); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  /// Position of (i, j) in values(), or -1 when structurally zero.
  int find(int i, int j) const;
  cplx at(int i, int j) const;
  int max_row_nnz() const;

  bool same_pattern(const SparseMatrix& other) const;
  bool is_structurally_symmetric() const;
  /// A^T == A (no conjugation), entrywise to `tol` relative to max |a_ij|.
  bool is_symmetric(double tol = 0.0) const;

  SparseMatrix transpose() const;
  std::vector<cplx> to_dense() const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  CVector values_;
};

/// sum_k coeffs[k] * mats[k] on the union of the patterns.
SparseMatrix axpy_combine(std::span<const cplx> coeffs,
                          const std::vector<std::reference_wrapper<const SparseMatrix>>& mats);

CVector spmv(const SparseMatrix& A, std::span<const cplx> x);
void spmv_into(const SparseMatrix& A, std::span<const cplx> x, std::span<cplx> y);
/// conj(x)^T A y
cplx dot_form(const SparseMatrix& A, std::span<const cplx> x, std::span<const cplx> y);

/// Sparse LDU factorization P A P^T = L D U without pivoting, for matrices
/// with a symmetric nonzero pattern. Complex-symmetric inputs (A^T = A) store
/// only L and D, since then U = L^T.
///
/// Pivoting is unnecessary for the operators this library factors: their
/// Hermitian part is positive definite.
class Factorization {
 public:
  int size() const { return n_; }
  bool symmetric() const { return symmetric_; }
  std::size_t factor_nnz() const { return Li_.size(); }
  std::span<const int> ordering() const { return perm_; }

  CVector solve(std::span<const cplx> rhs) const;
  void solve_in_place(std::span<cplx> x) const;

 private:
  friend Factorization factorize(const SparseMatrix& A, std::span<const int> order);

  int n_ = 0;
  bool symmetric_ = true;
  std::vector<int> perm_;  // new -> old
  std::vector<int> Lp_;
  std::vector<int> Li_;
  CVector Lx_;
  CVector Ux_;  // rows of U, same pattern as the columns of L
  CVector D_;
};

/// Factorizes A. `order` lists the dofs in elimination order; when empty a
/// nested-dissection order is computed from the graph of A.
/// Throws FactorizationError on a zero or non-finite pivot.
Factorization factorize(const SparseMatrix& A, std::span<const int> order = {});

CVector solve(const Factorization& fact, std::span<const cplx> rhs);

/// Number of factorize() calls made by this process.
std::uint64_t factorization_count();

/// Nested dissection from level structures of the adjacency graph of A.
std::vector<int> graph_dissection_order(const SparseMatrix& A);

}  // namespace nlscn
