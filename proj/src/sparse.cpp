#include "nlscn/sparse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "nlscn/errors.hpp"

namespace nlscn {

SparseMatrix::SparseMatrix(int n, std::vector<int> row_ptr, std::vector<int> col_idx,
                           CVector values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  if (n < 0 || static_cast<int>(row_ptr_.size()) != n + 1 || row_ptr_.front() != 0 ||
      static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size() ||
      col_idx_.size() != values_.size()) {
    throw DimensionError("SparseMatrix: inconsistent CSR arrays");
  }
  for (int i = 0; i < n; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || col_idx_[p] >= n ||
          (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])) {
        throw DimensionError("SparseMatrix: column indices must be sorted, unique and in range");
      }
    }
  }
}

SparseMatrix SparseMatrix::identity(int n) {
  CVector d(n, cplx{1.0, 0.0});
  return diagonal(d);
}

SparseMatrix SparseMatrix::diagonal(std::span<const cplx> d) {
  const int n = static_cast<int>(d.size());
  std::vector<int> rp(n + 1), ci(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(ci.begin(), ci.end(), 0);
  return SparseMatrix(n, std::move(rp), std::move(ci), CVector(d.begin(), d.end()));
}

SparseMatrix SparseMatrix::from_pattern(const std::vector<std::vector<int>>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<int> rp(n + 1, 0);
  for (int i = 0; i < n; ++i) rp[i + 1] = rp[i] + static_cast<int>(rows[i].size());
  std::vector<int> ci;
  ci.reserve(rp[n]);
  for (const auto& r : rows) ci.insert(ci.end(), r.begin(), r.end());
  CVector vals(ci.size());
  return SparseMatrix(n, std::move(rp), std::move(ci), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(int n, std::span<const cplx> dense) {
  if (static_cast<int>(dense.size()) != n * n) {
    throw DimensionError("from_dense: expected n*n entries");
  }
  std::vector<int> rp(n + 1, 0), ci;
  CVector vals;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx v = dense[i * n + j];
      if (v != cplx{} || i == j) {
        ci.push_back(j);
        vals.push_back(v);
      }
    }
    rp[i + 1] = static_cast<int>(ci.size());
  }
  return SparseMatrix(n, std::move(rp), std::move(ci), std::move(vals));
}

int SparseMatrix::find(int i, int j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? static_cast<int>(it - col_idx_.begin()) : -1;
}

cplx SparseMatrix::at(int i, int j) const {
  const int p = find(i, j);
  return p < 0 ? cplx{} : values_[p];
}

int SparseMatrix::max_row_nnz() const {
  int m = 0;
  for (int i = 0; i < n_; ++i) m = std::max(m, row_ptr_[i + 1] - row_ptr_[i]);
  return m;
}

bool SparseMatrix::same_pattern(const SparseMatrix& o) const {
  return n_ == o.n_ && row_ptr_ == o.row_ptr_ && col_idx_ == o.col_idx_;
}

bool SparseMatrix::is_structurally_symmetric() const {
  for (int i = 0; i < n_; ++i)
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (find(col_idx_[p], i) < 0) return false;
  return true;
}

bool SparseMatrix::is_symmetric(double tol) const {
  double scale = 0.0;
  for (const cplx& v : values_) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < n_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const int j = col_idx_[p];
      if (std::abs(values_[p] - at(j, i)) > tol * scale) return false;
    }
  }
  return true;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> rp(n_ + 1, 0);
  for (int c : col_idx_) ++rp[c + 1];
  for (int i = 0; i < n_; ++i) rp[i + 1] += rp[i];
  std::vector<int> next(rp.begin(), rp.end() - 1);
  std::vector<int> ci(col_idx_.size());
  CVector vals(values_.size());
  for (int i = 0; i < n_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const int q = next[col_idx_[p]]++;
      ci[q] = i;
      vals[q] = values_[p];
    }
  }
  return SparseMatrix(n_, std::move(rp), std::move(ci), std::move(vals));
}

std::vector<cplx> SparseMatrix::to_dense() const {
  std::vector<cplx> d(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d[i * n_ + col_idx_[p]] = values_[p];
  return d;
}

SparseMatrix axpy_combine(std::span<const cplx> coeffs,
                          const std::vector<std::reference_wrapper<const SparseMatrix>>& mats) {
  if (coeffs.size() != mats.size() || mats.empty()) {
    throw DimensionError("axpy_combine: need one coefficient per matrix");
  }
  const int n = mats.front().get().size();
  for (const auto& m : mats) {
    if (m.get().size() != n) throw DimensionError("axpy_combine: dimension mismatch");
  }
  std::vector<int> rp(n + 1, 0), ci;
  CVector vals;
  std::vector<int> merged;
  for (int i = 0; i < n; ++i) {
    merged.clear();
    for (const auto& m : mats) {
      const auto& A = m.get();
      for (int p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p) merged.push_back(A.col_idx()[p]);
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    const std::size_t base = ci.size();
    ci.insert(ci.end(), merged.begin(), merged.end());
    vals.resize(ci.size());
    for (std::size_t k = 0; k < mats.size(); ++k) {
      const auto& A = mats[k].get();
      auto pos = ci.begin() + static_cast<std::ptrdiff_t>(base);
      for (int p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p) {
        pos = std::lower_bound(pos, ci.end(), A.col_idx()[p]);
        vals[pos - ci.begin()] += coeffs[k] * A.values()[p];
      }
    }
    rp[i + 1] = static_cast<int>(ci.size());
  }
  return SparseMatrix(n, std::move(rp), std::move(ci), std::move(vals));
}

void spmv_into(const SparseMatrix& A, std::span<const cplx> x, std::span<cplx> y) {
  const int n = A.size();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n) {
    throw DimensionError("spmv: dimension mismatch");
  }
  const auto rp = A.row_ptr();
  const auto ci = A.col_idx();
  const auto v = A.values();
  for (int i = 0; i < n; ++i) {
    cplx s{};
    for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
}

CVector spmv(const SparseMatrix& A, std::span<const cplx> x) {
  CVector y(A.size());
  spmv_into(A, x, y);
  return y;
}

cplx dot_form(const SparseMatrix& A, std::span<const cplx> x, std::span<const cplx> y) {
  const int n = A.size();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n) {
    throw DimensionError("dot_form: dimension mismatch");
  }
  const auto rp = A.row_ptr();
  const auto ci = A.col_idx();
  const auto v = A.values();
  cplx total{};
  for (int i = 0; i < n; ++i) {
    cplx s{};
    for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * y[ci[p]];
    total += std::conj(x[i]) * s;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Ordering

namespace {

struct GraphDissector {
  const SparseMatrix& A;
  std::vector<int>& order;
  std::vector<int> stamp;
  std::vector<int> level;
  int next_stamp = 0;

  // BFS restricted to nodes carrying `s`; returns visit order, fills level.
  std::vector<int> bfs(int root, int s) {
    std::vector<int> queue{root};
    level[root] = 0;
    stamp[root] = -s;  // visited marker for this sweep
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int v = queue[h];
      for (int p = A.row_ptr()[v]; p < A.row_ptr()[v + 1]; ++p) {
        const int w = A.col_idx()[p];
        if (stamp[w] == s) {
          stamp[w] = -s;
          level[w] = level[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (int v : queue) stamp[v] = s;
    return queue;
  }

  void split(std::vector<int> nodes) {
    if (nodes.size() <= 32) {
      order.insert(order.end(), nodes.begin(), nodes.end());
      return;
    }
    const int s = ++next_stamp;
    for (int v : nodes) stamp[v] = s;

    // pseudo-peripheral root: restart from the last node reached
    std::vector<int> reach = bfs(nodes.front(), s);
    for (int sweep = 0; sweep < 2; ++sweep) {
      const int far = reach.back();
      std::vector<int> again = bfs(far, s);
      const bool deeper = level[again.back()] > level[reach.back()];
      reach = std::move(again);
      if (!deeper) break;
    }
    const int depth = level[reach.back()];
    if (depth < 2) {
      order.insert(order.end(), nodes.begin(), nodes.end());
      return;
    }
    // separator level: first level at which half the subset has been reached
    std::vector<int> count(depth + 1, 0);
    for (int v : reach) ++count[level[v]];
    const std::size_t half = nodes.size() / 2;
    std::size_t seen = 0;
    int sep = 1;
    for (int l = 0; l <= depth; ++l) {
      seen += count[l];
      if (seen >= half) {
        sep = std::clamp(l, 1, depth - 1);
        break;
      }
    }
    std::vector<int> lower, upper, separator;
    for (int v : reach) {
      stamp[v] = -s;
      if (level[v] < sep) lower.push_back(v);
      else if (level[v] == sep) separator.push_back(v);
      else upper.push_back(v);
    }
    for (int v : nodes) {
      if (stamp[v] == s) upper.push_back(v);  // other components
      stamp[v] = 0;
    }
    split(std::move(lower));
    split(std::move(upper));
    order.insert(order.end(), separator.begin(), separator.end());
  }
};

}  // namespace

std::vector<int> graph_dissection_order(const SparseMatrix& A) {
  const int n = A.size();
  std::vector<int> order;
  order.reserve(n);
  GraphDissector d{A, order, std::vector<int>(n, 0), std::vector<int>(n, 0)};
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  d.split(std::move(all));
  return order;
}

// ---------------------------------------------------------------------------
// Factorization

namespace {
std::atomic<std::uint64_t> g_factorizations{0};
}

std::uint64_t factorization_count() { return g_factorizations.load(); }

Factorization factorize(const SparseMatrix& A, std::span<const int> order) {
  g_factorizations.fetch_add(1);
  const int n = A.size();
  if (!A.is_structurally_symmetric()) {
    throw FactorizationError("factorize: matrix pattern must be symmetric");
  }

  Factorization F;
  F.n_ = n;
  if (order.empty()) {
    F.perm_ = graph_dissection_order(A);
  } else {
    F.perm_.assign(order.begin(), order.end());
  }
  std::vector<int> iperm(n, -1);
  if (static_cast<int>(F.perm_.size()) != n) {
    throw DimensionError("factorize: ordering has the wrong length");
  }
  for (int k = 0; k < n; ++k) {
    const int old = F.perm_[k];
    if (old < 0 || old >= n || iperm[old] >= 0) {
      throw DimensionError("factorize: ordering is not a permutation");
    }
    iperm[old] = k;
  }

  // B = P A P^T, rows sorted
  std::vector<int> rp(n + 1, 0);
  for (int k = 0; k < n; ++k) {
    const int old = F.perm_[k];
    rp[k + 1] = rp[k] + (A.row_ptr()[old + 1] - A.row_ptr()[old]);
  }
  std::vector<int> ci(rp[n]);
  CVector vals(rp[n]);
  {
    std::vector<std::pair<int, cplx>> row;
    for (int k = 0; k < n; ++k) {
      const int old = F.perm_[k];
      row.clear();
      for (int p = A.row_ptr()[old]; p < A.row_ptr()[old + 1]; ++p) {
        row.emplace_back(iperm[A.col_idx()[p]], A.values()[p]);
      }
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t q = 0; q < row.size(); ++q) {
        ci[rp[k] + q] = row[q].first;
        vals[rp[k] + q] = row[q].second;
      }
    }
  }
  const SparseMatrix B(n, std::move(rp), std::move(ci), std::move(vals));
  F.symmetric_ = B.is_symmetric(0.0);
  const SparseMatrix Bt = F.symmetric_ ? SparseMatrix{} : B.transpose();

  // Symbolic: elimination tree and column counts of L.
  std::vector<int> parent(n, -1), flag(n), lnz(n, 0);
  for (int k = 0; k < n; ++k) {
    flag[k] = k;
    for (int p = B.row_ptr()[k]; p < B.row_ptr()[k + 1]; ++p) {
      int i = B.col_idx()[p];
      if (i >= k) break;
      for (; flag[i] != k; i = parent[i]) {
        if (parent[i] == -1) parent[i] = k;
        ++lnz[i];
        flag[i] = k;
      }
    }
  }
  F.Lp_.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) F.Lp_[k + 1] = F.Lp_[k] + lnz[k];
  F.Li_.assign(F.Lp_[n], 0);
  F.Lx_.assign(F.Lp_[n], cplx{});
  if (!F.symmetric_) F.Ux_.assign(F.Lp_[n], cplx{});
  F.D_.assign(n, cplx{});

  // Numeric: up-looking, row k of L and column k of U per step.
  CVector Y(n), Z(n);
  std::vector<int> pattern(n);
  std::fill(lnz.begin(), lnz.end(), 0);
  for (int k = 0; k < n; ++k) {
    int top = n;
    flag[k] = k;
    double row_scale = 0.0;
    cplx diag{};
    // upper column k of B lands in Y, lower row k in Z
    for (int p = B.row_ptr()[k]; p < B.row_ptr()[k + 1]; ++p) {
      int i = B.col_idx()[p];
      row_scale = std::max(row_scale, std::abs(B.values()[p]));
      if (i == k) {
        diag = B.values()[p];
        continue;
      }
      if (i > k) continue;
      Z[i] = B.values()[p];
      Y[i] = F.symmetric_ ? B.values()[p] : Bt.values()[p];
      int len = 0;
      for (; flag[i] != k; i = parent[i]) {
        pattern[len++] = i;
        flag[i] = k;
      }
      while (len > 0) pattern[--top] = pattern[--len];
    }
    cplx dk = diag;
    for (; top < n; ++top) {
      const int i = pattern[top];
      const cplx yi = Y[i];
      Y[i] = cplx{};
      const int p_end = F.Lp_[i] + lnz[i];
      if (F.symmetric_) {
        for (int p = F.Lp_[i]; p < p_end; ++p) Y[F.Li_[p]] -= F.Lx_[p] * yi;
        const cplx lki = yi / F.D_[i];
        dk -= lki * yi;
        F.Li_[p_end] = k;
        F.Lx_[p_end] = lki;
      } else {
        const cplx zi = Z[i];
        Z[i] = cplx{};
        for (int p = F.Lp_[i]; p < p_end; ++p) {
          Y[F.Li_[p]] -= F.Lx_[p] * yi;
          Z[F.Li_[p]] -= F.Ux_[p] * zi;
        }
        const cplx lki = zi / F.D_[i];
        dk -= lki * yi;
        F.Li_[p_end] = k;
        F.Lx_[p_end] = lki;
        F.Ux_[p_end] = yi / F.D_[i];
      }
      ++lnz[i];
    }
    if (!std::isfinite(dk.real()) || !std::isfinite(dk.imag()) ||
        std::abs(dk) <= 1e-14 * row_scale || row_scale == 0.0) {
      throw FactorizationError("factorize: singular pivot at elimination step " +
                               std::to_string(k));
    }
    F.D_[k] = dk;
  }
  return F;
}

void Factorization::solve_in_place(std::span<cplx> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw DimensionError("solve: dimension mismatch");
  }
  CVector w(n_);
  for (int k = 0; k < n_; ++k) w[k] = x[perm_[k]];
  for (int i = 0; i < n_; ++i) {
    const cplx wi = w[i];
    if (wi == cplx{}) continue;
    for (int p = Lp_[i]; p < Lp_[i + 1]; ++p) w[Li_[p]] -= Lx_[p] * wi;
  }
  for (int i = 0; i < n_; ++i) w[i] /= D_[i];
  const CVector& U = symmetric_ ? Lx_ : Ux_;
  for (int i = n_ - 1; i >= 0; --i) {
    cplx s = w[i];
    for (int p = Lp_[i]; p < Lp_[i + 1]; ++p) s -= U[p] * w[Li_[p]];
    w[i] = s;
  }
  for (int k = 0; k < n_; ++k) x[perm_[k]] = w[k];
}

CVector Factorization::solve(std::span<const cplx> rhs) const {
  CVector x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

CVector solve(const Factorization& fact, std::span<const cplx> rhs) { return fact.solve(rhs); }

}  // namespace nlscn
