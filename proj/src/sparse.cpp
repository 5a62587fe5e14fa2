#include "fsi/linsolve.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace fsi {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> trips) {
  for (const auto& t : trips)
    if (t.r < 0 || t.r >= rows || t.c < 0 || t.c >= cols)
      throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
  // Stable sort keeps duplicate accumulation in insertion order, which makes
  // assembly bitwise reproducible regardless of how the triplets were built.
  std::stable_sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  m.col_idx_.reserve(trips.size());
  m.val_.reserve(trips.size());

  size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    while (k < trips.size() && trips[k].r == r) {
      const int c = trips[k].c;
      double v = trips[k].v;
      ++k;
      while (k < trips.size() && trips[k].r == r && trips[k].c == c) {
        v += trips[k].v;
        ++k;
      }
      m.col_idx_.push_back(c);
      m.val_.push_back(v);
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::coeff(int r, int c) const {
  for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    if (col_idx_[k] == c) return val_[k];
  return 0.0;
}

DenseVector SparseMatrix::multiply(const DenseVector& x) const {
  if (x.size() != cols_)
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  DenseVector y(rows_);
  // Row-parallel; each row accumulates serially in index order, so the
  // result is independent of the thread count.
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      s += val_[k] * x[col_idx_[k]];
    y[r] = s;
  }
  return y;
}

DenseVector SparseMatrix::multiply_transpose(const DenseVector& x) const {
  if (x.size() != rows_)
    throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
  DenseVector y = DenseVector::Zero(cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      y[col_idx_[k]] += val_[k] * x[r];
  return y;
}

double SparseMatrix::quad_form(const DenseVector& x, const DenseVector& y) const {
  if (x.size() != rows_ || y.size() != cols_)
    throw std::invalid_argument("SparseMatrix::quad_form: size mismatch");
  double s = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double row = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      row += val_[k] * y[col_idx_[k]];
    s += x[r] * row;
  }
  return s;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(val_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.push_back({col_idx_[k], r, val_[k]});
  return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::submatrix(const std::vector<int>& rows,
                                     const std::vector<int>& cols) const {
  std::vector<int> col_of(cols_, -1);
  for (size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int j = col_of[col_idx_[k]];
      if (j >= 0) t.push_back({static_cast<int>(i), j, val_[k]});
    }
  }
  return from_triplets(static_cast<int>(rows.size()),
                       static_cast<int>(cols.size()), std::move(t));
}

void SparseMatrix::append_triplets(std::vector<Triplet>& out, double scale,
                                   int r0, int c0, bool transpose) const {
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (transpose)
        out.push_back({r0 + col_idx_[k], c0 + r, scale * val_[k]});
      else
        out.push_back({r0 + r, c0 + col_idx_[k], scale * val_[k]});
    }
}

double SparseMatrix::symmetry_error() const {
  double max_abs = 0.0, max_diff = 0.0;
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      max_abs = std::max(max_abs, std::abs(val_[k]));
      max_diff = std::max(max_diff, std::abs(val_[k] - coeff(col_idx_[k], r)));
    }
  return max_abs > 0.0 ? max_diff / max_abs : 0.0;
}

Eigen::MatrixXd SparseMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      m(r, col_idx_[k]) = val_[k];
  return m;
}

LinearSystem eliminate_constraints(const LinearSystem& sys) {
  const int n = sys.A.rows();
  for (const auto& c : sys.constraints)
    if (c.dof < 0 || c.dof >= n)
      throw std::invalid_argument("eliminate_constraints: constraint index out of range");

  std::vector<char> fixed(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& c : sys.constraints) {
    fixed[c.dof] = 1;
    value[c.dof] = c.value;
  }

  LinearSystem out;
  out.b = sys.b;
  out.constraints = sys.constraints;
  std::vector<Triplet> t;
  t.reserve(sys.A.nnz());
  const auto& rp = sys.A.row_ptr();
  const auto& ci = sys.A.col_idx();
  const auto& vv = sys.A.values();
  for (int r = 0; r < n; ++r) {
    if (fixed[r]) continue;
    for (int k = rp[r]; k < rp[r + 1]; ++k) {
      const int c = ci[k];
      if (fixed[c])
        out.b[r] -= vv[k] * value[c];  // move known column into the RHS
      else
        t.push_back({r, c, vv[k]});
    }
  }
  for (int r = 0; r < n; ++r)
    if (fixed[r]) {
      t.push_back({r, r, 1.0});
      out.b[r] = value[r];
    }
  out.A = SparseMatrix::from_triplets(n, sys.A.cols(), std::move(t));
  return out;
}

struct Factorization::Impl {
  Eigen::SparseMatrix<double> A_eigen;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  const SparseMatrix* a_csr = nullptr;  // only for the residual check
  SparseMatrix a_copy;
  double tol = 1e-10;
};

Factorization::Factorization(const SparseMatrix& A, double tol)
    : impl_(std::make_shared<Impl>()) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("Factorization: matrix must be square");

  // Structural pre-check: an empty row or column is singular for sure, and
  // we can name it precisely.
  {
    std::vector<char> col_seen(A.cols(), 0);
    const auto& rp = A.row_ptr();
    for (int r = 0; r < A.rows(); ++r) {
      if (rp[r] == rp[r + 1])
        throw SingularMatrixError("singular matrix: row " + std::to_string(r) +
                                  " has no entries (zero pivot row)");
      for (int k = rp[r]; k < rp[r + 1]; ++k) col_seen[A.col_idx()[k]] = 1;
    }
    for (int c = 0; c < A.cols(); ++c)
      if (!col_seen[c])
        throw SingularMatrixError("singular matrix: column " + std::to_string(c) +
                                  " has no entries (zero pivot column)");
  }

  impl_->a_copy = A;
  impl_->a_csr = &impl_->a_copy;
  impl_->tol = tol;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nnz());
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k)
      trips.emplace_back(r, A.col_idx()[k], A.values()[k]);
  impl_->A_eigen.resize(A.rows(), A.cols());
  impl_->A_eigen.setFromTriplets(trips.begin(), trips.end());
  impl_->A_eigen.makeCompressed();

  impl_->lu.analyzePattern(impl_->A_eigen);
  impl_->lu.factorize(impl_->A_eigen);
  if (impl_->lu.info() != Eigen::Success)
    throw SingularMatrixError("singular matrix: LU factorization failed (" +
                              impl_->lu.lastErrorMessage() + ")");
}

DenseVector Factorization::solve(const DenseVector& b) const {
  DenseVector x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success)
    throw SingularMatrixError("singular matrix: triangular solve failed");
  const DenseVector r = impl_->a_csr->multiply(x) - b;
  const double scale = std::max(b.norm(), 1e-30);
  if (r.norm() > impl_->tol * scale)
    throw std::runtime_error("direct solve residual " + std::to_string(r.norm() / scale) +
                             " exceeds tolerance");
  return x;
}

DenseVector factor_and_solve(const LinearSystem& sys) {
  const LinearSystem reduced =
      sys.constraints.empty() ? sys : eliminate_constraints(sys);
  Factorization f(reduced.A);
  return f.solve(reduced.b);
}

}  // namespace fsi
