// Sparse CSR matrices, symmetric constraint elimination, and a direct
// sparse-LU solve with internal residual verification.
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsi {

using DenseVector = Eigen::VectorXd;

struct Triplet {
  int r, c;
  double v;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compressed sparse row with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Duplicate (r,c) entries are accumulated in their order of appearance.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> trips);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(val_.size()); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return val_; }

  double coeff(int r, int c) const;

  DenseVector multiply(const DenseVector& x) const;            // A x
  DenseVector multiply_transpose(const DenseVector& x) const;  // A^T x
  double quad_form(const DenseVector& x, const DenseVector& y) const;  // x^T A y

  SparseMatrix transpose() const;

  // Principal/rectangular submatrix A(rows, cols) with the given dof lists.
  SparseMatrix submatrix(const std::vector<int>& rows,
                         const std::vector<int>& cols) const;

  // Append scale*A (or scale*A^T) into a triplet buffer at offset (r0, c0).
  void append_triplets(std::vector<Triplet>& out, double scale, int r0, int c0,
                       bool transpose = false) const;

  // Largest relative asymmetry |A - A^T| / max|A|; 0 for empty matrices.
  double symmetry_error() const;

  Eigen::MatrixXd dense() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> val_;
};

struct Constraint {
  int dof;
  double value;
};

struct LinearSystem {
  SparseMatrix A;
  DenseVector b;
  std::vector<Constraint> constraints;
};

// Symmetric elimination: constrained rows/columns are replaced by identity,
// the right-hand side absorbs the column contributions, so constrained dofs
// solve to exactly their prescribed values.
LinearSystem eliminate_constraints(const LinearSystem& sys);

// Sparse LU (COLAMD ordering). Reusable across right-hand sides; every solve
// verifies ||Ax-b|| <= tol * max(||b||, floor) and throws otherwise.
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& A, double tol = 1e-10);
  DenseVector solve(const DenseVector& b) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// One-shot: eliminate constraints, factor, solve, return the full solution
// (constrained dofs carry their prescribed values).
DenseVector factor_and_solve(const LinearSystem& sys);

}  // namespace fsi
