#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tpmhd {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

// Compressed sparse row storage. Column indices are strictly increasing in
// each row; explicitly stored zeros are allowed and kept (they pin the
// sparsity pattern of step matrices across time levels).
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<double> values);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Zero if (i, j) is not stored.
  double at(std::size_t i, std::size_t j) const;
  // Position of (i, j) in values(), or npos when not stored.
  std::size_t find(std::size_t i, std::size_t j) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<double> multiply(std::span<const double> x) const;
  // y += s * A x
  void multiply_add(std::span<const double> x, std::span<double> y, double s = 1.0) const;
  // x^T A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  CsrMatrix transpose() const;
  CsrMatrix scaled(double s) const;
  std::vector<double> to_dense() const;  // row-major
  double max_abs() const;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

// Duplicates are summed. Throws InvalidArgument on out-of-range indices.
CsrMatrix triplet_to_csr(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets);

double norm2(std::span<const double> v);

// Appends s * block shifted by (row_offset, col_offset).
void append_block(std::vector<Triplet>& out, const CsrMatrix& block, std::size_t row_offset,
                  std::size_t col_offset, double s = 1.0);

// Essential conditions by row replacement: row r becomes the unit row and
// rhs[r] = value. Every listed row must store its diagonal entry.
void replace_rows(CsrMatrix& a, std::span<double> rhs, std::span<const std::size_t> rows,
                  std::span<const double> values);

inline constexpr double kDefaultLinearTolerance = 1e-10;

// Sparse direct solver for square unsymmetric systems. The symbolic analysis
// is kept and reused while successive matrices share the same pattern.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  // Throws LinearSolveError if factorization fails or the relative residual
  // ||A x - b|| exceeds tol * ||b||.
  std::vector<double> solve(const CsrMatrix& a, std::span<const double> b,
                            double tol = kDefaultLinearTolerance);

  // Factor once, then solve against the stored factor. The residual contract
  // refers to the factored matrix.
  void factorize(const CsrMatrix& a);
  bool factored() const;
  std::vector<double> solve(std::span<const double> b, double tol = kDefaultLinearTolerance);

  // GMRES on a, preconditioned by the stored factor of a nearby matrix with the
  // same size. Returns false, leaving x untouched, when the residual contract is
  // not met within max_iterations.
  bool solve_preconditioned(const CsrMatrix& a, std::span<const double> b, std::vector<double>& x, double tol,
                            int max_iterations, int* iterations = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b,
                                 double tol = kDefaultLinearTolerance);

}  // namespace tpmhd
