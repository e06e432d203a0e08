#include "sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace tpmhd {

CsrMatrix::CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  TPMHD_REQUIRE(row_ptr_.size() == n_rows_ + 1, InvalidArgument, "row_ptr has wrong length");
  TPMHD_REQUIRE(col_idx_.size() == values_.size() && row_ptr_.back() == values_.size(),
                InvalidArgument, "inconsistent CSR arrays");
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const std::size_t k = find(i, j);
  return k == npos ? 0.0 : values_[k];
}

std::size_t CsrMatrix::find(std::size_t i, std::size_t j) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return npos;
  return static_cast<std::size_t>(it - col_idx_.begin());
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_rows_, 0.0);
  multiply_add(x, y);
  return y;
}

void CsrMatrix::multiply_add(std::span<const double> x, std::span<double> y, double s) const {
  TPMHD_REQUIRE(x.size() == n_cols_ && y.size() == n_rows_, InvalidArgument,
                "matrix-vector size mismatch");
  for (std::size_t i = 0; i < n_rows_; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
    y[i] += s * acc;
  }
}

double CsrMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  const std::vector<double> ay = multiply(y);
  TPMHD_REQUIRE(x.size() == n_rows_, InvalidArgument, "bilinear size mismatch");
  return std::inner_product(x.begin(), x.end(), ay.begin(), 0.0);
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::size_t> ptr(n_cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<std::size_t> idx(nnz());
  std::vector<double> val(nnz());
  std::vector<std::size_t> next(ptr.begin(), ptr.end() - 1);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t dst = next[col_idx_[k]]++;
      idx[dst] = i;
      val[dst] = values_[k];
    }
  }
  return CsrMatrix(n_cols_, n_rows_, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix CsrMatrix::scaled(double s) const {
  CsrMatrix out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> d(n_rows_ * n_cols_, 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      d[i * n_cols_ + col_idx_[k]] += values_[k];
    }
  }
  return d;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

CsrMatrix triplet_to_csr(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets) {
  std::vector<std::size_t> count(n_rows + 1, 0);
  for (const Triplet& t : triplets) {
    TPMHD_REQUIRE(t.row < n_rows && t.col < n_cols, InvalidArgument,
                  "triplet index (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                      ") out of range");
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  // Two stable bucket passes (by column, then by row) order the entries by
  // (row, col) with duplicates in input order, so summation is deterministic.
  std::vector<std::size_t> col_count(n_cols + 1, 0);
  for (const Triplet& t : triplets) ++col_count[t.col + 1];
  std::partial_sum(col_count.begin(), col_count.end(), col_count.begin());
  std::vector<std::size_t> by_col(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) by_col[col_count[triplets[k].col]++] = k;
  std::vector<std::size_t> order(triplets.size());
  std::vector<std::size_t> next(count.begin(), count.end() - 1);
  for (std::size_t k : by_col) order[next[triplets[k].row]++] = k;

  std::vector<std::size_t> row_ptr(n_rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t p = count[i]; p < count[i + 1]; ++p) {
      const Triplet& t = triplets[order[p]];
      if (col_idx.size() > row_ptr[i] && col_idx.back() == t.col) {
        values.back() += t.value;
      } else {
        col_idx.push_back(t.col);
        values.push_back(t.value);
      }
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return CsrMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void append_block(std::vector<Triplet>& out, const CsrMatrix& block, std::size_t row_offset,
                  std::size_t col_offset, double s) {
  const auto rp = block.row_ptr();
  const auto ci = block.col_idx();
  const auto v = block.values();
  for (std::size_t i = 0; i < block.n_rows(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) out.push_back({row_offset + i, col_offset + ci[k], s * v[k]});
  }
}

void replace_rows(CsrMatrix& a, std::span<double> rhs, std::span<const std::size_t> rows,
                  std::span<const double> values) {
  TPMHD_REQUIRE(rows.size() == values.size(), InvalidArgument, "row and value counts differ");
  TPMHD_REQUIRE(rhs.size() == a.n_rows(), InvalidArgument, "rhs length mismatch");
  const auto rp = a.row_ptr();
  auto v = a.values();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    TPMHD_REQUIRE(r < a.n_rows(), InvalidArgument, "constrained row out of range");
    const std::size_t d = a.find(r, r);
    TPMHD_REQUIRE(d != CsrMatrix::npos, InvalidArgument, "constrained row has no stored diagonal");
    for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) v[p] = 0.0;
    v[d] = 1.0;
    rhs[r] = values[k];
  }
}

namespace {

using EigenCsr = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenCsc to_eigen(const CsrMatrix& a) {
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  std::vector<int> outer(rp.begin(), rp.end());
  std::vector<int> inner(ci.begin(), ci.end());
  const Eigen::Map<const EigenCsr> view(static_cast<int>(a.n_rows()), static_cast<int>(a.n_cols()),
                                        static_cast<int>(a.nnz()), outer.data(), inner.data(),
                                        a.values().data());
  return EigenCsc(view);
}

// Applies a stored LU factor as the preconditioner of a Krylov solve.
class FactorPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  template <typename M>
  FactorPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  FactorPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  FactorPreconditioner& compute(const M&) { return *this; }

  template <typename R>
  Eigen::VectorXd solve(const Eigen::MatrixBase<R>& b) const {
    const Eigen::VectorXd rhs = b;
    return lu->solve(rhs);
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

  const Eigen::UmfPackLU<EigenCsc>* lu = nullptr;
};

}  // namespace

struct LinearSolver::Impl {
  Eigen::UmfPackLU<EigenCsc> lu;
  EigenCsc m;  // factored matrix
  EigenCsc work;
  // Pattern of the last matrix seen, and where each of its CSR entries sits in
  // column-major storage.
  std::vector<std::size_t> pattern_ptr;
  std::vector<std::size_t> pattern_idx;
  std::vector<std::size_t> csc_position;
  std::size_t generation = 0;
  std::size_t m_generation = static_cast<std::size_t>(-1);
  std::size_t work_generation = static_cast<std::size_t>(-1);
  bool analyzed = false;
  bool factored = false;

  Impl() {
    // Refinement is done here against the caller's tolerance; the step matrices
    // have symmetric patterns, for which nested dissection gives the least fill.
    lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
    lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
    lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
  }

  bool same_pattern(const CsrMatrix& a) const {
    return std::equal(a.row_ptr().begin(), a.row_ptr().end(), pattern_ptr.begin(), pattern_ptr.end()) &&
           std::equal(a.col_idx().begin(), a.col_idx().end(), pattern_idx.begin(), pattern_idx.end());
  }

  // Copies a into out (whose structure is tagged by out_generation). Returns
  // false when the pattern differs from the cached one.
  bool load(const CsrMatrix& a, EigenCsc& out, std::size_t& out_generation) {
    const bool same = !csc_position.empty() && same_pattern(a);
    if (!same) {
      pattern_ptr.assign(a.row_ptr().begin(), a.row_ptr().end());
      pattern_idx.assign(a.col_idx().begin(), a.col_idx().end());
      std::vector<double> index(a.nnz());
      std::iota(index.begin(), index.end(), 0.0);
      const EigenCsc pos = to_eigen(CsrMatrix(a.n_rows(), a.n_cols(), pattern_ptr, pattern_idx, std::move(index)));
      csc_position.assign(a.nnz(), 0);
      for (std::size_t k = 0; k < a.nnz(); ++k) csc_position[static_cast<std::size_t>(pos.valuePtr()[k])] = k;
      ++generation;
      analyzed = false;
    }
    if (out_generation != generation) {
      out = to_eigen(a);
      out_generation = generation;
      return same;
    }
    const auto v = a.values();
    double* dst = out.valuePtr();
    for (std::size_t k = 0; k < v.size(); ++k) dst[csc_position[k]] = v[k];
    return same;
  }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const CsrMatrix& a) {
  TPMHD_REQUIRE(a.n_rows() == a.n_cols(), InvalidArgument, "linear solve needs a square matrix");
  impl_->factored = false;
  impl_->load(a, impl_->m, impl_->m_generation);
  if (a.n_rows() == 0) {
    impl_->factored = true;
    return;
  }
  if (!impl_->analyzed) {
    impl_->lu.analyzePattern(impl_->m);
    impl_->analyzed = true;
  }
  impl_->lu.factorize(impl_->m);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->analyzed = false;
    throw LinearSolveError("sparse LU factorization failed (singular matrix?)",
                           std::numeric_limits<double>::infinity());
  }
  impl_->factored = true;
}

bool LinearSolver::factored() const { return impl_->factored; }

std::vector<double> LinearSolver::solve(std::span<const double> b, double tol) {
  TPMHD_REQUIRE(impl_->factored, InvalidArgument, "no factorization to solve with");
  TPMHD_REQUIRE(b.size() == static_cast<std::size_t>(impl_->m.rows()), InvalidArgument,
                "right-hand side has wrong length");
  const double bnorm = norm2(b);
  if (b.empty()) return {};
  if (bnorm == 0.0) return std::vector<double>(b.size(), 0.0);

  const EigenCsc& m = impl_->m;
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = impl_->lu.solve(rhs);

  // One step of iterative refinement, then the residual contract.
  Eigen::VectorXd r = rhs - m * x;
  double rnorm = r.norm();
  if (rnorm > tol * bnorm) {
    x += impl_->lu.solve(r);
    r = rhs - m * x;
    rnorm = r.norm();
  }
  if (!std::isfinite(rnorm) || rnorm > tol * bnorm) {
    throw LinearSolveError("linear solve residual " + std::to_string(rnorm / bnorm) +
                               " exceeds tolerance " + std::to_string(tol),
                           rnorm / bnorm);
  }
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> LinearSolver::solve(const CsrMatrix& a, std::span<const double> b, double tol) {
  TPMHD_REQUIRE(b.size() == a.n_rows(), InvalidArgument, "right-hand side has wrong length");
  factorize(a);
  return solve(b, tol);
}

bool LinearSolver::solve_preconditioned(const CsrMatrix& a, std::span<const double> b, std::vector<double>& x,
                                        double tol, int max_iterations, int* iterations) {
  TPMHD_REQUIRE(impl_->factored, InvalidArgument, "no factorization to precondition with");
  TPMHD_REQUIRE(a.n_rows() == a.n_cols() && static_cast<Eigen::Index>(a.n_rows()) == impl_->m.rows(),
                InvalidArgument, "matrix does not match the stored factorization");
  TPMHD_REQUIRE(b.size() == a.n_rows(), InvalidArgument, "right-hand side has wrong length");
  if (iterations) *iterations = 0;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(b.size(), 0.0);
    return true;
  }
  impl_->load(a, impl_->work, impl_->work_generation);
  const EigenCsc& m = impl_->work;
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::GMRES<EigenCsc, FactorPreconditioner> gmres;
  gmres.set_restart(max_iterations);
  gmres.setMaxIterations(max_iterations);
  gmres.setTolerance(0.1 * tol);
  gmres.compute(m);
  gmres.preconditioner().lu = &impl_->lu;
  const Eigen::VectorXd sol = gmres.solve(rhs);
  if (iterations) *iterations = static_cast<int>(gmres.iterations());
  const double rnorm = (rhs - m * sol).norm();
  if (!std::isfinite(rnorm) || rnorm > tol * bnorm) return false;
  x.assign(sol.data(), sol.data() + sol.size());
  return true;
}

std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b, double tol) {
  LinearSolver solver;
  return solver.solve(a, b, tol);
}

}  // namespace tpmhd
