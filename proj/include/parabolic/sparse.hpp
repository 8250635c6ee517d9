#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parabolic {

using Vector = Eigen::VectorXd;

/// Compressed-row sparsity pattern with sorted column indices.
class SparsityPattern {
public:
  SparsityPattern(std::size_t n, const std::vector<std::vector<int>> &rows);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t nnz() const { return cols_.size(); }
  [[nodiscard]] const std::vector<int> &row_ptr() const { return row_ptr_; }
  [[nodiscard]] const std::vector<int> &cols() const { return cols_; }
  /// Position of (i, j) in the value array; -1 if not in the pattern.
  [[nodiscard]] int find(int i, int j) const;

private:
  std::size_t n_;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
};

/// Square CSR matrix over a shared pattern, so that linear combinations of
/// matrices on the same mesh are plain value-array operations.
class SparseMatrix {
public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, bool symmetric = true);

  [[nodiscard]] std::size_t size() const { return pattern_ ? pattern_->size() : 0; }
  [[nodiscard]] bool symmetric() const { return symmetric_; }
  [[nodiscard]] const SparsityPattern &pattern() const { return *pattern_; }
  [[nodiscard]] const std::shared_ptr<const SparsityPattern> &pattern_ptr() const {
    return pattern_;
  }
  [[nodiscard]] const std::vector<double> &values() const { return values_; }
  std::vector<double> &values() { return values_; }

  void add(int i, int j, double v);
  [[nodiscard]] double coeff(int i, int j) const;
  [[nodiscard]] Vector diagonal() const;
  [[nodiscard]] Vector operator*(const Vector &x) const;
  /// max |A_ij - A_ji|
  [[nodiscard]] double asymmetry() const;
  [[nodiscard]] Eigen::MatrixXd to_dense() const;

private:
  std::shared_ptr<const SparsityPattern> pattern_;
  std::vector<double> values_;
  bool symmetric_ = true;
};

/// sum_i c_i A_i over matrices sharing one pattern.
SparseMatrix linear_combination(std::initializer_list<std::pair<double, const SparseMatrix *>> terms);

class LinearSolverError : public std::runtime_error {
public:
  LinearSolverError(const std::string &what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  [[nodiscard]] double residual() const { return residual_; }
  [[nodiscard]] int iterations() const { return iterations_; }

private:
  double residual_;
  int iterations_;
};

struct CgOptions {
  double tol = 1e-10;
  int max_iters = 10000;
};

struct CgResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Stops once
/// ||b - A x|| <= tol * ||b||. Throws LinearSolverError on negative
/// curvature or when the iteration cap is reached.
CgResult solve_spd(const SparseMatrix &A, const Vector &rhs, const CgOptions &opts = {},
                   const Vector *initial_guess = nullptr);

} // namespace parabolic
