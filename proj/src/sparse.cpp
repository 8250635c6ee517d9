#include "parabolic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace parabolic {

SparsityPattern::SparsityPattern(std::size_t n, const std::vector<std::vector<int>> &rows)
    : n_(n) {
  row_ptr_.reserve(n + 1);
  row_ptr_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> r = i < rows.size() ? rows[i] : std::vector<int>{};
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    cols_.insert(cols_.end(), r.begin(), r.end());
    row_ptr_.push_back(static_cast<int>(cols_.size()));
  }
}

int SparsityPattern::find(int i, int j) const {
  const auto first = cols_.begin() + row_ptr_[i];
  const auto last = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
    return -1;
  return static_cast<int>(it - cols_.begin());
}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, bool symmetric)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0), symmetric_(symmetric) {}

void SparseMatrix::add(int i, int j, double v) {
  const int pos = pattern_->find(i, j);
  if (pos < 0)
    throw std::out_of_range("SparseMatrix::add: entry (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") not in pattern");
  values_[pos] += v;
}

double SparseMatrix::coeff(int i, int j) const {
  const int pos = pattern_->find(i, j);
  return pos < 0 ? 0.0 : values_[pos];
}

Vector SparseMatrix::diagonal() const {
  Vector d(size());
  for (std::size_t i = 0; i < size(); ++i)
    d[i] = coeff(static_cast<int>(i), static_cast<int>(i));
  return d;
}

Vector SparseMatrix::operator*(const Vector &x) const {
  const auto &rp = pattern_->row_ptr();
  const auto &cols = pattern_->cols();
  Vector y(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      s += values_[p] * x[cols[p]];
    y[i] = s;
  }
  return y;
}

double SparseMatrix::asymmetry() const {
  const auto &rp = pattern_->row_ptr();
  const auto &cols = pattern_->cols();
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      worst = std::max(worst, std::abs(values_[p] - coeff(cols[p], static_cast<int>(i))));
  return worst;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  const auto &rp = pattern_->row_ptr();
  const auto &cols = pattern_->cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t i = 0; i < size(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      A(i, cols[p]) = values_[p];
  return A;
}

SparseMatrix linear_combination(std::initializer_list<std::pair<double, const SparseMatrix *>> terms) {
  if (terms.size() == 0)
    throw std::invalid_argument("linear_combination: no terms");
  const SparseMatrix &first = *terms.begin()->second;
  bool symmetric = true;
  for (const auto &[c, A] : terms) {
    if (A->pattern_ptr() != first.pattern_ptr())
      throw std::invalid_argument("linear_combination: matrices must share a pattern");
    symmetric = symmetric && A->symmetric();
  }
  SparseMatrix result(first.pattern_ptr(), symmetric);
  auto &out = result.values();
  for (const auto &[c, A] : terms) {
    const auto &v = A->values();
    for (std::size_t p = 0; p < out.size(); ++p)
      out[p] += c * v[p];
  }
  return result;
}

CgResult solve_spd(const SparseMatrix &A, const Vector &rhs, const CgOptions &opts,
                   const Vector *initial_guess) {
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("solve_spd: tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(A.size());
  if (rhs.size() != n)
    throw std::invalid_argument("solve_spd: dimension mismatch");

  CgResult result;
  result.x = initial_guess ? *initial_guess : Vector::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    result.x.setZero();
    return result;
  }

  const Vector inv_diag = A.diagonal().cwiseInverse();
  if (!inv_diag.allFinite() || (A.diagonal().array() <= 0.0).any())
    throw LinearSolverError("solve_spd: matrix has a nonpositive diagonal entry", bnorm, 0);

  Vector r = rhs - A * result.x;
  double rnorm = r.norm();
  const double target = opts.tol * bnorm;
  if (rnorm <= target) {
    result.residual = rnorm;
    return result;
  }
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Vector Ap = A * p;
    const double curvature = p.dot(Ap);
    if (!(curvature > 0.0))
      throw LinearSolverError("solve_spd: negative curvature, matrix is not SPD", rnorm, it);
    const double alpha = rz / curvature;
    result.x += alpha * p;
    r -= alpha * Ap;
    rnorm = r.norm();
    if (rnorm <= target) {
      // the recursive residual can drift; confirm against the true one
      r = rhs - A * result.x;
      rnorm = r.norm();
      if (rnorm <= target) {
        result.iterations = it;
        result.residual = rnorm;
        return result;
      }
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw LinearSolverError("solve_spd: iteration cap reached with residual " +
                              std::to_string(rnorm / bnorm),
                          rnorm, opts.max_iters);
}

} // namespace parabolic
