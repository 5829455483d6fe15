#ifndef MINRESQLP_OPERATOR_HPP_
#define MINRESQLP_OPERATOR_HPP_

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "minresqlp/types.hpp"

namespace minresqlp {

// Raised when a supposedly symmetric input is not.
class AsymmetryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Symmetric matrix held by its lower triangle.
template <typename T>
class DenseSymmetricMatrix {
 public:
  DenseSymmetricMatrix() = default;

  // Only the lower triangle of `a` is read.
  explicit DenseSymmetricMatrix(const Matrix<T>& a) : lower_(a.template triangularView<Eigen::Lower>()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("DenseSymmetricMatrix: matrix is not square");
  }

  Index size() const noexcept { return lower_.rows(); }
  const Matrix<T>& lower() const noexcept { return lower_; }

  T operator()(Index i, Index j) const { return i >= j ? lower_(i, j) : lower_(j, i); }

  Matrix<T> full() const { return lower_.template selfadjointView<Eigen::Lower>(); }

  void multiply(const Vector<T>& x, Vector<T>& y) const {
    y.noalias() = lower_.template selfadjointView<Eigen::Lower>() * x;
  }

 private:
  Matrix<T> lower_;
};

// Matrix-free symmetric operator v -> A v.
template <typename T>
class SymmetricOperator {
 public:
  using ApplyFn = std::function<void(const Vector<T>&, Vector<T>&)>;

  SymmetricOperator() = default;
  SymmetricOperator(Index n, ApplyFn apply) : n_(n), apply_(std::move(apply)) {
    if (n <= 0) throw std::invalid_argument("SymmetricOperator: dimension must be positive");
    if (!apply_) throw std::invalid_argument("SymmetricOperator: empty apply");
  }

  Index size() const noexcept { return n_; }

  void apply(const Vector<T>& x, Vector<T>& y) const {
    if (x.size() != n_) throw std::invalid_argument("SymmetricOperator: dimension mismatch");
    y.resize(n_);
    apply_(x, y);
  }

  Vector<T> operator*(const Vector<T>& x) const {
    Vector<T> y(n_);
    apply(x, y);
    return y;
  }

  // Explicit backing when the operator was built from a stored matrix.
  const DenseSymmetricMatrix<T>* dense() const noexcept { return dense_.get(); }
  const Eigen::SparseMatrix<T>* sparse() const noexcept { return sparse_.get(); }

  // Materializes A column by column; meant for small problems and tests.
  Matrix<T> to_dense() const {
    if (dense_) return dense_->full();
    if (sparse_) return Matrix<T>(*sparse_);
    Matrix<T> a(n_, n_);
    Vector<T> e = Vector<T>::Zero(n_), col(n_);
    for (Index j = 0; j < n_; ++j) {
      e(j) = T(1);
      apply(e, col);
      a.col(j) = col;
      e(j) = T(0);
    }
    return a;
  }

  static SymmetricOperator from_dense(DenseSymmetricMatrix<T> a) {
    auto store = std::make_shared<const DenseSymmetricMatrix<T>>(std::move(a));
    SymmetricOperator op(store->size(), [store](const Vector<T>& x, Vector<T>& y) { store->multiply(x, y); });
    op.dense_ = store;
    return op;
  }

  // The full matrix is checked for symmetry before it is accepted.
  static SymmetricOperator from_dense(const Matrix<T>& a, T rel_tol = T(1e-12)) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SymmetricOperator: matrix is not square");
    const T scale = a.cwiseAbs().maxCoeff();
    const T asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > rel_tol * scale) {
      throw AsymmetryError("matrix is not symmetric: max|A_ij - A_ji| = " + std::to_string(static_cast<double>(asym)));
    }
    return from_dense(DenseSymmetricMatrix<T>(a));
  }

  // The pattern must hold both triangles.
  static SymmetricOperator from_sparse(Eigen::SparseMatrix<T> a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SymmetricOperator: matrix is not square");
    auto store = std::make_shared<const Eigen::SparseMatrix<T>>(std::move(a));
    SymmetricOperator op(store->rows(), [store](const Vector<T>& x, Vector<T>& y) { y.noalias() = (*store) * x; });
    op.sparse_ = store;
    return op;
  }

  static SymmetricOperator identity(Index n) {
    return SymmetricOperator(n, [](const Vector<T>& x, Vector<T>& y) { y = x; });
  }

  static SymmetricOperator diagonal(const Vector<T>& d) {
    return from_dense(DenseSymmetricMatrix<T>(Matrix<T>(d.asDiagonal())));
  }

 private:
  Index n_ = 0;
  ApplyFn apply_;
  std::shared_ptr<const DenseSymmetricMatrix<T>> dense_;
  std::shared_ptr<const Eigen::SparseMatrix<T>> sparse_;
};

// A - sigma I, evaluated on the fly.
template <typename T>
SymmetricOperator<T> shifted(const SymmetricOperator<T>& op, T sigma) {
  if (sigma == T(0)) return op;
  return SymmetricOperator<T>(op.size(), [op, sigma](const Vector<T>& x, Vector<T>& y) {
    op.apply(x, y);
    y -= sigma * x;
  });
}

// Symmetric positive-definite M, given only through solves M q = z.
template <typename T>
class Preconditioner {
 public:
  using SolveFn = std::function<void(const Vector<T>&, Vector<T>&)>;

  Preconditioner() = default;
  Preconditioner(Index n, SolveFn solve) : n_(n), solve_(std::move(solve)) {
    if (n <= 0) throw std::invalid_argument("Preconditioner: dimension must be positive");
    if (!solve_) throw std::invalid_argument("Preconditioner: empty solve");
  }

  Index size() const noexcept { return n_; }

  void solve(const Vector<T>& z, Vector<T>& q) const {
    if (z.size() != n_) throw std::invalid_argument("Preconditioner: dimension mismatch");
    q.resize(n_);
    solve_(z, q);
  }

  Vector<T> solve(const Vector<T>& z) const {
    Vector<T> q(n_);
    solve(z, q);
    return q;
  }

  // M = diag(m); q = z ./ m.
  static Preconditioner diagonal(const Vector<T>& m) {
    Vector<T> inv = m.cwiseInverse();
    return Preconditioner(m.size(), [inv](const Vector<T>& z, Vector<T>& q) { q = inv.cwiseProduct(z); });
  }

 private:
  Index n_ = 0;
  SolveFn solve_;
};

// Largest relative defect |x'Ay - y'Ax| over `trials` random pairs.
template <typename T, typename Rng>
T symmetry_defect(const SymmetricOperator<T>& op, int trials, Rng& rng) {
  T worst = T(0);
  const Index n = op.size();
  for (int t = 0; t < trials; ++t) {
    Vector<T> x(n), y(n);
    for (Index i = 0; i < n; ++i) x(i) = T(rng()) / T(rng.max()) - T(0.5);
    for (Index i = 0; i < n; ++i) y(i) = T(rng()) / T(rng.max()) - T(0.5);
    const Vector<T> ax = op * x, ay = op * y;
    const T scale = ax.norm() * y.norm() + ay.norm() * x.norm();
    if (scale == T(0)) continue;
    worst = std::max(worst, std::abs(x.dot(ay) - y.dot(ax)) / scale);
  }
  return worst;
}

}  // namespace minresqlp

#endif  // MINRESQLP_OPERATOR_HPP_
