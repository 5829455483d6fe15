#ifndef MINRESQLP_PRECONDITION_HPP_
#define MINRESQLP_PRECONDITION_HPP_

#include <Eigen/Sparse>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "minresqlp/operator.hpp"
#include "minresqlp/types.hpp"

namespace minresqlp {

class BinormalizationBreakdown : public std::runtime_error {
 public:
  explicit BinormalizationBreakdown(Index row)
      : std::runtime_error("binormalization breakdown: row " + std::to_string(row) + " is identically zero"),
        row_(row) {}
  Index row() const noexcept { return row_; }

 private:
  Index row_;
};

// D = diag(d); the scaled system is (DAD) y = D b with x = D y.
template <typename T>
struct DiagonalScaling {
  Vector<T> d;
  T delta = T(0);
  Index sweeps = 0;

  Index size() const noexcept { return d.size(); }

  SymmetricOperator<T> scale(const SymmetricOperator<T>& op) const {
    if (op.size() != d.size()) throw std::invalid_argument("DiagonalScaling: dimension mismatch");
    const Vector<T> dd = d;
    return SymmetricOperator<T>(op.size(), [op, dd](const Vector<T>& v, Vector<T>& y) {
      op.apply(dd.cwiseProduct(v), y);
      y.array() *= dd.array();
    });
  }

  Matrix<T> scale(const Matrix<T>& a) const { return d.asDiagonal() * a * d.asDiagonal(); }

  Vector<T> scale_rhs(const Vector<T>& b) const { return d.cwiseProduct(b); }
  Vector<T> recover(const Vector<T>& y) const { return d.cwiseProduct(y); }

  // M = D^{-2}, so M q = z is q = d.^2 .* z.
  Preconditioner<T> preconditioner() const {
    const Vector<T> d2 = d.cwiseAbs2();
    return Preconditioner<T>(d.size(), [d2](const Vector<T>& z, Vector<T>& q) { q = d2.cwiseProduct(z); });
  }
};

namespace detail {

template <typename T>
DiagonalScaling<T> diag_scaling_from_lower(const Matrix<T>& a, T delta) {
  if (!(delta > T(0))) throw std::invalid_argument("diag_scaling: delta must be positive");
  const Index n = a.rows();
  Vector<T> m = Vector<T>::Constant(n, delta);
  for (Index j = 0; j < n; ++j) m(j) = std::max(m(j), std::sqrt(std::abs(a(j, j))));
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const T v = std::abs(a(i, j));
      m(i) = std::max(m(i), v);
      m(j) = std::max(m(j), v);
    }
  return {m.cwiseInverse(), delta, 0};
}

// Gauss-Seidel sweeps on the squared entries B = A.*A; x holds d.^2.
template <typename T>
DiagonalScaling<T> livne_golub(const Eigen::SparseMatrix<T>& a, Index sweeps, T tolbin) {
  if (sweeps < 1) throw std::invalid_argument("binormalize: sweeps must be >= 1");
  const Index n = a.rows();
  Eigen::SparseMatrix<T> bsq = a.cwiseAbs2();
  bsq.makeCompressed();
  Vector<T> bdiag = Vector<T>::Zero(n);
  for (Index j = 0; j < n; ++j)
    for (typename Eigen::SparseMatrix<T>::InnerIterator it(bsq, j); it; ++it)
      if (it.row() == j) bdiag(j) = it.value();

  Vector<T> x = Vector<T>::Ones(n);
  Vector<T> bx = bsq * x;
  for (Index i = 0; i < n; ++i)
    if (bx(i) == T(0)) throw BinormalizationBreakdown(i);

  auto row_norms = [&]() { return (x.array() * bx.array()).sqrt().matrix().eval(); };
  auto spread = [](const Vector<T>& r) { return (r.maxCoeff() - r.minCoeff()) / (r.maxCoeff() + r.minCoeff()); };

  T avg = x.dot(bx) / T(n);
  Index done = 0;
  while (done < sweeps) {
    for (Index i = 0; i < n; ++i) {
      const T bii = bdiag(i);
      const T c2 = T(n - 1) * bii;
      const T c1 = T(n - 2) * (bx(i) - bii * x(i));
      const T c0 = -bii * x(i) * x(i) + T(2) * bx(i) * x(i) - T(n) * avg;
      const T disc = c1 * c1 - T(4) * c2 * c0;
      const T den = -c1 - std::sqrt(std::max(disc, T(0)));
      if (disc < T(0) || den == T(0)) continue;
      const T xi = T(2) * c0 / den;
      if (!(xi > T(0)) || !std::isfinite(xi)) continue;
      const T dlt = xi - x(i);
      avg += (T(2) * dlt * bx(i) + dlt * dlt * bii) / T(n);
      for (typename Eigen::SparseMatrix<T>::InnerIterator it(bsq, i); it; ++it) bx(it.row()) += dlt * it.value();
      x(i) = xi;
    }
    ++done;
    if (spread(row_norms()) <= tolbin) break;
  }

  // Common scale putting all row norms inside [1 - tolbin, 1 + tolbin] when converged.
  const Vector<T> r = row_norms();
  const T c2 = T(2) / (r.maxCoeff() + r.minCoeff());
  DiagonalScaling<T> out;
  out.d = (x * c2).cwiseSqrt();
  out.delta = T(0);
  out.sweeps = done;
  return out;
}

}  // namespace detail

// d_j = 1 / max{delta, sqrt|A_jj|, max_{i != j} |A_ij|}
template <typename T>
DiagonalScaling<T> diag_scaling(const DenseSymmetricMatrix<T>& a, T delta) {
  return detail::diag_scaling_from_lower(a.lower(), delta);
}

template <typename T>
DiagonalScaling<T> diag_scaling(const Eigen::SparseMatrix<T>& a, T delta) {
  if (!(delta > T(0))) throw std::invalid_argument("diag_scaling: delta must be positive");
  const Index n = a.rows();
  Vector<T> m = Vector<T>::Constant(n, delta);
  for (Index j = 0; j < a.outerSize(); ++j)
    for (typename Eigen::SparseMatrix<T>::InnerIterator it(a, j); it; ++it) {
      const Index i = it.row();
      const T v = std::abs(it.value());
      if (i == j) {
        m(j) = std::max(m(j), std::sqrt(v));
      } else {
        m(i) = std::max(m(i), v);
        m(j) = std::max(m(j), v);
      }
    }
  return {m.cwiseInverse(), delta, 0};
}

template <typename T>
DiagonalScaling<T> diag_scaling(const SymmetricOperator<T>& op, T delta) {
  if (op.dense()) return diag_scaling(*op.dense(), delta);
  if (op.sparse()) return diag_scaling(*op.sparse(), delta);
  throw std::invalid_argument("diag_scaling: operator has no explicit matrix");
}

inline constexpr double kDefaultTolBin = 1e-2;
inline constexpr Index kDefaultBinSweeps = 50;

// Stops early once every row of DAD has 2-norm within tolbin of 1.
template <typename T>
DiagonalScaling<T> binormalize(const DenseSymmetricMatrix<T>& a, Index sweeps = kDefaultBinSweeps,
                               T tolbin = T(kDefaultTolBin)) {
  return detail::livne_golub<T>(a.full().sparseView(), sweeps, tolbin);
}

template <typename T>
DiagonalScaling<T> binormalize(const Eigen::SparseMatrix<T>& a, Index sweeps = kDefaultBinSweeps,
                               T tolbin = T(kDefaultTolBin)) {
  return detail::livne_golub<T>(a, sweeps, tolbin);
}

template <typename T>
DiagonalScaling<T> binormalize(const SymmetricOperator<T>& op, Index sweeps = kDefaultBinSweeps,
                               T tolbin = T(kDefaultTolBin)) {
  if (op.dense()) return binormalize(*op.dense(), sweeps, tolbin);
  if (op.sparse()) return binormalize(*op.sparse(), sweeps, tolbin);
  throw std::invalid_argument("binormalize: operator has no explicit matrix");
}

enum class Layout { Augmented, Kkt, NormalReg, TwoLayer, KktReg };

inline const char* layout_name(Layout l) {
  switch (l) {
    case Layout::Augmented: return "augmented";
    case Layout::Kkt: return "kkt";
    case Layout::NormalReg: return "normal_reg";
    case Layout::TwoLayer: return "two_layer";
    case Layout::KktReg: return "kkt_reg";
  }
  return "unknown";
}

inline Layout parse_layout(const std::string& s) {
  if (s == "augmented") return Layout::Augmented;
  if (s == "kkt") return Layout::Kkt;
  if (s == "normal_reg") return Layout::NormalReg;
  if (s == "two_layer") return Layout::TwoLayer;
  if (s == "kkt_reg") return Layout::KktReg;
  throw std::invalid_argument("unknown reformulation layout: " + s);
}

inline Index layout_blocks(Layout l) {
  switch (l) {
    case Layout::Augmented: return 2;
    case Layout::Kkt: return 4;
    case Layout::NormalReg: return 1;
    case Layout::TwoLayer: return 2;
    case Layout::KktReg: return 4;
  }
  return 0;
}

template <typename T>
struct AugmentedOperator {
  SymmetricOperator<T> op;
  Layout layout = Layout::Augmented;
  T delta = T(0);
  Index base_size = 0;
};

// Symmetric compatible reformulation of min ||Ax - b|| (optionally regularized).
template <typename T>
struct Reformulation {
  AugmentedOperator<T> system;
  Vector<T> rhs;
  Index x_block = 0;

  Vector<T> block(const Vector<T>& y, Index i) const { return y.segment(i * system.base_size, system.base_size); }
  Vector<T> extract(const Vector<T>& y) const { return block(y, x_block); }
};

template <typename T>
Reformulation<T> build_reformulation(const SymmetricOperator<T>& a, const std::type_identity_t<Vector<T>>& b, Layout layout, T delta) {
  const Index n = a.size();
  if (b.size() != n) throw std::invalid_argument("build_reformulation: dimension mismatch");
  if (!(delta >= T(0))) throw std::invalid_argument("build_reformulation: delta must be nonnegative");
  const bool needs_delta = layout == Layout::NormalReg || layout == Layout::TwoLayer || layout == Layout::KktReg;
  if (needs_delta && !(delta > T(0)))
    throw std::invalid_argument(std::string("build_reformulation: layout ") + layout_name(layout) +
                                " requires delta > 0");

  const T d2 = delta * delta;
  Reformulation<T> out;
  out.system.layout = layout;
  out.system.delta = delta;
  out.system.base_size = n;
  const Index m = layout_blocks(layout) * n;
  out.rhs = Vector<T>::Zero(m);
  typename SymmetricOperator<T>::ApplyFn fn;

  switch (layout) {
    case Layout::Augmented:
      // [I A; A -delta^2 I] [r; x] = [b; 0]
      fn = [a, n, d2](const Vector<T>& v, Vector<T>& y) {
        Vector<T> t;
        a.apply(v.segment(n, n), t);
        y.head(n) = v.head(n) + t;
        a.apply(v.head(n), t);
        y.tail(n) = t - d2 * v.tail(n);
      };
      out.rhs.head(n) = b;
      out.x_block = 1;
      break;
    case Layout::Kkt:
    case Layout::KktReg: {
      // [0 0 I A; 0 -I A 0; I A delta^2 I 0; A 0 0 0] [r; x; y; v] = [0; 0; b; 0]
      const T reg = layout == Layout::KktReg ? d2 : T(0);
      fn = [a, n, reg](const Vector<T>& v, Vector<T>& y) {
        Vector<T> t;
        a.apply(v.segment(3 * n, n), t);
        y.segment(0, n) = v.segment(2 * n, n) + t;
        a.apply(v.segment(2 * n, n), t);
        y.segment(n, n) = t - v.segment(n, n);
        a.apply(v.segment(n, n), t);
        y.segment(2 * n, n) = v.segment(0, n) + t + reg * v.segment(2 * n, n);
        a.apply(v.segment(0, n), t);
        y.segment(3 * n, n) = t;
      };
      out.rhs.segment(2 * n, n) = b;
      out.x_block = 1;
      break;
    }
    case Layout::NormalReg:
      // (A^2 + delta^2 I) x = A b
      fn = [a, d2](const Vector<T>& v, Vector<T>& y) {
        Vector<T> t;
        a.apply(v, t);
        a.apply(t, y);
        y += d2 * v;
      };
      out.rhs = a * b;
      out.x_block = 0;
      break;
    case Layout::TwoLayer:
      // [I A^2; A^2 -delta^2 A^2] [x; v] = [0; A b]
      fn = [a, n, d2](const Vector<T>& v, Vector<T>& y) {
        Vector<T> t, s;
        a.apply(v.tail(n), t);
        a.apply(t, s);
        y.head(n) = v.head(n) + s;
        a.apply(v.head(n) - d2 * v.tail(n), t);
        a.apply(t, s);
        y.tail(n) = s;
      };
      out.rhs.tail(n) = a * b;
      out.x_block = 0;
      break;
  }
  out.system.op = SymmetricOperator<T>(m, std::move(fn));
  return out;
}

}  // namespace minresqlp

#endif  // MINRESQLP_PRECONDITION_HPP_
