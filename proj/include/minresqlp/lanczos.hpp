#ifndef MINRESQLP_LANCZOS_HPP_
#define MINRESQLP_LANCZOS_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "minresqlp/operator.hpp"
#include "minresqlp/types.hpp"

namespace minresqlp {

class ZeroRhsError : public std::invalid_argument {
 public:
  ZeroRhsError() : std::invalid_argument("right-hand side is zero") {}
};

class IndefinitePreconditionerError : public std::runtime_error {
 public:
  IndefinitePreconditionerError() : std::runtime_error("preconditioner is not positive definite (q'z < 0)") {}
};

// After step k: v_curr = v_k, alpha = alpha_k, beta = beta_k, beta_next = beta_{k+1}, v_next = v_{k+1}.
// Right after init k = 0 and v_next = v_1, beta_next = beta_1.
// The preconditioned form keeps z and q = M^{-1} z instead of v; there v_k = q_k / beta_k.
template <typename T>
struct LanczosState {
  Index k = 0;
  T alpha = T(0);
  T beta_prev = T(0);
  T beta = T(0);
  T beta_next = T(0);
  T beta1 = T(0);
  Vector<T> v_prev, v_curr, v_next;
  Vector<T> z_prev, z_curr, z_next, q_curr, q_next;
  bool preconditioned = false;
};

template <typename T>
LanczosState<T> lanczos_init(const SymmetricOperator<T>& op, const std::type_identity_t<Vector<T>>& b) {
  if (b.size() != op.size()) throw std::invalid_argument("lanczos_init: dimension mismatch");
  const T beta1 = b.norm();
  if (beta1 == T(0)) throw ZeroRhsError();
  LanczosState<T> s;
  s.beta1 = s.beta_next = beta1;
  s.v_curr = Vector<T>::Zero(b.size());
  s.v_next = b / beta1;
  return s;
}

template <typename T>
LanczosState<T> precond_lanczos_init(const SymmetricOperator<T>& op, const Preconditioner<T>& m, const std::type_identity_t<Vector<T>>& b) {
  if (b.size() != op.size() || m.size() != op.size()) throw std::invalid_argument("lanczos_init: dimension mismatch");
  if (b.norm() == T(0)) throw ZeroRhsError();
  LanczosState<T> s;
  s.preconditioned = true;
  s.z_curr = Vector<T>::Zero(b.size());
  s.z_next = b;
  m.solve(b, s.q_next);
  const T qz = s.q_next.dot(b);
  if (qz < -T(4) * machine_eps<T>() * s.q_next.norm() * b.norm()) throw IndefinitePreconditionerError();
  s.beta1 = s.beta_next = std::sqrt(std::max(qz, T(0)));
  if (s.beta1 == T(0)) throw IndefinitePreconditionerError();
  return s;
}

// p = (A - sigma I) v_k - beta_k v_{k-1}; alpha = v_k'p; beta_{k+1} v_{k+1} = p - alpha v_k.
template <typename T>
void lanczos_step(const SymmetricOperator<T>& op, LanczosState<T>& s, T sigma = T(0)) {
  if (!(s.beta_next > T(0))) throw std::logic_error("lanczos_step: process already terminated");
  s.v_prev.swap(s.v_curr);
  s.v_curr.swap(s.v_next);
  s.beta_prev = s.beta;
  s.beta = s.beta_next;
  ++s.k;
  op.apply(s.v_curr, s.v_next);
  Vector<T>& p = s.v_next;
  if (sigma != T(0)) p -= sigma * s.v_curr;
  if (s.k > 1) p -= s.beta * s.v_prev;
  s.alpha = s.v_curr.dot(p);
  p -= s.alpha * s.v_curr;
  s.beta_next = p.norm();
  if (s.beta_next > T(0)) p /= s.beta_next;
}

// Removes the v_1 component from the unnormalized v_2 direction, then renormalizes.
template <typename T>
void reorthogonalize_second(LanczosState<T>& s) {
  if (s.k != 1 || !(s.beta_next > T(0))) return;
  if (s.preconditioned) return;
  Vector<T>& v = s.v_next;
  v -= s.v_curr.dot(v) * s.v_curr;
  const T nrm = v.norm();
  s.beta_next *= nrm;
  if (nrm > T(0)) v /= nrm;
}

// z_{k+1} = p/beta_k - (alpha/beta_k) z_k - (beta_k/beta_{k-1}) z_{k-1}, M q_{k+1} = z_{k+1}.
template <typename T>
void precond_lanczos_step(const SymmetricOperator<T>& op, const Preconditioner<T>& m, LanczosState<T>& s,
                          T sigma = T(0)) {
  if (!(s.beta_next > T(0))) throw std::logic_error("lanczos_step: process already terminated");
  s.z_prev.swap(s.z_curr);
  s.z_curr.swap(s.z_next);
  s.q_curr.swap(s.q_next);
  s.beta_prev = s.beta;
  s.beta = s.beta_next;
  ++s.k;
  Vector<T> p;
  op.apply(s.q_curr, p);
  if (sigma != T(0)) p -= sigma * s.q_curr;
  s.alpha = s.q_curr.dot(p) / (s.beta * s.beta);
  s.z_next = p / s.beta - (s.alpha / s.beta) * s.z_curr;
  if (s.k > 1) s.z_next -= (s.beta / s.beta_prev) * s.z_prev;
  m.solve(s.z_next, s.q_next);
  const T qz = s.q_next.dot(s.z_next);
  if (qz < -T(4) * machine_eps<T>() * s.q_next.norm() * s.z_next.norm()) throw IndefinitePreconditionerError();
  s.beta_next = std::sqrt(std::max(qz, T(0)));
}

// Explicit Lanczos factorization A V_k = V_{k+1} Tbar_k, for tests and diagnostics.
template <typename T>
struct LanczosFactorization {
  Matrix<T> V;      // n x (k+1); last column is v_{k+1} (zero at breakdown)
  Vector<T> alpha;  // alpha_1..alpha_k
  Vector<T> beta;   // beta_1..beta_{k+1}
  bool breakdown = false;

  Index steps() const noexcept { return alpha.size(); }

  // (k+1) x k lower bidiagonal-plus-diagonal Tbar_k.
  Matrix<T> tbar() const {
    const Index k = steps();
    Matrix<T> t = Matrix<T>::Zero(k + 1, k);
    for (Index j = 0; j < k; ++j) {
      t(j, j) = alpha(j);
      t(j + 1, j) = beta(j + 1);
      if (j > 0) t(j - 1, j) = beta(j);
    }
    return t;
  }

  Matrix<T> t_square() const { return tbar().topRows(steps()); }
};

// Runs up to max_steps with full reorthogonalization if requested; stops when
// beta_{k+1} <= breakdown_tol * max(|alpha|, beta).
template <typename T>
LanczosFactorization<T> lanczos_factorize(const SymmetricOperator<T>& op, const std::type_identity_t<Vector<T>>& b, Index max_steps,
                                          bool full_reorth, T breakdown_tol = T(0)) {
  const Index n = op.size();
  LanczosState<T> s = lanczos_init(op, b);
  std::vector<T> alpha, beta{s.beta1};
  Matrix<T> V(n, max_steps + 1);
  V.col(0) = s.v_next;
  T scale = T(0);
  bool breakdown = false;
  Index k = 0;
  while (k < max_steps) {
    lanczos_step(op, s);
    ++k;
    if (full_reorth && s.beta_next > T(0)) {
      Vector<T> p = s.v_next * s.beta_next;
      for (int pass = 0; pass < 2; ++pass) p -= V.leftCols(k) * (V.leftCols(k).transpose() * p);
      s.beta_next = p.norm();
      if (s.beta_next > T(0)) s.v_next = p / s.beta_next;
    }
    scale = std::max({scale, std::abs(s.alpha), s.beta});
    alpha.push_back(s.alpha);
    if (s.beta_next <= breakdown_tol * scale) {
      beta.push_back(T(0));
      V.col(k).setZero();
      breakdown = true;
      break;
    }
    beta.push_back(s.beta_next);
    V.col(k) = s.v_next;
  }
  LanczosFactorization<T> f;
  f.V = V.leftCols(k + 1);
  f.alpha = Eigen::Map<const Vector<T>>(alpha.data(), static_cast<Index>(alpha.size()));
  f.beta = Eigen::Map<const Vector<T>>(beta.data(), static_cast<Index>(beta.size()));
  f.breakdown = breakdown;
  return f;
}

}  // namespace minresqlp

#endif  // MINRESQLP_LANCZOS_HPP_
