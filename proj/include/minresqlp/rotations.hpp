#ifndef MINRESQLP_ROTATIONS_HPP_
#define MINRESQLP_ROTATIONS_HPP_

#include <cmath>

namespace minresqlp {

// 2x2 reflection [c s; s -c] with c*r = a, s*r = b.
template <typename T>
struct Reflection {
  T c = T(1);
  T s = T(0);
  T r = T(0);
};

template <typename T>
constexpr T sign_of(T x) noexcept {
  return x < T(0) ? T(-1) : T(1);
}

template <typename T>
Reflection<T> sym_ortho(T a, T b) {
  using std::abs;
  using std::sqrt;
  if (b == T(0)) return {sign_of(a), T(0), abs(a)};
  if (a == T(0)) return {T(0), sign_of(b), abs(b)};
  if (abs(b) > abs(a)) {
    const T t = a / b;
    const T s = sign_of(b) / sqrt(T(1) + t * t);
    return {s * t, s, b / s};
  }
  const T t = b / a;
  const T c = sign_of(a) / sqrt(T(1) + t * t);
  return {c, c * t, a / c};
}

// Overflow-safe Euclidean norms of short vectors.
template <typename T>
T norm2(T a, T b) {
  return std::hypot(a, b);
}
template <typename T>
T norm3(T a, T b, T c) {
  // Nested so that a zero entry gives exactly the shorter norm.
  return std::hypot(std::hypot(a, b), c);
}

// Current left reflection Q_{k,k+1}: annihilates beta_{k+1} below gamma_k.
template <typename T>
struct LeftReflectionOutput {
  Reflection<T> q;  // q.r = gamma_k^(2)
  T tau = T(0);
  T phi = T(0);
};

template <typename T>
LeftReflectionOutput<T> apply_left_reflection(T gamma, T beta_next, T phi_prev) {
  LeftReflectionOutput<T> out;
  out.q = sym_ortho(gamma, beta_next);
  out.tau = out.q.c * phi_prev;
  out.phi = out.q.s * phi_prev;
  return out;
}

// Previous left reflection Q_{k-1,k} carried onto column k+1 of the tridiagonal.
template <typename T>
struct CarriedColumn {
  T delta2 = T(0);      // delta_k^(2)
  T gamma = T(0);       // gamma_k (pending current reflection)
  T epsilon_next = T(0);  // epsilon_{k+1}
  T delta_next = T(0);  // delta_{k+1}
};

template <typename T>
CarriedColumn<T> apply_previous_reflection(const Reflection<T>& prev, T delta, T alpha, T beta_next) {
  return {prev.c * delta + prev.s * alpha, prev.s * delta - prev.c * alpha, prev.s * beta_next, -prev.c * beta_next};
}

// Both reflections acting on a 2x3 block [gamma delta 0; beta alpha beta'].
template <typename T>
struct LeftBlockOutput {
  Reflection<T> q;
  T gamma2 = T(0);
  T delta2 = T(0);
  T epsilon = T(0);
  T gamma_next = T(0);
  T delta_next = T(0);
  T tau = T(0);
  T phi = T(0);
};

template <typename T>
LeftBlockOutput<T> apply_left_block(T gamma, T beta_next, T delta_next, T alpha_next, T beta_next2, T phi_prev) {
  const LeftReflectionOutput<T> cur = apply_left_reflection(gamma, beta_next, phi_prev);
  const CarriedColumn<T> col = apply_previous_reflection(cur.q, delta_next, alpha_next, beta_next2);
  return {cur.q, cur.q.r, col.delta2, col.epsilon_next, col.gamma, col.delta_next, cur.tau, cur.phi};
}

// Right reflections P_{k-2,k} and P_{k-1,k} restoring lower-tridiagonal form.
template <typename T>
struct RightPairInput {
  T gamma5_km2 = T(0);  // gamma_{k-2}^(5)
  T epsilon_k = T(0);
  T theta_km1 = T(0);   // vartheta_{k-1}
  T gamma4_km1 = T(0);  // gamma_{k-1}^(4)
  T delta2_k = T(0);    // delta_k^(2)
  T gamma2_k = T(0);    // gamma_k^(2)
};

template <typename T>
struct RightPairOutput {
  Reflection<T> p2;  // P_{k-2,k}
  Reflection<T> p3;  // P_{k-1,k}
  T gamma6_km2 = T(0);
  T theta2_km1 = T(0);
  T eta_k = T(0);
  T delta3_k = T(0);
  T gamma3_k = T(0);
  T gamma5_km1 = T(0);
  T theta_k = T(0);
  T gamma4_k = T(0);
};

template <typename T>
RightPairOutput<T> apply_right_pair(const RightPairInput<T>& in) {
  RightPairOutput<T> out;
  out.p2 = sym_ortho(in.gamma5_km2, in.epsilon_k);
  out.gamma6_km2 = out.p2.r;
  out.delta3_k = out.p2.s * in.theta_km1 - out.p2.c * in.delta2_k;
  out.gamma3_k = -out.p2.c * in.gamma2_k;
  out.eta_k = out.p2.s * in.gamma2_k;
  out.theta2_km1 = out.p2.c * in.theta_km1 + out.p2.s * in.delta2_k;
  out.p3 = sym_ortho(in.gamma4_km1, out.delta3_k);
  out.gamma5_km1 = out.p3.r;
  out.theta_k = out.p3.s * out.gamma3_k;
  out.gamma4_k = -out.p3.c * out.gamma3_k;
  return out;
}

}  // namespace minresqlp

#endif  // MINRESQLP_ROTATIONS_HPP_
