#ifndef MINRESQLP_MINRES_HPP_
#define MINRESQLP_MINRES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

#include "minresqlp/lanczos.hpp"
#include "minresqlp/operator.hpp"
#include "minresqlp/rotations.hpp"
#include "minresqlp/solver_types.hpp"

namespace minresqlp {

// Norms carried by MINRES after the left reflection of step k.
template <typename T>
struct MinresNorms {
  T phi = T(0);
  T psi = T(0);
  T omega = T(0);
};

// phi_k = phi_{k-1} s_k, psi_k = phi_k ||[gamma_{k+1}, delta_{k+2}]||, omega_k = ||[omega_{k-1}, tau_k]||.
template <typename T>
MinresNorms<T> minres_norm_recurrences(T phi_prev, const Reflection<T>& q, T gamma_next, T delta_next2, T omega_prev) {
  MinresNorms<T> out;
  out.phi = phi_prev * q.s;
  out.psi = out.phi * norm2(gamma_next, delta_next2);
  out.omega = norm2(omega_prev, q.c * phi_prev);
  return out;
}

template <typename T>
SolveResult<T> minres_solve(const SymmetricOperator<T>& op, const std::type_identity_t<Vector<T>>& b, const SolverConfig<T>& cfg = {},
                            const std::type_identity_t<IterationObserver<T>>& observer = {}) {
  cfg.validate();
  const Index n = op.size();
  if (b.size() != n) throw std::invalid_argument("minres_solve: dimension mismatch");

  SolveResult<T> res;
  res.x = Vector<T>::Zero(n);
  if (b.norm() == T(0)) {
    res.flag = Termination::ZeroRhs;
    return res;
  }

  const T eps = machine_eps<T>();
  const T inf = std::numeric_limits<T>::infinity();
  const Index maxit = cfg.iteration_limit(n);

  LanczosState<T> lz = lanczos_init(op, b);
  const T beta1 = lz.beta1;

  Reflection<T> left_prev{T(-1), T(0), T(0)};
  T delta = 0, eps_k = 0, phi = beta1, psi = 0;
  T anorm = 0, gamma_min = inf, kappa = 1, omega = 0, chi = 0;
  Vector<T>& x = res.x;
  Vector<T> d_km1 = Vector<T>::Zero(n), d_km2 = Vector<T>::Zero(n), d_k(n), x_prev(n);

  Termination flag = Termination::MaxIterations;
  Index k = 0;
  Index done = 0;
  while (true) {
    ++k;
    lanczos_step(op, lz, cfg.shift);
    if (cfg.local_reorth && k == 1) reorthogonalize_second(lz);
    const T alpha = lz.alpha, beta = lz.beta, beta_next = lz.beta_next;

    const T rho = k == 1 ? norm2(alpha, beta_next) : norm3(beta, alpha, beta_next);
    anorm = std::max(anorm, rho);
    const CarriedColumn<T> col = apply_previous_reflection(left_prev, delta, alpha, beta_next);
    const T phi_prev = phi;
    psi = phi_prev * norm2(col.gamma, col.delta_next);

    // x_{k-1} already solves the least-squares problem.
    if (k > 1 && cfg.ar_test && (psi == T(0) || psi / (anorm * phi_prev) <= cfg.tol)) {
      flag = Termination::ArConverged;
      break;
    }

    const LeftReflectionOutput<T> lr = apply_left_reflection(col.gamma, beta_next, phi_prev);
    const T gamma2 = lr.q.r;
    const T thr = eps * anorm;
    // Singular T_k: keep x_{k-1}; this forces beta_{k+1} <= eps*anorm as well.
    const bool singular = !(gamma2 > thr);
    bool too_long = false;
    if (!singular) {
      d_k = (lz.v_curr - col.delta2 * d_km1 - eps_k * d_km2) / gamma2;
      x_prev = x;
      x += lr.tau * d_k;
      gamma_min = std::min(gamma_min, gamma2);
      kappa = std::max(kappa, anorm / gamma_min);
      // An update that pushes ||x|| past maxxnorm is dropped and x_{k-1} is returned.
      if (x.norm() > cfg.maxxnorm) {
        x.swap(x_prev);
        too_long = true;
      } else {
        d_km2.swap(d_km1);
        d_km1.swap(d_k);
        phi = lr.phi;
        omega = norm2(omega, lr.tau);
      }
    }
    chi = x.norm();
    done = too_long ? k - 1 : k;

    if (cfg.record_history) res.history.push_back({k, phi, psi, chi, anorm, kappa, omega, SolverMode::Minres});
    if (observer) {
      IterationSnapshot<T> snap;
      snap.k = k;
      snap.alpha = alpha;
      snap.beta = beta;
      snap.beta_next = beta_next;
      snap.left = lr.q;
      snap.tau = lr.tau;
      snap.phi = phi;
      snap.psi = psi;
      snap.chi = chi;
      snap.anorm = anorm;
      snap.kappa = kappa;
      snap.omega = omega;
      snap.gamma_min = gamma_min;
      snap.epsilon_k = eps_k;
      snap.delta2_k = col.delta2;
      snap.x = &x;
      snap.v_next = &lz.v_next;
      observer(snap);
    }

    left_prev = lr.q;
    delta = col.delta_next;
    eps_k = col.epsilon_next;

    bool stop = true;
    if (too_long) {
      flag = Termination::MaxXNorm;
    } else if (phi == T(0) || phi / (anorm * chi + beta1) <= cfg.tol) {
      flag = Termination::RtolConverged;
    } else if (beta_next <= T(n) * anorm * eps) {
      flag = Termination::LanczosBreakdown;
    } else if (kappa >= cfg.maxcond) {
      flag = Termination::MaxCond;
    } else if (k >= maxit) {
      flag = Termination::MaxIterations;
    } else {
      stop = false;
    }
    if (stop) break;
  }

  res.flag = flag;
  res.iterations = done;
  res.phi = phi;
  res.psi = psi;
  res.chi = chi;
  res.anorm = anorm;
  res.kappa = kappa;
  res.omega = omega;
  return res;
}

}  // namespace minresqlp

#endif  // MINRESQLP_MINRES_HPP_
