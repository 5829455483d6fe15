#ifndef MINRESQLP_MINRESQLP_HPP_
#define MINRESQLP_MINRESQLP_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

#include "minresqlp/lanczos.hpp"
#include "minresqlp/operator.hpp"
#include "minresqlp/rotations.hpp"
#include "minresqlp/solver_types.hpp"

namespace minresqlp {

namespace detail {

template <typename T>
struct TruncationOutcome {
  bool truncated = false;
  bool exhausted = false;
};

}  // namespace detail

// Zeroes trailing entries of the window [chi2_{k-2}, mu_{k-1}, mu_k] until chi <= maxxnorm.
// chi2_km3 is the norm of x_{k-3}^(2), used when mu_{k-2} itself must go.
template <typename T>
detail::TruncationOutcome<T> truncate_solution(T chi2_km3, T& mu_km2, T& chi2_km2, T& mu_km1, T& mu_k, T& chi,
                                               T maxxnorm) {
  detail::TruncationOutcome<T> out;
  chi = norm3(chi2_km2, mu_km1, mu_k);
  if (!(chi > maxxnorm)) return out;
  out.truncated = true;
  mu_k = T(0);
  chi = norm2(chi2_km2, mu_km1);
  if (!(chi > maxxnorm)) return out;
  mu_km1 = T(0);
  chi = chi2_km2;
  if (!(chi > maxxnorm)) return out;
  mu_km2 = T(0);
  chi2_km2 = chi2_km3;
  chi = chi2_km2;
  out.exhausted = chi > maxxnorm;
  return out;
}

template <typename T>
SolveResult<T> minresqlp_solve(const SymmetricOperator<T>& op, const Preconditioner<T>* precond,
                               const std::type_identity_t<Vector<T>>& b, const SolverConfig<T>& cfg = {},
                               const std::type_identity_t<IterationObserver<T>>& observer = {}) {
  using std::abs;
  cfg.validate();
  const Index n = op.size();
  if (b.size() != n) throw std::invalid_argument("minresqlp_solve: dimension mismatch");
  if (precond && precond->size() != n) throw std::invalid_argument("minresqlp_solve: preconditioner dimension mismatch");

  SolveResult<T> res;
  res.x = Vector<T>::Zero(n);
  if (b.norm() == T(0)) {
    res.flag = Termination::ZeroRhs;
    return res;
  }

  const T eps = machine_eps<T>();
  const T inf = std::numeric_limits<T>::infinity();
  const Index maxit = cfg.iteration_limit(n);

  LanczosState<T> lz = precond ? precond_lanczos_init(op, *precond, b) : lanczos_init(op, b);
  const T beta1 = lz.beta1;

  Reflection<T> left_prev{T(-1), T(0), T(0)};
  T delta = 0, eps_k = 0, phi = beta1, psi = 0;
  T gamma5_km2 = 0, gamma4_km1 = 0, theta_km1 = 0;
  T tau_km2 = 0, tau_km1 = 0, eta_km2 = 0, eta_km1 = 0, theta2_km2 = 0;
  T mu_km4 = 0, mu_km3 = 0, last_mu_km1 = 0, last_mu_k = 0;
  T chi2_km3 = 0, chi = 0;
  T anorm = 0, gamma_min = inf, kappa = 1, omega = 0;

  SolverMode mode = cfg.trancond <= T(1) ? SolverMode::Qlp : SolverMode::Minres;
  Vector<T>& x = res.x;
  Vector<T> d_km1 = Vector<T>::Zero(n), d_km2 = Vector<T>::Zero(n), d_k(n);
  Vector<T> xbase = Vector<T>::Zero(n), wa = Vector<T>::Zero(n), wb = Vector<T>::Zero(n);
  Vector<T> w_k(n), wa4(n), w_km1_3(n), u(n);

  Termination flag = Termination::MaxIterations;
  Index k = 0;
  while (true) {
    ++k;
    if (precond) {
      precond_lanczos_step(op, *precond, lz, cfg.shift);
    } else {
      lanczos_step(op, lz, cfg.shift);
      if (cfg.local_reorth && k == 1) reorthogonalize_second(lz);
    }
    const T alpha = lz.alpha, beta = lz.beta, beta_next = lz.beta_next;
    if (precond) {
      u = lz.q_curr / beta;
    } else {
      u = lz.v_curr;
    }

    const T rho = k == 1 ? norm2(alpha, beta_next) : norm3(beta, alpha, beta_next);
    const CarriedColumn<T> col = apply_previous_reflection(left_prev, delta, alpha, beta_next);
    const T phi_prev = phi;
    psi = phi_prev * norm2(col.gamma, col.delta_next);
    const LeftReflectionOutput<T> lr = apply_left_reflection(col.gamma, beta_next, phi_prev);
    const T gamma2_k = lr.q.r;
    const RightPairOutput<T> rp =
        apply_right_pair(RightPairInput<T>{gamma5_km2, eps_k, theta_km1, gamma4_km1, col.delta2, gamma2_k});
    const T tau_k = lr.tau;
    T phi_k = lr.phi;

    anorm = std::max({anorm, rho, abs(rp.gamma4_k)});
    if (k >= 2) anorm = std::max(anorm, rp.gamma5_km1);
    if (k >= 3) anorm = std::max(anorm, rp.gamma6_km2);
    const T thr = eps * anorm;
    const bool singular = !(abs(rp.gamma4_k) > thr);

    auto consider = [&](T g) {
      if (g > thr) gamma_min = std::min(gamma_min, g);
    };
    consider(abs(rp.gamma4_k));
    if (k >= 2) consider(rp.gamma5_km1);
    if (k >= 3) consider(rp.gamma6_km2);

    // A singular L_k leaves the residual unchanged.
    if (singular) {
      phi_k = phi_prev;
    } else {
      omega = norm2(omega, tau_k);
    }
    if (gamma_min < inf) kappa = std::max(kappa, anorm / gamma_min);

    T mu_km2 = 0, mu_km1 = 0, mu_k = 0;
    if (k >= 3 && rp.gamma6_km2 > thr) mu_km2 = (tau_km2 - eta_km2 * mu_km4 - theta2_km2 * mu_km3) / rp.gamma6_km2;
    if (k >= 2 && rp.gamma5_km1 > thr) mu_km1 = (tau_km1 - eta_km1 * mu_km3 - rp.theta2_km1 * mu_km2) / rp.gamma5_km1;
    if (!singular) mu_k = (tau_k - rp.eta_k * mu_km2 - rp.theta_k * mu_km1) / rp.gamma4_k;

    T chi2_km2 = norm2(chi2_km3, mu_km2);
    const T chi_candidate = norm3(chi2_km2, mu_km1, mu_k);
    const detail::TruncationOutcome<T> trunc =
        truncate_solution(chi2_km3, mu_km2, chi2_km2, mu_km1, mu_k, chi, cfg.maxxnorm);

    if (mode == SolverMode::Minres &&
        (kappa >= cfg.trancond || singular || !(gamma2_k > thr) || trunc.truncated)) {
      // W = D L on the two newest columns, then back out x_{k-3}^(2).
      wb = gamma4_km1 * d_km1;
      wa = gamma5_km2 * d_km2 + theta_km1 * d_km1;
      xbase = x - last_mu_km1 * wa - last_mu_k * wb;
      mode = SolverMode::Qlp;
    }

    bool have_w_final = false;
    if (mode == SolverMode::Minres) {
      d_k = (u - col.delta2 * d_km1 - eps_k * d_km2) / gamma2_k;
      x += tau_k * d_k;
      d_km2.swap(d_km1);
      d_km1.swap(d_k);
    } else {
      ++res.qlp_iterations;
      w_k = -rp.p2.c * u + rp.p2.s * wa;
      wa4 = rp.p2.s * u + rp.p2.c * wa;
      w_km1_3 = rp.p3.c * wb + rp.p3.s * w_k;
      wb = rp.p3.s * wb - rp.p3.c * w_k;
      xbase += mu_km2 * wa4;
      x = xbase + mu_km1 * w_km1_3 + mu_k * wb;
      wa.swap(w_km1_3);
      have_w_final = k >= 3;
    }

    if (cfg.record_history) res.history.push_back({k, phi_k, psi, chi, anorm, kappa, omega, mode});
    if (observer) {
      IterationSnapshot<T> snap;
      snap.k = k;
      snap.mode = mode;
      snap.alpha = alpha;
      snap.beta = beta;
      snap.beta_next = beta_next;
      snap.left = lr.q;
      snap.right_first = rp.p2;
      snap.right_second = rp.p3;
      snap.tau = tau_k;
      snap.phi = phi_k;
      snap.psi = psi;
      snap.chi = chi;
      snap.anorm = anorm;
      snap.kappa = kappa;
      snap.omega = omega;
      snap.gamma_min = gamma_min;
      snap.gamma6_km2 = rp.gamma6_km2;
      snap.gamma5_km1 = rp.gamma5_km1;
      snap.gamma4_k = rp.gamma4_k;
      snap.theta2_km1 = rp.theta2_km1;
      snap.theta_k = rp.theta_k;
      snap.eta_k = rp.eta_k;
      snap.epsilon_k = eps_k;
      snap.delta2_k = col.delta2;
      snap.truncated = trunc.truncated;
      snap.chi_candidate = chi_candidate;
      snap.chi_window[0] = chi2_km2;
      snap.chi_window[1] = mu_km1;
      snap.chi_window[2] = mu_k;
      snap.x = &x;
      snap.v_next = precond ? nullptr : &lz.v_next;
      snap.w_finalized = have_w_final ? &wa4 : nullptr;
      observer(snap);
    }

    left_prev = lr.q;
    delta = col.delta_next;
    eps_k = col.epsilon_next;
    gamma5_km2 = rp.gamma5_km1;
    gamma4_km1 = rp.gamma4_k;
    theta_km1 = rp.theta_k;
    tau_km2 = tau_km1;
    tau_km1 = tau_k;
    eta_km2 = eta_km1;
    eta_km1 = rp.eta_k;
    theta2_km2 = rp.theta2_km1;
    mu_km4 = mu_km3;
    mu_km3 = mu_km2;
    last_mu_km1 = mu_km1;
    last_mu_k = mu_k;
    chi2_km3 = chi2_km2;
    phi = phi_k;

    const T relres = phi_k / (anorm * chi + beta1);
    const bool ar_small = psi == T(0) || psi / (anorm * phi_prev) <= cfg.tol;
    bool stop = true;
    if (phi_k == T(0) || relres <= cfg.tol) {
      flag = Termination::RtolConverged;
    } else if (cfg.ar_test && ar_small) {
      flag = Termination::ArConverged;
    } else if (beta_next <= T(n) * anorm * eps || (singular && mode == SolverMode::Qlp)) {
      flag = Termination::LanczosBreakdown;
    } else if (trunc.truncated) {
      flag = Termination::MaxXNorm;
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
  res.iterations = k;
  res.phi = phi;
  res.psi = psi;
  res.chi = chi;
  res.anorm = anorm;
  res.kappa = kappa;
  res.omega = omega;
  return res;
}

template <typename T>
SolveResult<T> minresqlp_solve(const SymmetricOperator<T>& op, const std::type_identity_t<Vector<T>>& b, const SolverConfig<T>& cfg = {},
                               const std::type_identity_t<IterationObserver<T>>& observer = {}) {
  return minresqlp_solve<T>(op, nullptr, b, cfg, observer);
}

template <typename T>
SolveResult<T> minresqlp_solve(const SymmetricOperator<T>& op, const Preconditioner<T>& precond, const std::type_identity_t<Vector<T>>& b,
                               const SolverConfig<T>& cfg = {}, const std::type_identity_t<IterationObserver<T>>& observer = {}) {
  return minresqlp_solve<T>(op, &precond, b, cfg, observer);
}

}  // namespace minresqlp

#endif  // MINRESQLP_MINRESQLP_HPP_
