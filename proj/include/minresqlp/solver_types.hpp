#ifndef MINRESQLP_SOLVER_TYPES_HPP_
#define MINRESQLP_SOLVER_TYPES_HPP_

#include <functional>
#include <type_traits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "minresqlp/rotations.hpp"
#include "minresqlp/types.hpp"

namespace minresqlp {

enum class Termination : int {
  ZeroRhs = 0,
  RtolConverged = 1,
  ArConverged = 2,
  MaxXNorm = 3,
  MaxCond = 4,
  MaxIterations = 5,
  LanczosBreakdown = 6,
};

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ZeroRhs: return "zero_rhs";
    case Termination::RtolConverged: return "rtol";
    case Termination::ArConverged: return "ar_rtol";
    case Termination::MaxXNorm: return "maxxnorm";
    case Termination::MaxCond: return "maxcond";
    case Termination::MaxIterations: return "maxit";
    case Termination::LanczosBreakdown: return "lanczos_breakdown";
  }
  return "unknown";
}

enum class SolverMode { Minres, Qlp };

inline const char* mode_name(SolverMode m) { return m == SolverMode::Minres ? "MINRES" : "QLP"; }

template <typename T>
struct SolverConfig {
  T tol = T(1e-12);
  std::optional<Index> maxit;  // unset: 4n
  T maxxnorm = T(1e7);
  T maxcond = T(1e15);
  T trancond = T(1e7);
  T shift = T(0);
  bool local_reorth = false;
  bool record_history = false;
  // Disables the ||Ar|| stopping test, giving the classic MINRES rules.
  bool ar_test = true;

  void validate() const {
    if (!(tol >= machine_eps<T>())) throw std::invalid_argument("tol must be >= machine epsilon");
    if (maxit && *maxit < 1) throw std::invalid_argument("maxit must be >= 1");
    if (!(trancond >= T(1))) throw std::invalid_argument("trancond must be >= 1");
    if (!(maxxnorm > T(0))) throw std::invalid_argument("maxxnorm must be positive");
    if (!(maxcond > T(0))) throw std::invalid_argument("maxcond must be positive");
  }

  Index iteration_limit(Index n) const { return maxit ? *maxit : 4 * n; }
};

template <typename T>
struct HistoryRow {
  Index k = 0;
  T phi = T(0);
  T psi = T(0);  // psi_{k-1}
  T chi = T(0);
  T anorm = T(0);
  T kappa = T(0);
  T omega = T(0);
  SolverMode mode = SolverMode::Minres;
};

template <typename T>
using ConvergenceHistory = std::vector<HistoryRow<T>>;

template <typename T>
struct SolveResult {
  Vector<T> x;
  Termination flag = Termination::ZeroRhs;
  Index iterations = 0;
  Index qlp_iterations = 0;
  T phi = T(0);
  T psi = T(0);
  T chi = T(0);
  T anorm = T(0);
  T kappa = T(1);
  T omega = T(0);
  ConvergenceHistory<T> history;
};

// Per-iteration view exported to observers; vector pointers are valid only during the callback.
template <typename T>
struct IterationSnapshot {
  Index k = 0;
  SolverMode mode = SolverMode::Minres;
  T alpha = T(0);
  T beta = T(0);       // beta_k
  T beta_next = T(0);  // beta_{k+1}
  Reflection<T> left;
  Reflection<T> right_first;
  Reflection<T> right_second;
  T tau = T(0);
  T phi = T(0);
  T psi = T(0);  // psi_{k-1}
  T chi = T(0);
  T anorm = T(0);
  T kappa = T(0);
  T omega = T(0);
  T gamma_min = T(0);
  // Lower-tridiagonal entries settled or updated at step k.
  T gamma6_km2 = T(0);
  T gamma5_km1 = T(0);
  T gamma4_k = T(0);
  T theta2_km1 = T(0);
  T theta_k = T(0);
  T eta_k = T(0);
  T epsilon_k = T(0);
  T delta2_k = T(0);
  bool truncated = false;
  T chi_candidate = T(0);
  T chi_window[3] = {T(0), T(0), T(0)};  // chi_{k-2}^(2), mu_{k-1}, mu_k after truncation
  const Vector<T>* x = nullptr;
  const Vector<T>* v_next = nullptr;       // unit v_{k+1} (unpreconditioned only)
  const Vector<T>* w_finalized = nullptr;  // w_{k-2}^(4) in QLP mode
};

template <typename T>
using IterationObserver = std::function<void(const IterationSnapshot<T>&)>;

}  // namespace minresqlp

#endif  // MINRESQLP_SOLVER_TYPES_HPP_
