#ifndef MINRESQLP_REPORT_HPP_
#define MINRESQLP_REPORT_HPP_

#include <optional>
#include <ostream>
#include <string>

#include "minresqlp/solver_types.hpp"

namespace minresqlp {

inline constexpr const char* kHistoryHeader = "k,phi,psi,chi,Anorm,kappa,omega,mode";
inline constexpr Index kReportMaxInlineX = 10000;

struct OracleCheck {
  double x_pinv_norm = 0.0;
  double error_norm = 0.0;  // ||x - x_pinv||
  double optimal_residual = 0.0;
  double kappa_t = 0.0;
  long long rank = 0;
};

struct RunReport {
  std::string solver;
  std::string source;  // problem spec or matrix path
  std::string rhs;
  unsigned long long seed = 0;
  Index n = 0;
  Index system_size = 0;
  SolverConfig<double> config;
  std::string precond = "none";
  std::string reform = "none";
  double delta = 0.0;
  SolveResult<double> result;
  Vector<double> x;  // solution of the original system
  double residual_norm = 0.0;
  double ar_norm = 0.0;
  double x_norm = 0.0;
  std::optional<OracleCheck> oracle;
  double wall_time = 0.0;
};

// Pretty-printed JSON; x is included when n <= kReportMaxInlineX or dump_x is set.
std::string report_to_json(const RunReport& report, bool dump_x);

void write_history_csv(std::ostream& out, const ConvergenceHistory<double>& history);

}  // namespace minresqlp

#endif  // MINRESQLP_REPORT_HPP_
