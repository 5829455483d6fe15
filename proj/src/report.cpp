#include "minresqlp/report.hpp"

#include <cstdio>
#include <vector>

#include "json.hpp"

namespace minresqlp {

std::string report_to_json(const RunReport& r, bool dump_x) {
  using nlohmann::json;
  json cfg = {
      {"tol", r.config.tol},
      {"maxit", r.config.iteration_limit(r.system_size)},
      {"maxxnorm", r.config.maxxnorm},
      {"maxcond", r.config.maxcond},
      {"trancond", r.config.trancond},
      {"shift", r.config.shift},
      {"local_reorth", r.config.local_reorth},
      {"precond", r.precond},
      {"reform", r.reform},
      {"delta", r.delta},
  };
  const SolveResult<double>& s = r.result;
  json j = {
      {"solver", r.solver},
      {"source", r.source},
      {"rhs", r.rhs},
      {"seed", r.seed},
      {"n", r.n},
      {"system_size", r.system_size},
      {"config", cfg},
      {"flag", static_cast<int>(s.flag)},
      {"flag_name", termination_name(s.flag)},
      {"iterations", s.iterations},
      {"qlp_iterations", s.qlp_iterations},
      {"estimates",
       {{"phi", s.phi}, {"psi", s.psi}, {"chi", s.chi}, {"Anorm", s.anorm}, {"kappa", s.kappa}, {"omega", s.omega}}},
      {"direct", {{"residual_norm", r.residual_norm}, {"Ar_norm", r.ar_norm}, {"x_norm", r.x_norm}}},
      {"wall_time_seconds", r.wall_time},
  };
  if (r.oracle) {
    j["oracle"] = {{"x_pinv_norm", r.oracle->x_pinv_norm},
                   {"error_norm", r.oracle->error_norm},
                   {"optimal_residual", r.oracle->optimal_residual},
                   {"kappa_t", r.oracle->kappa_t},
                   {"rank", r.oracle->rank}};
  } else {
    j["oracle"] = nullptr;
  }
  if (dump_x || r.x.size() <= kReportMaxInlineX) j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
  return j.dump(2);
}

void write_history_csv(std::ostream& out, const ConvergenceHistory<double>& history) {
  out << kHistoryHeader << '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const HistoryRow<double>& h : history) {
    out << h.k << ',' << num(h.phi) << ',' << num(h.psi) << ',' << num(h.chi) << ',' << num(h.anorm) << ','
        << num(h.kappa) << ',' << num(h.omega) << ',' << mode_name(h.mode) << '\n';
  }
}

}  // namespace minresqlp
