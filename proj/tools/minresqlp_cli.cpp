#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "minresqlp/matrix_market.hpp"
#include "minresqlp/minres.hpp"
#include "minresqlp/minresqlp.hpp"
#include "minresqlp/oracle.hpp"
#include "minresqlp/precondition.hpp"
#include "minresqlp/problems.hpp"
#include "minresqlp/report.hpp"

using namespace minresqlp;

namespace {

struct Options {
  std::string matrix, problem, rhs = "ones", solver = "minresqlp", precond = "none", reform = "none";
  std::string history, json;
  unsigned long long seed = 1;
  double delta = 0.0, shift = 0.0, tol = 1e-12, maxxnorm = 1e7, maxcond = 1e15, trancond = 1e7;
  double symmetry_tol = kDefaultSymmetryTol;
  long long maxit = 0;
  bool verify = false, dump_x = false, local_reorth = false;
};

Eigen::SparseMatrix<double> explicit_matrix(const SymmetricOperator<double>& op) {
  if (op.sparse()) return *op.sparse();
  if (op.dense()) return op.dense()->full().sparseView();
  throw std::invalid_argument("operator has no explicit matrix");
}

int exit_code(Termination flag) {
  switch (flag) {
    case Termination::MaxXNorm:
    case Termination::MaxCond:
    case Termination::MaxIterations:
      return 2;
    default:
      return 0;
  }
}

int run(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  SymmetricOperator<double> a;
  std::string source;
  if (!o.matrix.empty()) {
    a = load_matrix_market(o.matrix, o.symmetry_tol);
    source = o.matrix;
  } else {
    a = make_problem(o.problem).op;
    source = o.problem;
  }
  const Index n = a.size();
  const Vector<double> b = make_rhs(a, parse_rhs_mode(o.rhs), o.seed);

  SolverConfig<double> cfg;
  cfg.tol = o.tol;
  if (o.maxit > 0) cfg.maxit = static_cast<Index>(o.maxit);
  cfg.maxxnorm = o.maxxnorm;
  cfg.maxcond = o.maxcond;
  cfg.trancond = o.trancond;
  cfg.local_reorth = o.local_reorth;
  cfg.record_history = !o.history.empty();
  cfg.validate();

  // The shift is folded into the solver unless the system is transformed first.
  const bool transformed = o.precond != "none" || o.reform != "none";
  SymmetricOperator<double> base = a;
  if (transformed && o.shift != 0.0) {
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    base = SymmetricOperator<double>::from_sparse(explicit_matrix(a) - o.shift * id);
  }
  SolverConfig<double> run_cfg = cfg;
  run_cfg.shift = transformed ? 0.0 : o.shift;

  std::optional<DiagonalScaling<double>> scaling;
  if (o.precond.rfind("diag:", 0) == 0) {
    scaling = diag_scaling(base, std::stod(o.precond.substr(5)));
  } else if (o.precond == "diag") {
    scaling = diag_scaling(base, o.delta > 0.0 ? o.delta : 1.0);
  } else if (o.precond == "binorm") {
    scaling = binormalize(base);
  } else if (o.precond != "none") {
    throw std::invalid_argument("unknown preconditioner '" + o.precond + "'");
  }
  SymmetricOperator<double> sys = scaling ? scaling->scale(base) : base;
  Vector<double> rhs = scaling ? scaling->scale_rhs(b) : b;

  std::optional<Reformulation<double>> reform;
  if (o.reform != "none") {
    reform = build_reformulation(sys, rhs, parse_layout(o.reform), o.delta);
    sys = reform->system.op;
    rhs = reform->rhs;
  }

  SolveResult<double> res;
  if (o.solver == "minresqlp") {
    res = minresqlp_solve(sys, rhs, run_cfg);
  } else if (o.solver == "minres") {
    res = minres_solve(sys, rhs, run_cfg);
  } else {
    throw std::invalid_argument("unknown solver '" + o.solver + "'");
  }

  Vector<double> x = reform ? reform->extract(res.x) : res.x;
  if (scaling) x = scaling->recover(x);

  const SymmetricOperator<double> as = shifted(a, o.shift);
  RunReport rep;
  rep.solver = o.solver;
  rep.source = source;
  rep.rhs = o.rhs;
  rep.seed = o.seed;
  rep.n = n;
  rep.system_size = sys.size();
  rep.config = run_cfg;
  rep.config.shift = o.shift;
  rep.precond = o.precond;
  rep.reform = o.reform;
  rep.delta = o.delta;
  const Vector<double> r = b - as * x;
  rep.residual_norm = r.norm();
  rep.ar_norm = (as * r).norm();
  rep.x_norm = x.norm();
  if (o.verify) {
    if (n > kOracleMaxDimension) {
      std::cerr << "warning: --verify skipped, n = " << n << " exceeds " << kOracleMaxDimension << '\n';
    } else {
      const EigenDecomposition<double> evd = eigen_decompose<double>(as.to_dense());
      const Vector<double> xp = pseudoinverse_solution(evd, b);
      OracleCheck oc;
      oc.x_pinv_norm = xp.norm();
      oc.error_norm = (x - xp).norm();
      oc.optimal_residual = (b - as * xp).norm();
      oc.kappa_t = evd.norm() > 0.0 ? condition_number(evd, 1.0) : 0.0;
      oc.rank = evd.rank(pseudoinverse_cutoff(evd));
      rep.oracle = oc;
    }
  }
  rep.x = x;
  rep.result = std::move(res);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!o.history.empty()) {
    std::ofstream h(o.history);
    if (!h) throw std::runtime_error("cannot write history file '" + o.history + "'");
    write_history_csv(h, rep.result.history);
  }
  const std::string json = report_to_json(rep, o.dump_x);
  if (o.json.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream j(o.json);
    if (!j) throw std::runtime_error("cannot write report '" + o.json + "'");
    j << json << '\n';
    std::cout << o.solver << ": flag " << static_cast<int>(rep.result.flag) << " ("
              << termination_name(rep.result.flag) << "), " << rep.result.iterations << " iterations, ||r|| = "
              << rep.residual_norm << ", ||x|| = " << rep.x_norm << '\n';
  }
  return exit_code(rep.result.flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MINRES and MINRES-QLP for symmetric, possibly singular systems (A - shift I) x ~ b"};
  Options o;
  auto* mat = app.add_option("--matrix", o.matrix, "Matrix Market file");
  auto* prob = app.add_option("--problem", o.problem, "built-in problem, e.g. laplacian:N=20");
  mat->excludes(prob);
  app.add_option("--rhs", o.rhs, "compatible|incompatible|almost_compatible|ones|aones")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for random right-hand sides")->capture_default_str();
  app.add_option("--solver", o.solver, "minres|minresqlp")->capture_default_str();
  app.add_option("--precond", o.precond, "none|diag:delta|binorm")->capture_default_str();
  app.add_option("--reform", o.reform, "none|augmented|kkt|normal_reg|two_layer|kkt_reg")->capture_default_str();
  app.add_option("--delta", o.delta, "regularization parameter")->capture_default_str();
  app.add_option("--shift", o.shift, "solve (A - shift I) x ~ b")->capture_default_str();
  app.add_option("--tol", o.tol, "NRBE tolerance")->capture_default_str();
  app.add_option("--maxit", o.maxit, "iteration limit (default 4n)");
  app.add_option("--maxxnorm", o.maxxnorm, "bound on ||x||")->capture_default_str();
  app.add_option("--maxcond", o.maxcond, "bound on the condition estimate")->capture_default_str();
  app.add_option("--trancond", o.trancond, "MINRES to QLP transfer threshold")->capture_default_str();
  app.add_option("--symmetry-tol", o.symmetry_tol, "relative symmetry tolerance for general inputs")
      ->capture_default_str();
  app.add_flag("--local-reorth", o.local_reorth, "reorthogonalize v2 against v1");
  app.add_option("--history", o.history, "write per-iteration CSV here");
  app.add_flag("--verify", o.verify, "compare with the dense pseudoinverse solution (n <= 2000)");
  app.add_option("--json", o.json, "write the JSON report here (default stdout)");
  app.add_flag("--dump-x", o.dump_x, "include x in the report for any n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (o.matrix.empty() == o.problem.empty()) {
    std::cerr << "error: exactly one of --matrix or --problem is required\n";
    return 1;
  }
  try {
    return run(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
