// Acceptance checks 1-12. Usage: acceptance [criterion]; with no argument every criterion runs.
// One PASS/FAIL line per criterion; the exit status is nonzero if any selected criterion fails.

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "minresqlp/lanczos.hpp"
#include "minresqlp/minres.hpp"
#include "minresqlp/minresqlp.hpp"
#include "minresqlp/oracle.hpp"
#include "minresqlp/precondition.hpp"
#include "minresqlp/problems.hpp"

using namespace minresqlp;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

Vector<double> vec(std::initializer_list<double> d) {
  Vector<double> v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v;
}

enum class Solver { Minres, Qlp };

SolveResult<double> solve(Solver s, const SymmetricOperator<double>& op, const Vector<double>& b,
                          const SolverConfig<double>& cfg, const IterationObserver<double>& obs = {}) {
  return s == Solver::Minres ? minres_solve<double>(op, b, cfg, obs) : minresqlp_solve<double>(op, b, cfg, obs);
}

// diag(1,1,0), b = e: minimum length versus plain least squares.
void criterion1(Outcome& o) {
  auto op = SymmetricOperator<double>::diagonal(vec({1, 1, 0}));
  const Vector<double> b = Vector<double>::Ones(3);
  const Vector<double> xp = vec({1, 1, 0});
  auto q = minresqlp_solve(op, b);
  auto m = minres_solve(op, b);
  const Vector<double> r = b - op * m.x;
  const double eq = (q.x - xp).norm();
  const double ar = (op * r).norm();
  o.detail << "qlp ||x-x+|| = " << eq << ", minres ||r-e3|| = " << (r - Vector<double>::Unit(3, 2)).norm()
           << ", ||Ar|| = " << ar << ", ||x|| = " << m.x.norm();
  o.require(eq <= 1e-12, "qlp x within 1e-12 of (1,1,0)");
  o.require((r - Vector<double>::Unit(3, 2)).norm() <= 1e-12, "minres residual e3");
  o.require(ar <= 1e-12, "minres ||Ar|| <= 1e-12");
  o.require(m.x.norm() > xp.norm(), "minres ||x|| > ||x+||");
}

// Singular compatible 4x4, with and without the binormalization D.
void criterion2(Outcome& o) {
  auto p = make_problem("example62");
  const Vector<double> b = vec({6, 9, 6, 3});
  const Vector<double> xp = vec({2, 4, 3, 2});
  auto plain = minresqlp_solve(p.op, b);
  DiagonalScaling<double> s;
  s.d = vec({0.84201, 0.81228, 0.30957, 3.2303});
  auto pre = minresqlp_solve(p.op, s.preconditioner(), b);
  const double e0 = (plain.x - xp).norm();
  const double res = (b - p.op * pre.x).norm();
  const double lost = (pre.x - xp).norm();
  const double comp = (pre.x - vec({3.0092, 2.9908, 3.0000, 3.0092})).cwiseAbs().maxCoeff();
  o.detail << "plain ||x-x+|| = " << e0 << ", preconditioned ||r|| = " << res << ", ||x-x+|| = " << lost
           << ", max|x - ref| = " << comp;
  o.require(e0 <= 1e-8, "plain within 1e-8 of x+");
  o.require(res <= 1e-8, "preconditioned residual <= 1e-8");
  o.require(lost > 1e-3, "preconditioned x not minimum length");
  o.require(comp <= 5e-4, "componentwise within 5e-4");
}

// 200 random singular systems against the pseudoinverse oracle.
void criterion3(Outcome& o) {
  double worst_qlp = 0, worst_minres = 0;
  int fails_qlp = 0, fails_minres = 0, longer = 0;
  for (int s = 0; s < 200; ++s) {
    Lcg64 g(1000 + s);
    const Index n = 10 + g.below(31);
    const Index def = 1 + g.below(5);
    auto a = random_singular(n, def, 7000 + s);
    auto op = SymmetricOperator<double>::from_dense(a);
    const Vector<double> b = make_rhs(op, s % 2 ? RhsMode::Incompatible : RhsMode::Compatible, 9000 + s);
    auto evd = eigen_decompose(a);
    const Vector<double> xp = pseudoinverse_solution(evd, b);
    const double rmin = (b - a.full() * xp).norm();

    // Every nonzero |lambda| is >= 0.1, so ||x+|| <= 10 ||b||.
    SolverConfig<double> cfg;
    cfg.maxxnorm = 100 * b.norm();
    auto q = minresqlp_solve(op, b, cfg);
    const double eq = (q.x - xp).norm() / xp.norm();
    worst_qlp = std::max(worst_qlp, eq);
    if (!(eq <= 1e-7)) ++fails_qlp;

    auto m = minres_solve(op, b, cfg);
    const double em = std::abs((b - op * m.x).norm() - rmin) / b.norm();
    worst_minres = std::max(worst_minres, em);
    if (!(em <= 1e-8)) ++fails_minres;
    if (m.x.norm() > xp.norm() * (1 + 1e-10)) ++longer;
  }
  o.detail << "qlp worst ||x-x+||/||x+|| = " << worst_qlp << " (" << fails_qlp << " over 1e-7), minres worst "
           << "| ||r|| - ||r*|| |/||b|| = " << worst_minres << " (" << fails_minres << " over 1e-8), minres longer than x+ in "
           << longer << " cases";
  o.require(fails_qlp == 0, "qlp matches x+ within 1e-7 ||x+||");
  o.require(fails_minres == 0, "minres matches optimal residual within 1e-8 ||b||");
}

// laplacian_block(20) spectrum.
void criterion4(Outcome& o) {
  auto evd = eigen_decompose(laplacian_block(20));
  Index zeros = 0;
  double pos = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < evd.size(); ++i) {
    const double l = evd.eigenvalues(i);
    if (std::abs(l) <= 1e-12) {
      ++zeros;
    } else if (l > 0) {
      pos = std::min(pos, l);
    }
  }
  const Index rank = evd.rank(pseudoinverse_cutoff(evd));
  o.detail << "rank " << rank << ", " << zeros << " eigenvalues <= 1e-12, lambda_max " << evd.eigenvalues.maxCoeff()
           << ", smallest positive " << pos;
  o.require(rank == 361, "rank 361");
  o.require(zeros == 39, "39 zero eigenvalues");
  o.require(evd.eigenvalues.maxCoeff() >= 8.8 && evd.eigenvalues.maxCoeff() <= 8.9, "lambda_max in [8.8, 8.9]");
  o.require(pos >= 6.0e-2 && pos <= 6.2e-2, "smallest positive in [6.0e-2, 6.2e-2]");
}

// Almost compatible rhs on the Laplacian: QLP stops on psi, MINRES explodes.
void criterion5(Outcome& o) {
  auto a = laplacian_block(20);
  auto op = SymmetricOperator<double>::from_dense(a);
  const Vector<double> b = make_rhs(op, RhsMode::AlmostCompatible, 24);
  const double tnorm = tevd_solve(eigen_decompose(a), b, 1.0).norm();

  SolverConfig<double> qc;
  qc.tol = 1e-8;
  auto q = minresqlp_solve(op, b, qc);
  const double rel = std::abs(q.x.norm() - tnorm) / tnorm;

  SolverConfig<double> mc;
  mc.tol = 1e-15;
  mc.maxit = 1200;
  mc.maxxnorm = 1e300;
  mc.ar_test = false;
  auto m = minres_solve(op, b, mc);

  // Floors of both NRBE ratios over a long run; the psi test can fire first only if the second is lower.
  SolverConfig<double> lc;
  lc.tol = 1e-15;
  lc.maxxnorm = 100;
  lc.record_history = true;
  auto lr = minresqlp_solve(op, b, lc);
  double rfloor = std::numeric_limits<double>::infinity(), afloor = rfloor;
  for (std::size_t i = 1; i < lr.history.size(); ++i) {
    const auto& h = lr.history[i];
    rfloor = std::min(rfloor, h.phi / (h.anorm * h.chi + b.norm()));
    afloor = std::min(afloor, h.psi / (h.anorm * lr.history[i - 1].phi));
  }
  o.detail << "||x_TEVD|| = " << tnorm << "; qlp flag " << static_cast<int>(q.flag) << " at k = " << q.iterations
           << ", ||x|| = " << q.x.norm() << " (rel " << rel << "); minres flag " << static_cast<int>(m.flag)
           << ", ||x|| = " << m.x.norm() << "; min ||r|| NRBE " << rfloor << ", min ||Ar|| NRBE " << afloor;
  o.require(q.flag == Termination::ArConverged, "qlp stops via the psi test");
  o.require(rel <= 1e-6, "qlp ||x|| within 1e-6 of TEVD norm");
  o.require(m.x.norm() >= 100 * tnorm, "minres ||x|| >= 100 ||x_TEVD||");
}

// Householder family, eta = 1e-8, n = 797.
void criterion6(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto a = householder_diag(797, 1e-8, 5, HouseholderSource::PaddedOnes);
  auto op = SymmetricOperator<double>::from_dense(a);
  const Vector<double> e = Vector<double>::Ones(797);
  const Vector<double> ae = op * e;
  SolverConfig<double> cfg;
  cfg.tol = 1e-14;
  auto me = minres_solve(op, e, cfg);
  auto qe = minresqlp_solve(op, e, cfg);
  auto ma = minres_solve(op, ae, cfg);
  auto qa = minresqlp_solve(op, ae, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double r_me = (e - op * me.x).norm(), r_qe = (e - op * qe.x).norm();
  const double r_ma = (ae - op * ma.x).norm(), r_qa = (ae - op * qa.x).norm();
  const double rmin = (e - op * pseudoinverse_solution(a.full(), e)).norm();
  o.detail << "b=e: minres ||r|| = " << r_me << ", qlp ||r|| = " << r_qe << " (min over x is " << rmin
           << "); b=Ae: minres " << r_ma << ", qlp " << r_qa << "; " << wall << " s";
  o.require(r_me >= 1e-2, "b=e minres ||r|| >= 1e-2");
  o.require(r_qe <= 1e-5, "b=e qlp ||r|| <= 1e-5");
  o.require(r_ma <= 1e-9 && r_qa <= 1e-9, "b=Ae both <= 1e-9");
  o.require(wall <= 60, "runtime <= 60 s");
}

// Truncation on a positive semidefinite singular n = 25 instance with tol = 1e-14.
void criterion7(Outcome& o) {
  RandomSpectrum spec;
  spec.deficit = 3;
  spec.lo = 0.01;
  spec.hi = 1.0;
  spec.definite = true;
  auto a = random_symmetric(25, spec, 1177);
  auto op = SymmetricOperator<double>::from_dense(a);
  const Vector<double> b = make_rhs(op, RhsMode::Incompatible, 1177);
  const double tnorm = tevd_solve(eigen_decompose(a), b, 1.0).norm();
  SolverConfig<double> cfg;
  cfg.tol = 1e-14;
  cfg.maxxnorm = 1e4;
  int events = 0;
  double worst = 0;
  auto res = minresqlp_solve<double>(op, b, cfg, [&](const IterationSnapshot<double>& s) {
    if (!s.truncated) return;
    ++events;
    const double window = norm3(s.chi_window[0], s.chi_window[1], s.chi_window[2]);
    worst = std::max(worst, std::abs(s.chi - window));
    if (!(s.chi_candidate > cfg.maxxnorm)) worst = std::numeric_limits<double>::infinity();
  });
  const double ratio = res.x.norm() / tnorm;
  o.detail << events << " truncation(s), max |chi - ||window|| | = " << worst << ", flag "
           << static_cast<int>(res.flag) << " at k = " << res.iterations << ", ||x|| / ||x_TEVD|| = " << ratio;
  o.require(events > 0, "a truncation occurs");
  o.require(worst == 0.0, "post-truncation chi equals the window norm exactly");
  o.require(ratio <= 10 && ratio >= 0.1, "final ||x|| within 10x of the TEVD norm");
}

// Per-iteration recurred norms against direct computation on 50 SPD systems.
void criterion8(Outcome& o) {
  double w_phi = 0, w_psi = 0, w_chi = 0, w_omega = 0;
  for (int s = 0; s < 50; ++s) {
    Lcg64 g(300 + s);
    const Index n = 10 + g.below(51);
    auto a = random_spd(n, 10 + 90 * g.uniform(), 400 + s);
    auto op = SymmetricOperator<double>::from_dense(a);
    const Vector<double> b = uniform_vector(n, g);
    const double anorm = eigen_decompose(a).norm();
    for (Solver which : {Solver::Minres, Solver::Qlp}) {
      SolverConfig<double> cfg;
      cfg.tol = 1e-14;
      Vector<double> xprev = Vector<double>::Zero(n);
      solve(which, op, b, cfg, [&](const IterationSnapshot<double>& st) {
        const Vector<double>& x = *st.x;
        const double xn = x.norm();
        w_phi = std::max(w_phi, std::abs(st.phi - (b - op * x).norm()) / (anorm * xn + b.norm()));
        w_psi = std::max(w_psi, std::abs(st.psi - (op * (b - op * xprev)).norm()) / (anorm * anorm));
        w_chi = std::max(w_chi, std::abs(st.chi - xn) / xn);
        w_omega = std::max(w_omega, std::abs(st.omega - (op * x).norm()) / (anorm * xn));
        xprev = x;
      });
    }
  }
  o.detail << "worst relative gaps: phi " << w_phi << ", psi " << w_psi << ", chi " << w_chi << ", omega " << w_omega;
  o.require(w_phi <= 1e-9, "phi");
  o.require(w_psi <= 1e-8, "psi");
  o.require(w_chi <= 1e-9, "chi");
  o.require(w_omega <= 1e-9, "omega");
}

// Anorm estimate of MINRES-QLP on every built-in problem at its default parameters, b = ones.
void criterion9(Outcome& o) {
  const char* suite[] = {"diag110", "example62", "bin3",        "dscale1",         "dscale2",
                         "identity", "laplacian", "householder", "random_singular", "spd"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0, floor_ratio = std::numeric_limits<double>::infinity();
  double minres_lo = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (const char* name : suite) {
    auto p = make_problem(name);
    const double anorm = eigen_decompose(*p.matrix).norm();
    const Vector<double> b = make_rhs(p.op, RhsMode::Ones, 0);
    double prev = 0;
    auto res = minresqlp_solve<double>(p.op, b, SolverConfig<double>{}, [&](const IterationSnapshot<double>& st) {
      if (st.anorm < prev) monotone = false;
      prev = st.anorm;
      floor_ratio = std::min(floor_ratio, st.anorm / anorm);
    });
    lo = std::min(lo, res.anorm / anorm);
    hi = std::max(hi, res.anorm / anorm);
    minres_lo = std::min(minres_lo, minres_solve(p.op, b).anorm / anorm);
  }
  o.detail << "final Anorm/||A|| in [" << lo << ", " << hi << "], smallest per-iteration ratio " << floor_ratio
           << (monotone ? ", nondecreasing" : ", NOT monotone") << "; plain MINRES column estimate reaches down to "
           << minres_lo;
  o.require(monotone, "Anorm nondecreasing");
  o.require(lo >= 0.8 && hi <= 1 + 1e-9, "final Anorm in [0.8 ||A||, ||A|| (1 + 1e-9)]");
  o.require(floor_ratio >= 0.1, "Anorm >= ||A|| / 10");
}

// One binormalization sweep on the 3x3 example.
void criterion10(Outcome& o) {
  auto p = make_problem("bin3");
  auto s = binormalize(*p.matrix, 1);
  const double kappa = condition_number(Matrix<double>(s.scale(p.matrix->full())), 0.0);
  const Vector<double> want = vec({8.1e-3, 6.6e-5, 1.5});
  // Scale that balances the extreme log ratios, then the worst relative deviation.
  const Eigen::ArrayXd lr = want.array().log() - s.d.array().log();
  const double scale = std::exp(0.5 * (lr.maxCoeff() + lr.minCoeff()));
  const double dev = ((scale * s.d).array() / want.array() - 1.0).abs().maxCoeff();
  o.detail << "kappa(DAD) = " << kappa << ", D = (" << s.d(0) << ", " << s.d(1) << ", " << s.d(2)
           << "), worst relative deviation from (8.1e-3, 6.6e-5, 1.5) after scaling = " << dev;
  o.require(kappa <= 5, "kappa(DAD) <= 5");
  o.require(dev <= 0.2, "D within 20% of reference up to scale");
}

double smallest_singular_value(const Matrix<double>& t) {
  Eigen::JacobiSVD<Matrix<double>> svd(t);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// T_l nonsingular exactly when b lies in range(A).
void criterion11(Outcome& o) {
  int mismatches = 0, compatible = 0;
  for (int s = 0; s < 100; ++s) {
    Lcg64 g(5000 + s);
    const Index n = 4 + g.below(12);
    const Index def = 1 + g.below(std::min<Index>(3, n - 2));
    auto a = random_singular(n, def, 6000 + s);
    auto op = SymmetricOperator<double>::from_dense(a);
    const Vector<double> b = make_rhs(op, g.uniform() < 0.5 ? RhsMode::Compatible : RhsMode::Incompatible, 7000 + s);
    auto evd = eigen_decompose(a);
    const bool in_range = evd.null_component(b, pseudoinverse_cutoff(evd)).norm() <= 1e-10 * b.norm();
    compatible += in_range;
    auto f = lanczos_factorize(op, b, n, true, 1e-10);
    const Matrix<double> t = f.t_square();
    const bool nonsingular = f.breakdown && smallest_singular_value(t) > 1e-8 * t.norm();
    if (nonsingular != in_range || !f.breakdown) ++mismatches;
  }
  o.detail << mismatches << " mismatches over 100 systems (" << compatible << " compatible)";
  o.require(mismatches == 0, "no exceptions");
}

// KKT recovers x+; two_layer converges as delta shrinks.
void criterion12(Outcome& o) {
  double worst = 0;
  for (int s = 0; s < 50; ++s) {
    Lcg64 g(8000 + s);
    const Index n = 5 + g.below(16);
    const Index def = 1 + g.below(3);
    auto a = random_singular(n, def, 8100 + s);
    auto op = SymmetricOperator<double>::from_dense(a);
    const Vector<double> b = make_rhs(op, RhsMode::Incompatible, 8200 + s);
    const Vector<double> xp = pseudoinverse_solution(a.full(), b);
    auto r = build_reformulation(op, b, Layout::Kkt, 0.0);
    SolverConfig<double> cfg;
    cfg.tol = 1e-14;
    auto res = minresqlp_solve(r.system.op, r.rhs, cfg);
    worst = std::max(worst, (r.extract(res.x) - xp).norm() / xp.norm());
  }

  auto a = random_singular(15, 2, 8300);
  auto op = SymmetricOperator<double>::from_dense(a);
  const Vector<double> b = make_rhs(op, RhsMode::Incompatible, 8301);
  const Vector<double> xp = pseudoinverse_solution(a.full(), b);
  std::vector<double> errs;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    auto r = build_reformulation(op, b, Layout::TwoLayer, delta);
    SolverConfig<double> cfg;
    cfg.tol = 1e-14;
    auto res = minresqlp_solve(r.system.op, r.rhs, cfg);
    errs.push_back((r.extract(res.x) - xp).norm());
  }
  o.detail << "kkt worst ||x-x+||/||x+|| = " << worst << "; two_layer errors " << errs[0] << ", " << errs[1] << ", "
           << errs[2];
  o.require(worst <= 1e-6, "kkt within 1e-6 ||x+||");
  o.require(errs[1] < errs[0] && errs[2] < errs[1], "two_layer error decreasing");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void(Outcome&)>> criteria = {
      criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  int first = 1, last = 12;
  if (argc > 1) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > 12) {
      std::fprintf(stderr, "usage: %s [1-12]\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  for (int c = first; c <= last; ++c) {
    Outcome o;
    try {
      criteria[c - 1](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %d %s\n", o.pass ? "PASS" : "FAIL", c, o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
