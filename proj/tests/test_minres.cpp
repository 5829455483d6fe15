#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "minresqlp/minres.hpp"
#include "minresqlp/oracle.hpp"
#include "minresqlp/problems.hpp"

using namespace minresqlp;

namespace {

Vector<double> vec(std::initializer_list<double> d) {
  Vector<double> v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v;
}

SymmetricOperator<double> diag_op(std::initializer_list<double> d) { return SymmetricOperator<double>::diagonal(vec(d)); }

}  // namespace

TEST(Minres, Diag110ReturnsLeastSquaresButNotMinimumLength) {
  auto op = diag_op({1, 1, 0});
  Vector<double> b = Vector<double>::Ones(3);
  auto res = minres_solve(op, b);
  const Vector<double> r = b - op * res.x;
  EXPECT_LE((r - Vector<double>::Unit(3, 2)).norm(), 1e-12);
  EXPECT_LE((op * r).norm(), 1e-12);
  EXPECT_LE((res.x - b).norm(), 1e-12);
  EXPECT_GT(res.x.norm(), std::sqrt(2.0));
  EXPECT_EQ(res.flag, Termination::ArConverged);
}

TEST(Minres, IdentityOneIteration) {
  auto op = SymmetricOperator<double>::identity(4);
  Vector<double> b = vec({1, -2, 3, 0.5});
  auto res = minres_solve(op, b);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.flag, Termination::RtolConverged);
  EXPECT_LE(res.phi, 1e-15 * b.norm());
  EXPECT_LE((res.x - b).norm(), 1e-14);
}

TEST(Minres, CompatibleSingularDiagonal) {
  auto op = diag_op({2, 1, 0});
  auto res = minres_solve(op, vec({2, 1, 0}));
  EXPECT_LE((res.x - vec({1, 1, 0})).norm(), 1e-12);
}

TEST(Minres, SpdMatchesDirectSolve) {
  auto a = random_spd(40, 100.0, 17);
  auto op = SymmetricOperator<double>::from_dense(a);
  Lcg64 rng(4);
  Vector<double> b = uniform_vector(40, rng);
  SolverConfig<double> cfg;
  cfg.tol = 1e-14;
  auto res = minres_solve(op, b, cfg);
  const Vector<double> want = a.full().ldlt().solve(b);
  EXPECT_LE((res.x - want).norm(), 1e-10 * want.norm());
}

TEST(Minres, ShiftSolvesShiftedSystem) {
  auto a = random_spd(30, 10.0, 2);
  auto op = SymmetricOperator<double>::from_dense(a);
  Lcg64 rng(6);
  Vector<double> b = uniform_vector(30, rng);
  SolverConfig<double> cfg;
  cfg.tol = 1e-14;
  cfg.shift = 0.5;
  auto res = minres_solve(op, b, cfg);
  const Matrix<double> as = a.full() - 0.5 * Matrix<double>::Identity(30, 30);
  EXPECT_LE((as * res.x - b).norm(), 1e-10 * b.norm());
}

TEST(Minres, RecurredNormsTrackDirectValues) {
  auto a = random_spd(30, 20.0, 9);
  auto op = SymmetricOperator<double>::from_dense(a);
  Lcg64 rng(12);
  Vector<double> b = uniform_vector(30, rng);
  const double anorm = eigen_decompose(a).norm();
  SolverConfig<double> cfg;
  cfg.tol = 1e-13;
  std::vector<Vector<double>> xs{Vector<double>::Zero(30)};
  double last_phi = b.norm(), last_omega = 0;
  auto res = minres_solve<double>(op, b, cfg, [&](const IterationSnapshot<double>& s) {
    const Vector<double>& x = *s.x;
    const Vector<double> r = b - op * x;
    EXPECT_NEAR(s.phi, r.norm(), 1e-9 * (anorm * x.norm() + b.norm())) << s.k;
    EXPECT_NEAR(s.chi, x.norm(), 1e-12 * x.norm()) << s.k;
    EXPECT_NEAR(s.omega, (op * x).norm(), 1e-9 * anorm * x.norm()) << s.k;
    const Vector<double>& xp = xs.back();
    EXPECT_NEAR(s.psi, (op * (b - op * xp)).norm(), 1e-8 * anorm * anorm) << s.k;
    EXPECT_LE(s.phi, last_phi * (1 + 1e-14));
    EXPECT_GE(s.omega, last_omega * (1 - 1e-14));
    last_phi = s.phi;
    last_omega = s.omega;
    xs.push_back(x);
  });
  EXPECT_EQ(res.flag, Termination::RtolConverged);
}

TEST(Minres, NormRecurrenceHelper) {
  const Reflection<double> q{0.6, 0.8, 5.0};
  const auto out = minres_norm_recurrences(2.0, q, 3.0, 4.0, 0.0);
  EXPECT_NEAR(out.phi, 1.6, 1e-15);
  EXPECT_NEAR(out.psi, 8.0, 1e-14);
  EXPECT_NEAR(out.omega, 1.2, 1e-15);
}

TEST(Minres, ZeroRhs) {
  auto res = minres_solve(SymmetricOperator<double>::identity(3), Vector<double>::Zero(3));
  EXPECT_EQ(res.flag, Termination::ZeroRhs);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.x.norm(), 0.0);
}

TEST(Minres, OverlongUpdateIsDropped) {
  auto a = random_singular(25, 2, 44);
  auto op = SymmetricOperator<double>::from_dense(a);
  Vector<double> b = make_rhs(op, RhsMode::Incompatible, 3);
  SolverConfig<double> cfg;
  cfg.ar_test = false;
  cfg.maxxnorm = 1.5 * pseudoinverse_solution(a.full(), b).norm();
  auto res = minres_solve(op, b, cfg);
  ASSERT_EQ(res.flag, Termination::MaxXNorm);
  EXPECT_LE(res.x.norm(), cfg.maxxnorm);
  EXPECT_NEAR(res.chi, res.x.norm(), 1e-12 * res.x.norm());
  EXPECT_NEAR(res.phi, (b - op * res.x).norm(), 1e-9 * b.norm());
}

TEST(Minres, IterationLimit) {
  auto op = SymmetricOperator<double>::from_dense(random_spd(30, 1e4, 5));
  Lcg64 rng(1);
  SolverConfig<double> cfg;
  cfg.maxit = 3;
  cfg.record_history = true;
  auto res = minres_solve(op, uniform_vector(30, rng), cfg);
  EXPECT_EQ(res.flag, Termination::MaxIterations);
  EXPECT_EQ(res.iterations, 3);
  EXPECT_EQ(res.history.size(), 3u);
}

TEST(Minres, DimensionMismatch) {
  EXPECT_THROW(minres_solve(SymmetricOperator<double>::identity(3), Vector<double>::Ones(2)), std::invalid_argument);
}
