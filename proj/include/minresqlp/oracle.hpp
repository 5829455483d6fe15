#ifndef MINRESQLP_ORACLE_HPP_
#define MINRESQLP_ORACLE_HPP_

#include <Eigen/Eigenvalues>

#include <stdexcept>

#include "minresqlp/operator.hpp"
#include "minresqlp/types.hpp"

namespace minresqlp {

inline constexpr Index kOracleMaxDimension = 2000;

template <typename T>
struct EigenDecomposition {
  Vector<T> eigenvalues;   // ascending
  Matrix<T> eigenvectors;  // orthonormal columns

  T norm() const { return eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : T(0); }
  Index size() const { return eigenvalues.size(); }

  // Eigenvalues with |lambda| above cutoff are treated as nonzero.
  Index rank(T cutoff) const { return (eigenvalues.array().abs() > cutoff).count(); }

  // sum over |lambda_i| > cutoff of (u_i'b / lambda_i) u_i
  Vector<T> truncated_solve(const Vector<T>& b, T cutoff) const {
    Vector<T> c = eigenvectors.transpose() * b;
    for (Index i = 0; i < c.size(); ++i) c(i) = std::abs(eigenvalues(i)) > cutoff ? c(i) / eigenvalues(i) : T(0);
    return eigenvectors * c;
  }

  // Orthogonal projection onto span{u_i : |lambda_i| <= cutoff}.
  Vector<T> null_component(const Vector<T>& v, T cutoff) const {
    Vector<T> c = eigenvectors.transpose() * v;
    for (Index i = 0; i < c.size(); ++i)
      if (std::abs(eigenvalues(i)) > cutoff) c(i) = T(0);
    return eigenvectors * c;
  }
};

template <typename T>
EigenDecomposition<T> eigen_decompose(const Matrix<T>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigen_decompose: matrix is not square");
  if (a.rows() > kOracleMaxDimension) throw std::invalid_argument("eigen_decompose: dimension exceeds oracle limit");
  Eigen::SelfAdjointEigenSolver<Matrix<T>> es(a, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen_decompose: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

template <typename T>
EigenDecomposition<T> eigen_decompose(const DenseSymmetricMatrix<T>& a) {
  return eigen_decompose<T>(a.full());
}

template <typename T>
Vector<T> tevd_solve(const EigenDecomposition<T>& evd, const std::type_identity_t<Vector<T>>& b, T t) {
  if (t < T(0)) throw std::invalid_argument("tevd_solve: t must be nonnegative");
  return evd.truncated_solve(b, t * evd.norm() * machine_eps<T>());
}

template <typename T>
Vector<T> tevd_solve(const Matrix<T>& a, const std::type_identity_t<Vector<T>>& b, T t) {
  return tevd_solve(eigen_decompose(a), b, t);
}

template <typename T>
T pseudoinverse_cutoff(const EigenDecomposition<T>& evd) {
  return T(evd.size()) * evd.norm() * machine_eps<T>();
}

template <typename T>
Vector<T> pseudoinverse_solution(const EigenDecomposition<T>& evd, const std::type_identity_t<Vector<T>>& b) {
  return evd.truncated_solve(b, pseudoinverse_cutoff(evd));
}

template <typename T>
Vector<T> pseudoinverse_solution(const Matrix<T>& a, const std::type_identity_t<Vector<T>>& b) {
  return pseudoinverse_solution(eigen_decompose(a), b);
}

template <typename T>
T condition_number(const EigenDecomposition<T>& evd, T t) {
  const T amax = evd.norm();
  if (amax == T(0)) throw std::invalid_argument("condition_number: matrix is zero");
  const T cutoff = t * amax * machine_eps<T>();
  T amin = amax;
  for (Index i = 0; i < evd.size(); ++i) {
    const T l = std::abs(evd.eigenvalues(i));
    if (l > cutoff) amin = std::min(amin, l);
  }
  return amax / amin;
}

template <typename T>
T condition_number(const Matrix<T>& a, T t) {
  return condition_number(eigen_decompose(a), t);
}

}  // namespace minresqlp

#endif  // MINRESQLP_ORACLE_HPP_
