#ifndef MINRESQLP_MATRIX_MARKET_HPP_
#define MINRESQLP_MATRIX_MARKET_HPP_

#include <Eigen/Sparse>

#include <istream>
#include <stdexcept>
#include <string>

#include "minresqlp/operator.hpp"

namespace minresqlp {

class MatrixMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonsquareError : public MatrixMarketError {
 public:
  using MatrixMarketError::MatrixMarketError;
};

inline constexpr double kDefaultSymmetryTol = 1e-12;

// Coordinate or array format, real or integer field, symmetric or general symmetry.
// General inputs must satisfy max|A_ij - A_ji| <= symmetry_tol * max|A_ij|.
Eigen::SparseMatrix<double> read_matrix_market(std::istream& in, double symmetry_tol = kDefaultSymmetryTol);

SymmetricOperator<double> load_matrix_market(const std::string& path, double symmetry_tol = kDefaultSymmetryTol);

}  // namespace minresqlp

#endif  // MINRESQLP_MATRIX_MARKET_HPP_
