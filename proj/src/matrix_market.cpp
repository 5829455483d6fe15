#include "minresqlp/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace minresqlp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

double parse_value(std::istringstream& ss, Index line_no) {
  double v;
  if (!(ss >> v)) throw MatrixMarketError("matrix market: bad value at entry " + std::to_string(line_no));
  return v;
}

}  // namespace

Eigen::SparseMatrix<double> read_matrix_market(std::istream& in, double symmetry_tol) {
  std::string banner;
  if (!std::getline(in, banner)) throw MatrixMarketError("matrix market: empty input");
  std::istringstream hs(banner);
  std::string tag, object, format, field, symmetry;
  hs >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw MatrixMarketError("matrix market: missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixMarketError("matrix market: unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    throw MatrixMarketError("matrix market: unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double")
    throw MatrixMarketError("matrix market: unsupported field '" + field + "' (real symmetric only)");
  if (symmetry == "skew-symmetric") throw AsymmetryError("matrix market: skew-symmetric matrices are not symmetric");
  if (symmetry != "general" && symmetry != "symmetric")
    throw MatrixMarketError("matrix market: unsupported symmetry '" + symmetry + "'");
  const bool sym = symmetry == "symmetric";

  std::string line;
  if (!next_data_line(in, line)) throw MatrixMarketError("matrix market: missing size line");
  std::istringstream ss(line);
  long long rows = 0, cols = 0, nnz = 0;
  if (!(ss >> rows >> cols)) throw MatrixMarketError("matrix market: malformed size line");
  if (format == "coordinate" && !(ss >> nnz)) throw MatrixMarketError("matrix market: malformed size line");
  if (rows <= 0 || cols <= 0 || nnz < 0) throw MatrixMarketError("matrix market: invalid dimensions");
  if (rows != cols)
    throw NonsquareError("matrix market: matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", not square");
  const Index n = static_cast<Index>(rows);

  std::vector<Eigen::Triplet<double>> trip;
  auto push = [&](Index i, Index j, double v) {
    if (v == 0.0) return;
    trip.emplace_back(i, j, v);
    if (sym && i != j) trip.emplace_back(j, i, v);
  };

  if (format == "coordinate") {
    trip.reserve(static_cast<size_t>(sym ? 2 * nnz : nnz));
    for (long long e = 0; e < nnz; ++e) {
      if (!next_data_line(in, line)) throw MatrixMarketError("matrix market: expected " + std::to_string(nnz) +
                                                             " entries, found " + std::to_string(e));
      std::istringstream es(line);
      long long i = 0, j = 0;
      if (!(es >> i >> j)) throw MatrixMarketError("matrix market: malformed entry " + std::to_string(e + 1));
      const double v = parse_value(es, e + 1);
      if (i < 1 || j < 1 || i > rows || j > cols)
        throw MatrixMarketError("matrix market: index out of range at entry " + std::to_string(e + 1));
      push(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    }
  } else {
    Index e = 0;
    for (Index j = 0; j < n; ++j) {
      for (Index i = sym ? j : 0; i < n; ++i) {
        if (!next_data_line(in, line)) throw MatrixMarketError("matrix market: too few array entries");
        std::istringstream es(line);
        push(i, j, parse_value(es, ++e));
      }
    }
  }

  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();

  if (!sym) {
    const Eigen::SparseMatrix<double> at = a.transpose();
    const Eigen::SparseMatrix<double> diff = a - at;
    double scale = 0.0, asym = 0.0;
    for (Index k = 0; k < a.nonZeros(); ++k) scale = std::max(scale, std::abs(a.valuePtr()[k]));
    for (Index k = 0; k < diff.nonZeros(); ++k) asym = std::max(asym, std::abs(diff.valuePtr()[k]));
    if (asym > symmetry_tol * scale) {
      std::ostringstream msg;
      msg << "matrix is not symmetric: max|A_ij - A_ji| = " << asym << " exceeds " << symmetry_tol
          << " * max|A_ij| = " << symmetry_tol * scale;
      throw AsymmetryError(msg.str());
    }
    // Numerically symmetric: average the triangles so the stored matrix is exactly symmetric.
    a = 0.5 * (a + at);
  }
  return a;
}

SymmetricOperator<double> load_matrix_market(const std::string& path, double symmetry_tol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  return SymmetricOperator<double>::from_sparse(read_matrix_market(in, symmetry_tol));
}

}  // namespace minresqlp
