#include "minresqlp/problems.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace minresqlp {

double Lcg64::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector<double> uniform_vector(Index n, Lcg64& rng) {
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.uniform();
  return v;
}

Vector<double> normal_vector(Index n, Lcg64& rng) {
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

Matrix<double> random_orthogonal(Index n, Lcg64& rng) {
  Matrix<double> g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix<double>> qr(g);
  Matrix<double> q = qr.householderQ() * Matrix<double>::Identity(n, n);
  // Sign fix makes Q Haar distributed.
  for (Index j = 0; j < n; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

DenseSymmetricMatrix<double> laplacian_block(Index N) {
  if (N < 2) throw std::invalid_argument("laplacian_block: N must be >= 2");
  Matrix<double> t = Matrix<double>::Zero(N, N);
  for (Index i = 0; i < N; ++i) {
    t(i, i) = 1.0;
    if (i + 1 < N) t(i, i + 1) = t(i + 1, i) = 1.0;
  }
  const Index n = N * N;
  Matrix<double> a = Matrix<double>::Zero(n, n);
  for (Index bi = 0; bi < N; ++bi)
    for (Index bj = std::max<Index>(0, bi - 1); bj <= std::min(N - 1, bi + 1); ++bj) a.block(bi * N, bj * N, N, N) = t;
  return DenseSymmetricMatrix<double>(a);
}

DenseSymmetricMatrix<double> householder_diag(Index n, double eta, Index null_dim, HouseholderSource source) {
  const Index ramp = n - null_dim - 2;
  if (null_dim < 0 || ramp < 2) throw std::invalid_argument("householder_diag: dimension mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("householder_diag: eta must be positive");
  Vector<double> vals = Vector<double>::Zero(n);
  vals(null_dim) = eta;
  vals(null_dim + 1) = 2.0 * eta;
  for (Index i = 0; i < ramp; ++i) vals(null_dim + 2 + i) = 2.0 + static_cast<double>(i) / static_cast<double>(ramp - 1);

  Vector<double> w = Vector<double>::Ones(n);
  if (source == HouseholderSource::PaddedOnes) w.head(null_dim).setZero();
  w.normalize();
  // Q D Q = D - 2 w (Dw)' - 2 (Dw) w' + 4 (w'Dw) w w'
  const Vector<double> dw = vals.cwiseProduct(w);
  const double wdw = w.dot(dw);
  Matrix<double> a = vals.asDiagonal();
  a -= 2.0 * (w * dw.transpose() + dw * w.transpose());
  a += 4.0 * wdw * (w * w.transpose());
  return DenseSymmetricMatrix<double>(a);
}

DenseSymmetricMatrix<double> random_symmetric(Index n, const RandomSpectrum& spec, std::uint64_t seed) {
  if (n < 1 || spec.deficit < 0 || spec.deficit >= n) throw std::invalid_argument("random_symmetric: bad dimensions");
  Lcg64 rng(seed);
  const Matrix<double> u = random_orthogonal(n, rng);
  Vector<double> lam = Vector<double>::Zero(n);
  for (Index i = spec.deficit; i < n; ++i) {
    const double mag = spec.lo + (spec.hi - spec.lo) * rng.uniform();
    const double sgn = spec.definite || rng.uniform() < 0.5 ? 1.0 : -1.0;
    lam(i) = sgn * mag;
  }
  // Shuffle so zero eigenvalues are not tied to the first columns of U.
  for (Index i = n - 1; i > 0; --i) std::swap(lam(i), lam(rng.below(i + 1)));
  Matrix<double> a = u * lam.asDiagonal() * u.transpose();
  a = 0.5 * (a + a.transpose());
  return DenseSymmetricMatrix<double>(a);
}

DenseSymmetricMatrix<double> random_singular(Index n, Index deficit, std::uint64_t seed) {
  return random_symmetric(n, RandomSpectrum{deficit, 0.1, 1.0, false}, seed);
}

DenseSymmetricMatrix<double> random_spd(Index n, double cond, std::uint64_t seed) {
  return random_symmetric(n, RandomSpectrum{0, 1.0, cond, true}, seed);
}

RhsMode parse_rhs_mode(const std::string& s) {
  if (s == "compatible") return RhsMode::Compatible;
  if (s == "incompatible") return RhsMode::Incompatible;
  if (s == "almost_compatible") return RhsMode::AlmostCompatible;
  if (s == "ones") return RhsMode::Ones;
  if (s == "aones" || s == "A_ones" || s == "a_ones") return RhsMode::AOnes;
  throw std::invalid_argument("unknown rhs mode: " + s);
}

const char* rhs_mode_name(RhsMode m) {
  switch (m) {
    case RhsMode::Compatible: return "compatible";
    case RhsMode::Incompatible: return "incompatible";
    case RhsMode::AlmostCompatible: return "almost_compatible";
    case RhsMode::Ones: return "ones";
    case RhsMode::AOnes: return "aones";
  }
  return "unknown";
}

Vector<double> make_rhs(const SymmetricOperator<double>& a, RhsMode mode, std::uint64_t seed) {
  const Index n = a.size();
  Lcg64 rng(seed);
  switch (mode) {
    case RhsMode::Compatible: return a * uniform_vector(n, rng);
    case RhsMode::Incompatible: return uniform_vector(n, rng);
    case RhsMode::AlmostCompatible: {
      const Vector<double> y = uniform_vector(n, rng);
      const Vector<double> z = uniform_vector(n, rng);
      return a * y + 1e-8 * z;
    }
    case RhsMode::Ones: return Vector<double>::Ones(n);
    case RhsMode::AOnes: return a * Vector<double>::Ones(n);
  }
  throw std::invalid_argument("make_rhs: bad mode");
}

ProblemSpec ProblemSpec::parse(const std::string& text) {
  ProblemSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (spec.name.empty()) throw std::invalid_argument("problem name is empty");
  if (colon == std::string::npos) return spec;
  std::istringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("bad problem parameter '" + item + "'");
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

double ProblemSpec::get(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) throw std::invalid_argument("bad numeric parameter " + key + "=" + it->second);
  return v;
}

Index ProblemSpec::get_index(const std::string& key, Index fallback) const {
  const double v = get(key, static_cast<double>(fallback));
  if (v != std::floor(v)) throw std::invalid_argument("parameter " + key + " must be an integer");
  return static_cast<Index>(v);
}

std::string ProblemSpec::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

namespace {

Problem dense_problem(std::string name, const Matrix<double>& a) {
  DenseSymmetricMatrix<double> m(a);
  Problem p{std::move(name), SymmetricOperator<double>::from_dense(m), m};
  return p;
}

Problem dense_problem(std::string name, DenseSymmetricMatrix<double> m) {
  Problem p{std::move(name), SymmetricOperator<double>::from_dense(m), m};
  return p;
}

}  // namespace

Problem make_problem(const ProblemSpec& spec) {
  const std::string& nm = spec.name;
  if (nm == "diag110") return dense_problem(nm, Vector<double>(Eigen::Vector3d(1, 1, 0)).asDiagonal().toDenseMatrix());
  if (nm == "example62") {
    Matrix<double> a(4, 4);
    a << 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0;
    return dense_problem(nm, a);
  }
  if (nm == "bin3") {
    Matrix<double> a(3, 3);
    a << 1e-8, 1, 0, 1, 1e-8, 1e4, 0, 1e4, 0;
    return dense_problem(nm, a);
  }
  if (nm == "dscale1") {
    Matrix<double> a = Matrix<double>::Zero(4, 4);
    a(0, 0) = -1;
    a(0, 1) = a(1, 0) = 1e-8;
    a(1, 1) = 1;
    a(1, 2) = a(2, 1) = 1e4;
    return dense_problem(nm, a);
  }
  if (nm == "dscale2") {
    Matrix<double> a = Matrix<double>::Zero(4, 4);
    a(0, 0) = a(1, 1) = 1e-4;
    a(0, 1) = a(1, 0) = 1e-8;
    a(1, 2) = a(2, 1) = 1e-8;
    return dense_problem(nm, a);
  }
  if (nm == "identity") {
    const Index n = spec.get_index("n", 3);
    if (n < 1) throw std::invalid_argument("identity: n must be >= 1");
    return dense_problem(nm, Matrix<double>::Identity(n, n));
  }
  if (nm == "laplacian") return dense_problem(nm, laplacian_block(spec.get_index("N", 20)));
  if (nm == "householder") {
    const std::string w = spec.get_string("w", "padded");
    HouseholderSource src;
    if (w == "padded") {
      src = HouseholderSource::PaddedOnes;
    } else if (w == "ones") {
      src = HouseholderSource::Ones;
    } else {
      throw std::invalid_argument("householder: w must be 'padded' or 'ones'");
    }
    return dense_problem(nm, householder_diag(spec.get_index("n", 797), spec.get("eta", 1e-8),
                                              spec.get_index("null", 5), src));
  }
  if (nm == "random_singular") {
    return dense_problem(nm, random_singular(spec.get_index("n", 20), spec.get_index("deficit", 2),
                                             static_cast<std::uint64_t>(spec.get_index("seed", 1))));
  }
  if (nm == "spd") {
    return dense_problem(nm, random_spd(spec.get_index("n", 30), spec.get("cond", 10.0),
                                        static_cast<std::uint64_t>(spec.get_index("seed", 1))));
  }
  throw std::invalid_argument("unknown problem '" + nm + "'");
}

Problem make_problem(const std::string& text) { return make_problem(ProblemSpec::parse(text)); }

}  // namespace minresqlp
