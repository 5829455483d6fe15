#ifndef MINRESQLP_PROBLEMS_HPP_
#define MINRESQLP_PROBLEMS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "minresqlp/operator.hpp"
#include "minresqlp/types.hpp"

namespace minresqlp {

// 64-bit LCG, state' = 6364136223846793005 * state + 1442695040888963407 (mod 2^64).
// uniform() takes the top 53 bits, so streams are reproducible in any language.
class Lcg64 {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed = 0) : state_(seed) { next(); }

  std::uint64_t next() {
    state_ = kMultiplier * state_ + kIncrement;
    return state_;
  }
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ULL; }

  // U[0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Box-Muller on two uniforms.
  double normal();
  Index below(Index bound) { return static_cast<Index>(uniform() * static_cast<double>(bound)); }

 private:
  std::uint64_t state_;
};

Vector<double> uniform_vector(Index n, Lcg64& rng);
Vector<double> normal_vector(Index n, Lcg64& rng);
Matrix<double> random_orthogonal(Index n, Lcg64& rng);

// Block tridiagonal with every block equal to the all-ones tridiagonal T of order N.
DenseSymmetricMatrix<double> laplacian_block(Index N);

enum class HouseholderSource { Ones, PaddedOnes };

// A = Q diag([0_null, eta, 2 eta, ramp from 2 to 3]) Q with Q = I - 2ww' and ||w|| = 1.
// The ramp has n - null_dim - 2 equally spaced points.
DenseSymmetricMatrix<double> householder_diag(Index n, double eta, Index null_dim, HouseholderSource source);

// U diag(lambda) U' with random orthogonal U; `deficit` zero eigenvalues, the rest with
// |lambda| uniform in [lo, hi] and random sign (positive only when `definite`).
struct RandomSpectrum {
  Index deficit = 0;
  double lo = 0.1;
  double hi = 1.0;
  bool definite = false;
};
DenseSymmetricMatrix<double> random_symmetric(Index n, const RandomSpectrum& spec, std::uint64_t seed);
DenseSymmetricMatrix<double> random_singular(Index n, Index deficit, std::uint64_t seed);
DenseSymmetricMatrix<double> random_spd(Index n, double cond, std::uint64_t seed);

enum class RhsMode { Compatible, Incompatible, AlmostCompatible, Ones, AOnes };

RhsMode parse_rhs_mode(const std::string& s);
const char* rhs_mode_name(RhsMode m);

// compatible: A y; incompatible: z; almost_compatible: A y + 1e-8 z; y, z ~ U(0,1).
Vector<double> make_rhs(const SymmetricOperator<double>& a, RhsMode mode, std::uint64_t seed);

struct ProblemSpec {
  std::string name;
  std::map<std::string, std::string> params;

  // "name" or "name:key=value,key=value"
  static ProblemSpec parse(const std::string& text);
  double get(const std::string& key, double fallback) const;
  Index get_index(const std::string& key, Index fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
};

struct Problem {
  std::string name;
  SymmetricOperator<double> op;
  std::optional<DenseSymmetricMatrix<double>> matrix;
};

// Known names: diag110, example62, bin3, dscale1, dscale2, identity, laplacian, householder,
// random_singular, spd.
Problem make_problem(const ProblemSpec& spec);
Problem make_problem(const std::string& text);

}  // namespace minresqlp

#endif  // MINRESQLP_PROBLEMS_HPP_
