#ifndef MINRESQLP_TYPES_HPP_
#define MINRESQLP_TYPES_HPP_

#include <Eigen/Core>

#include <limits>
#include <type_traits>

namespace minresqlp {

using Index = Eigen::Index;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
constexpr T machine_eps() noexcept {
  return std::numeric_limits<T>::epsilon();
}

}  // namespace minresqlp

#endif  // MINRESQLP_TYPES_HPP_
