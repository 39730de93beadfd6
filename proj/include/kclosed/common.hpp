#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kclosed {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when a computation is mathematically impossible for the given input
// (vanishing modulus, singular operator, ...). Bad arguments use
// std::invalid_argument.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Conjugate exponent, 1/p + 1/p' = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

inline double inverse_exponent(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace kclosed
