#pragma once

// Boundary functions on the circle group, sampled on the uniform N-point grid
// e^{2 pi i k / N}. All L^p quantities use the normalised counting measure
// (weight 1/N per sample), so statements about them are exact on the grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "json.hpp"
#include "kclosed/common.hpp"

namespace kclosed {

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace detail

// Complex samples on the grid together with their Fourier coefficients.
// Coefficients are indexed by frequency j in [-N/2, N/2); frequency -N/2 is
// the Nyquist mode and counts as negative (it is annihilated by the Riesz
// projection).
class CircleFunction {
 public:
  CircleFunction() = default;

  explicit CircleFunction(std::vector<cplx> samples) : samples_(std::move(samples)) {
    require(samples_.size() >= 8 && is_power_of_two(samples_.size()),
            "CircleFunction: grid size must be a power of two >= 8");
    for (const auto& s : samples_)
      require(std::isfinite(s.real()) && std::isfinite(s.imag()),
              "CircleFunction: non-finite sample");
    compute_coeffs();
  }

  // Build from coefficients given in frequency order -N/2 .. N/2-1.
  static CircleFunction from_coeffs(std::span<const cplx> coeffs) {
    const std::size_t n = coeffs.size();
    require(n >= 8 && is_power_of_two(n), "CircleFunction: grid size must be a power of two >= 8");
    std::vector<cplx> spectrum(n);
    const long half = static_cast<long>(n / 2);
    for (long j = -half; j < half; ++j)
      spectrum[static_cast<std::size_t>((j + static_cast<long>(n)) % static_cast<long>(n))] =
          coeffs[static_cast<std::size_t>(j + half)] * static_cast<double>(n);
    std::vector<cplx> samples;
    detail::fft_engine().inv(samples, spectrum);
    return CircleFunction(std::move(samples));
  }

  // Samples theta -> fn(theta) at theta_k = 2 pi k / N.
  static CircleFunction sample(std::size_t n, const std::function<cplx(double)>& fn) {
    std::vector<cplx> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = fn(angle(k, n));
    return CircleFunction(std::move(s));
  }

  // Samples z -> fn(z) at z_k = e^{i theta_k}.
  static CircleFunction sample_z(std::size_t n, const std::function<cplx(cplx)>& fn) {
    return sample(n, [&](double th) { return fn(std::polar(1.0, th)); });
  }

  static CircleFunction constant(std::size_t n, cplx c) {
    return CircleFunction(std::vector<cplx>(n, c));
  }

  static double angle(std::size_t k, std::size_t n) {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  }

  std::size_t size() const { return samples_.size(); }
  // Views into the samples; deleted on temporaries so they cannot dangle.
  std::span<const cplx> samples() const& { return samples_; }
  std::span<const cplx> samples() const&& = delete;
  const std::vector<cplx>& sample_vector() const& { return samples_; }
  std::vector<cplx> sample_vector() && { return std::move(samples_); }
  cplx operator[](std::size_t k) const { return samples_[k]; }

  // Coefficients in frequency order -N/2 .. N/2-1.
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx coeff(long freq) const {
    const long half = static_cast<long>(size() / 2);
    require(freq >= -half && freq < half, "CircleFunction::coeff: frequency out of range");
    return coeffs_[static_cast<std::size_t>(freq + half)];
  }

  // Largest modulus among the negative-frequency coefficients (Nyquist included).
  double negative_coeff_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size() / 2; ++i) m = std::max(m, std::abs(coeffs_[i]));
    return m;
  }

  double sup_modulus() const {
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, std::abs(s));
    return m;
  }

  template <class Fn>
  CircleFunction map(Fn&& fn) const {
    std::vector<cplx> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = fn(samples_[k]);
    return CircleFunction(std::move(out));
  }

  CircleFunction conj() const { return map([](cplx v) { return std::conj(v); }); }
  CircleFunction modulus() const { return map([](cplx v) { return cplx(std::abs(v), 0.0); }); }

  friend CircleFunction operator+(const CircleFunction& a, const CircleFunction& b) {
    return zip(a, b, std::plus<>());
  }
  friend CircleFunction operator-(const CircleFunction& a, const CircleFunction& b) {
    return zip(a, b, std::minus<>());
  }
  friend CircleFunction operator*(const CircleFunction& a, const CircleFunction& b) {
    return zip(a, b, std::multiplies<>());
  }
  friend CircleFunction operator/(const CircleFunction& a, const CircleFunction& b) {
    return zip(a, b, std::divides<>());
  }
  friend CircleFunction operator*(cplx c, const CircleFunction& a) {
    return a.map([c](cplx v) { return c * v; });
  }

 private:
  template <class Op>
  static CircleFunction zip(const CircleFunction& a, const CircleFunction& b, Op op) {
    require(a.size() == b.size(), "CircleFunction: grid size mismatch");
    std::vector<cplx> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = op(a.samples_[k], b.samples_[k]);
    return CircleFunction(std::move(out));
  }

  void compute_coeffs() {
    const std::size_t n = size();
    std::vector<cplx> spectrum;
    detail::fft_engine().fwd(spectrum, samples_);
    coeffs_.assign(n, cplx{});
    const long half = static_cast<long>(n / 2);
    for (long j = -half; j < half; ++j)
      coeffs_[static_cast<std::size_t>(j + half)] =
          spectrum[static_cast<std::size_t>((j + static_cast<long>(n)) % static_cast<long>(n))] /
          static_cast<double>(n);
  }

  std::vector<cplx> samples_;
  std::vector<cplx> coeffs_;
};

inline std::vector<cplx> fourier_coeffs(const CircleFunction& f) { return f.coeffs(); }

// Applies a Fourier multiplier m(j) to f.
template <class Multiplier>
CircleFunction apply_multiplier(const CircleFunction& f, Multiplier&& m) {
  std::vector<cplx> c = f.coeffs();
  const long half = static_cast<long>(f.size() / 2);
  for (long j = -half; j < half; ++j) c[static_cast<std::size_t>(j + half)] *= m(j);
  return CircleFunction::from_coeffs(c);
}

// Orthogonal projection onto the analytic subspace (frequencies 0 .. N/2-1).
inline CircleFunction riesz_project(const CircleFunction& f) {
  return apply_multiplier(f, [](long j) { return j >= 0 ? cplx(1.0) : cplx(0.0); });
}

// Conjugate function: multiplier -i sign(j), sign(0) = 0.
inline CircleFunction hilbert_transform(const CircleFunction& f) {
  return apply_multiplier(f, [](long j) {
    if (j == 0) return cplx(0.0);
    return j > 0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  });
}

inline double lp_norm(std::span<const cplx> samples, double p) {
  require(p >= 1.0, "lp_norm: exponent must be >= 1");
  if (samples.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s));
    return m;
  }
  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, std::abs(s));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples) acc += std::pow(std::abs(s) / scale, p);
  return scale * std::pow(acc / static_cast<double>(samples.size()), 1.0 / p);
}

inline double lp_norm(const CircleFunction& f, double p) { return lp_norm(f.samples(), p); }

// Non-increasing rearrangement of |f| as a step function on [0, 1] with steps
// of width 1/N.
struct Rearrangement {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double step() const { return 1.0 / static_cast<double>(values.size()); }

  // Right-continuous f*(s); zero beyond the unit interval.
  double value_at(double s) const {
    if (s < 0.0) return values.empty() ? 0.0 : values.front();
    const auto i = static_cast<std::size_t>(std::floor(s * static_cast<double>(size())));
    return i < size() ? values[i] : 0.0;
  }

  // Exact integral of f* over [0, t].
  double integral(double t) const {
    const double n = static_cast<double>(size());
    const double steps = std::min(t, 1.0) * n;
    const auto full = static_cast<std::size_t>(std::floor(steps));
    double acc = 0.0;
    for (std::size_t i = 0; i < std::min(full, size()); ++i) acc += values[i];
    if (full < size()) acc += (steps - static_cast<double>(full)) * values[full];
    return acc / n;
  }
};

inline Rearrangement rearrange(const CircleFunction& f) {
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(f[a]) > std::abs(f[b]);
  });
  Rearrangement r;
  r.values.reserve(f.size());
  for (auto i : order) r.values.push_back(std::abs(f[i]));
  return r;
}

// K_t(f; L^1, L^inf) = integral of f* over [0, t].
inline double kt_L1_Linf(const CircleFunction& f, double t) {
  require(t > 0.0, "kt_L1_Linf: t must be positive");
  return rearrange(f).integral(t);
}

// Splits f = (f - h) + h with h = f min(1, level/|f|), so |h| <= level.
inline std::pair<CircleFunction, CircleFunction> truncate_at_level(const CircleFunction& f,
                                                                   double level) {
  require(level >= 0.0, "truncate_at_level: level must be non-negative");
  CircleFunction h = f.map([level](cplx v) {
    const double m = std::abs(v);
    return m <= level ? v : v * (level / m);
  });
  return {f - h, h};
}

inline void to_json(nlohmann::json& j, const CircleFunction& f) {
  std::vector<double> re, im;
  re.reserve(f.size());
  im.reserve(f.size());
  for (const auto& s : f.samples()) {
    re.push_back(s.real());
    im.push_back(s.imag());
  }
  j = nlohmann::json{{"n", f.size()}, {"re", re}, {"im", im}};
}

inline void from_json(const nlohmann::json& j, CircleFunction& f) {
  const auto n = j.at("n").get<std::size_t>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(n, 0.0);
  require(re.size() == n && im.size() == n, "CircleFunction JSON: length mismatch with n");
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = {re[k], im[k]};
  f = CircleFunction(std::move(s));
}

}  // namespace kclosed
