#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Fixed-step ODE integration over real and complex values, uniform time
// grids with linear interpolation. Fixed-step RK4 keeps results
// bit-reproducible across runs; all right-hand sides in this project are
// smooth on short horizons, so adaptive control is not needed.

namespace vswap::numerics {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const Complex& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
template <class Derived>
bool finite_value(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

/// Thrown when an integrator meets a non-finite value; carries the time of blow-up.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& msg, double t)
      : std::runtime_error(msg + " (t=" + std::to_string(t) + ")"), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

struct OdeConfig {
  int steps_per_year = 2000;

  void require_valid() const {
    if (steps_per_year < 16)
      throw std::invalid_argument("OdeConfig: steps_per_year must be >= 16");
  }

  /// Number of fixed steps used to cover a time span.
  int steps_for(double span) const {
    require_valid();
    if (span < 0.0) throw std::invalid_argument("OdeConfig: negative time span");
    return std::max(1, static_cast<int>(std::ceil(span * steps_per_year - 1e-9)));
  }
};

/// A function sampled on a uniform time grid of n+1 nodes, linearly
/// interpolated between nodes and exact at nodes.
template <class V>
class GridFn {
 public:
  GridFn(double t_start, double t_end, std::vector<V> values)
      : t_start_(t_start), t_end_(t_end), values_(std::move(values)) {
    if (!(t_start_ < t_end_))
      throw std::invalid_argument("GridFn: t_start must be < t_end");
    if (values_.size() < 2)
      throw std::invalid_argument("GridFn: need at least two nodes");
  }

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  int steps() const { return static_cast<int>(values_.size()) - 1; }
  double dt() const { return (t_end_ - t_start_) / steps(); }
  const std::vector<V>& values() const { return values_; }
  const V& front() const { return values_.front(); }
  const V& back() const { return values_.back(); }
  const V& node(int i) const { return values_[static_cast<std::size_t>(i)]; }
  double node_time(int i) const { return t_start_ + i * dt(); }

  V operator()(double t) const { return eval(t); }

  V eval(double t) const {
    const double slack =
        1e-12 * std::max({1.0, std::abs(t_start_), std::abs(t_end_)});
    if (t < t_start_ - slack || t > t_end_ + slack)
      throw std::out_of_range("GridFn: t=" + std::to_string(t) + " outside [" +
                              std::to_string(t_start_) + ", " +
                              std::to_string(t_end_) + "]");
    const double x =
        std::clamp((t - t_start_) / dt(), 0.0, static_cast<double>(steps()));
    const int i = std::min(static_cast<int>(x), steps() - 1);
    const double w = x - i;
    if (w < 1e-9) return values_[i];
    if (w > 1.0 - 1e-9) return values_[i + 1];
    return values_[i] + w * (values_[i + 1] - values_[i]);
  }

 private:
  double t_start_;
  double t_end_;
  std::vector<V> values_;
};

namespace detail {

// One classical RK4 step from (t, y) with signed step h.
template <class V, class Rhs>
V rk4_step(Rhs&& rhs, double t, const V& y, double h) {
  const V k1 = rhs(t, y);
  const V k2 = rhs(t + 0.5 * h, V(y + (0.5 * h) * k1));
  const V k3 = rhs(t + 0.5 * h, V(y + (0.5 * h) * k2));
  const V k4 = rhs(t + h, V(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from t_end down to t_start with classical
/// RK4, starting from the terminal value. Values are stored ascending in t;
/// the terminal node equals terminal_value exactly.
template <class V, class Rhs>
GridFn<V> solve_backward(Rhs&& rhs, double t_start, double t_end,
                         const V& terminal_value, int n_steps) {
  if (!(t_start < t_end))
    throw std::invalid_argument("solve_backward: t_start must be < t_end");
  if (n_steps < 1)
    throw std::invalid_argument("solve_backward: n_steps must be >= 1");
  const double h = (t_end - t_start) / n_steps;
  std::vector<V> values(static_cast<std::size_t>(n_steps) + 1, terminal_value);
  V y = terminal_value;
  for (int k = n_steps; k > 0; --k) {
    const double t = t_start + k * h;
    y = detail::rk4_step(rhs, t, y, -h);
    if (!finite_value(y))
      throw NumericError("solve_backward: non-finite value", t - h);
    values[static_cast<std::size_t>(k) - 1] = y;
  }
  return GridFn<V>(t_start, t_end, std::move(values));
}

/// Fundamental matrix of dPhi/dt = A(t) Phi with Phi(t0) = I, marched
/// forward with RK4 as a time-ordered product; returns Phi(t1).
/// When t0 == t1 the identity is returned exactly.
template <class AFn>
auto fundamental_matrix(AFn&& coeff, double t0, double t1, int n_steps) {
  // PlainObject collapses expression templates returned by the callable
  using MatT = typename std::decay_t<decltype(coeff(t0))>::PlainObject;
  if (t1 < t0)
    throw std::invalid_argument("fundamental_matrix: t1 must be >= t0");
  const MatT probe = coeff(t0);
  MatT phi = MatT::Identity(probe.rows(), probe.cols());
  if (t1 == t0) return phi;
  if (n_steps < 1)
    throw std::invalid_argument("fundamental_matrix: n_steps must be >= 1");
  const double h = (t1 - t0) / n_steps;
  auto rhs = [&coeff](double t, const MatT& p) -> MatT { return coeff(t) * p; };
  for (int k = 0; k < n_steps; ++k) {
    const double t = t0 + k * h;
    phi = detail::rk4_step(rhs, t, phi, h);
    if (!finite_value(phi))
      throw NumericError("fundamental_matrix: non-finite entries", t + h);
  }
  return phi;
}

/// Same as fundamental_matrix but keeps Phi at every grid node.
template <class AFn>
auto fundamental_matrix_grid(AFn&& coeff, double t0, double t1, int n_steps) {
  using MatT = typename std::decay_t<decltype(coeff(t0))>::PlainObject;
  if (!(t0 < t1))
    throw std::invalid_argument("fundamental_matrix_grid: t0 must be < t1");
  if (n_steps < 1)
    throw std::invalid_argument("fundamental_matrix_grid: n_steps must be >= 1");
  const MatT probe = coeff(t0);
  MatT phi = MatT::Identity(probe.rows(), probe.cols());
  std::vector<MatT> values;
  values.reserve(static_cast<std::size_t>(n_steps) + 1);
  values.push_back(phi);
  const double h = (t1 - t0) / n_steps;
  auto rhs = [&coeff](double t, const MatT& p) -> MatT { return coeff(t) * p; };
  for (int k = 0; k < n_steps; ++k) {
    const double t = t0 + k * h;
    phi = detail::rk4_step(rhs, t, phi, h);
    if (!finite_value(phi))
      throw NumericError("fundamental_matrix_grid: non-finite entries", t + h);
    values.push_back(phi);
  }
  return GridFn<MatT>(t0, t1, std::move(values));
}

}  // namespace vswap::numerics
