#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vswap/model.hpp"
#include "vswap/numerics.hpp"

// Regime-switching zero-coupon bond under the risk-neutral measure:
// closed-form duration loading B(t,T), the per-state factor solved from the
// coupled linear system, the bond price P = A_i * exp(-B r), and the
// forward-measure rate matrix of the chain.

namespace vswap::bond {

using model::Mat;
using model::Vec;

/// Duration loading B(t,T) of the affine bond price. Evaluates
/// 2(e^{h tau}-1) / (2h + (alpha+h)(e^{h tau}-1)) with h = sqrt(alpha^2 + 2 eta^2).
/// Returns 0 at t = T; with eta = 0 it degenerates to (1 - e^{-alpha tau})/alpha.
inline double b_factor(double t, double T, const model::ModelParams& p) {
  if (t > T + 1e-9) throw std::invalid_argument("b_factor: t beyond maturity");
  const double tau = std::max(T - t, 0.0);
  const double h = std::sqrt(p.alpha * p.alpha + 2.0 * p.eta * p.eta);
  const double em = std::expm1(h * tau);
  return 2.0 * em / (2.0 * h + (p.alpha + h) * em);
}

/// Per-state bond factors on [0, T]: the N-dimensional linear system
///   dA/dt = (diag(alpha * beta_i * B(t,T)) - Q_eff^T) A,   A(T) = 1,
/// integrated backward, where Q_eff is the effective (column-form)
/// generator. Every entry must stay positive; a violation aborts because it
/// signals a convention or step-size error.
inline numerics::GridFn<Vec> solve_state_factors(double T,
                                                 const model::ModelParams& p,
                                                 const numerics::OdeConfig& cfg) {
  const int n = p.regimes();
  const Mat q_eff_t = model::effective_generator(p.generator).transpose();
  const Vec beta = p.beta_star.values;
  auto rhs = [&](double t, const Vec& a) -> Vec {
    return (p.alpha * b_factor(t, T, p)) * beta.cwiseProduct(a) - q_eff_t * a;
  };
  auto grid =
      numerics::solve_backward(rhs, 0.0, T, Vec(Vec::Ones(n)), cfg.steps_for(T));
  for (int i = 0; i <= grid.steps(); ++i)
    if ((grid.node(i).array() <= 0.0).any())
      throw numerics::NumericError("solve_state_factors: non-positive factor",
                                   grid.node_time(i));
  return grid;
}

/// B(t,T) and the per-state factors for one maturity, sampled on [0, T].
struct BondCurve {
  double maturity;
  numerics::GridFn<double> duration;      // B(t, maturity)
  numerics::GridFn<Vec> state_factor;     // per-state factor, all in (0, 1]

  int regimes() const { return static_cast<int>(state_factor.front().size()); }
};

inline BondCurve build_curve(double T, const model::ModelParams& p,
                             const numerics::OdeConfig& cfg) {
  if (!(T > 0.0)) throw std::invalid_argument("build_curve: maturity must be > 0");
  auto factors = solve_state_factors(T, p, cfg);
  const int steps = factors.steps();
  std::vector<double> b(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) b[i] = b_factor(factors.node_time(i), T, p);
  return BondCurve{T, numerics::GridFn<double>(0.0, T, std::move(b)),
                   std::move(factors)};
}

/// P(t,T,r,X=e_regime) = A_regime(t,T) * exp(-B(t,T) r); equals 1 at t = T.
inline double bond_price(double t, double T, double r, int regime,
                         const BondCurve& curve) {
  if (std::abs(T - curve.maturity) > 1e-9)
    throw std::invalid_argument("bond_price: curve built for different maturity");
  if (regime < 0 || regime >= curve.regimes())
    throw std::out_of_range("bond_price: regime index out of range");
  const Vec a = curve.state_factor.eval(t);
  return a[regime] * std::exp(-curve.duration.eval(t) * r);
}

/// Forward-measure rate matrix at time t given a precomputed effective
/// generator: each intensity i->k is reweighted by the factor ratio A_k/A_i
/// of the numeraire bond, and the diagonal is the negative column sum, so
/// the result is a proper column-form generator by construction.
inline Mat forward_generator(double t, const BondCurve& curve, const Mat& q_eff) {
  const Vec a = curve.state_factor.eval(t);
  if ((a.array() <= 0.0).any())
    throw numerics::NumericError("forward_generator: non-positive factor", t);
  const int n = static_cast<int>(q_eff.rows());
  Mat q = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (k != i) q(k, i) = q_eff(k, i) * a[k] / a[i];
  for (int i = 0; i < n; ++i) q(i, i) = -q.col(i).sum();
  return q;
}

/// Forward-measure rate matrix of the chain at time t, in semimartingale
/// (column) form. Reduces to the effective generator when all state factors
/// coincide, in particular at t = T.
inline Mat forward_generator(double t, const BondCurve& curve,
                             const model::ModelParams& p) {
  return forward_generator(t, curve, model::effective_generator(p.generator));
}

}  // namespace vswap::bond
