#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vswap/bond.hpp"
#include "vswap/model.hpp"
#include "vswap/numerics.hpp"

// Forward characteristic function f(phi; t, T, Delta, nu, r, X) of the log
// return over [T, T+Delta] under the forward measure, composed from a
// stable closed-form Riccati solution, two backward-integrated scalar ODEs,
// a per-state source term with a switch at T, and a regime matrix ODE.
//
// Everything runs in complex arithmetic: the Riccati discriminant
// sqrt(a^2 + sigma^2 (phi - phi^2)) can be imaginary away from the real
// segment the pricer uses, and real outputs are asserted, not assumed.

namespace vswap::charfn {

using model::Mat;
using model::Vec;
using numerics::CMat;
using numerics::Complex;
using numerics::CVec;

/// Stable closed form of the log-spot Riccati coefficient:
///   D = (phi^2 - phi) (e^{-b tau} - 1) / ((a - b) e^{-b tau} - (a + b)),
/// tau = T + delta - t, a = kappa - rho sigma phi,
/// b = sqrt(a^2 + sigma^2 (phi - phi^2)).
/// Finite at phi in {0, 1} (where the textbook g-form diverges) and at
/// sigma = 0; D(phi, T+delta) = 0 exactly.
inline Complex riccati_d(Complex phi, double t, double T, double delta,
                         const model::ModelParams& p) {
  const double tau = T + delta - t;
  if (tau < -1e-9) throw std::invalid_argument("riccati_d: t beyond T + delta");
  const Complex a = p.kappa - p.rho * p.sigma * phi;
  const Complex b = std::sqrt(a * a + p.sigma * p.sigma * (phi - phi * phi));
  const Complex num = phi * phi - phi;
  const double span = std::max(tau, 0.0);
  const Complex bt = b * span;
  if (std::abs(bt) < 1e-4) {
    // confluent expansion, removes the 0/0 at b -> 0
    const Complex p1 = 1.0 - bt / 2.0 + bt * bt / 6.0;
    return num * span * p1 /
           (a * span * p1 + 2.0 - bt + bt * bt / 2.0);
  }
  const Complex em = std::exp(-bt);
  return num * (em - 1.0) / ((a - b) * em - (a + b));
}

/// Closed-form solution of -dG/dt = (1/2) sigma^2 G^2 - kappa G with
/// G(T) = psi; G(0, t) = 0 and G(psi, T) = psi.
inline Complex g_closed(Complex psi, double t, double T,
                        const model::ModelParams& p) {
  const double s2 = p.sigma * p.sigma;
  const Complex den =
      s2 * psi + (2.0 * p.kappa - s2 * psi) * std::exp(p.kappa * (T - t));
  if (std::abs(den) < 1e-12 * std::max(1.0, 2.0 * p.kappa))
    throw numerics::NumericError("g_closed: singular denominator", t);
  return 2.0 * p.kappa * psi / den;
}

/// Rate-leg coefficient E on [T, T+delta]:
///   -dE/dt = (1/2) eta^2 E^2 - (alpha + B(t, horizon) eta^2) E + phi,
/// E(T+delta) = 0, integrated backward. horizon is the maturity of the
/// numeraire bond inside B and must not precede the interval end.
inline numerics::GridFn<Complex> solve_e(Complex phi, double T, double delta,
                                         double horizon,
                                         const model::ModelParams& p,
                                         const numerics::OdeConfig& cfg) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_e: delta must be > 0");
  if (horizon < T + delta - 1e-9)
    throw std::invalid_argument("solve_e: horizon before interval end");
  const double eta2 = p.eta * p.eta;
  auto rhs = [&p, eta2, horizon, phi](double t, const Complex& e) -> Complex {
    return -(0.5 * eta2 * e * e -
             (p.alpha + bond::b_factor(t, horizon, p) * eta2) * e + phi);
  };
  return numerics::solve_backward(rhs, T, T + delta, Complex(0.0),
                                  cfg.steps_for(delta));
}

namespace detail {

inline numerics::GridFn<Complex> solve_m_steps(Complex e_terminal, double t,
                                               double T, double horizon,
                                               const model::ModelParams& p,
                                               int n_steps) {
  const double eta2 = p.eta * p.eta;
  auto rhs = [&p, eta2, horizon](double s, const Complex& m) -> Complex {
    return -(0.5 * eta2 * m * m -
             (p.alpha + bond::b_factor(s, horizon, p) * eta2) * m);
  };
  return numerics::solve_backward(rhs, t, T, e_terminal, n_steps);
}

}  // namespace detail

/// Homogeneous companion of E on [t, T] with M(T) = e_terminal:
///   -dM/dt = (1/2) eta^2 M^2 - (alpha + B(t, horizon) eta^2) M.
inline numerics::GridFn<Complex> solve_m(Complex e_terminal, double t, double T,
                                         double horizon,
                                         const model::ModelParams& p,
                                         const numerics::OdeConfig& cfg) {
  if (!(t < T)) throw std::invalid_argument("solve_m: need t < T");
  if (!numerics::finite_value(e_terminal))
    throw std::invalid_argument("solve_m: non-finite terminal value");
  return detail::solve_m_steps(e_terminal, t, T, horizon, p, cfg.steps_for(T - t));
}

/// Everything char_fn needs for one (phi, interval) pair. E and M are solved
/// once and cached here; the source-term grid interpolates them linearly.
struct CharFnContext {
  Complex phi;
  double t_start = 0.0;         // valuation time
  double interval_start = 0.0;  // T
  double interval_length = 0.0; // delta
  double horizon = 0.0;         // numeraire bond maturity
  Complex d_terminal;           // D(phi, T)
  std::optional<numerics::GridFn<Complex>> e_grid;  // on [T, T+delta]
  std::optional<numerics::GridFn<Complex>> m_grid;  // on [t, T]; absent when t == T
  std::optional<numerics::GridFn<CVec>> j_grid;     // on [t, T+delta]
};

/// Per-state source term on [t, T+delta]; component i carries theta_i and
/// beta_i. Before T it uses the propagated coefficients G and M, from T on
/// the interval coefficients D and E; the two branches agree at T, so J is
/// continuous with a kink there. J vanishes identically at phi = 0.
inline numerics::GridFn<CVec> assemble_j(const CharFnContext& ctx,
                                         const model::ModelParams& p) {
  if (!ctx.e_grid) throw std::invalid_argument("assemble_j: context lacks E grid");
  const double t = ctx.t_start, T = ctx.interval_start;
  const double delta = ctx.interval_length;
  const Vec& theta = p.theta_star.values;
  const Vec& beta = p.beta_star.values;
  const int n = p.regimes();

  auto value_at = [&](double s) -> CVec {
    Complex vol_coef, rate_coef;
    if (s < T - 1e-12) {
      vol_coef = g_closed(ctx.d_terminal, s, T, p);
      rate_coef = ctx.m_grid->eval(s);
    } else {
      vol_coef = riccati_d(ctx.phi, s, T, delta, p);
      rate_coef = ctx.e_grid->eval(std::min(s, T + delta));
    }
    CVec j(n);
    for (int i = 0; i < n; ++i)
      j[i] = p.kappa * theta[i] * vol_coef + p.alpha * beta[i] * rate_coef;
    return j;
  };

  const int n_post = ctx.e_grid->steps();
  int n_pre = 0;
  bool aligned = true;
  if (T - t > 1e-12) {
    if (!ctx.m_grid) throw std::invalid_argument("assemble_j: context lacks M grid");
    n_pre = ctx.m_grid->steps();
    // a single uniform step requires the two legs to share it
    aligned = std::abs(ctx.m_grid->dt() - ctx.e_grid->dt()) <
              1e-9 * ctx.e_grid->dt();
  }

  std::vector<CVec> values;
  if (aligned) {
    values.reserve(static_cast<std::size_t>(n_pre + n_post) + 1);
    for (int i = 0; i <= n_pre + n_post; ++i) {
      const double s = i <= n_pre ? t + i * (n_pre > 0 ? ctx.m_grid->dt() : 0.0)
                                  : T + (i - n_pre) * ctx.e_grid->dt();
      values.push_back(value_at(std::min(s, T + delta)));
    }
  } else {
    // legs are incommensurate: fall back to one uniform grid over the whole
    // span; the kink at T then sits inside a step, which linear
    // interpolation handles without overshoot
    const int steps = n_pre + n_post;
    const double h = (T + delta - t) / steps;
    values.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
      values.push_back(value_at(std::min(t + i * h, T + delta)));
  }
  return numerics::GridFn<CVec>(t, T + delta, std::move(values));
}

/// Builds D(phi,T), the E and M grids and the source-term grid for one
/// (phi, interval) pair. horizon comes from the supplied bond curve.
inline CharFnContext make_context(Complex phi, double t, double T, double delta,
                                  const model::ModelParams& p,
                                  const bond::BondCurve& curve,
                                  const numerics::OdeConfig& cfg) {
  if (!(t <= T + 1e-12)) throw std::invalid_argument("make_context: t must be <= T");
  CharFnContext ctx;
  ctx.phi = phi;
  ctx.t_start = t;
  ctx.interval_start = T;
  ctx.interval_length = delta;
  ctx.horizon = curve.maturity;
  ctx.d_terminal = riccati_d(phi, T, T, delta, p);
  ctx.e_grid = solve_e(phi, T, delta, ctx.horizon, p, cfg);
  if (T - t > 1e-12) {
    // match the post-leg step when the spans are commensurate so the
    // source-term grid has a node exactly at T
    const double h = ctx.e_grid->dt();
    const double k = (T - t) / h;
    const int n_pre = std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, k)
                          ? static_cast<int>(std::lround(k))
                          : cfg.steps_for(T - t);
    ctx.m_grid =
        detail::solve_m_steps(ctx.e_grid->front(), t, T, ctx.horizon, p, n_pre);
  }
  ctx.j_grid = assemble_j(ctx, p);
  return ctx;
}

/// Regime propagator Phi(t, T+delta; J): the time-ordered solution of
///   dPhi/ds = (Q_fwd(s) + diag(J(s))) Phi,  Phi(t,t;J) = I,
/// integrated as two legs split at the kink of J. forward_gen(s) supplies
/// the forward-measure rate matrix in column form.
template <class QFn>
CMat phi_j(double t, double T, double delta,
           const numerics::GridFn<CVec>& j_grid, QFn&& forward_gen,
           const numerics::OdeConfig& cfg) {
  const double slack = 1e-9;
  if (j_grid.t_start() > t + slack || j_grid.t_end() < T + delta - slack)
    throw std::invalid_argument("phi_j: source-term grid does not cover interval");
  auto coeff = [&](double s) -> CMat {
    CMat a = forward_gen(s).template cast<Complex>();
    a.diagonal() += j_grid.eval(s);
    return a;
  };
  const int n = static_cast<int>(j_grid.front().size());
  CMat phi = CMat::Identity(n, n);
  if (T - t > slack)
    phi = numerics::fundamental_matrix(coeff, t, T, cfg.steps_for(T - t));
  if (delta > slack)
    phi = numerics::fundamental_matrix(coeff, T, T + delta, cfg.steps_for(delta)) *
          phi;
  return phi;
}

/// f(phi; t, T, delta, v, r, regime) =
///   exp(v G(D(phi,T), t)) exp(r M(E(phi,T), t)) <Phi(t,T+delta;J) e_regime, 1>.
/// For real phi the imaginary part must vanish numerically (|Im| <= 1e-9));
/// it is stripped after the assertion. f(0; anything) = 1.
inline Complex char_fn(Complex phi, double t, double T, double delta, double v,
                       double r, int regime, const model::ModelParams& p,
                       const bond::BondCurve& curve,
                       const numerics::OdeConfig& cfg) {
  if (regime < 0 || regime >= p.regimes())
    throw std::out_of_range("char_fn: regime index out of range");
  if (curve.maturity < T + delta - 1e-9)
    throw std::invalid_argument("char_fn: curve maturity before interval end");

  const CharFnContext ctx = make_context(phi, t, T, delta, p, curve, cfg);
  const Mat q_eff = model::effective_generator(p.generator);
  auto fwd = [&](double s) { return bond::forward_generator(s, curve, q_eff); };
  const CMat prop = phi_j(t, T, delta, *ctx.j_grid, fwd, cfg);

  const Complex g0 = g_closed(ctx.d_terminal, t, T, p);  // equals D(phi,T) at t == T
  const Complex m0 = ctx.m_grid ? ctx.m_grid->front() : ctx.e_grid->front();
  Complex f = std::exp(v * g0) * std::exp(r * m0) * prop.col(regime).sum();

  if (phi.imag() == 0.0) {
    if (std::abs(f.imag()) > 1e-9)
      throw numerics::NumericError("char_fn: non-real value at real phi", t);
    f = Complex(f.real(), 0.0);
  }
  return f;
}

}  // namespace vswap::charfn
