#pragma once

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Domain types, parameter validation and regime-convention handling shared
// by the whole pricing engine. All types are immutable values after
// construction and safe to share between workers.

namespace vswap::model {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Orientation of a Markov-chain rate matrix. Under row-sums-zero, entry
/// (i,j) is the instantaneous rate from state i to state j; under
/// column-sums-zero, entry (i,j) is the rate from state j to state i (the
/// semimartingale form acting on unit-vector states).
enum class Convention { RowSumsZero, ColumnSumsZero };

inline std::string to_string(Convention c) {
  return c == Convention::RowSumsZero ? "row-sums-zero" : "column-sums-zero";
}

inline Convention convention_from_string(const std::string& s) {
  if (s == "row-sums-zero") return Convention::RowSumsZero;
  if (s == "column-sums-zero") return Convention::ColumnSumsZero;
  throw std::invalid_argument("unknown generator convention '" + s + "'");
}

/// One non-negative level per regime (variance level for theta, rate level
/// for beta).
struct RegimeVector {
  Vec values;

  RegimeVector() = default;
  explicit RegimeVector(Vec v) : values(std::move(v)) {}
  RegimeVector(std::initializer_list<double> v)
      : values(Eigen::Map<const Vec>(v.begin(), static_cast<long>(v.size()))) {}

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
};

/// Rate matrix of the observable chain plus the orientation it was given in.
struct Generator {
  Mat rates;
  Convention convention = Convention::RowSumsZero;

  Generator() = default;
  Generator(Mat m, Convention c) : rates(std::move(m)), convention(c) {}

  int size() const { return static_cast<int>(rates.rows()); }
};

/// Risk-neutral Heston-CIR parameters with per-regime long-run levels.
struct ModelParams {
  double kappa = 0.0;  // variance mean-reversion speed (1/y)
  double sigma = 0.0;  // vol of vol
  double rho = 0.0;    // spot/variance correlation
  double alpha = 0.0;  // rate mean-reversion speed (1/y)
  double eta = 0.0;    // rate volatility
  RegimeVector theta_star;  // per-regime long-run variance
  RegimeVector beta_star;   // per-regime long-run short rate
  Generator generator;

  int regimes() const { return theta_star.size(); }
};

struct MarketState {
  double s0 = 1.0;  // spot price
  double v0 = 0.0;  // spot variance
  double r0 = 0.0;  // spot short rate
  int x0 = 0;       // initial regime index
};

struct SwapSpec {
  double maturity = 1.0;   // T in years
  int observations = 1;    // number of return observations
  double notional = 1.0;   // payoff scale in currency

  double dt() const { return maturity / observations; }
  double annualization() const { return observations / maturity; }
};

/// A violated invariant. Feller violations are soft for simulation-only use
/// and hard for analytic pricing; callers decide via the `feller` flag.
struct Violation {
  std::string code;     // stable machine-readable identifier
  std::string message;  // human-readable detail
  bool feller = false;
};

namespace detail {

inline void check_regime_vector(const RegimeVector& v, const std::string& name,
                                std::vector<Violation>& out) {
  if (v.size() < 1) {
    out.push_back({name + "_empty", name + " must have at least one regime"});
    return;
  }
  for (int i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0))
      out.push_back({name + "_negative_entry",
                     name + "[" + std::to_string(i) + "] must be >= 0"});
}

inline void check_generator(const Generator& g, std::vector<Violation>& out) {
  const long n = g.rates.rows();
  if (n == 0 || g.rates.cols() != n) {
    out.push_back({"generator_not_square", "generator must be a square matrix"});
    return;
  }
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      if (i != j && g.rates(i, j) < 0.0)
        out.push_back({"generator_offdiag_negative",
                       "generator(" + std::to_string(i) + "," +
                           std::to_string(j) + ") must be >= 0"});
  const bool rows = g.convention == Convention::RowSumsZero;
  for (long i = 0; i < n; ++i) {
    const double sum = rows ? g.rates.row(i).sum() : g.rates.col(i).sum();
    if (std::abs(sum) > 1e-12)
      out.push_back({rows ? "generator_row_sum" : "generator_column_sum",
                     std::string(rows ? "row " : "column ") + std::to_string(i) +
                         " sums to " + std::to_string(sum) + ", expected 0"});
  }
}

}  // namespace detail

/// Checks every invariant and returns the violations found (empty = valid).
/// Deterministic, idempotent and order-independent; violations are data,
/// not failures.
inline std::vector<Violation> validate(const ModelParams& p,
                                       const MarketState& m,
                                       const SwapSpec& swap) {
  std::vector<Violation> out;

  if (!(p.kappa > 0.0)) out.push_back({"kappa_nonpositive", "kappa must be > 0"});
  if (!(p.sigma >= 0.0)) out.push_back({"sigma_negative", "sigma must be >= 0"});
  if (!(p.alpha > 0.0)) out.push_back({"alpha_nonpositive", "alpha must be > 0"});
  if (!(p.eta >= 0.0)) out.push_back({"eta_negative", "eta must be >= 0"});
  if (!(p.rho >= -1.0 && p.rho <= 1.0))
    out.push_back({"rho_out_of_range", "rho must lie in [-1, 1]"});

  detail::check_regime_vector(p.theta_star, "theta_star", out);
  detail::check_regime_vector(p.beta_star, "beta_star", out);
  detail::check_generator(p.generator, out);

  const int n = p.theta_star.size();
  if (p.beta_star.size() != n || p.generator.size() != n)
    out.push_back({"dimension_mismatch",
                   "theta_star, beta_star and generator must share one regime count"});

  if (p.kappa > 0.0 && p.sigma >= 0.0)
    for (int i = 0; i < p.theta_star.size(); ++i)
      if (2.0 * p.kappa * p.theta_star[i] < p.sigma * p.sigma)
        out.push_back({"feller_variance",
                       "2*kappa*theta_star[" + std::to_string(i) +
                           "] < sigma^2 (variance process can hit zero hard)",
                       true});
  if (p.alpha > 0.0 && p.eta >= 0.0)
    for (int i = 0; i < p.beta_star.size(); ++i)
      if (2.0 * p.alpha * p.beta_star[i] < p.eta * p.eta)
        out.push_back({"feller_rate",
                       "2*alpha*beta_star[" + std::to_string(i) +
                           "] < eta^2 (rate process can hit zero hard)",
                       true});

  if (!(m.s0 > 0.0)) out.push_back({"s0_nonpositive", "s0 must be > 0"});
  if (!(m.v0 >= 0.0)) out.push_back({"v0_negative", "v0 must be >= 0"});
  if (!(m.r0 >= 0.0)) out.push_back({"r0_negative", "r0 must be >= 0"});
  if (m.x0 < 0 || m.x0 >= std::max(1, p.theta_star.size()))
    out.push_back({"x0_out_of_range", "x0 must index a regime"});

  if (!(swap.maturity > 0.0))
    out.push_back({"maturity_nonpositive", "maturity must be > 0"});
  if (swap.observations < 1)
    out.push_back({"observations_nonpositive", "observations must be >= 1"});
  if (!(swap.notional > 0.0))
    out.push_back({"notional_nonpositive", "notional must be > 0"});

  return out;
}

/// Brings a rate matrix into semimartingale (column) form, acting on
/// unit-vector states as in dX = Q X dt: column j holds the rates out of
/// state j. Row-convention input is transposed; column-convention input is
/// returned unchanged. Throws on an invalid generator.
inline Mat effective_generator(const Generator& g) {
  std::vector<Violation> out;
  detail::check_generator(g, out);
  if (!out.empty())
    throw std::invalid_argument("effective_generator: " + out.front().code +
                                ": " + out.front().message);
  return g.convention == Convention::RowSumsZero ? Mat(g.rates.transpose())
                                                 : g.rates;
}

}  // namespace vswap::model
