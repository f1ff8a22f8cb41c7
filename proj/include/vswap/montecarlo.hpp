#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "vswap/model.hpp"
#include "vswap/parallel.hpp"

// Independent pricing oracle: full simulation of the regime-switching
// Heston-CIR system under the risk-neutral measure with full-truncation
// Euler stepping, jump-chain regime paths, and a discounted ratio estimator
// of the fair strike. Runs entirely under the risk-neutral measure with
// explicit discounting, so it shares nothing with the analytic leg beyond
// the model parameters.

namespace vswap::montecarlo {

using model::Mat;

/// One sample path of the chain: piecewise-constant states on [0, T].
/// Segment k covers [jump_times[k-1], jump_times[k]) with state states[k]
/// (jump_times[-1] = 0, jump_times[m] = T); consecutive states differ.
struct ChainPath {
  std::vector<double> jump_times;  // ascending, strictly inside (0, T)
  std::vector<int> states;         // one per segment, size jump_times.size() + 1

  int state_at(double t) const {
    std::size_t k = 0;
    while (k < jump_times.size() && t >= jump_times[k]) ++k;
    return states[k];
  }
};

struct McConfig {
  long paths = 200000;
  int steps_per_interval = 64;
  std::uint64_t seed = 42;
  int threads = 0;              // 0 = auto; VSWAP_THREADS caps
  bool variance_points = true;  // realized variance scaled by 100^2
};

/// Per-path realized variance and discount factor exp(-int_0^T r dt).
struct PathSample {
  std::vector<double> realized_variance;
  std::vector<double> discount;
};

/// Strike estimate from the discounted ratio, with delta-method standard
/// error. strike_vs_bond divides the plain discounted mean by an externally
/// supplied bond price instead (cross-check; NaN when none was given).
struct McEstimate {
  double strike = 0.0;
  double std_error = 0.0;
  long paths = 0;
  std::uint64_t seed = 0;
  double discount_mean = 0.0;
  double strike_vs_bond = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

/// Engine for one path, derived from (seed, path index) so the estimator is
/// independent of the worker count.
inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(
      mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

struct PreparedChain {
  Mat q_eff;                 // column form
  std::vector<double> exit;  // exit rate per state
};

inline PreparedChain prepare_chain(const model::Generator& g) {
  PreparedChain pc;
  pc.q_eff = model::effective_generator(g);
  const int n = static_cast<int>(pc.q_eff.rows());
  pc.exit.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pc.exit[static_cast<std::size_t>(i)] = -pc.q_eff(i, i);
  return pc;
}

inline ChainPath simulate_chain(const PreparedChain& pc, int x0, double T,
                                std::mt19937_64& rng) {
  const int n = static_cast<int>(pc.q_eff.rows());
  if (x0 < 0 || x0 >= n)
    throw std::invalid_argument("simulate_chain: x0 out of range");
  ChainPath path;
  path.states.push_back(x0);
  double t = 0.0;
  int state = x0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  while (true) {
    const double rate = pc.exit[static_cast<std::size_t>(state)];
    if (rate <= 0.0) break;  // absorbing state
    t += std::exponential_distribution<double>(rate)(rng);
    if (t >= T) break;
    // next state proportional to the off-diagonal rates out of `state`
    const double u = uniform(rng) * rate;
    double acc = 0.0;
    int next = state;
    for (int k = 0; k < n; ++k) {
      if (k == state) continue;
      acc += pc.q_eff(k, state);
      if (u <= acc) {
        next = k;
        break;
      }
    }
    if (next == state) {  // guard against rounding at u == rate
      for (int k = n - 1; k >= 0; --k)
        if (k != state && pc.q_eff(k, state) > 0.0) {
          next = k;
          break;
        }
      if (next == state) break;
    }
    path.jump_times.push_back(t);
    path.states.push_back(next);
    state = next;
  }
  return path;
}

}  // namespace detail

/// Jump-chain construction: exponential holding times with the current
/// state's exit rate, transitions proportional to the off-diagonal rates.
inline ChainPath simulate_chain(const model::Generator& g, int x0, double T,
                                std::mt19937_64& rng) {
  if (!(T > 0.0)) throw std::invalid_argument("simulate_chain: T must be > 0");
  return detail::simulate_chain(detail::prepare_chain(g), x0, T, rng);
}

/// Full per-substep trajectory of one path (test and diagnostics hook).
struct PathTrace {
  std::vector<double> times;
  std::vector<double> log_spot;
  std::vector<double> variance;
  std::vector<double> rate;
  ChainPath chain;
  double realized_variance = 0.0;
  double discount = 0.0;
};

namespace detail {

/// Full-truncation Euler over all observation intervals for one path.
/// The spot shock is rho z2 + sqrt(1-rho^2) z1, so with common random
/// numbers a change of rho moves only the spot path; variance and rate
/// keep their own normals.
inline void run_path(const model::ModelParams& p, const model::MarketState& m,
                     const model::SwapSpec& swap, const PreparedChain& pc,
                     int steps_per_interval, bool variance_points,
                     std::mt19937_64& rng, double& rv_out, double& discount_out,
                     PathTrace* trace) {
  const double dt = swap.dt();
  const double h = dt / steps_per_interval;
  const double sqh = std::sqrt(h);
  const double rho = p.rho;
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const auto& theta = p.theta_star.values;
  const auto& beta = p.beta_star.values;

  const ChainPath chain = simulate_chain(pc, m.x0, swap.maturity, rng);
  std::normal_distribution<double> normal;

  double ln_s = std::log(m.s0);
  double v = m.v0;
  double r = m.r0;
  double ln_s_prev_obs = ln_s;
  double rv = 0.0;
  double rate_integral = 0.0;
  std::size_t seg = 0;

  if (trace) {
    trace->chain = chain;
    const std::size_t total =
        static_cast<std::size_t>(swap.observations) * steps_per_interval + 1;
    trace->times.reserve(total);
    trace->log_spot.reserve(total);
    trace->variance.reserve(total);
    trace->rate.reserve(total);
    trace->times.push_back(0.0);
    trace->log_spot.push_back(ln_s);
    trace->variance.push_back(v);
    trace->rate.push_back(r);
  }

  for (int j = 0; j < swap.observations; ++j) {
    for (int k = 0; k < steps_per_interval; ++k) {
      const double t = (static_cast<double>(j) * steps_per_interval + k) * h;
      while (seg < chain.jump_times.size() && t >= chain.jump_times[seg]) ++seg;
      const int state = chain.states[seg];

      const double vp = std::max(v, 0.0);
      const double rp = std::max(r, 0.0);
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      const double z3 = normal(rng);

      ln_s += (rp - 0.5 * vp) * h + std::sqrt(vp) * sqh * (rho * z2 + rho_c * z1);
      v += p.kappa * (theta[state] - vp) * h + p.sigma * std::sqrt(vp) * sqh * z2;
      const double r_next =
          r + p.alpha * (beta[state] - rp) * h + p.eta * std::sqrt(rp) * sqh * z3;
      rate_integral += 0.5 * (rp + std::max(r_next, 0.0)) * h;  // trapezoid
      r = r_next;

      if (trace) {
        trace->times.push_back(t + h);
        trace->log_spot.push_back(ln_s);
        trace->variance.push_back(v);
        trace->rate.push_back(r);
      }
    }
    const double ret = std::expm1(ln_s - ln_s_prev_obs);
    rv += ret * ret;
    ln_s_prev_obs = ln_s;
  }

  const double scale = (variance_points ? 1e4 : 1.0) / swap.maturity;
  rv_out = scale * rv;
  discount_out = std::exp(-rate_integral);
  if (trace) {
    trace->realized_variance = rv_out;
    trace->discount = discount_out;
  }
}

}  // namespace detail

/// Simulates n paths and returns per-path (realized variance, discount
/// factor). Per-path streams derive from (seed, path index); results are
/// bit-reproducible for a fixed seed regardless of the worker count.
inline PathSample simulate_paths(const model::ModelParams& p,
                                 const model::MarketState& m,
                                 const model::SwapSpec& swap,
                                 const McConfig& cfg) {
  if (cfg.paths < 1)
    throw std::invalid_argument("simulate_paths: need at least one path");
  if (cfg.steps_per_interval < 1)
    throw std::invalid_argument("simulate_paths: need at least one sub-step");
  {
    // Feller violations are tolerated here (full truncation handles the
    // boundary); everything else is a hard error.
    const auto report = model::validate(p, m, swap);
    for (const auto& v : report)
      if (!v.feller)
        throw std::invalid_argument("simulate_paths: [" + v.code + "] " +
                                    v.message);
  }
  const auto pc = detail::prepare_chain(p.generator);
  PathSample out;
  out.realized_variance.assign(static_cast<std::size_t>(cfg.paths), 0.0);
  out.discount.assign(static_cast<std::size_t>(cfg.paths), 0.0);
  const int threads = parallel::resolve_threads(cfg.threads);
  parallel::parallel_for(cfg.paths, threads, [&](long i) {
    auto rng = detail::path_engine(cfg.seed, static_cast<std::uint64_t>(i));
    detail::run_path(p, m, swap, pc, cfg.steps_per_interval, cfg.variance_points,
                     rng, out.realized_variance[static_cast<std::size_t>(i)],
                     out.discount[static_cast<std::size_t>(i)], nullptr);
  });
  return out;
}

/// Single-path trajectory for inspection; draws exactly the stream path
/// `index` of simulate_paths would consume.
inline PathTrace simulate_path_trace(const model::ModelParams& p,
                                     const model::MarketState& m,
                                     const model::SwapSpec& swap,
                                     int steps_per_interval, std::uint64_t seed,
                                     long index, bool variance_points = true) {
  PathTrace trace;
  auto rng = detail::path_engine(seed, static_cast<std::uint64_t>(index));
  const auto pc = detail::prepare_chain(p.generator);
  double rv = 0.0, d = 0.0;
  detail::run_path(p, m, swap, pc, steps_per_interval, variance_points, rng, rv,
                   d, &trace);
  return trace;
}

/// Ratio estimator K = sum(D_i RV_i) / sum(D_i) with delta-method standard
/// error. When an analytic bond price is supplied, the plain discounted
/// mean divided by it is reported as strike_vs_bond.
inline McEstimate mc_fair_strike(
    const PathSample& sample, const model::SwapSpec&, std::uint64_t seed,
    double bond_price = std::numeric_limits<double>::quiet_NaN()) {
  const std::size_t n = sample.realized_variance.size();
  if (n < 2 || sample.discount.size() != n)
    throw std::invalid_argument("mc_fair_strike: need at least two paths");

  double sum_w = 0.0, sum_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_w += sample.discount[i];
    sum_a += sample.discount[i] * sample.realized_variance[i];
  }
  const double w_bar = sum_w / n;
  const double a_bar = sum_a / n;
  if (!(w_bar > 1e-300))
    throw std::runtime_error("mc_fair_strike: degenerate discount mean");
  const double strike = a_bar / w_bar;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid =
        sample.discount[i] * sample.realized_variance[i] - strike * sample.discount[i];
    ss += resid * resid;
  }
  const double resid_var = ss / (n - 1);

  McEstimate est;
  est.strike = strike;
  est.std_error = std::sqrt(resid_var / n) / w_bar;
  est.paths = static_cast<long>(n);
  est.seed = seed;
  est.discount_mean = w_bar;
  if (std::isfinite(bond_price) && bond_price > 0.0)
    est.strike_vs_bond = a_bar / bond_price;
  return est;
}

}  // namespace vswap::montecarlo
