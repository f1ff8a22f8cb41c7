#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vswap/model.hpp"
#include "vswap/montecarlo.hpp"
#include "vswap/pricer.hpp"

// Machine-readable output: versioned CSV schemas and JSON objects that
// mirror the quote/estimate fields. Doubles are printed shortest
// round-trip, so identical inputs give byte-identical files and JSON
// survives a parse without loss.

namespace vswap::output {

using nlohmann::json;

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// --- price ---------------------------------------------------------------

inline std::string to_csv(const pricer::StrikeQuote& q) {
  std::string out = "key,value\n";
  out += "schema,vswap.price.v1\n";
  out += "strike," + format_double(q.strike) + "\n";
  out += "maturity," + format_double(q.maturity) + "\n";
  out += "observations," + std::to_string(q.observations) + "\n";
  out += "notional," + format_double(q.notional) + "\n";
  out += "steps_per_year," + std::to_string(q.steps_per_year) + "\n";
  out += "forward_measure_horizon," + pricer::to_string(q.horizon_mode) + "\n";
  out += "generator_convention," + model::to_string(q.generator_convention) + "\n";
  out += std::string("variance_points,") + (q.variance_points ? "true" : "false") + "\n";
  for (std::size_t j = 0; j < q.interval_terms.size(); ++j)
    out += "term." + std::to_string(j + 1) + "," +
           format_double(q.interval_terms[j]) + "\n";
  return out;
}

inline json to_json(const pricer::StrikeQuote& q) {
  return json{{"schema", "vswap.price.v1"},
              {"strike", q.strike},
              {"maturity", q.maturity},
              {"observations", q.observations},
              {"notional", q.notional},
              {"interval_terms", q.interval_terms},
              {"config",
               {{"steps_per_year", q.steps_per_year},
                {"forward_measure_horizon", pricer::to_string(q.horizon_mode)},
                {"generator_convention", model::to_string(q.generator_convention)},
                {"variance_points", q.variance_points}}}};
}

// --- mc ------------------------------------------------------------------

inline std::string to_csv(const montecarlo::McEstimate& e) {
  std::string out = "key,value\n";
  out += "schema,vswap.mc.v1\n";
  out += "strike," + format_double(e.strike) + "\n";
  out += "std_error," + format_double(e.std_error) + "\n";
  out += "paths," + std::to_string(e.paths) + "\n";
  out += "seed," + std::to_string(e.seed) + "\n";
  out += "discount_mean," + format_double(e.discount_mean) + "\n";
  if (std::isfinite(e.strike_vs_bond))
    out += "strike_vs_bond," + format_double(e.strike_vs_bond) + "\n";
  return out;
}

inline json to_json(const montecarlo::McEstimate& e) {
  json j{{"schema", "vswap.mc.v1"},
         {"strike", e.strike},
         {"std_error", e.std_error},
         {"paths", e.paths},
         {"seed", e.seed},
         {"discount_mean", e.discount_mean}};
  if (std::isfinite(e.strike_vs_bond)) j["strike_vs_bond"] = e.strike_vs_bond;
  return j;
}

// --- sweep ---------------------------------------------------------------

struct SweepRow {
  int n_obs = 0;
  double strike = 0.0;
  double mc_strike = std::numeric_limits<double>::quiet_NaN();
  double mc_std_error = std::numeric_limits<double>::quiet_NaN();
};

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  const bool with_mc =
      !rows.empty() && std::isfinite(rows.front().mc_strike);
  std::string out = "# schema: vswap.sweep.v1\n";
  out += with_mc ? "n_obs,strike,mc_strike,mc_std_error\n" : "n_obs,strike\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n_obs) + "," + format_double(r.strike);
    if (with_mc)
      out += "," + format_double(r.mc_strike) + "," + format_double(r.mc_std_error);
    out += "\n";
  }
  return out;
}

inline json to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json row{{"n_obs", r.n_obs}, {"strike", r.strike}};
    if (std::isfinite(r.mc_strike)) {
      row["mc_strike"] = r.mc_strike;
      row["mc_std_error"] = r.mc_std_error;
    }
    arr.push_back(row);
  }
  return json{{"schema", "vswap.sweep.v1"}, {"rows", arr}};
}

// --- report --------------------------------------------------------------

struct ReportRow {
  std::string state;
  int n_obs = 0;
  double strike = 0.0;
  double reference = 0.0;
  double rel_diff_pct = 0.0;
};

inline std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "# schema: vswap.report.v1\n";
  out += "state,n_obs,strike,reference,rel_diff_pct\n";
  for (const auto& r : rows)
    out += r.state + "," + std::to_string(r.n_obs) + "," +
           format_double(r.strike) + "," + format_double(r.reference) + "," +
           format_double(r.rel_diff_pct) + "\n";
  return out;
}

inline json to_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back(json{{"state", r.state},
                       {"n_obs", r.n_obs},
                       {"strike", r.strike},
                       {"reference", r.reference},
                       {"rel_diff_pct", r.rel_diff_pct}});
  return json{{"schema", "vswap.report.v1"}, {"rows", arr}};
}

}  // namespace vswap::output
