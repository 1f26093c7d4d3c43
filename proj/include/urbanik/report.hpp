#pragma once

// JSON documents for verdicts, the catalog and check results.

#include <cmath>
#include <string>

#include "json.hpp"
#include "urbanik/catalog.hpp"
#include "urbanik/classify.hpp"
#include "urbanik/grid_spec.hpp"

namespace urbanik {

using json = nlohmann::ordered_json;

/// Finite doubles as numbers; infinities and NaN as the strings "inf",
/// "-inf" and "nan".
inline json number_or_tag(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json grid_json(const ScanGrid& g) {
  return {{"x_min", g.x_min},
          {"x_max", g.x_max},
          {"points", g.points},
          {"scale", g.scale == GridScale::logarithmic ? "logarithmic" : "linear"},
          {"refine_iters", g.refine_iters},
          {"spec", GridSpec::from(g).to_string()}};
}

inline json verdict_json(const ClassVerdict& v) {
  json out;
  out["distribution"] = v.distribution;
  out["achieved_level"] = v.achieved_level;
  out["bounded_above"] = v.bounded_above;
  out["max_level"] = v.max_level;
  if (v.witness) {
    const auto& w = *v.witness;
    out["witness"] = {{"level", v.witness_level},
                      {"x", w.x},
                      {"value", w.value},
                      {"interval", {w.lo, w.hi}},
                      {"interval_open", {w.lo_open, w.hi_open}}};
  } else {
    out["witness"] = nullptr;
  }
  json failures = json::array();
  for (const auto& f : v.mass_failures) failures.push_back({{"level", f.level}, {"mass", number_or_tag(f.mass)}});
  out["mass_failures"] = failures;
  out["grid"] = grid_json(v.grid_used);
  out["evidence"] = "grid scan";
  return out;
}

inline json catalog_entry_json(const DistributionSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  return {{"name", spec.name},
          {"params", params},
          {"cf", spec.cf_formula},
          {"verdict", spec.class_verdict},
          {"series", spec.rate_sequence.has_value()},
          {"bdcf_closed", spec.bdcf_closed.has_value()}};
}

}  // namespace urbanik
