#pragma once

// Command-line front end: classify, verify, sample, catalog.
// Exit codes: 0 success / check passed, 1 check failed, 2 usage or input error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "urbanik/urbanik.hpp"

namespace urbanik::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kDefaultScanGrid = "0.0001:50:4000,log";

struct DistOptions {
  std::string dist;
  std::optional<double> alpha;
  std::optional<double> c;

  void add_to(CLI::App& app, bool required = true) {
    auto* opt = app.add_option("--dist", dist, "catalog distribution name");
    if (required) opt->required();
    app.add_option("--alpha", alpha, "shape parameter alpha > 0 (logistic, generalized_logistic)");
    app.add_option("--c", c, "parameter c in (0, 1) (talacko_zolotarev; decomposition factor for verify)");
  }

  DistributionSpec spec(bool use_c = true) const {
    CatalogParams p;
    p.alpha = alpha;
    if (use_c) p.c = c;
    return catalog_get(dist, p);
  }
};

inline std::string catalog_footer() {
  std::ostringstream os;
  os << "Catalog (distribution: known class placement):\n";
  for (const auto& name : catalog_names()) {
    CatalogParams p;
    p.alpha = 1.0;
    p.c = 0.5;
    os << "  " << std::left << std::setw(22) << name << catalog_get(name, p).class_verdict << '\n';
  }
  os << "Grids use min:max:points[,log]. Exit codes: 0 pass, 1 check failed, 2 usage error.";
  return os.str();
}

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

inline void header(std::ostream& os, const std::string& key, const std::string& value) {
  os << "# " << key << ": " << value << '\n';
}

// ---------------------------------------------------------------- classify

struct ClassifyOptions {
  DistOptions dist;
  int max_level = 4;
  std::string grid = kDefaultScanGrid;
  int refine_iters = ScanGrid{}.refine_iters;
  bool json = false;
  bool csv = false;
};

inline int cmd_classify(const ClassifyOptions& o, std::ostream& out) {
  const DistributionSpec spec = o.dist.spec();
  const ScanGrid grid = GridSpec::parse(o.grid).scan_grid(o.refine_iters);
  const LevyDensity k = spec.density.renamed(spec.label());
  if (o.max_level + 1 > kCatalogChainOrder && !k.is_series()) {
    throw DerivativeOrderUnavailable("max-level " + std::to_string(o.max_level) + " needs D^" +
                                     std::to_string(o.max_level + 1) + "; the catalog stores up to D^" +
                                     std::to_string(kCatalogChainOrder));
  }
  const ClassVerdict v = classify(k, o.max_level, grid);

  if (o.json) {
    json doc = verdict_json(v);
    doc["settings"] = {{"max_level", o.max_level}, {"grid", GridSpec::from(grid).to_string()},
                       {"refine_iters", grid.refine_iters}, {"sign_tolerance", kSignTolerance}};
    out << doc.dump(2) << '\n';
    return kExitPass;
  }
  if (o.csv) {
    out << "n,grid_min,normalized_min,mass\n";
    const int rows = std::min(o.max_level + 1, k.is_series() ? o.max_level + 1 : kCatalogChainOrder);
    for (const auto& r : level_report(k, rows, grid)) {
      out << r.n << ',' << fmt(r.grid_min) << ',' << fmt(r.normalized_min) << ',' << fmt(r.mass) << '\n';
    }
    return kExitPass;
  }
  header(out, "distribution", spec.label());
  header(out, "max_level", std::to_string(o.max_level));
  header(out, "grid", GridSpec::from(grid).to_string());
  header(out, "refine_iters", std::to_string(grid.refine_iters));
  header(out, "sign_tolerance", fmt(kSignTolerance));
  out << "achieved_level: " << v.achieved_level << '\n';
  out << "bounded_above: " << (v.bounded_above ? "true" : "false") << '\n';
  if (v.witness) {
    const auto& w = *v.witness;
    out << "witness: D^" << v.witness_level << " negative, minimum " << fmt(w.value) << " at x = " << fmt(w.x)
        << ", interval (" << fmt(w.lo) << ", " << fmt(w.hi) << ")" << (w.lo_open || w.hi_open ? " [grid edge]" : "")
        << '\n';
  }
  for (const auto& f : v.mass_failures) out << "mass_failure: D^" << f.level << " total mass " << fmt(f.mass) << '\n';
  if (!v.bounded_above) out << "note: non-negativity holds on the scanned grid only\n";
  return kExitPass;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string check;
  DistOptions dist;
  std::string t_grid;
  std::string grid = kDefaultScanGrid;
  std::vector<double> factors{0.5};
  std::uint64_t K = 10000;
  double tol = 1e-6;
  bool json = false;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double max_deviation = 0.0;
  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<std::pair<std::string, std::string>> notes;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidParam(msg);
}

inline Table verify_cf(const VerifyOptions& o) {
  const DistributionSpec spec = o.dist.spec();
  Table tab;
  tab.columns = {"t", "closed", "levy_khintchine"};
  std::optional<LaplaceSeriesSpec> series;
  if (spec.rate_sequence) {
    series = spec.series(o.K);
    tab.columns.push_back("product");
    tab.settings.emplace_back("K", std::to_string(o.K));
  }
  tab.columns.push_back("deviation");
  for (double t : GridSpec::parse(o.t_grid).values()) {
    const double closed = spec.cf_closed(t);
    const double lk = char_function(spec.density, t);
    double dev = std::abs(lk - closed);
    std::vector<double> row{t, closed, lk};
    if (series) {
      const double prod = product_cf(*series, t);
      row.push_back(prod);
      dev = std::max(dev, std::abs(prod - closed));
    }
    row.push_back(dev);
    tab.rows.push_back(row);
    tab.max_deviation = std::max(tab.max_deviation, dev);
  }
  return tab;
}

inline Table verify_bdcf(const VerifyOptions& o) {
  const DistributionSpec spec = o.dist.spec();
  Table tab;
  tab.columns = {"t", "psi", "psi_numeric"};
  if (spec.rate_sequence) {
    tab.columns.push_back("psi_from_levy_density");
    tab.settings.emplace_back("K", std::to_string(o.K));
  }
  tab.columns.push_back("deviation");
  tab.settings.emplace_back("psi_method", spec.bdcf_closed ? "closed" : "numeric_logderiv");
  for (double t : GridSpec::parse(o.t_grid).values()) {
    const double psi = bdcf(spec, t);
    const double num = bdcf_numeric(spec, t);
    double dev = std::abs(psi - num);
    std::vector<double> row{t, psi, num};
    if (spec.rate_sequence) {
      const double h = bdrv_char_function(spec, t, o.K);
      row.push_back(h);
      dev = std::max(dev, std::abs(h - psi));
    }
    row.push_back(dev);
    tab.rows.push_back(row);
    tab.max_deviation = std::max(tab.max_deviation, dev);
  }
  return tab;
}

inline Table verify_decompose(const VerifyOptions& o) {
  require(o.dist.c.has_value(), "--check decompose requires --c");
  const double c = *o.dist.c;
  const DistributionSpec spec = o.dist.spec(o.dist.dist == "talacko_zolotarev");
  Table tab;
  tab.columns = {"t", "psi", "psi_ct", "psi_c", "deviation"};
  tab.settings.emplace_back("c", fmt(c));
  const auto ts = GridSpec::parse(o.t_grid).values();
  for (const auto& r : decomposition_table(spec, c, ts)) {
    tab.rows.push_back({r.t, r.psi, r.psi_ct, r.psi_c, r.deviation});
    tab.max_deviation = std::max(tab.max_deviation, r.deviation);
  }
  return tab;
}

/// Non-negativity of the iterated residual density on the scan grid, and its
/// characteristic function against prod of phi(t c_1..c_{j-1}) / phi(t c_1..c_j).
inline Table verify_residual(const VerifyOptions& o, bool& scan_ok) {
  require(!o.factors.empty(), "--factors must not be empty");
  for (double f : o.factors) require(f > 0.0 && f < 1.0, "--factors must lie in (0, 1)");
  const DistributionSpec spec = o.dist.spec();
  const ScanGrid grid = GridSpec::parse(o.grid).scan_grid();
  const LevyDensity res = iterated_residual(spec.density, o.factors);
  const SignScan scan = sign_scan(res, grid);
  scan_ok = scan.non_negative();

  // Residual of a residual: psi_j(t) = psi_{j-1}(t) / psi_{j-1}(c_j t).
  std::function<double(double)> target = spec.cf_closed;
  for (double c : o.factors) {
    target = [prev = target, c](double t) { return prev(t) / prev(c * t); };
  }
  Table tab;
  tab.columns = {"t", "ratio_formula", "levy_khintchine", "deviation"};
  std::ostringstream fs;
  for (std::size_t i = 0; i < o.factors.size(); ++i) fs << (i ? "," : "") << fmt(o.factors[i]);
  tab.settings.emplace_back("factors", fs.str());
  tab.settings.emplace_back("grid", GridSpec::from(grid).to_string());
  for (double t : GridSpec::parse(o.t_grid).values()) {
    const double closed = target(t);
    const double lk = char_function(res, t);
    const double dev = std::abs(lk - closed);
    tab.rows.push_back({t, closed, lk, dev});
    tab.max_deviation = std::max(tab.max_deviation, dev);
  }
  tab.notes.emplace_back("grid_min", fmt(scan.negative ? scan.negative->value : scan.grid_min));
  tab.notes.emplace_back("non_negative_on_grid", scan_ok ? "true" : "false");
  if (scan.negative) tab.notes.emplace_back("negative_at", fmt(scan.negative->x));
  return tab;
}

inline Table verify_gamma_identity(const VerifyOptions& o) {
  require(o.dist.alpha.has_value(), "--check gamma-identity requires --alpha");
  Table tab;
  tab.columns = {"t", "lhs", "rhs", "abs_diff"};
  tab.settings.emplace_back("alpha", fmt(*o.dist.alpha));
  for (double t : GridSpec::parse(o.t_grid).values()) {
    const GammaIdentity g = gamma_identity_check(*o.dist.alpha, t);
    tab.rows.push_back({t, g.lhs, g.rhs, g.abs_diff});
    tab.max_deviation = std::max(tab.max_deviation, g.abs_diff);
  }
  return tab;
}

inline int cmd_verify(VerifyOptions o, std::ostream& out) {
  const bool needs_dist = o.check != "gamma-identity";
  require(!needs_dist || !o.dist.dist.empty(), "--check " + o.check + " requires --dist");
  require(o.tol > 0.0, "--tol must be positive");
  if (o.t_grid.empty()) o.t_grid = o.check == "cf" ? "-10:10:401" : "-5:5:101";

  bool scan_ok = true;
  Table tab;
  if (o.check == "cf") {
    tab = verify_cf(o);
  } else if (o.check == "bdcf") {
    tab = verify_bdcf(o);
  } else if (o.check == "decompose") {
    tab = verify_decompose(o);
  } else if (o.check == "residual") {
    tab = verify_residual(o, scan_ok);
  } else {
    tab = verify_gamma_identity(o);
  }
  const bool pass = scan_ok && tab.max_deviation <= o.tol;

  std::vector<std::pair<std::string, std::string>> settings{{"check", o.check}};
  if (needs_dist) settings.emplace_back("distribution", o.dist.dist);
  settings.emplace_back("t", o.t_grid);
  settings.emplace_back("tol", fmt(o.tol));
  settings.insert(settings.end(), tab.settings.begin(), tab.settings.end());

  if (o.json) {
    json doc;
    json s = json::object();
    for (const auto& [k, v] : settings) s[k] = v;
    doc["settings"] = s;
    doc["columns"] = tab.columns;
    json rows = json::array();
    for (const auto& r : tab.rows) {
      json row = json::array();
      for (double v : r) row.push_back(number_or_tag(v));
      rows.push_back(row);
    }
    doc["rows"] = rows;
    json notes = json::object();
    for (const auto& [k, v] : tab.notes) notes[k] = v;
    doc["notes"] = notes;
    doc["max_deviation"] = number_or_tag(tab.max_deviation);
    doc["pass"] = pass;
    out << doc.dump(2) << '\n';
    return pass ? kExitPass : kExitFail;
  }
  for (const auto& [k, v] : settings) header(out, k, v);
  for (std::size_t i = 0; i < tab.columns.size(); ++i) out << (i ? "," : "") << tab.columns[i];
  out << '\n';
  for (const auto& r : tab.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt(r[i]);
    out << '\n';
  }
  for (const auto& [k, v] : tab.notes) header(out, k, v);
  header(out, "max_deviation", fmt(tab.max_deviation));
  header(out, "result", pass ? "pass" : "fail");
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  DistOptions dist;
  std::size_t n = 0;
  std::uint64_t K = 1000;
  std::uint64_t seed = 0;
  bool no_tail_correction = false;
  std::string out_path;
  std::string ecf_grid;
};

/// Samples go to --out (or stdout); run settings and the summary go to `log`.
inline int cmd_sample(const SampleOptions& o, std::ostream& out, std::ostream& log) {
  const DistributionSpec spec = o.dist.spec();
  std::vector<double> xs;
  std::string method;
  if (spec.name == "generalized_logistic") {
    xs = sample_generalized_logistic(*o.dist.alpha, o.n, o.seed);
    method = "beta-logit";
  } else if (spec.rate_sequence) {
    SampleRun run{spec, o.n, o.K, o.seed,
                  o.no_tail_correction ? TailCorrection::none : TailCorrection::gaussian_variance_match};
    xs = sample_series(run);
    method = "laplace-series";
  } else {
    throw InvalidParam(spec.name + " has no sampler (no Laplace-series representation)");
  }
  std::optional<EcfReport> report;
  if (!o.ecf_grid.empty()) report = ecf_check(xs, spec.cf_closed, GridSpec::parse(o.ecf_grid).values());

  std::ofstream file;
  std::ostream* dest = &out;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) throw std::ios_base::failure("cannot open '" + o.out_path + "' for writing");
    dest = &file;
  }
  write_samples_csv(*dest, xs);
  if (report) {
    *dest << '\n';
    write_ecf_csv(*dest, *report);
  }
  dest->flush();
  if (!*dest) throw std::ios_base::failure("write failed");

  header(log, "distribution", spec.label());
  header(log, "method", method);
  header(log, "n", std::to_string(o.n));
  if (method == "laplace-series") {
    const LaplaceSeriesSpec series = spec.series(o.K);
    header(log, "K", std::to_string(series.terms()));
    const bool corrected = !o.no_tail_correction && series.has_dropped_terms();
    header(log, "tail_correction", corrected ? "gaussian_variance_match" : "none");
  }
  header(log, "seed", std::to_string(o.seed));
  header(log, "rng", "mt19937_64 per (stream, block), SplitMix64 seeding");
  header(log, "sample_variance", fmt(sample_variance(xs)));
  if (report) {
    header(log, "ecf_grid", o.ecf_grid);
    header(log, "ecf_band", fmt(report->band));
    header(log, "ecf_violations", std::to_string(report->violations) + "/" + std::to_string(report->t_grid.size()));
    header(log, "ecf_result", report->passed() ? "pass" : "fail");
    return report->passed() ? kExitPass : kExitFail;
  }
  return kExitPass;
}

// ---------------------------------------------------------------- catalog

inline int cmd_catalog(bool as_json, std::ostream& out) {
  std::vector<DistributionSpec> specs;
  for (const auto& name : catalog_names()) {
    CatalogParams p;
    if (name == "logistic" || name == "generalized_logistic") p.alpha = 1.0;
    if (name == "talacko_zolotarev") p.c = 0.5;
    specs.push_back(catalog_get(name, p));
  }
  if (as_json) {
    json arr = json::array();
    for (const auto& s : specs) {
      json e = catalog_entry_json(s);
      e["params"] = json::array();
      if (s.params.count("alpha")) e["params"].push_back("alpha");
      if (s.params.count("c")) e["params"].push_back("c");
      arr.push_back(e);
    }
    out << json{{"distributions", arr}}.dump(2) << '\n';
    return kExitPass;
  }
  out << "name,params,cf,verdict\n";
  for (const auto& s : specs) {
    std::string params;
    for (const auto& [k, v] : s.params) params += (params.empty() ? "" : ";") + k;
    out << s.name << ',' << params << ",\"" << s.cf_formula << "\",\"" << s.class_verdict << "\"\n";
  }
  return kExitPass;
}

// ---------------------------------------------------------------- entry

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Urbanik-class analysis of selfdecomposable laws"};
  app.footer(catalog_footer());
  app.require_subcommand(1);

  ClassifyOptions co;
  auto* classify_cmd = app.add_subcommand("classify", "Urbanik-class verdict from D-operator sign scans");
  co.dist.add_to(*classify_cmd);
  classify_cmd->add_option("--max-level", co.max_level, "highest class level to test")->capture_default_str();
  classify_cmd->add_option("--grid", co.grid, "scan grid min:max:points[,log]")->capture_default_str();
  classify_cmd->add_option("--refine-iters", co.refine_iters, "bisection/golden-section iterations")
      ->capture_default_str();
  auto* cj = classify_cmd->add_flag("--json", co.json, "JSON verdict");
  classify_cmd->add_flag("--csv", co.csv, "per-level table")->excludes(cj);

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "numeric checks of closed-form identities");
  verify_cmd->add_option("--check", vo.check, "which identity")
      ->required()
      ->check(CLI::IsMember({"cf", "bdcf", "decompose", "residual", "gamma-identity"}));
  vo.dist.add_to(*verify_cmd, false);
  verify_cmd->add_option("--t", vo.t_grid, "t grid (default -10:10:401 for cf, else -5:5:101)");
  verify_cmd->add_option("--grid", vo.grid, "scan grid for --check residual")->capture_default_str();
  verify_cmd->add_option("--factors", vo.factors, "residual factors in (0, 1)")->delimiter(',')->capture_default_str();
  verify_cmd->add_option("--K", vo.K, "series truncation")->capture_default_str();
  verify_cmd->add_option("--tol", vo.tol, "pass tolerance on the max deviation")->capture_default_str();
  verify_cmd->add_flag("--json", vo.json, "JSON report");

  SampleOptions so;
  auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo samples as CSV");
  so.dist.add_to(*sample_cmd);
  sample_cmd->add_option("--n", so.n, "sample count")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--K", so.K, "series truncation")->capture_default_str()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", so.seed, "64-bit seed")->capture_default_str();
  sample_cmd->add_flag("--no-tail-correction", so.no_tail_correction, "drop the Gaussian tail term");
  sample_cmd->add_option("--out", so.out_path, "output file (default stdout)");
  sample_cmd->add_option("--ecf", so.ecf_grid, "append an ECF band test on this t grid");

  bool catalog_json = false;
  auto* catalog_cmd = app.add_subcommand("catalog", "list catalog distributions");
  catalog_cmd->add_flag("--json", catalog_json, "JSON table");

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*classify_cmd) return cmd_classify(co, out);
    if (*verify_cmd) return cmd_verify(vo, out);
    if (*sample_cmd) return cmd_sample(so, out, err);
    if (*catalog_cmd) return cmd_catalog(catalog_json, out);
  } catch (const QuadratureFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const NonConvergent& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace urbanik::cli
