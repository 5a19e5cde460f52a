#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rabi/errors.hpp"
#include "rabi/oracle.hpp"
#include "rabi/recurrence.hpp"
#include "rabi/series.hpp"
#include "rabi/spectral.hpp"

namespace rabicf {
namespace {

using json = nlohmann::ordered_json;
using rabi::Error;
using rabi::ErrorCode;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Table {
  json meta = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(const json& v) {
  switch (v.type()) {
    case json::value_t::number_float: return num(v.get<double>());
    case json::value_t::number_integer: return std::to_string(v.get<long long>());
    case json::value_t::number_unsigned: return std::to_string(v.get<unsigned long long>());
    case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case json::value_t::string: return v.get<std::string>();
    case json::value_t::null: return "nan";
    case json::value_t::array: {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + cell(v[i]);
      return s;
    }
    default: return v.dump();
  }
}

void write_csv(const Table& t, std::ostream& os) {
  for (const auto& [key, value] : t.meta.items()) os << "# " << key << '=' << cell(value) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
    os << '\n';
  }
}

void write_json(const Table& t, std::ostream& os) {
  json doc = json::object();
  doc["meta"] = t.meta;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

// NaN cannot live in JSON; keep it null in both formats.
json real(double v) { return std::isfinite(v) || std::isinf(v) ? json(v) : json(nullptr); }

json real_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

bool invalid_config(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::CouplingOutOfRange:
    case ErrorCode::ZeroCoupling:
    case ErrorCode::SectorMismatch:
    case ErrorCode::EmptyWindow:
    case ErrorCode::NotDecoupled:
      return true;
    default:
      return false;
  }
}

rabi::SpectralOptions spectral_options(const RunConfig& cfg) {
  rabi::SpectralOptions o;
  o.cf.rel_tol = cfg.cf_rel_tol;
  o.grid_step = cfg.grid_step;
  o.root_abs_tol = cfg.root_abs_tol;
  o.threads = cfg.threads;
  return o;
}

json base_meta(const RunConfig& cfg, const std::string& command) {
  json m = json::object();
  m["command"] = command;
  m["model"] = std::string(rabi::to_string(cfg.model.kind));
  m["omega"] = cfg.model.omega;
  m["delta"] = cfg.model.delta;
  m["g"] = cfg.model.g;
  m["drive"] = cfg.model.drive;
  m["sector"] = cfg.sector.label();
  m["emin"] = cfg.window.lo;
  m["emax"] = cfg.window.hi;
  m["grid_step"] = cfg.grid_step;
  m["cf_rel_tol"] = cfg.cf_rel_tol;
  m["root_abs_tol"] = cfg.root_abs_tol;
  return m;
}

void check_config(const RunConfig& cfg) {
  cfg.model.validate();
  cfg.sector.check_matches(cfg.model.kind);
  if (!std::isfinite(cfg.window.lo) || !std::isfinite(cfg.window.hi))
    throw Error(ErrorCode::InvalidArgument, "window bounds must be finite");
  if (cfg.window.lo > cfg.window.hi)
    throw Error(ErrorCode::EmptyWindow, "emin " + num(cfg.window.lo) + " > emax " + num(cfg.window.hi));
  if (!std::isfinite(cfg.grid_step) || cfg.grid_step < 0.0)
    throw Error(ErrorCode::InvalidArgument, "grid-step must be finite and >= 0");
  if (!(cfg.cf_rel_tol > 0.0) || !std::isfinite(cfg.cf_rel_tol))
    throw Error(ErrorCode::InvalidArgument, "cf-rel-tol must be positive");
  if (!(cfg.root_abs_tol > 0.0) || !std::isfinite(cfg.root_abs_tol))
    throw Error(ErrorCode::InvalidArgument, "root-abs-tol must be positive");
  if (cfg.oracle_n < 0) throw Error(ErrorCode::InvalidArgument, "oracle-n must be >= 0");
  if (cfg.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
}

Table closed_form_table(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const double top = cfg.window.hi + m.delta + std::abs(m.drive);
  const int n_max = std::max(0, static_cast<int>(std::ceil(top / m.omega)) + 2);
  Table t;
  t.meta = base_meta(cfg, "spectrum");
  t.meta["mode"] = "closed_form";
  t.columns = {"index", "energy", "residual", "flagged", "reason"};
  int index = 0;
  for (double e : rabi::closed_form_spectrum_g0(m, cfg.sector, n_max)) {
    if (e < cfg.window.lo || e > cfg.window.hi) continue;
    t.rows.push_back({index++, e, 0.0, false, ""});
  }
  return t;
}

Table spectrum_table(const RunConfig& cfg) {
  rabi::SpectrumResult r;
  try {
    r = rabi::compute_spectrum(cfg.model, cfg.sector, cfg.window, spectral_options(cfg));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroCoupling) {
      throw Error(ErrorCode::ZeroCoupling,
                  "g = 0 has no continued-fraction spectrum; rerun with --closed-form "
                  "or use the oracle subcommand");
    }
    throw;
  }
  Table t;
  t.meta = base_meta(cfg, "spectrum");
  t.meta["grid_step"] = r.grid.step;
  t.meta["tail_depth"] = r.grid.tail_depth;
  t.meta["grid_points"] = r.grid.points;
  t.meta["poles"] = real_list(r.poles);
  t.meta["roots"] = r.roots.size();
  t.meta["flagged"] = r.flagged.size();
  t.meta["warnings"] = r.warnings;
  t.columns = {"index", "energy", "residual", "flagged", "reason"};

  struct Row {
    double energy;
    double residual;
    std::string reason;
  };
  std::vector<Row> rows;
  for (const auto& root : r.roots) rows.push_back({root.energy, root.residual, ""});
  for (const auto& f : r.flagged)
    rows.push_back({f.energy, f.residual, std::string(rabi::to_string(f.reason))});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.energy < b.energy; });
  int index = 0;
  for (const auto& row : rows)
    t.rows.push_back({index++, row.energy, real(row.residual), !row.reason.empty(), row.reason});
  return t;
}

Table curve_table(const RunConfig& cfg, int samples) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "samples must be >= 2");
  const rabi::RecurrenceModel rec(cfg.model, cfg.sector);
  rabi::SpectralOptions opts = spectral_options(cfg);
  if (opts.tail_depth <= 0) opts.tail_depth = rabi::default_tail_depth(rec, cfg.window.hi);
  const double guard = opts.pole_guard * cfg.model.omega;

  Table t;
  t.meta = base_meta(cfg, "curve");
  t.meta["samples"] = samples;
  t.meta["pole_guard"] = guard;
  t.meta["tail_depth"] = opts.tail_depth;
  std::vector<double> poles;
  if (rec.has_poles()) {
    for (int k = 0; rec.pole(k) <= cfg.window.hi; ++k)
      if (rec.pole(k) >= cfg.window.lo) poles.push_back(rec.pole(k));
  }
  t.meta["poles"] = real_list(poles);
  // numerator: F with its poles cleared; only eigenvalues and p_n flip its sign
  t.columns = {"energy", "value", "converged", "near_pole", "depth", "numerator", "error"};

  const double lo = cfg.window.lo;
  const double span = cfg.window.hi - cfg.window.lo;
  for (int i = 0; i < samples; ++i) {
    const double e = i + 1 == samples ? cfg.window.hi : lo + span * i / (samples - 1);
    const bool near = rec.has_poles() && rec.distance_to_pole(e) < guard;
    const double psi = rabi::secular_numerator(rec, e, opts.tail_depth);
    try {
      const auto s = rabi::spectral_function(rec, e, opts);
      t.rows.push_back({e, real(s.value), s.cf.converged, near, s.cf.depth, real(psi), ""});
    } catch (const Error& err) {
      t.rows.push_back(
          {e, nullptr, false, near, 0, real(psi), std::string(rabi::to_string(err.code()))});
    }
  }
  return t;
}

rabi::OracleResult run_oracle(const RunConfig& cfg) {
  const int n_max = std::max(rabi::oracle_default_max_truncation, cfg.oracle_n);
  return rabi::oracle_spectrum(cfg.model, cfg.sector, cfg.window, cfg.oracle_n, n_max);
}

Table oracle_table(const RunConfig& cfg) {
  const auto res = run_oracle(cfg);
  Table t;
  t.meta = base_meta(cfg, "oracle");
  t.meta["oracle_n_start"] = cfg.oracle_n;
  t.meta["oracle_n_used"] = res.truncation;
  t.columns = {"index", "energy", "N_used"};
  int index = 0;
  for (double e : res.eigenvalues) t.rows.push_back({index++, e, res.truncation});
  return t;
}

struct CompareOutcome {
  Table table;
  int unmatched = 0;
};

CompareOutcome compare_table(const RunConfig& cfg, double match_tol) {
  if (!(match_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "match-tol must be positive");
  const auto found = rabi::compute_spectrum(cfg.model, cfg.sector, cfg.window, spectral_options(cfg));
  const auto orc = run_oracle(cfg);
  const rabi::RecurrenceModel rec(cfg.model, cfg.sector);
  const double exc = rabi::SpectralOptions{}.exceptional_eps * cfg.model.omega;

  struct Row {
    double root;
    double oracle;
    std::string status;
    double key() const { return std::isnan(root) ? oracle : root; }
  };
  std::vector<Row> rows;
  std::vector<bool> used(orc.eigenvalues.size(), false);
  for (const auto& r : found.roots) {
    int best = -1;
    double dist = INFINITY;
    for (std::size_t i = 0; i < orc.eigenvalues.size(); ++i) {
      const double d = std::abs(orc.eigenvalues[i] - r.energy);
      if (!used[i] && d < dist) {
        dist = d;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0 && dist <= match_tol) {
      used[static_cast<std::size_t>(best)] = true;
      rows.push_back({r.energy, orc.eigenvalues[static_cast<std::size_t>(best)], "matched"});
    } else {
      rows.push_back({r.energy, kNaN, "cf_only"});
    }
  }
  for (std::size_t i = 0; i < orc.eigenvalues.size(); ++i) {
    if (used[i]) continue;
    const double e = orc.eigenvalues[i];
    const bool pole = rec.has_poles() && rec.distance_to_pole(e) <= exc;
    rows.push_back({kNaN, e, pole ? "exceptional_candidate" : "oracle_only"});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.key() < b.key(); });

  CompareOutcome out;
  Table& t = out.table;
  t.meta = base_meta(cfg, "compare");
  t.meta["match_tol"] = match_tol;
  t.meta["oracle_n_used"] = orc.truncation;
  t.meta["poles"] = real_list(found.poles);
  t.meta["warnings"] = found.warnings;
  int counts[4] = {0, 0, 0, 0};
  const char* names[4] = {"matched", "cf_only", "oracle_only", "exceptional_candidate"};
  t.columns = {"root", "oracle", "diff", "status"};
  for (const auto& row : rows) {
    for (int k = 0; k < 4; ++k)
      if (row.status == names[k]) ++counts[k];
    t.rows.push_back({real(row.root), real(row.oracle), real(std::abs(row.root - row.oracle)),
                      row.status});
  }
  for (int k = 0; k < 4; ++k) t.meta[names[k]] = counts[k];
  out.unmatched = counts[1] + counts[2];
  return out;
}

Table series_table(const RunConfig& cfg, double energy, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  if (!std::isfinite(energy)) throw Error(ErrorCode::InvalidArgument, "energy must be finite");
  const auto s = rabi::minimal_series(cfg.model, cfg.sector, energy, order, spectral_options(cfg));
  const auto ratios = rabi::norm_term_ratios(s);
  Table t;
  t.meta = base_meta(cfg, "series");
  t.meta.erase("emin");
  t.meta.erase("emax");
  t.meta["energy"] = energy;
  t.meta["order"] = order;
  t.meta["spectral_residual"] = real(s.spectral_residual);
  t.meta["not_an_eigenvalue"] = s.not_an_eigenvalue;
  t.meta["tail_ratio"] = order >= 100 ? real(rabi::norm_tail_ratio(s)) : json(nullptr);
  t.columns = {"n", "K_minus", "K_plus", "norm_ratio"};
  for (int n = 0; n <= order; ++n) {
    const auto i = static_cast<std::size_t>(n);
    t.rows.push_back({n, real(s.minus[i]), real(s.plus[i]),
                      i < ratios.size() ? real(ratios[i]) : json(nullptr)});
  }
  return t;
}

rabi::ModelKind parse_model(const std::string& name) {
  if (name == "two-photon") return rabi::ModelKind::TwoPhoton;
  if (name == "two-mode") return rabi::ModelKind::TwoMode;
  return rabi::ModelKind::DrivenRabi;
}

void fail(std::ostream& err, std::string_view code, const std::string& message) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "error: " << code << ": " << line << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continued-fraction spectra of two-photon, two-mode and driven Rabi models"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags override it");

  std::string model_name = "two-photon";
  std::string q_text;
  std::string kappa_text;
  std::string format_name = "csv";
  double emin = kNaN;
  double emax = 8.0;
  RunConfig cfg;

  app.add_option("--model", model_name, "two-photon | two-mode | driven")
      ->check(CLI::IsMember({"two-photon", "two-mode", "driven"}));
  app.add_option("--omega", cfg.model.omega, "boson frequency");
  app.add_option("--delta", cfg.model.delta, "level splitting");
  app.add_option("--g", cfg.model.g, "coupling");
  app.add_option("--drive", cfg.model.drive, "static drive (driven model)");
  app.add_option("--q", q_text, "two-photon sector: 1/4 or 3/4");
  app.add_option("--kappa", kappa_text, "two-mode sector: 1/2, 1, 3/2, ...");
  auto* emin_opt = app.add_option("--emin", emin, "window lower edge (default: below the ground state)");
  app.add_option("--emax", emax, "window upper edge")->capture_default_str();
  app.add_option("--grid-step", cfg.grid_step, "scan step, 0 for the default");
  app.add_option("--cf-rel-tol", cfg.cf_rel_tol, "continued fraction relative tolerance");
  app.add_option("--root-abs-tol", cfg.root_abs_tol, "root enclosure width");
  app.add_option("--oracle-n", cfg.oracle_n, "starting Fock truncation, 0 for the default");
  app.add_option("--threads", cfg.threads, "worker threads for root refinement");
  app.add_option("--format", format_name, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", cfg.output, "output file (default stdout)");

  bool closed_form = false;
  int samples = 200;
  double match_tol = 1e-7;
  double energy = kNaN;
  int order = 200;

  auto* spectrum = app.add_subcommand("spectrum", "roots of F in the window");
  spectrum->add_flag("--closed-form", closed_form, "g = 0 spectrum from the decoupled levels");
  auto* curve = app.add_subcommand("curve", "sample F(E) across the window");
  curve->add_option("--samples", samples, "number of energies, >= 2");
  auto* oracle = app.add_subcommand("oracle", "truncated Fock-space eigenvalues in the window");
  auto* compare = app.add_subcommand("compare", "match continued-fraction roots to the oracle");
  compare->add_option("--match-tol", match_tol, "largest |root - oracle| counted as matched");
  auto* series = app.add_subcommand("series", "minimal-solution coefficients at one energy");
  series->add_option("--energy", energy, "energy")->required();
  series->add_option("--order", order, "highest coefficient index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_ok;
    }
    fail(err, "INVALID_ARGUMENT", e.what());
    return exit_invalid;
  }

  try {
    cfg.model.kind = parse_model(model_name);
    cfg.format = format_name == "json" ? Format::Json : Format::Csv;
    if (!q_text.empty() && !kappa_text.empty())
      throw Error(ErrorCode::SectorMismatch, "give --q or --kappa, not both");
    if (!q_text.empty()) {
      cfg.sector = rabi::Sector::parse_q(q_text);
    } else if (!kappa_text.empty()) {
      cfg.sector = rabi::Sector::parse_kappa(kappa_text);
    } else {
      cfg.sector = rabi::Sector::default_for(cfg.model.kind);
    }
    cfg.model.validate();
    cfg.sector.check_matches(cfg.model.kind);
    if (emin_opt->count() == 0 && std::isnan(emin)) {
      try {
        emin = rabi::default_window(cfg.model, cfg.sector, emax).lo;
      } catch (const Error&) {
        emin = -cfg.model.omega - cfg.model.delta - std::abs(cfg.model.drive) - 1.0;
      }
    }
    cfg.window = {emin, emax};
    check_config(cfg);

    Table table;
    int status = exit_ok;
    if (spectrum->parsed()) {
      table = closed_form ? closed_form_table(cfg) : spectrum_table(cfg);
    } else if (curve->parsed()) {
      table = curve_table(cfg, samples);
    } else if (oracle->parsed()) {
      table = oracle_table(cfg);
    } else if (compare->parsed()) {
      auto c = compare_table(cfg, match_tol);
      table = std::move(c.table);
      if (c.unmatched > 0) {
        fail(err, "UNMATCHED_ROWS", std::to_string(c.unmatched) + " rows without a partner");
        status = exit_numerical;
      }
    } else if (series->parsed()) {
      table = series_table(cfg, energy, order);
    }

    std::ostringstream text;
    if (cfg.format == Format::Json) {
      write_json(table, text);
    } else {
      write_csv(table, text);
    }
    if (cfg.output.empty()) {
      out << text.str();
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open " + cfg.output);
      file << text.str();
    }
    return status;
  } catch (const Error& e) {
    fail(err, rabi::to_string(e.code()), e.what());
    return invalid_config(e.code()) ? exit_invalid : exit_numerical;
  } catch (const std::exception& e) {
    fail(err, "INTERNAL", e.what());
    return exit_numerical;
  }
}

}  // namespace rabicf
