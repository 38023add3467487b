#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "interfall/config.hpp"
#include "interfall/errors.hpp"
#include "interfall/experiments.hpp"
#include "interfall/io.hpp"
#include "interfall/verify.hpp"

namespace interfall::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kPhysicsError = 3 };

enum class OutputFormat { csv, json, svg };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;
};

/// Collects files and writes each one atomically.
class Sink {
 public:
  Sink(const RunOptions& opts, std::ostream& log) : opts_(opts), log_(log) {}

  [[nodiscard]] bool wants_csv() const { return opts_.format != OutputFormat::json; }
  [[nodiscard]] bool wants_svg() const { return opts_.format == OutputFormat::svg; }

  void csv(const std::string& name, const CsvTable& t) {
    if (wants_csv()) write(name, t.str());
  }
  void svg(const std::string& name, const std::string& text) {
    if (wants_svg()) write(name, text);
  }
  void report(const Report& r) { write("report.json", report_json(r)); }

 private:
  void write(const std::string& name, const std::string& content) {
    const auto path = opts_.out_dir / name;
    atomic_write(path, content);
    log_ << "wrote " << path.string() << "\n";
  }

  const RunOptions& opts_;
  std::ostream& log_;
};

/// Compact decimal label for file names: 3 -> "3", 0.5 -> "0.5".
inline std::string distance_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline CheckResult threshold_check(std::string name, double value, double tol, bool below = true) {
  const bool pass = std::isfinite(value) && (below ? value < tol : value > tol);
  return {std::move(name), pass, false, value, tol, {}};
}

// ---------------------------------------------------------------------------

inline int run_diffract_kind(const ExperimentConfig& cfg, const RunOptions& opts, Sink& sink) {
  const DiffractSetup& s = cfg.diffract;
  const auto results = run_diffract(s, opts.threads);
  Report rep;
  rep.experiment = kind_name(cfg.kind);
  rep.parameters = cfg.parameters;
  auto& per = rep.metrics["screens"] = nlohmann::ordered_json::array();
  double mean_b = 0.0;
  for (double b : s.geometry.centers) mean_b += b;
  mean_b /= static_cast<double>(s.geometry.centers.size());
  std::vector<PlotSeries> series;
  for (const DiffractResult& r : results) {
    const std::string tag = distance_label(r.L);
    CsvTable t{{"x_m", "density_per_m", "density_g0_shifted"}, {}};
    for (std::size_t k = 0; k < r.grid.n; ++k) t.add_row({r.grid.x(k), r.density[k], r.density_g0_shifted[k]});
    sink.csv(std::string(rep.experiment) + "_L" + tag + ".csv", t);

    SlitGeometry geom = s.geometry;
    geom.L = r.L;
    const double expected_peak = r.classical_displacement + geom.eta() * mean_b;
    const double peak_error = std::abs(r.peak_position - expected_peak) / r.envelope_width;
    nlohmann::ordered_json m;
    m["L_m"] = r.L;
    m["classical_displacement_m"] = r.classical_displacement;
    m["peak_position_m"] = r.peak_position;
    m["envelope_width_m"] = r.envelope_width;
    m["control_error"] = json_number(r.control_error);
    per.push_back(m);
    rep.checks.push_back(threshold_check("freefall_control_L" + tag, r.control_error, kFreefallTolerance));
    rep.checks.push_back(threshold_check("peak_offset_L" + tag, peak_error, 0.02));

    PlotSeries ps{"L = " + tag + " m", {}, {}};
    double peak = 0.0;
    for (double d : r.density) peak = std::max(peak, d);
    for (std::size_t k = 0; k < r.grid.n; ++k) {
      ps.x.push_back(r.grid.x(k) * 1e3);
      ps.y.push_back(r.density[k] / peak);
    }
    series.push_back(std::move(ps));
  }
  sink.svg(rep.experiment + ".svg", svg_plot("Slit pattern in gravity", "x (mm)", "density / peak", series));
  sink.report(rep);
  return kOk;
}

inline int run_decohere_kind(const ExperimentConfig& cfg, const RunOptions& opts, Sink& sink, std::ostream& err) {
  const DecohereSetup& s = cfg.decohere;
  std::vector<PlaneSnapshot> snaps;
  const auto pts = run_decohere(s, cfg.decohere_distances, opts.threads, &snaps);
  Report rep;
  rep.experiment = "decohere";
  rep.parameters = cfg.parameters;
  CsvTable curve{{"z_m", "visibility", "overlap_abs", "entropy_bits"}, {}};
  std::vector<double> vis, ovl;
  auto& rows = rep.metrics["sweep"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const DecoherePoint& p = pts[i];
    if (p.warning) err << "warning: z = " << p.z << " m: visibility undefined (" << *p.warning << ")\n";
    curve.add_row({p.z, p.visibility, p.overlap_abs, p.entropy_bits});
    nlohmann::ordered_json m;
    m["z_m"] = p.z;
    m["visibility"] = json_number(p.visibility);
    m["overlap_abs"] = p.overlap_abs;
    m["entropy_bits"] = p.entropy_bits;
    rows.push_back(m);
    if (std::isfinite(p.visibility)) {
      vis.push_back(p.visibility);
      ovl.push_back(p.overlap_abs);
    }
    const PlaneSnapshot& sn = snaps[i];
    CsvTable pat{{"x_rel_m", "up_density", "down_density", "averaged_density"}, {}};
    for (std::size_t k = 0; k < sn.grid.n; ++k)
      pat.add_row({sn.grid.x(k), sn.up.averaged[k], sn.down.averaged[k], sn.averaged[k]});
    sink.csv("decohere_z" + distance_label(p.z) + ".csv", pat);
  }
  sink.csv("decohere.csv", curve);
  rep.metrics["overlap_visibility_spearman"] =
      vis.size() >= 2 ? json_number(spearman_correlation(ovl, vis)) : nlohmann::ordered_json(nullptr);

  PlotSeries v{"visibility", {}, {}}, o{"|overlap|", {}, {}};
  for (const auto& p : pts) {
    v.x.push_back(p.z);
    v.y.push_back(p.visibility);
    o.x.push_back(p.z);
    o.y.push_back(p.overlap_abs);
  }
  sink.svg("decohere.svg", svg_plot("Fringe visibility along the flight", "z (m)", "value", {v, o}));
  sink.report(rep);
  return kOk;
}

inline nlohmann::ordered_json spin_json(const SpinState2& s) {
  nlohmann::ordered_json j;
  j["p_up"] = s.p_up();
  j["p_down"] = s.p_down();
  j["coherence_re"] = s.coherence().real();
  j["coherence_im"] = s.coherence().imag();
  return j;
}

inline int run_causal_break_kind(const ExperimentConfig& cfg, const RunOptions& opts, Sink& sink) {
  const CausalBreakSetup& s = cfg.causal_break;
  PlaneSnapshot plane;
  const CausalBreakResult r = run_causal_break(s, opts.threads, &plane);
  const double markov = markov_control_distinguishability(s);
  Report rep;
  rep.experiment = "causal-break";
  rep.parameters = cfg.parameters;
  rep.metrics["white"] = spin_json(r.white.spin);
  rep.metrics["black"] = spin_json(r.black.spin);
  rep.metrics["distinguishability"] = r.distinguishability;
  rep.metrics["ablation_distinguishability"] = r.ablation_distinguishability;
  rep.metrics["markov_control_distinguishability"] = markov;
  rep.checks.push_back(threshold_check("populations_differ", std::abs(r.white.spin.p_up() - r.black.spin.p_up()), 1e-3, false));
  rep.checks.push_back(threshold_check("memory_ablation", r.ablation_distinguishability, 1e-6));
  rep.checks.push_back(threshold_check("markov_control", markov, 1e-6));
  {
    CheckResult c{"distinguishability_bounded", r.distinguishability >= 0.0 && r.distinguishability <= 1.0, false,
                  r.distinguishability, 1.0, {}};
    rep.checks.push_back(c);
  }

  CsvTable f{{"x_rel_m", "up_density", "down_density", "white_transmission"}, {}};
  for (std::size_t k = 0; k < plane.grid.n; ++k)
    f.add_row({plane.grid.x(k), plane.up.averaged[k], plane.down.averaged[k], r.filters.white.transmission[k]});
  sink.csv("causal_break_filter.csv", f);
  const UniformGrid& sg = r.white.screen.grid();
  CsvTable scr{{"x_rel_m", "up_density", "down_density", "white_screen", "black_screen"}, {}};
  PlotSeries w{"white filter", {}, {}}, b{"black filter", {}, {}};
  for (std::size_t k = 0; k < sg.n; ++k) {
    scr.add_row({sg.x(k), r.conditional.up[k], r.conditional.down[k], r.white.screen[k], r.black.screen[k]});
    w.x.push_back(sg.x(k) * 1e3);
    w.y.push_back(r.white.screen[k]);
    b.x.push_back(sg.x(k) * 1e3);
    b.y.push_back(r.black.screen[k]);
  }
  sink.csv("causal_break_screen.csv", scr);
  sink.svg("causal_break.svg", svg_plot("Screen after the causal break", "x (mm)", "density (1/m)", {w, b}));
  sink.report(rep);
  return kOk;
}

inline int run_cow_kind(const ExperimentConfig& cfg, Sink& sink) {
  const auto pts = run_cow(cfg.cow);
  Report rep;
  rep.experiment = "cow";
  rep.parameters = cfg.parameters;
  CsvTable t{{"tilt_rad", "phase_rad"}, {}};
  PlotSeries ps{"phase", {}, {}};
  double amplitude = std::numeric_limits<double>::quiet_NaN(), worst = 0.0;
  for (const auto& p : pts) {
    t.add_row({p.tilt, p.phase});
    ps.x.push_back(p.tilt);
    ps.y.push_back(p.phase);
    if (std::sin(p.tilt) > 0.0) {
      const double a = p.phase / std::sin(p.tilt);
      if (std::isnan(amplitude)) amplitude = a;
      worst = std::max(worst, std::abs(a - amplitude) / std::abs(amplitude));
    }
  }
  rep.metrics["phase_at_right_angle_rad"] = json_number(amplitude);
  rep.checks.push_back(threshold_check("sin_scaling", worst, 1e-12));
  sink.csv("cow.csv", t);
  sink.svg("cow.svg", svg_plot("Interferometer phase against tilt", "tilt (rad)", "phase (rad)", {ps}));
  sink.report(rep);
  return kOk;
}

inline int run_verify_kind(const ExperimentConfig& cfg, const RunOptions& opts, Sink& sink, std::ostream& err) {
  Report rep;
  rep.experiment = "verify";
  rep.parameters = cfg.parameters;
  rep.checks = run_verify(cfg.verify, opts.threads);
  int passed = 0, failed = 0, skipped = 0;
  for (const auto& c : rep.checks) {
    if (c.skipped) ++skipped;
    else if (c.pass) ++passed;
    else {
      ++failed;
      err << "check failed: " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    }
  }
  rep.metrics["passed"] = passed;
  rep.metrics["failed"] = failed;
  rep.metrics["skipped"] = skipped;
  sink.report(rep);
  return failed == 0 ? kOk : kVerifyFailed;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Matter-wave interference in uniform gravity"};
  app.set_version_flag("--version", std::string("interfall 1.0.0"));
  std::string kind_text, config_path, format_text = "csv";
  RunOptions opts;
  std::string out_dir = ".";
  app.add_option("kind", kind_text, "diffract | interfere | decohere | causal-break | cow | verify")->required();
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format_text, "csv | json | svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--threads", opts.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "interfall: " << e.what() << "\n";
    return kConfigError;
  }
  opts.out_dir = out_dir;
  opts.format = format_text == "json" ? OutputFormat::json : format_text == "svg" ? OutputFormat::svg : OutputFormat::csv;

  const auto kind = parse_kind(kind_text);
  if (!kind) {
    err << "interfall: unknown experiment kind '" << kind_text << "'\n";
    return kConfigError;
  }

  ExperimentConfig cfg;
  try {
    cfg = build_experiment_config(load_ini(config_path), *kind);
  } catch (const ConfigError& e) {
    err << "interfall: config error: " << e.what() << "\n";
    return kConfigError;
  }

  Sink sink(opts, out);
  try {
    switch (*kind) {
      case ExperimentKind::diffract:
      case ExperimentKind::interfere: return run_diffract_kind(cfg, opts, sink);
      case ExperimentKind::decohere: return run_decohere_kind(cfg, opts, sink, err);
      case ExperimentKind::causal_break: return run_causal_break_kind(cfg, opts, sink);
      case ExperimentKind::cow: return run_cow_kind(cfg, sink);
      case ExperimentKind::verify: return run_verify_kind(cfg, opts, sink, err);
    }
  } catch (const ConfigError& e) {
    err << "interfall: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FilterBlocked& e) {
    err << "interfall: filter blocked: " << e.what() << "\n";
    return kPhysicsError;
  } catch (const Error& e) {
    err << "interfall: physics error: " << e.what() << "\n";
    return kPhysicsError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "interfall: output error: " << e.what() << "\n";
    return kPhysicsError;
  }
  return kOk;
}

}  // namespace interfall::cli
