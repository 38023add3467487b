#pragma once

#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interfall/errors.hpp"
#include "interfall/experiments.hpp"

namespace interfall {

enum class ExperimentKind { diffract, interfere, decohere, causal_break, cow, verify };

inline std::optional<ExperimentKind> parse_kind(std::string_view s) {
  if (s == "diffract") return ExperimentKind::diffract;
  if (s == "interfere") return ExperimentKind::interfere;
  if (s == "decohere") return ExperimentKind::decohere;
  if (s == "causal-break") return ExperimentKind::causal_break;
  if (s == "cow") return ExperimentKind::cow;
  if (s == "verify") return ExperimentKind::verify;
  return std::nullopt;
}

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::diffract: return "diffract";
    case ExperimentKind::interfere: return "interfere";
    case ExperimentKind::decohere: return "decohere";
    case ExperimentKind::causal_break: return "causal-break";
    case ExperimentKind::cow: return "cow";
    case ExperimentKind::verify: return "verify";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// INI text

struct IniEntry {
  std::string value;
  int line = 0;
};

/// Parsed `key = value` text grouped by [section], with source line numbers.
struct IniFile {
  std::string source = "<config>";
  std::vector<std::string> section_order;
  std::map<std::string, std::map<std::string, IniEntry>> sections;
  std::map<std::string, int> section_lines;

  [[nodiscard]] bool has(const std::string& section) const { return sections.count(section) != 0; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void config_fail(const std::string& source, int line, const std::string& msg) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << msg;
  throw ConfigError(os.str());
}

}  // namespace detail

inline IniFile parse_ini(std::string_view text, std::string source = "<config>") {
  IniFile ini;
  ini.source = std::move(source);
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = raw.find('#');
    std::string_view line = detail::trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') detail::config_fail(ini.source, line_no, "malformed section header");
      current = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (current.empty()) detail::config_fail(ini.source, line_no, "empty section name");
      if (ini.has(current)) detail::config_fail(ini.source, line_no, "duplicate section [" + current + "]");
      ini.sections[current];
      ini.section_order.push_back(current);
      ini.section_lines[current] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) detail::config_fail(ini.source, line_no, "expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) detail::config_fail(ini.source, line_no, "empty key");
    if (current.empty()) detail::config_fail(ini.source, line_no, "key '" + key + "' outside any [section]");
    auto& sec = ini.sections[current];
    if (sec.count(key)) detail::config_fail(ini.source, line_no, "duplicate key '" + key + "' in [" + current + "]");
    sec[key] = IniEntry{value, line_no};
  }
  return ini;
}

inline IniFile load_ini(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ini(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Typed experiment configuration

struct VerifyOptions {
  bool oracle = true;
  /// Fault injection: give spin-up the heavier mass.
  bool swap_branch_masses = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify;
  DiffractSetup diffract;
  DecohereSetup decohere;
  std::vector<double> decohere_distances;
  CausalBreakSetup causal_break;
  CowSetup cow;
  VerifyOptions verify;
  /// Every key that was read, as "section.key" -> literal value, for the report.
  std::map<std::string, std::string> parameters;
};

namespace detail {

/// Reads typed values from one section and remembers which keys were consumed.
class SectionReader {
 public:
  SectionReader(const IniFile& ini, std::string name, ExperimentConfig& out)
      : ini_(ini), name_(std::move(name)), out_(out) {
    const auto it = ini.sections.find(name_);
    if (it != ini.sections.end()) entries_ = &it->second;
  }

  [[nodiscard]] bool present() const { return entries_ != nullptr; }

  [[nodiscard]] const IniEntry* find(const std::string& key) {
    allowed_.insert(key);
    if (entries_ == nullptr) return nullptr;
    const auto it = entries_->find(key);
    if (it == entries_->end()) return nullptr;
    out_.parameters[name_ + "." + key] = it->second.value;
    return &it->second;
  }

  double number(const std::string& key, double fallback) {
    const IniEntry* e = find(key);
    return e ? parse_number(*e, key) : fallback;
  }

  double required_number(const std::string& key) {
    const IniEntry* e = find(key);
    if (!e) config_fail(ini_.source, section_line(), "[" + name_ + "] is missing required key '" + key + "'");
    return parse_number(*e, key);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const IniEntry* e = find(key);
    if (!e) return fallback;
    const double v = parse_number(*e, key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) fail(*e, key, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key, bool fallback) {
    const IniEntry* e = find(key);
    if (!e) return fallback;
    const std::string& v = e->value;
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    fail(*e, key, "expected true/false");
  }

  std::string word(const std::string& key, const std::string& fallback) {
    const IniEntry* e = find(key);
    return e ? e->value : fallback;
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback, bool required = false) {
    const IniEntry* e = find(key);
    if (!e) {
      if (required) config_fail(ini_.source, section_line(), "[" + name_ + "] is missing required key '" + key + "'");
      return fallback;
    }
    std::vector<double> out;
    std::string_view rest = e->value;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      if (item.empty()) fail(*e, key, "empty list element");
      out.push_back(parse_number(IniEntry{std::string(item), e->line}, key));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  /// Rejects keys this section does not define.
  void finish() const {
    if (entries_ == nullptr) return;
    for (const auto& [key, entry] : *entries_)
      if (!allowed_.count(key)) config_fail(ini_.source, entry.line, "unknown key '" + key + "' in [" + name_ + "]");
  }

  [[noreturn]] void fail(const IniEntry& e, const std::string& key, const std::string& msg) const {
    config_fail(ini_.source, e.line, "[" + name_ + "] " + key + ": " + msg + " (got '" + e.value + "')");
  }

 private:
  int section_line() const {
    const auto it = ini_.section_lines.find(name_);
    return it == ini_.section_lines.end() ? 0 : it->second;
  }

  double parse_number(const IniEntry& e, const std::string& key) const {
    const std::string& s = e.value;
    if (s == "pi/2") return std::numbers::pi / 2.0;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(e, key, "expected a finite number");
    return v;
  }

  const IniFile& ini_;
  std::string name_;
  ExperimentConfig& out_;
  const std::map<std::string, IniEntry>* entries_ = nullptr;
  std::set<std::string> allowed_;
};

inline PhysicalConfig read_physics(SectionReader& r, PhysicalConfig base) {
  base.m = r.number("mass", base.m);
  base.g = r.number("g", base.g);
  base.h = r.number("h", base.h);
  base.c = r.number("c", base.c);
  base.lambda = r.number("lambda", base.lambda);
  base.delta_e = r.number("delta_e", base.delta_e);
  base.rest_mass_phase = r.flag("rest_mass_phase", base.rest_mass_phase);
  return base;
}

/// Slit half-width and the +/- b pair used by the spin experiments.
inline void read_double_slit(SectionReader& r, DecohereSetup& s) {
  s.slit_half_width = r.number("a", s.slit_half_width);
  const IniEntry* e = r.find("centers");
  if (e == nullptr) return;
  const std::vector<double> c = r.list("centers", {});
  if (c.size() != 2 || std::abs(c[0] + c[1]) > 1e-12 * std::max(std::abs(c[0]), std::abs(c[1])) || c[0] == c[1])
    r.fail(*e, "centers", "this experiment needs a symmetric pair -b, b");
  s.slit_center = std::abs(c[0]);
}

inline void read_upstream(const IniFile& ini, ExperimentConfig& out, DecohereSetup& s, std::deque<SectionReader>& readers) {
  auto& phys = readers.emplace_back(ini, "physics", out);
  s.config = read_physics(phys, s.config);
  auto& geo = readers.emplace_back(ini, "geometry", out);
  read_double_slit(geo, s);
  auto& pkt = readers.emplace_back(ini, "packet", out);
  s.packet.sigma = pkt.number("sigma", s.packet.sigma);
  s.packet.p = pkt.number("p", s.packet.p);
  s.packet.x0 = pkt.number("x0", s.packet.x0);
  s.sigma_z = pkt.number("sigma_z", s.sigma_z);
  s.alpha = cplx{pkt.number("alpha", s.alpha.real()), 0.0};
  s.beta = cplx{std::sqrt(std::max(0.0, 1.0 - std::norm(s.alpha))), 0.0};
  auto& avg = readers.emplace_back(ini, "time_average", out);
  s.window_factor = avg.number("window_factor", s.window_factor);
  s.time_samples = avg.count("samples", s.time_samples);
  auto& scr = readers.emplace_back(ini, "screen", out);
  s.screen_samples = scr.count("samples", s.screen_samples);
  s.screen_envelopes = scr.number("envelopes", s.screen_envelopes);
  s.visibility_fringes = scr.number("visibility_fringes", s.visibility_fringes);
}

}  // namespace detail

/// Builds the typed configuration of one experiment. Sections that the kind
/// does not use, and keys a section does not define, are errors.
inline ExperimentConfig build_experiment_config(const IniFile& ini, ExperimentKind kind) {
  ExperimentConfig out;
  out.kind = kind;
  std::deque<detail::SectionReader> readers;
  std::set<std::string> used;
  auto require = [&](const char* section) {
    if (!ini.has(section))
      detail::config_fail(ini.source, 0, std::string("missing [") + section + "] section required by '" + kind_name(kind) + "'");
  };

  switch (kind) {
    case ExperimentKind::diffract:
    case ExperimentKind::interfere: {
      require("physics");
      require("geometry");
      require("screen");
      used = {"physics", "geometry", "screen"};
      DiffractSetup& d = out.diffract;
      auto& phys = readers.emplace_back(ini, "physics", out);
      d.config = detail::read_physics(phys, d.config);
      auto& geo = readers.emplace_back(ini, "geometry", out);
      d.geometry.D = geo.required_number("D");
      d.geometry.a = geo.required_number("a");
      d.geometry.centers = geo.list("centers", {}, true);
      d.geometry.L = d.geometry.D;
      auto& scr = readers.emplace_back(ini, "screen", out);
      d.distances = scr.list("distances", {}, true);
      const std::size_t slits = d.geometry.centers.size();
      if (kind == ExperimentKind::diffract && slits != 1)
        detail::config_fail(ini.source, ini.sections.at("geometry").at("centers").line,
                            "diffract takes exactly one slit center; use 'interfere' for several");
      if (kind == ExperimentKind::interfere && slits < 2)
        detail::config_fail(ini.source, ini.sections.at("geometry").at("centers").line,
                            "interfere needs at least two slit centers");
      break;
    }
    case ExperimentKind::decohere: {
      require("screen");
      used = {"physics", "geometry", "packet", "time_average", "screen"};
      detail::read_upstream(ini, out, out.decohere, readers);
      out.decohere_distances = readers.back().list("distances", {}, true);
      break;
    }
    case ExperimentKind::causal_break: {
      used = {"physics", "geometry", "packet", "time_average", "screen", "filter"};
      CausalBreakSetup& c = out.causal_break;
      detail::read_upstream(ini, out, c.upstream, readers);
      auto& f = readers.emplace_back(ini, "filter", out);
      c.z_filter = f.number("z_filter", c.z_filter);
      c.z_screen = f.number("z_screen", c.z_screen);
      c.reprep.sigma = f.number("reprep_sigma", c.reprep.sigma);
      c.reprep.x0 = f.number("reprep_x0", c.reprep.x0);
      c.reprep_sigma_z = f.number("reprep_sigma_z", c.reprep_sigma_z);
      c.downstream_coupling = f.flag("downstream_coupling", c.downstream_coupling);
      c.screen_samples = f.count("screen_samples", c.screen_samples);
      const std::string mode = f.word("mode", "compare");
      if (mode == "grating") {
        GratingSpec gs;
        gs.period = f.required_number("period");
        gs.duty = f.number("duty", gs.duty);
        gs.offset = f.number("offset", gs.offset);
        c.grating = gs;
      } else if (mode != "compare") {
        f.fail(*f.find("mode"), "mode", "expected 'compare' or 'grating'");
      } else {
        for (const char* k : {"period", "duty", "offset"})
          if (f.present() && ini.sections.at("filter").count(k))
            detail::config_fail(ini.source, ini.sections.at("filter").at(k).line,
                                std::string("[filter] ") + k + " only applies with mode = grating");
      }
      break;
    }
    case ExperimentKind::cow: {
      require("cow");
      used = {"cow"};
      CowSetup& s = out.cow;
      auto& r = readers.emplace_back(ini, "cow", out);
      s.m_inertial = r.number("m_inertial", s.m_inertial);
      s.m_grav = r.number("m_grav", s.m_grav);
      s.g = r.number("g", s.g);
      s.area = r.number("area", s.area);
      s.lambda = r.number("lambda", s.lambda);
      s.h = r.number("h", s.h);
      s.tilts = r.list("tilts", s.tilts);
      break;
    }
    case ExperimentKind::verify: {
      used = {"verify"};
      auto& r = readers.emplace_back(ini, "verify", out);
      out.verify.oracle = r.flag("oracle", out.verify.oracle);
      const std::string fault = r.word("fault", "none");
      if (fault == "swap-masses") out.verify.swap_branch_masses = true;
      else if (fault != "none") r.fail(*r.find("fault"), "fault", "expected 'none' or 'swap-masses'");
      break;
    }
  }

  for (const auto& name : ini.section_order)
    if (!used.count(name))
      detail::config_fail(ini.source, ini.section_lines.at(name),
                          "section [" + name + "] is not used by '" + kind_name(kind) + "'");
  for (const auto& r : readers) r.finish();

  try {
    switch (kind) {
      case ExperimentKind::diffract:
      case ExperimentKind::interfere:
        out.diffract.config.validate();
        if (out.diffract.distances.empty()) throw ConfigError("no screen distances");
        for (double L : out.diffract.distances) {
          SlitGeometry g = out.diffract.geometry;
          g.L = L;
          g.validate(out.diffract.config.lambda, out.diffract.limits);
        }
        break;
      case ExperimentKind::decohere:
        out.decohere.validate();
        for (double z : out.decohere_distances)
          if (!(z > 0.0)) throw ConfigError("screen distances must be positive");
        break;
      case ExperimentKind::causal_break:
        out.causal_break.validate();
        if (out.causal_break.grating) {
          const GratingSpec& gs = *out.causal_break.grating;
          if (!(gs.period > 0.0) || !(gs.duty > 0.0 && gs.duty < 1.0))
            throw ConfigError("grating needs period > 0 and 0 < duty < 1");
        }
        break;
      case ExperimentKind::cow:
        if (!(out.cow.m_inertial > 0.0 && out.cow.m_grav > 0.0 && out.cow.g > 0.0 && out.cow.area > 0.0 &&
              out.cow.lambda > 0.0 && out.cow.h > 0.0))
          throw ConfigError("cow parameters must be positive");
        for (double t : out.cow.tilts)
          if (!(t >= 0.0 && t <= std::numbers::pi / 2.0 + 1e-15)) throw ConfigError("tilt angles must lie in [0, pi/2]");
        break;
      case ExperimentKind::verify:
        break;
    }
  } catch (const ConfigError& e) {
    detail::config_fail(ini.source, 0, e.what());
  } catch (const DomainError& e) {
    detail::config_fail(ini.source, 0, e.what());
  }
  return out;
}

}  // namespace interfall
