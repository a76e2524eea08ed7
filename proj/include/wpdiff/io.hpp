#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "wpdiff/errors.hpp"
#include "wpdiff/scenarios.hpp"

// Config files, CSV export and plain-text reports.
//
// Config format: `[section]` headers and `key = value` lines, `#` comments.
// Sections: [run] [packet] [potential] [grid] [detector]. A key may also be
// written fully qualified (`packet.sigma = 0.5`) outside any section. Numbers
// are natural units of the run's unit system unless followed by a unit tag
// (`0.5 cm`, `4 eV`), which needs run.units = laboratory or nuclear.

namespace wpdiff::io {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& key) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) throw ConfigError(key + ": '" + t + "' is not a number");
  return v;
}

inline int parse_int(std::string_view s, const std::string& key) {
  const std::string t = trim(s);
  int v = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) throw ConfigError(key + ": '" + t + "' is not an integer");
  return v;
}

inline std::string fmt(double v) { return wpdiff::detail::num(v); }

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

inline std::string fmt_vec(const Vec3& v) { return fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]); }

} // namespace detail

/// Parsed `section.key -> raw value` pairs in file order.
struct ConfigDocument {
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, int> lines;
};

inline const std::vector<std::string>& config_sections() {
  static const std::vector<std::string> s{"run", "packet", "potential", "grid", "detector"};
  return s;
}

inline ConfigDocument parse_config_document(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(config_sections().begin(), config_sections().end(), section) == config_sections().end()) {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!section.empty()) key = section + "." + key;
    if (key.find('.') == std::string::npos) throw ConfigError(where + "key '" + key + "' is outside any section");
    if (doc.lines.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    doc.lines[key] = lineno;
    doc.entries.emplace_back(std::move(key), value);
  }
  return doc;
}

namespace detail {

// Typed access to a ConfigDocument; remembers what was read so leftovers can
// be rejected, and records defaults as assumptions.
class Reader {
public:
  Reader(const ConfigDocument& doc, ScenarioConfig& cfg) : cfg_(cfg) {
    for (const auto& [k, v] : doc.entries) values_[k] = v;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key " + key);
    used_.insert(key);
    return it->second;
  }

  void set_units(std::string units) {
    if (units == "natural") {
      system_.reset();
    } else if (units == "laboratory") {
      system_ = UnitSystem::laboratory();
    } else if (units == "nuclear") {
      system_ = UnitSystem::nuclear();
    } else {
      throw ConfigError("run.units must be natural, laboratory or nuclear");
    }
  }

  double number(const std::string& key) { return quantity(key, text(key)); }

  double number_or(const std::string& key, double fallback, const std::string& why) {
    if (has(key)) return number(key);
    assume(key, fmt(fallback) + (why.empty() ? "" : " (" + why + ")"));
    return fallback;
  }

  int integer(const std::string& key) { return parse_int(text(key), key); }

  Vec3 vec(const std::string& key) {
    const auto parts = split(text(key), ',');
    if (parts.size() != 3) throw ConfigError(key + " needs three comma-separated components");
    return {quantity(key, parts[0]), quantity(key, parts[1]), quantity(key, parts[2])};
  }

  std::vector<double> list(const std::string& key) {
    std::vector<double> v;
    const std::string t = text(key);
    if (trim(t).empty()) return v;
    for (const auto& p : split(t, ',')) v.push_back(quantity(key, p));
    return v;
  }

  void assume(const std::string& key, const std::string& value) { cfg_.assumptions.emplace_back(key, value); }

  void reject_unused() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k) && k.rfind("run.assumed.", 0) != 0) throw ConfigError("unknown key " + k);
    }
  }

  std::vector<std::pair<std::string, std::string>> recorded_assumptions(const ConfigDocument& doc) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : doc.entries)
      if (k.rfind("run.assumed.", 0) == 0) out.emplace_back(k.substr(12), v);
    return out;
  }

private:
  double quantity(const std::string& key, const std::string& raw) {
    const std::string t = trim(raw);
    const auto sp = t.find_first_of(" \t");
    if (sp == std::string::npos) return parse_double(t, key);
    const std::string unit = trim(std::string_view(t).substr(sp));
    if (!system_) throw ConfigError(key + ": unit '" + unit + "' needs run.units = laboratory or nuclear");
    return system_->to_natural(parse_double(std::string_view(t).substr(0, sp), key), unit);
  }

  ScenarioConfig& cfg_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  std::optional<UnitSystem> system_;
};

} // namespace detail

/// Builds a ScenarioConfig; every value not given is defaulted and recorded
/// in `assumptions`.
inline ScenarioConfig config_from_document(const ConfigDocument& doc) {
  ScenarioConfig c;
  detail::Reader r(doc, c);
  c.assumptions = r.recorded_assumptions(doc);
  c.mode = parse_mode(r.text("run.mode"));
  if (r.has("run.units")) {
    c.units = r.text("run.units");
  } else {
    r.assume("run.units", "natural");
  }
  r.set_units(c.units);
  if (r.has("run.preset")) c.preset_name = r.text("run.preset");

  const bool three_d = c.mode == Mode::analytic3d;
  const double sigma = r.number("packet.sigma");
  const double mass = r.number_or("packet.mass", 1.0, "");
  if (three_d) {
    c.packet3d.sigma = sigma;
    c.packet3d.mass = mass;
    c.packet3d.r0 = r.vec("packet.r0");
    if (r.has("packet.q0")) {
      c.packet3d.q0 = r.vec("packet.q0");
    } else {
      r.assume("packet.q0", "0, 0, 0");
    }
    validate(c.packet3d);
  } else {
    c.packet = {sigma, r.number_or("packet.q0", 0.0, ""), r.number("packet.x0"), mass};
    validate(c.packet);
  }

  if (r.has("potential.kind")) {
    c.potential.kind = parse_potential_kind(r.text("potential.kind"));
  } else {
    r.assume("potential.kind", "square");
  }
  c.potential.v0 = r.number("potential.v0");
  c.potential.w = r.number("potential.w");
  validate(c.potential);

  const double t = r.number("grid.t_final");
  GridSpec& g = c.grid;
  g.t_final = t;
  if (r.has("grid.snapshot_times")) g.snapshot_times = r.list("grid.snapshot_times");

  if (three_d) {
    const double m = c.packet3d.mass;
    const double reach = t > 0.0 ? 2.0 * t / (m * c.packet3d.sigma) : 10.0 * c.packet3d.sigma;
    FieldMapSpec& map = c.map;
    map.plane.origin = r.has("grid.plane_origin") ? r.vec("grid.plane_origin") : Vec3{0.0, 0.0, 0.0};
    map.plane.e1 = r.has("grid.plane_e1") ? r.vec("grid.plane_e1") : Vec3{1.0, 0.0, 0.0};
    map.plane.e2 = r.has("grid.plane_e2") ? r.vec("grid.plane_e2") : Vec3{0.0, 1.0, 0.0};
    if (!r.has("grid.plane_origin") && !r.has("grid.plane_e1") && !r.has("grid.plane_e2")) {
      r.assume("grid.plane", "z = 0");
    }
    map.a_min = r.number_or("grid.amin", -reach, "2 t / (m sigma)");
    map.a_max = r.number_or("grid.amax", reach, "2 t / (m sigma)");
    map.b_min = r.number_or("grid.bmin", -reach, "2 t / (m sigma)");
    map.b_max = r.number_or("grid.bmax", reach, "2 t / (m sigma)");
    map.na = r.has("grid.na") ? r.integer("grid.na") : (r.assume("grid.na", "101"), 101);
    map.nb = r.has("grid.nb") ? r.integer("grid.nb") : (r.assume("grid.nb", "101"), 101);
    if (map.na < 1 || map.nb < 1 || !(map.a_max >= map.a_min) || !(map.b_max >= map.b_min)) {
      throw ConfigError("grid: map extents must be ordered and na, nb positive");
    }
    g = GridSpec{-1.0, 1.0, 3, 1.0, t, {}};
  } else {
    const PacketSpec1D& p = c.packet;
    double lo = 0.0, hi = 0.0;
    double dx_default = 0.1;
    std::string range_why;
    switch (c.mode) {
    case Mode::schrodinger1d:
    case Mode::experiment:
      hi = required_half_extent(p, t);
      lo = -hi;
      range_why = "packet reach |x0| + (|q0| + 5/(2 sigma)) t/m + 6 sigma";
      dx_default = 0.1 * p.sigma;
      break;
    case Mode::dirac1d:
      hi = std::abs(p.x0) + t + 6.0 * p.sigma + 10.0;
      lo = -hi;
      range_why = "light-cone reach |x0| + t + 6 sigma + 10";
      dx_default = std::min(0.1, 0.5 * specfun::pi / (4.0 * (std::abs(p.q0) + 9.0 / p.sigma)));
      break;
    case Mode::analytic1d:
      if (!(t > 0.0)) throw ConfigError("analytic1d needs grid.t_final > 0");
      hi = -2.0 * c.potential.w;
      lo = -pattern_half_width(p, c.potential, t);
      range_why = "pattern region [-t k_max / m, -2w]";
      dx_default = p.x0 != 0.0 ? predict_peak_spacing(p, t) / 8.0 : 0.1;
      break;
    default: break;
    }
    g.xmin = r.number_or("grid.xmin", lo, range_why);
    g.xmax = r.number_or("grid.xmax", hi, range_why);
    if (r.has("grid.nx") && r.has("grid.dx")) throw ConfigError("give grid.nx or grid.dx, not both");
    if (r.has("grid.nx")) {
      g.nx = r.integer("grid.nx");
    } else {
      const double dx = r.number_or("grid.dx", dx_default, "");
      if (!(dx > 0.0)) throw ConfigError("grid.dx must be positive");
      // Anchored at xmax: the analytic grid must stay left of -w.
      g.nx = static_cast<int>(std::ceil((g.xmax - g.xmin) / dx - 1e-9)) + 1;
      g.xmin = g.xmax - (g.nx - 1) * dx;
    }
    if (g.nx < 3) throw ConfigError("grid.nx must be at least 3");
    const double dx = (g.xmax - g.xmin) / (g.nx - 1);
    if (c.mode == Mode::dirac1d) {
      g.dt = r.number_or("grid.dt", max_dirac_dt(p.mass, c.potential), "0.1 / (m + |V0|)");
    } else if (c.mode == Mode::analytic1d) {
      g.dt = 1.0;
    } else {
      g.dt = r.number_or("grid.dt", p.mass * dx * dx, "m dx^2");
    }
    validate(g);
  }

  if (r.has("run.peak_lo") || r.has("run.peak_hi")) {
    c.peak_region = std::pair{r.number("run.peak_lo"), r.number("run.peak_hi")};
  }

  if (c.mode == Mode::experiment) {
    DetectorSpec d;
    d.position = r.number("detector.position");
    d.width = r.number_or("detector.width", 0.1, "");
    d.interval = r.number_or("detector.interval", t / 200.0, "t_final / 200");
    c.detector = d;
    c.particle_count = r.number("run.particle_count");
  } else {
    for (const char* k : {"detector.position", "detector.width", "detector.interval", "run.particle_count"})
      if (r.has(k)) throw ConfigError(std::string(k) + " is only used by run.mode = experiment");
  }
  r.reject_unused();
  return c;
}

inline ScenarioConfig parse_config(std::string_view text) { return config_from_document(parse_config_document(text)); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

/// Flat `section.key = value` form of a config with every value explicit.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& c) {
  using detail::fmt;
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("run.mode", std::string(to_string(c.mode)));
  e.emplace_back("run.units", c.units);
  if (c.preset_name) e.emplace_back("run.preset", *c.preset_name);
  if (c.peak_region) {
    e.emplace_back("run.peak_lo", fmt(c.peak_region->first));
    e.emplace_back("run.peak_hi", fmt(c.peak_region->second));
  }
  if (c.particle_count) e.emplace_back("run.particle_count", fmt(*c.particle_count));
  if (c.mode == Mode::analytic3d) {
    e.emplace_back("packet.sigma", fmt(c.packet3d.sigma));
    e.emplace_back("packet.q0", detail::fmt_vec(c.packet3d.q0));
    e.emplace_back("packet.r0", detail::fmt_vec(c.packet3d.r0));
    e.emplace_back("packet.mass", fmt(c.packet3d.mass));
  } else {
    e.emplace_back("packet.sigma", fmt(c.packet.sigma));
    e.emplace_back("packet.q0", fmt(c.packet.q0));
    e.emplace_back("packet.x0", fmt(c.packet.x0));
    e.emplace_back("packet.mass", fmt(c.packet.mass));
  }
  e.emplace_back("potential.kind", std::string(to_string(c.potential.kind)));
  e.emplace_back("potential.v0", fmt(c.potential.v0));
  e.emplace_back("potential.w", fmt(c.potential.w));
  if (c.mode == Mode::analytic3d) {
    e.emplace_back("grid.t_final", fmt(c.grid.t_final));
    e.emplace_back("grid.plane_origin", detail::fmt_vec(c.map.plane.origin));
    e.emplace_back("grid.plane_e1", detail::fmt_vec(c.map.plane.e1));
    e.emplace_back("grid.plane_e2", detail::fmt_vec(c.map.plane.e2));
    e.emplace_back("grid.amin", fmt(c.map.a_min));
    e.emplace_back("grid.amax", fmt(c.map.a_max));
    e.emplace_back("grid.na", std::to_string(c.map.na));
    e.emplace_back("grid.bmin", fmt(c.map.b_min));
    e.emplace_back("grid.bmax", fmt(c.map.b_max));
    e.emplace_back("grid.nb", std::to_string(c.map.nb));
  } else {
    e.emplace_back("grid.xmin", fmt(c.grid.xmin));
    e.emplace_back("grid.xmax", fmt(c.grid.xmax));
    e.emplace_back("grid.nx", std::to_string(c.grid.nx));
    if (c.mode != Mode::analytic1d) e.emplace_back("grid.dt", fmt(c.grid.dt));
    e.emplace_back("grid.t_final", fmt(c.grid.t_final));
    if (!c.grid.snapshot_times.empty()) e.emplace_back("grid.snapshot_times", detail::fmt_list(c.grid.snapshot_times));
  }
  if (c.detector) {
    e.emplace_back("detector.position", fmt(c.detector->position));
    e.emplace_back("detector.width", fmt(c.detector->width));
    e.emplace_back("detector.interval", fmt(c.detector->interval));
  }
  return e;
}

/// Canonical config text. Parsing it back gives an identical ScenarioConfig;
/// assumptions travel as run.assumed.* keys.
inline std::string serialize_config(const ScenarioConfig& c) {
  std::string out, section;
  auto entries = config_entries(c);
  for (const auto& [k, v] : c.assumptions) entries.emplace_back("run.assumed." + k, v);
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    auto rank = [](const std::string& k) {
      const auto s = k.substr(0, k.find('.'));
      return std::find(config_sections().begin(), config_sections().end(), s) - config_sections().begin();
    };
    return rank(a.first) < rank(b.first);
  });
  for (const auto& [k, v] : entries) {
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      out += (section.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

/// Writes through a temporary sibling and renames, so a failed run leaves no
/// half-written file behind.
inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << content;
    if (!out) throw ConfigError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

/// `x,re,im,abs` for scalar fields, `x,re_u,im_u,re_v,im_v,abs` for spinors
/// (abs = |U|, the plotted component).
inline std::string profile_csv(const Profile& p) {
  std::string s = p.spinor() ? "x,re_u,im_u,re_v,im_v,abs\n" : "x,re,im,abs\n";
  char buf[160];
  for (std::size_t j = 0; j < p.x.size(); ++j) {
    const cplx u = p.U[j];
    if (p.spinor()) {
      const cplx v = p.V[j];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x[j], u.real(), u.imag(), v.real(),
                    v.imag(), std::abs(u));
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x[j], u.real(), u.imag(), std::abs(u));
    }
    s += buf;
  }
  return s;
}

/// Row-major plane scan: b outer, a inner, both ascending.
inline std::string field_csv(const FieldMap& f) {
  std::string s = "x,y,abs\n";
  char buf[96];
  for (int j = 0; j < f.spec.nb; ++j)
    for (int i = 0; i < f.spec.na; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.spec.a(i), f.spec.b(j), f.at(i, j));
      s += buf;
    }
  return s;
}

inline std::string detector_csv(const std::vector<DetectorSample>& d) {
  std::string s = "t,counts,total\n";
  char buf[96];
  for (const auto& x : d) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x.t, x.counts, x.total);
    s += buf;
  }
  return s;
}

inline void write_profile_csv(const Profile& p, const std::filesystem::path& path) {
  write_text_file(path, profile_csv(p));
}

/// A parsed CSV: header names and numeric columns.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return columns[i];
    throw ConfigError("CSV has no column '" + std::string(name) + "'");
  }
  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

inline Table parse_csv(std::string_view text) {
  Table t;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, ',');
    if (t.header.empty()) {
      t.header = std::move(cells);
      t.columns.resize(t.header.size());
      continue;
    }
    if (cells.size() != t.header.size()) throw ConfigError("CSV line " + std::to_string(lineno) + ": wrong field count");
    for (std::size_t i = 0; i < cells.size(); ++i)
      t.columns[i].push_back(detail::parse_double(cells[i], "CSV line " + std::to_string(lineno)));
  }
  if (t.header.empty()) throw ConfigError("CSV is empty");
  return t;
}

inline Profile read_profile_csv(const std::filesystem::path& path) {
  const Table t = parse_csv(read_file(path));
  Profile p;
  p.label = path.filename().string();
  p.x = t.column("x");
  const bool spinor = std::find(t.header.begin(), t.header.end(), "re_u") != t.header.end();
  const auto& re = t.column(spinor ? "re_u" : "re");
  const auto& im = t.column(spinor ? "im_u" : "im");
  for (std::size_t j = 0; j < t.rows(); ++j) p.U.emplace_back(re[j], im[j]);
  if (spinor) {
    const auto& rv = t.column("re_v");
    const auto& iv = t.column("im_v");
    for (std::size_t j = 0; j < t.rows(); ++j) p.V.emplace_back(rv[j], iv[j]);
  }
  for (std::size_t j = 1; j < p.x.size(); ++j)
    if (!(p.x[j] > p.x[j - 1])) throw ConfigError(path.string() + ": x is not strictly increasing");
  return p;
}

// ---------------------------------------------------------------------------
// Reports

inline void append_comparison(std::string& s, const ProfileComparison& c) {
  using detail::fmt;
  s += "comparison.max_abs=" + fmt(c.max_abs) + "\n";
  s += "comparison.max_relative_at_peaks=" + fmt(c.max_relative_at_peaks) + "\n";
  s += "comparison.max_peak_offset=" + fmt(c.max_peak_offset) + "\n";
  s += "comparison.peaks_a=" + std::to_string(c.peaks_a) + "\n";
  s += "comparison.peaks_b=" + std::to_string(c.peaks_b) + "\n";
  std::vector<double> offsets;
  for (const auto& m : c.matches) offsets.push_back(m.offset);
  s += "comparison.peak_offsets=" + detail::fmt_list(offsets) + "\n";
}

/// key=value report. Only the final wall_seconds line varies between runs.
inline std::string report_text(const RunRecord& r) {
  using detail::fmt;
  std::string s;
  for (const auto& [k, v] : config_entries(r.config)) s += k + "=" + v + "\n";
  for (const auto& [k, v] : r.config.assumptions) s += k + " assumed=" + v + "\n";
  if (!r.norm_series.empty()) {
    s += "norm.samples=" + std::to_string(r.norm_series.size()) + "\n";
    s += "norm.initial=" + fmt(r.norm_series.front().norm) + "\n";
    s += "norm.final=" + fmt(r.norm_series.back().norm) + "\n";
    s += "norm.max_drift=" + fmt(r.max_norm_drift()) + "\n";
    s += "norm.drift_bound=" + fmt(r.drift_bound) + "\n";
  }
  if (r.peaks) {
    const auto& p = *r.peaks;
    s += "peaks.count=" + std::to_string(p.count) + "\n";
    s += "peaks.positions=" + detail::fmt_list(p.positions) + "\n";
    s += "peaks.spacings=" + detail::fmt_list(p.spacings()) + "\n";
    s += "peaks.window=" + std::to_string(p.rule.window) + "\n";
    s += "peaks.height_fraction=" + fmt(p.rule.height_fraction) + "\n";
    s += "peaks.valley_fraction=" + fmt(p.rule.valley_fraction) + "\n";
  }
  if (r.comparison) append_comparison(s, *r.comparison);
  if (!r.detector_series.empty()) {
    double peak = 0.0, drift = 0.0;
    const double N = r.config.particle_count.value_or(1.0);
    for (const auto& d : r.detector_series) {
      peak = std::max(peak, d.counts);
      drift = std::max(drift, std::abs(d.total / N - 1.0));
    }
    s += "detector.samples=" + std::to_string(r.detector_series.size()) + "\n";
    s += "detector.max_counts=" + fmt(peak) + "\n";
    s += "detector.max_total_deviation=" + fmt(drift) + "\n";
  }
  if (r.field) {
    double top = 0.0;
    for (double v : r.field->values) top = std::max(top, v);
    s += "map.points=" + std::to_string(r.field->values.size()) + "\n";
    s += "map.max=" + fmt(top) + "\n";
  }
  for (const auto& [k, v] : r.metrics) s += k + "=" + v + "\n";
  s += "wall_seconds=" + fmt(r.wall_seconds) + "\n";
  return s;
}

inline void write_report(const RunRecord& r, const std::filesystem::path& path) { write_text_file(path, report_text(r)); }

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const ScenarioConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_config(c))));
  return buf;
}

/// Files a run produces, as (file name, content) pairs named `<stem>_*`.
inline std::vector<std::pair<std::string, std::string>> record_files(const RunRecord& r, const std::string& stem) {
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < r.profiles.size(); ++i) {
    const auto& p = r.profiles[i];
    std::string name;
    if (r.config.mode == Mode::analytic1d) {
      name = i == 0 ? stem + "_profile.csv" : stem + "_" + p.label + ".csv";
    } else if (p.label == "final") {
      name = stem + "_profile.csv";
    } else {
      name = stem + "_t" + wpdiff::detail::num(p.t, 12) + ".csv";
    }
    files.emplace_back(name, profile_csv(p));
  }
  if (r.field) files.emplace_back(stem + "_map.csv", field_csv(*r.field));
  if (!r.detector_series.empty()) files.emplace_back(stem + "_detector.csv", detector_csv(r.detector_series));
  files.emplace_back(stem + "_report.txt", report_text(r));
  return files;
}

inline void write_record(const RunRecord& r, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : record_files(r, stem)) write_text_file(dir / name, content);
}

} // namespace wpdiff::io
