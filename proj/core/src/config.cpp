#include "pq/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

namespace pq {

namespace {

enum class Dim { none, length, frequency, frequency_hz, time, angle, mass, moment, acceleration, permeability };

struct UnitDef {
  std::string_view name;
  double factor;  // value * factor = canonical
};

const std::vector<UnitDef>& units_for(Dim d) {
  static const std::map<Dim, std::vector<UnitDef>> table = {
      {Dim::length, {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}}},
      // angular frequency, stored in rad/s
      {Dim::frequency, {{"rad/s", 1.0}, {"1/s", 1.0}, {"Hz", kTwoPi}, {"mHz", kTwoPi * 1e-3}}},
      // plain frequency, stored in Hz
      {Dim::frequency_hz, {{"Hz", 1.0}, {"mHz", 1e-3}, {"rad/s", 1.0 / kTwoPi}}},
      {Dim::time, {{"s", 1.0}, {"ms", 1e-3}, {"min", 60.0}}},
      {Dim::angle, {{"rad", 1.0}, {"mrad", 1e-3}, {"deg", kPi / 180.0}}},
      {Dim::mass, {{"kg", 1.0}, {"g", 1e-3}}},
      {Dim::moment, {{"A*m^2", 1.0}}},
      {Dim::acceleration, {{"m/s^2", 1.0}}},
      {Dim::permeability, {{"T*m/A", 1.0}, {"H/m", 1.0}}},
  };
  static const std::vector<UnitDef> none;
  auto it = table.find(d);
  return it == table.end() ? none : it->second;
}

std::string unit_list(Dim d) {
  std::string out;
  for (const auto& u : units_for(d)) out += (out.empty() ? "" : ", ") + std::string(u.name);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Key {
  std::string name;
  Dim dim = Dim::none;
  // Exactly one of these kinds is set.
  std::function<double&(Config&)> real;
  std::function<std::optional<double>&(Config&)> optional_real;
  std::function<int&(Config&)> integer;
  std::function<bool&(Config&)> flag;
  std::function<void(Config&, std::string_view)> text_set;
  std::function<std::string(const Config&)> text_get;
};

struct Section {
  std::string name;
  std::vector<Key> keys;
};

template <class F>
Key real(std::string name, Dim dim, F f) {
  Key k;
  k.name = std::move(name);
  k.dim = dim;
  k.real = f;
  return k;
}
template <class F>
Key opt(std::string name, Dim dim, F f) {
  Key k;
  k.name = std::move(name);
  k.dim = dim;
  k.optional_real = f;
  return k;
}
template <class F>
Key integer(std::string name, F f) {
  Key k;
  k.name = std::move(name);
  k.integer = f;
  return k;
}
template <class F>
Key flag(std::string name, F f) {
  Key k;
  k.name = std::move(name);
  k.flag = f;
  return k;
}
template <class Get, class Parse, class Format>
Key text(std::string name, Get get, Parse parse, Format format) {
  Key k;
  k.name = std::move(name);
  k.text_set = [get, parse](Config& c, std::string_view v) { get(c) = parse(v); };
  k.text_get = [get, format](const Config& c) { return std::string(format(get(const_cast<Config&>(c)))); };
  return k;
}

Key engine_key(std::function<Engine&(Config&)> get) {
  return text("engine", get, engine_from_string, [](Engine e) { return to_string(e); });
}

#define ACC(expr) [](Config& c) -> auto& { return c.expr; }

const std::vector<Section>& schema() {
  static const std::vector<Section> sections = {
      {"apparatus",
       {
           real("mass", Dim::mass, ACC(apparatus.pendula.mass)),
           real("f1", Dim::frequency, ACC(apparatus.pendula.omega1)),
           real("f2", Dim::frequency, ACC(apparatus.pendula.omega2)),
           real("lc1", Dim::length, ACC(apparatus.pendula.lc1)),
           real("lc2", Dim::length, ACC(apparatus.pendula.lc2)),
           real("l_lower", Dim::length, ACC(apparatus.pendula.l_lower)),
           real("l_upper", Dim::length, ACC(apparatus.pendula.l_upper)),
           real("m_lower", Dim::moment, ACC(apparatus.magnets.m_lower)),
           real("m_upper", Dim::moment, ACC(apparatus.magnets.m_upper)),
           flag("upper_present", ACC(apparatus.magnets.upper_present)),
           real("L", Dim::length, ACC(apparatus.magnets.L)),
           real("L_upper", Dim::length, ACC(apparatus.magnets.L_upper)),
           real("Omega", Dim::frequency, ACC(apparatus.magnets.Omega)),
           real("g", Dim::acceleration, ACC(apparatus.consts.g)),
           real("mu0", Dim::permeability, ACC(apparatus.consts.mu0)),
       }},
      {"run", {integer("threads", ACC(run.threads))}},
      {"simulate",
       {
           engine_key(ACC(simulate.engine)),
           real("duration", Dim::time, ACC(simulate.duration)),
           real("newton_dt", Dim::time, ACC(simulate.newton_dt)),
           real("output_dt", Dim::time, ACC(simulate.output_dt)),
           text("init", ACC(simulate.init.kind), init_kind_from_string,
                [](InitialCondition::Kind k) { return to_string(k); }),
           real("amplitude", Dim::angle, ACC(simulate.init.amplitude)),
           real("relative_phase", Dim::angle, ACC(simulate.init.relative_phase)),
           text("basis", ACC(simulate.basis), basis_from_string, [](Basis b) { return to_string(b); }),
           text("drive", ACC(simulate.drive), drive_source_from_string, [](DriveSource d) { return to_string(d); }),
           real("eps0", Dim::frequency, ACC(simulate.eps0)),
           real("A", Dim::frequency, ACC(simulate.A)),
           opt("Omega", Dim::frequency, ACC(simulate.Omega)),
       }},
      {"rabi",
       {
           engine_key(ACC(rabi.engine)),
           opt("Omega", Dim::frequency, ACC(rabi.Omega)),
           opt("Omega_R", Dim::frequency, ACC(rabi.Omega_R)),
           real("eps0", Dim::frequency, ACC(rabi.eps0)),
           real("detuning_span", Dim::none, ACC(rabi.detuning_span)),
           integer("points", ACC(rabi.points)),
           real("rabi_periods", Dim::none, ACC(rabi.rabi_periods)),
           real("newton_dt", Dim::time, ACC(rabi.newton_dt)),
       }},
      {"lz",
       {
           engine_key(ACC(lz.engine)),
           real("Delta", Dim::frequency, ACC(lz.Delta)),
           real("Omega", Dim::frequency, ACC(lz.Omega)),
           real("eps0", Dim::frequency, ACC(lz.eps0)),
           opt("A", Dim::frequency, ACC(lz.A)),
           real("target_P_LZ", Dim::none, ACC(lz.target_P_LZ)),
           opt("omega0", Dim::frequency, ACC(lz.omega0)),
           real("amplitude", Dim::angle, ACC(lz.amplitude)),
           real("relative_phase", Dim::angle, ACC(lz.relative_phase)),
           integer("phase_scan", ACC(lz.phase_scan)),
           opt("window_half_width", Dim::time, ACC(lz.window_half_width)),
           real("newton_dt", Dim::time, ACC(lz.newton_dt)),
           real("sample_dt", Dim::time, ACC(lz.sample_dt)),
       }},
      {"fan",
       {
           engine_key(ACC(fan.engine)),
           real("Delta", Dim::frequency, ACC(fan.Delta)),
           real("Omega", Dim::frequency, ACC(fan.Omega)),
           opt("omega0", Dim::frequency, ACC(fan.omega0)),
           real("eps0_min", Dim::frequency, ACC(fan.eps0_min)),
           real("eps0_max", Dim::frequency, ACC(fan.eps0_max)),
           real("A_min", Dim::frequency, ACC(fan.A_min)),
           real("A_max", Dim::frequency, ACC(fan.A_max)),
           integer("eps0_points", ACC(fan.eps0_points)),
           integer("A_points", ACC(fan.A_points)),
           integer("periods", ACC(fan.periods)),
           real("relative_phase", Dim::angle, ACC(fan.relative_phase)),
           real("amplitude", Dim::angle, ACC(fan.amplitude)),
           real("newton_dt", Dim::time, ACC(fan.newton_dt)),
       }},
      {"spectra",
       {
           engine_key(ACC(spectra.engine)),
           text("regime", ACC(spectra.regime), spectra_regime_from_string,
                [](SpectraRegime r) { return to_string(r); }),
           opt("Delta", Dim::frequency, ACC(spectra.Delta)),
           opt("Omega", Dim::frequency, ACC(spectra.Omega)),
           opt("eps0", Dim::frequency, ACC(spectra.eps0)),
           opt("A", Dim::frequency, ACC(spectra.A)),
           opt("omega0", Dim::frequency, ACC(spectra.omega0)),
           opt("duration", Dim::time, ACC(spectra.duration)),
           opt("smoothing_sigma", Dim::frequency_hz, ACC(spectra.smoothing_sigma)),
           real("amplitude", Dim::angle, ACC(spectra.amplitude)),
           real("newton_dt", Dim::time, ACC(spectra.newton_dt)),
       }},
      {"eigencheck",
       {
           real("f_split", Dim::frequency_hz, ACC(eigencheck.f_split)),
           real("eps_max_ratio", Dim::none, ACC(eigencheck.eps_max_ratio)),
           integer("points", ACC(eigencheck.points)),
       }},
      {"signal",
       {
           opt("lowpass_sigma", Dim::time, ACC(signal.lowpass_sigma)),
           opt("husimi_sigma", Dim::time, ACC(signal.husimi_sigma)),
           real("peak_threshold", Dim::none, ACC(signal.peak_threshold)),
       }},
  };
  return sections;
}

#undef ACC

std::string canonical_unit(Dim d) {
  const auto& u = units_for(d);
  return u.empty() ? std::string() : std::string(u.front().name);
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& where, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + where + (where.empty() ? "" : ": ") + what);
  }

  double number(std::string_view s, int line, const std::string& where) const {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) fail(line, where, "invalid number '" + std::string(s) + "'");
    return v;
  }

  // Splits "1.5 mm" into number and unit; the unit may be empty.
  std::pair<double, std::string_view> quantity(std::string_view s, int line, const std::string& where) const {
    const auto cut = s.find_first_of(" \t");
    const std::string_view num = cut == std::string_view::npos ? s : s.substr(0, cut);
    const std::string_view unit = cut == std::string_view::npos ? std::string_view{} : trim(s.substr(cut));
    return {number(num, line, where), unit};
  }

  void assign(Config& c, const Key& key, std::string_view value, int line, const std::string& where) const {
    if (key.text_set) {
      try {
        key.text_set(c, value);
      } catch (const Error& e) {
        fail(line, where, e.what());
      }
      return;
    }
    if (key.flag) {
      if (value == "true") key.flag(c) = true;
      else if (value == "false") key.flag(c) = false;
      else fail(line, where, "expected true or false, got '" + std::string(value) + "'");
      return;
    }
    if (key.integer) {
      int v = 0;
      const auto* end = value.data() + value.size();
      auto [p, ec] = std::from_chars(value.data(), end, v);
      if (ec != std::errc() || p != end) fail(line, where, "expected an integer, got '" + std::string(value) + "'");
      key.integer(c) = v;
      return;
    }
    auto [v, unit] = quantity(value, line, where);
    double scaled = v;
    if (key.dim == Dim::none) {
      if (!unit.empty()) fail(line, where, "dimensionless value takes no unit, got '" + std::string(unit) + "'");
    } else {
      if (unit.empty()) fail(line, where, "missing unit (expected one of " + unit_list(key.dim) + ")");
      const auto& list = units_for(key.dim);
      auto it = std::find_if(list.begin(), list.end(), [&](const UnitDef& u) { return u.name == unit; });
      if (it == list.end()) {
        fail(line, where, "unit '" + std::string(unit) + "' not allowed (expected one of " + unit_list(key.dim) + ")");
      }
      scaled = v * it->factor;
    }
    if (key.real) key.real(c) = scaled;
    else key.optional_real(c) = scaled;
  }

  Config parse(std::istream& in) const {
    Config c;
    const Section* section = nullptr;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "", "malformed section header '" + std::string(s) + "'");
        const std::string name(trim(s.substr(1, s.size() - 2)));
        const auto& all = schema();
        auto it = std::find_if(all.begin(), all.end(), [&](const Section& sec) { return sec.name == name; });
        if (it == all.end()) fail(line, "[" + name + "]", "unknown section");
        section = &*it;
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) fail(line, "", "expected 'key = value', got '" + std::string(s) + "'");
      const std::string key(trim(s.substr(0, eq)));
      const std::string_view value = trim(s.substr(eq + 1));
      if (!section) fail(line, key, "key outside of any section");
      const std::string where = "[" + section->name + "] " + key;
      auto it = std::find_if(section->keys.begin(), section->keys.end(), [&](const Key& k) { return k.name == key; });
      if (it == section->keys.end()) fail(line, where, "unknown key");
      if (!seen.insert(section->name + "." + key).second) fail(line, where, "duplicate key");
      if (value.empty()) fail(line, where, "missing value");
      assign(c, *it, value, line, where);
    }
    try {
      validate(c);
    } catch (const ConfigError& e) {
      throw ConfigError(source_ + ": " + e.what());
    }
    return c;
  }

 private:
  std::string source_;
};

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(Error::Category::numerical, "cannot format number");
  return std::string(buf, p);
}

void validate(const Config& c) {
  try {
    c.apparatus.validate();
  } catch (const DomainError& e) {
    // validate() names the field, which matches the key name.
    throw ConfigError(std::string("[apparatus] ") + e.what());
  }
  require(c.run.threads >= 0, "[run] threads", "must be >= 0");

  const auto& s = c.simulate;
  require(s.duration > 0.0, "[simulate] duration", "must be positive");
  require(s.newton_dt > 0.0, "[simulate] newton_dt", "must be positive");
  require(s.output_dt >= s.newton_dt, "[simulate] output_dt", "must be >= newton_dt");
  require(std::abs(s.init.amplitude) < 0.5, "[simulate] amplitude", "must be below 0.5 rad");
  require(!s.Omega || *s.Omega >= 0.0, "[simulate] Omega", "must be non-negative");

  const auto& r = c.rabi;
  require(!r.Omega || *r.Omega > 0.0, "[rabi] Omega", "must be positive");
  require(!r.Omega_R || *r.Omega_R > 0.0, "[rabi] Omega_R", "must be positive");
  require(r.detuning_span >= 0.0, "[rabi] detuning_span", "must be non-negative");
  require(r.points >= 1, "[rabi] points", "must be >= 1");
  require(r.rabi_periods > 0.0, "[rabi] rabi_periods", "must be positive");
  require(r.newton_dt > 0.0, "[rabi] newton_dt", "must be positive");

  const auto& l = c.lz;
  require(l.Omega > 0.0, "[lz] Omega", "must be positive");
  require(l.target_P_LZ > 0.0 && l.target_P_LZ < 1.0, "[lz] target_P_LZ", "must lie in (0, 1)");
  require(!l.A || *l.A >= 0.0, "[lz] A", "must be non-negative");
  require(!l.A || *l.A >= std::abs(l.eps0), "[lz] A", "must reach the crossing (A >= |eps0|)");
  require(!l.omega0 || *l.omega0 > 0.0, "[lz] omega0", "must be positive");
  require(l.phase_scan >= 0, "[lz] phase_scan", "must be >= 0");
  require(!l.window_half_width || *l.window_half_width > 0.0, "[lz] window_half_width", "must be positive");
  require(l.newton_dt > 0.0, "[lz] newton_dt", "must be positive");
  require(l.sample_dt >= l.newton_dt, "[lz] sample_dt", "must be >= newton_dt");

  const auto& f = c.fan;
  require(f.Omega > 0.0, "[fan] Omega", "must be positive");
  require(!f.omega0 || *f.omega0 > 0.0, "[fan] omega0", "must be positive");
  require(f.eps0_max >= f.eps0_min, "[fan] eps0_max", "must be >= eps0_min");
  require(f.A_min >= 0.0, "[fan] A_min", "must be non-negative");
  require(f.A_max >= f.A_min, "[fan] A_max", "must be >= A_min");
  require(f.eps0_points >= 1, "[fan] eps0_points", "must be >= 1");
  require(f.A_points >= 1, "[fan] A_points", "must be >= 1");
  require(f.periods >= 1, "[fan] periods", "must be >= 1");
  require(f.newton_dt > 0.0, "[fan] newton_dt", "must be positive");

  const auto& p = c.spectra;
  require(!p.Omega || *p.Omega >= 0.0, "[spectra] Omega", "must be non-negative");
  require(!p.omega0 || *p.omega0 > 0.0, "[spectra] omega0", "must be positive");
  require(!p.duration || *p.duration > 0.0, "[spectra] duration", "must be positive");
  require(!p.smoothing_sigma || *p.smoothing_sigma >= 0.0, "[spectra] smoothing_sigma", "must be non-negative");
  require(p.newton_dt > 0.0, "[spectra] newton_dt", "must be positive");

  const auto& e = c.eigencheck;
  require(e.eps_max_ratio > 0.0, "[eigencheck] eps_max_ratio", "must be positive");
  require(e.points >= 1, "[eigencheck] points", "must be >= 1");
  require(std::abs(e.f_split) < 0.1 * rad_to_hz(c.apparatus.omega0()), "[eigencheck] f_split",
          "must be below 10% of the mean pendulum frequency");

  const auto& g = c.signal;
  require(!g.lowpass_sigma || *g.lowpass_sigma > 0.0, "[signal] lowpass_sigma", "must be positive");
  require(!g.husimi_sigma || *g.husimi_sigma > 0.0, "[signal] husimi_sigma", "must be positive");
  require(g.peak_threshold >= 0.0 && g.peak_threshold < 1.0, "[signal] peak_threshold", "must lie in [0, 1)");
}

Config parse_config(std::istream& in, const std::string& source) { return Parser(source).parse(in); }

Config parse_config_string(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_config(in, source);
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::string serialize(const Config& config) {
  Config c = config;
  std::ostringstream out;
  bool first = true;
  for (const auto& sec : schema()) {
    if (!first) out << '\n';
    first = false;
    out << '[' << sec.name << "]\n";
    for (const auto& k : sec.keys) {
      std::string value;
      if (k.text_get) {
        value = k.text_get(c);
      } else if (k.flag) {
        value = k.flag(c) ? "true" : "false";
      } else if (k.integer) {
        value = std::to_string(k.integer(c));
      } else {
        const std::optional<double> v = k.real ? std::optional<double>(k.real(c)) : k.optional_real(c);
        if (!v) continue;  // derived at run time
        double shown = *v;
        if (k.dim != Dim::none) shown /= units_for(k.dim).front().factor;
        value = format_double(shown);
        if (k.dim != Dim::none) value += " " + canonical_unit(k.dim);
      }
      out << k.name << " = " << value << '\n';
    }
  }
  return out.str();
}

std::vector<double> fan_eps0_grid(const FanSettings& s) {
  return linspace(s.eps0_min, s.eps0_max, static_cast<std::size_t>(s.eps0_points));
}

std::vector<double> fan_A_grid(const FanSettings& s) {
  return linspace(s.A_min, s.A_max, static_cast<std::size_t>(s.A_points));
}

std::vector<double> eigencheck_eps_grid(const EigencheckSettings& s, double omega0) {
  const double m = s.eps_max_ratio * omega0;
  return linspace(-m, m, static_cast<std::size_t>(s.points));
}

}  // namespace pq
