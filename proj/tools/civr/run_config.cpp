#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "civr/io.hpp"

namespace civr::cli {

namespace {

std::string where(const std::string& source, int line) {
  return line > 0 ? source + ":" + std::to_string(line) : source;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Location {
  std::string source;
  int line = 0;
};

// Raised inside value parsers; rethrown with the location of the key.
struct BadValue {
  std::string msg;
};

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) throw BadValue{"'" + s + "' is not a number"};
  if (!std::isfinite(v)) throw BadValue{"'" + s + "' is not finite"};
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw BadValue{"'" + s + "' is not a non-negative integer"};
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw BadValue{"'" + s + "' is not a boolean"};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  return out;
}

std::string print_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + io::fmt(v[i]);
  return out;
}

std::string print_bool(bool b) { return b ? "true" : "false"; }

struct Key {
  const char* section;
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CIVR_DOUBLE(sec, key, member)                                              \
  Key {                                                                            \
    sec, key, [](RunConfig& c, const std::string& v) { c.member = parse_double(v); }, \
        [](const RunConfig& c) { return io::fmt(c.member); }                       \
  }
#define CIVR_COUNT(sec, key, member)                                              \
  Key {                                                                           \
    sec, key, [](RunConfig& c, const std::string& v) { c.member = parse_count(v); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }               \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      CIVR_DOUBLE("system", "Omega", system.Omega),
      CIVR_DOUBLE("system", "lambda", system.lambda),
      CIVR_DOUBLE("system", "b", system.scaling.b),
      CIVR_DOUBLE("system", "hbar", system.scaling.hbar),
      CIVR_DOUBLE("packet", "q0", q0),
      CIVR_DOUBLE("packet", "p0", p0),
      Key{"propagation", "times", [](RunConfig& c, const std::string& v) { c.times = parse_list(v); },
          [](const RunConfig& c) { return print_list(c.times); }},
      Key{"propagation", "a", [](RunConfig& c, const std::string& v) { c.a = parse_list(v); },
          [](const RunConfig& c) { return print_list(c.a); }},
      Key{"propagation", "c", [](RunConfig& c, const std::string& v) { c.c = parse_list(v); },
          [](const RunConfig& c) { return print_list(c.c); }},
      Key{"propagation", "mode",
          [](RunConfig& c, const std::string& v) {
            if (v == "smooth") c.mode = CivrMode::smooth;
            else if (v == "sudden") c.mode = CivrMode::sudden;
            else throw BadValue{"mode must be 'smooth' or 'sudden', got '" + v + "'"};
          },
          [](const RunConfig& c) { return std::string(to_string(c.mode)); }},
      CIVR_DOUBLE("propagation", "epsilon", epsilon),
      Key{"propagation", "quadrature",
          [](RunConfig& c, const std::string& v) {
            if (v == "riemann") c.quadrature = Quadrature::riemann;
            else if (v == "trapezoid") c.quadrature = Quadrature::trapezoid;
            else throw BadValue{"quadrature must be 'riemann' or 'trapezoid', got '" + v + "'"};
          },
          [](const RunConfig& c) { return std::string(to_string(c.quadrature)); }},
      CIVR_DOUBLE("propagation", "dt", dt),
      Key{"propagation", "renormalize",
          [](RunConfig& c, const std::string& v) { c.renormalize = parse_bool(v); },
          [](const RunConfig& c) { return print_bool(c.renormalize); }},
      Key{"propagation", "dump_trajectories",
          [](RunConfig& c, const std::string& v) { c.dump_trajectories = parse_bool(v); },
          [](const RunConfig& c) { return print_bool(c.dump_trajectories); }},
      CIVR_DOUBLE("propagation", "max_invalid_fraction", max_invalid_fraction),
      CIVR_DOUBLE("launch_grid", "q_min", launch_grid.q.lo),
      CIVR_DOUBLE("launch_grid", "q_max", launch_grid.q.hi),
      CIVR_COUNT("launch_grid", "n_q", launch_grid.q.n),
      CIVR_DOUBLE("launch_grid", "p_min", launch_grid.p.lo),
      CIVR_DOUBLE("launch_grid", "p_max", launch_grid.p.hi),
      CIVR_COUNT("launch_grid", "n_p", launch_grid.p.n),
      CIVR_DOUBLE("target_grid", "q_min", target_grid.q.lo),
      CIVR_DOUBLE("target_grid", "q_max", target_grid.q.hi),
      CIVR_COUNT("target_grid", "n_q", target_grid.q.n),
      CIVR_DOUBLE("target_grid", "p_min", target_grid.p.lo),
      CIVR_DOUBLE("target_grid", "p_max", target_grid.p.hi),
      CIVR_COUNT("target_grid", "n_p", target_grid.p.n),
      CIVR_DOUBLE("position_grid", "x_min", x_min),
      CIVR_DOUBLE("position_grid", "x_max", x_max),
      CIVR_COUNT("position_grid", "n_x", n_x),
      CIVR_DOUBLE("reference", "dt", reference_dt),
      CIVR_DOUBLE("scan", "a_min", scan.a_min),
      CIVR_DOUBLE("scan", "a_max", scan.a_max),
      CIVR_COUNT("scan", "steps", scan.steps),
  };
  return table;
}

#undef CIVR_DOUBLE
#undef CIVR_COUNT

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys())
    if (section == k.section && name == k.name) return &k;
  return nullptr;
}

bool known_section(const std::string& s) {
  return std::any_of(keys().begin(), keys().end(), [&](const Key& k) { return s == k.section; });
}

class Validator {
 public:
  Validator(const std::map<std::string, Location>& locs) : locs_(locs) {}

  void require(bool ok, const std::string& key, const std::string& msg) const {
    if (ok) return;
    const auto it = locs_.find(key);
    if (it == locs_.end()) throw ConfigError("<config>", 0, key + ": " + msg);
    throw ConfigError(it->second.source, it->second.line, key + ": " + msg);
  }

 private:
  const std::map<std::string, Location>& locs_;
};

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

void validate(const RunConfig& c, const Validator& v) {
  v.require(c.system.scaling.b > 0.0, "system.b", "must be positive");
  v.require(c.system.scaling.hbar > 0.0, "system.hbar", "must be positive");
  v.require(c.system.Omega >= 0.0, "system.Omega", "must be non-negative");
  v.require(c.system.lambda >= 0.0, "system.lambda", "must be non-negative");
  for (double T : c.times) v.require(T >= 0.0, "propagation.times", "times must be non-negative");
  const auto per_time = [&](const std::vector<double>& xs, const char* key) {
    v.require(xs.size() == 1 || xs.size() == c.times.size() || c.times.empty(), key,
              "give one value or one per time (" + std::to_string(c.times.size()) + ")");
    v.require(!xs.empty(), key, "needs at least one value");
  };
  per_time(c.a, "propagation.a");
  per_time(c.c, "propagation.c");
  for (double a : c.a) v.require(a > 0.0, "propagation.a", "widths must be positive");
  v.require(c.epsilon > 0.0, "propagation.epsilon", "must be positive");
  v.require(c.dt > 0.0, "propagation.dt", "must be positive");
  v.require(c.max_invalid_fraction >= 0.0 && c.max_invalid_fraction <= 1.0,
            "propagation.max_invalid_fraction", "must lie in [0, 1]");
  const auto grid = [&](const PhaseGrid& g, const std::string& sec) {
    v.require(g.q.hi > g.q.lo, sec + ".q_max", "must exceed q_min");
    v.require(g.p.hi > g.p.lo, sec + ".p_max", "must exceed p_min");
    v.require(g.q.n >= 2, sec + ".n_q", "must be at least 2");
    v.require(g.p.n >= 2, sec + ".n_p", "must be at least 2");
  };
  grid(c.launch_grid, "launch_grid");
  grid(c.target_grid, "target_grid");
  v.require(c.x_max > c.x_min, "position_grid.x_max", "must exceed x_min");
  v.require(power_of_two(c.n_x), "position_grid.n_x", "must be a power of two");
  v.require(c.reference_dt > 0.0, "reference.dt", "must be positive");
  v.require(c.scan.a_min > 0.0, "scan.a_min", "must be positive");
  v.require(c.scan.a_max >= c.scan.a_min, "scan.a_max", "must be at least a_min");
  v.require(c.scan.steps >= 1, "scan.steps", "must be at least 1");
}

void assign(RunConfig& cfg, std::map<std::string, Location>& locs, const std::string& section,
            const std::string& name, const std::string& value, const Location& loc) {
  const Key* key = find_key(section, name);
  if (!key) throw ConfigError(loc.source, loc.line, "unknown key '" + name + "' in [" + section + "]");
  const std::string full = section + "." + name;
  if (locs.count(full) && locs[full].source == loc.source)
    throw ConfigError(loc.source, loc.line,
                      "duplicate key '" + full + "' (first set on line " +
                          std::to_string(locs[full].line) + ")");
  try {
    key->set(cfg, value);
  } catch (const BadValue& e) {
    throw ConfigError(loc.source, loc.line, full + ": " + e.msg);
  }
  locs[full] = loc;
}

// Per-time a and c left at their defaults follow the default (T, a, c) schedule
// when the time list changes.
void resolve_schedule(RunConfig& cfg, const std::map<std::string, Location>& locs) {
  const RunConfig defaults;
  const auto resolve = [&](std::vector<double>& xs, const std::vector<double>& dflt, const char* key) {
    if (locs.count(std::string("propagation.") + key) || xs.size() == cfg.times.size()) return;
    std::vector<double> out;
    for (double T : cfg.times) {
      const auto it = std::find(defaults.times.begin(), defaults.times.end(), T);
      if (it == defaults.times.end()) {
        const auto loc = locs.count("propagation.times") ? locs.at("propagation.times") : Location{"<config>", 0};
        throw ConfigError(loc.source, loc.line,
                          std::string("propagation.") + key + ": no default for T = " + io::fmt(T) +
                              "; set propagation." + key + " explicitly");
      }
      out.push_back(dflt[static_cast<std::size_t>(it - defaults.times.begin())]);
    }
    xs = out.empty() ? dflt : out;
  };
  resolve(cfg.a, defaults.a, "a");
  resolve(cfg.c, defaults.c, "c");
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(where(source, line) + ": " + msg), line_(line) {}

std::vector<double> ScanRange::values() const {
  if (steps <= 1) return {a_min};
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = a_min + (a_max - a_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

CivrParams RunConfig::civr_for(std::size_t i) const {
  CivrParams p;
  p.a = a_at(i);
  p.c = c_at(i);
  p.grid1 = launch_grid;
  p.mode = mode;
  p.epsilon = epsilon;
  p.quadrature = quadrature;
  p.dt = dt;
  return p;
}

SplitOpConfig RunConfig::reference_for(double T) const {
  SplitOpConfig s;
  s.x_min = x_min;
  s.x_max = x_max;
  s.n_x = n_x;
  s.dt = reference_dt;
  s.T = T;
  return s;
}

const char* to_string(CivrMode m) { return m == CivrMode::smooth ? "smooth" : "sudden"; }
const char* to_string(Quadrature q) { return q == Quadrature::riemann ? "riemann" : "trapezoid"; }

RunConfig parse_config(const std::string& text, const std::string& source,
                       const std::vector<std::string>& overrides) {
  RunConfig cfg;
  std::map<std::string, Location> locs;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) throw ConfigError(source, line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(source, line_no, "key outside of any [section]");
    const std::string name = trim(line.substr(0, eq));
    if (name.empty()) throw ConfigError(source, line_no, "missing key name");
    assign(cfg, locs, section, name, trim(line.substr(eq + 1)), {source, line_no});
  }

  for (std::size_t i = 0; i < overrides.size(); ++i) {
    const Location loc{"override '" + overrides[i] + "'", 0};
    const auto eq = overrides[i].find('=');
    const auto dot = overrides[i].find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError(loc.source, 0, "expected section.key=value");
    locs.erase(trim(overrides[i].substr(0, eq)));
    assign(cfg, locs, trim(overrides[i].substr(0, dot)), trim(overrides[i].substr(dot + 1, eq - dot - 1)),
           trim(overrides[i].substr(eq + 1)), loc);
  }

  resolve_schedule(cfg, locs);
  validate(cfg, Validator(locs));
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path, 0, std::string("invalid manifest JSON: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_string())
      throw ConfigError(path, 0, "manifest has no embedded 'config' text");
    return parse_config(j["config"].get<std::string>(), path + "#config", overrides);
  }
  return parse_config(text, path, overrides);
}

std::string to_ini(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace civr::cli
