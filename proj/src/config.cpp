#include "kdvdet/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace kdv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& name, int line, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  double x = std::strtod(s, &end);
  if (end == s || *end != '\0') fail(name, line, "not a number: '" + v + "'");
  return x;
}

int parse_int(const std::string& name, int line, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  long x = std::strtol(s, &end, 10);
  if (end == s || *end != '\0') fail(name, line, "not an integer: '" + v + "'");
  return static_cast<int>(x);
}

bool parse_bool(const std::string& name, int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(name, line, "not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& name, int line, const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(name, line, tok));
  if (out.empty()) fail(name, line, "empty list");
  return out;
}

// One potential term: "<family> key=value ...".
Potential parse_term(const std::string& name, int line, const std::string& v) {
  std::istringstream ss(v);
  std::string family;
  ss >> family;
  std::map<std::string, double> kv;
  std::string tok;
  while (ss >> tok) {
    std::size_t eq = tok.find('=');
    if (eq == std::string::npos) fail(name, line, "expected key=value, got '" + tok + "'");
    std::string key = tok.substr(0, eq);
    if (kv.count(key)) fail(name, line, "duplicate parameter '" + key + "'");
    kv[key] = parse_double(name, line, tok.substr(eq + 1));
  }
  auto take = [&](const char* key, std::optional<double> dflt = {}) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (!dflt) fail(name, line, std::string("missing parameter '") + key + "'");
      return *dflt;
    }
    double x = it->second;
    kv.erase(it);
    return x;
  };
  Potential p;
  if (family == "sech") {
    SechWell w;
    w.depth = take("depth");
    w.width = take("width", 1.0);
    w.center = take("center", 0.0);
    p = Potential(w);
  } else if (family == "square") {
    SquareWell w;
    w.depth = take("depth");
    w.lo = take("lo");
    w.hi = take("hi");
    if (!(w.lo < w.hi)) fail(name, line, "square well needs lo < hi");
    p = Potential(w);
  } else if (family == "gaussian") {
    GaussianWell w;
    w.depth = take("depth");
    w.center = take("center", 0.0);
    w.sigma = take("sigma", 1.0);
    p = Potential(w);
  } else if (family == "slow_decay") {
    SlowDecayTail w;
    w.c = take("c");
    w.p = take("p", 4.0);
    p = Potential(w);
  } else if (family == "left_osc") {
    LeftOscillation w;
    w.amplitude = take("amplitude");
    w.wavenumber = take("wavenumber", 2.0);
    p = Potential(w);
  } else {
    fail(name, line, "unknown potential family '" + family + "'");
  }
  if (!kv.empty()) fail(name, line, "unknown parameter '" + kv.begin()->first + "'");
  return p;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::vector<Potential> terms;
  std::vector<std::string> term_lines;
  std::optional<double> truncate_left, pot_shift;

  static const std::map<std::string, std::vector<std::string>> known = {
      {"potential", {"term", "truncate_left", "shift"}},
      {"kgrid", {"k_min", "k_max", "n_half"}},
      {"scattering", {"tail_tol", "ode_rel_tol", "ode_abs_tol"}},
      {"disc", {"L_s", "n_quad", "tail_cut", "rad_budget", "n_cheb", "gap_nodes"}},
      {"solve",
       {"x_min", "x_max", "n_x", "times", "cross_check", "fd_step", "residual_bound",
        "residual_dt"}},
      {"converge", {"x", "t", "n_quad", "truncations"}},
      {"compare", {"t", "split_dt", "split_modes", "box_length"}},
      {"run", {"mode", "workers"}},
  };

  std::istringstream ss(text);
  std::string raw, section;
  int line = 0;
  std::map<std::string, int> seen;  // "section.key" -> first line
  bool have_mode = false;

  while (std::getline(ss, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(name, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!known.count(section)) fail(name, line, "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(name, line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (section.empty()) fail(name, line, "key outside any section");
    const std::vector<std::string>& keys = known.at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      fail(name, line, "unknown key '" + key + "' in [" + section + "]");
    if (key != "term") {  // term may repeat
      std::string id = section + "." + key;
      if (seen.count(id))
        fail(name, line, "duplicate key '" + key + "' (first at line " +
                             std::to_string(seen[id]) + ")");
      seen[id] = line;
    }
    if (val.empty()) fail(name, line, "empty value for '" + key + "'");

    if (section == "potential") {
      if (key == "term") {
        terms.push_back(parse_term(name, line, val));
        term_lines.push_back(val);
      } else if (key == "truncate_left") {
        truncate_left = parse_double(name, line, val);
      } else {
        pot_shift = parse_double(name, line, val);
      }
    } else if (section == "kgrid") {
      if (key == "k_min") cfg.kgrid.k_min = parse_double(name, line, val);
      else if (key == "k_max") cfg.kgrid.k_max = parse_double(name, line, val);
      else cfg.kgrid.n_half = parse_int(name, line, val);
    } else if (section == "scattering") {
      if (key == "tail_tol") cfg.scat.tail_tol = parse_double(name, line, val);
      else if (key == "ode_rel_tol") cfg.scat.ode_rel_tol = parse_double(name, line, val);
      else cfg.scat.ode_abs_tol = parse_double(name, line, val);
    } else if (section == "disc") {
      if (key == "L_s") cfg.disc.L_s = parse_double(name, line, val);
      else if (key == "n_quad") cfg.disc.n_quad = parse_int(name, line, val);
      else if (key == "tail_cut") cfg.disc.tail_cut = parse_double(name, line, val);
      else if (key == "rad_budget") cfg.disc.rad_budget = parse_double(name, line, val);
      else if (key == "n_cheb") cfg.disc.n_cheb = parse_int(name, line, val);
      else cfg.disc.gap_nodes = parse_int(name, line, val);
    } else if (section == "solve") {
      if (key == "x_min") cfg.x_min = parse_double(name, line, val);
      else if (key == "x_max") cfg.x_max = parse_double(name, line, val);
      else if (key == "n_x") cfg.n_x = parse_int(name, line, val);
      else if (key == "times") cfg.times = parse_list(name, line, val);
      else if (key == "cross_check") cfg.cross_check = parse_bool(name, line, val);
      else if (key == "fd_step") cfg.fd_step = parse_double(name, line, val);
      else if (key == "residual_bound") cfg.residual_bound = parse_double(name, line, val);
      else cfg.residual_dt = parse_double(name, line, val);
    } else if (section == "converge") {
      if (key == "x") cfg.probe_x = parse_double(name, line, val);
      else if (key == "t") cfg.probe_t = parse_double(name, line, val);
      else if (key == "n_quad") cfg.n_quad_base = parse_int(name, line, val);
      else cfg.truncations = parse_list(name, line, val);
    } else if (section == "compare") {
      if (key == "t") cfg.compare_t = parse_double(name, line, val);
      else if (key == "split_dt") cfg.split_dt = parse_double(name, line, val);
      else if (key == "split_modes") cfg.split_modes = parse_int(name, line, val);
      else cfg.box_length = parse_double(name, line, val);
    } else {  // run
      if (key == "mode") {
        if (val != "scatter" && val != "solve" && val != "converge" && val != "compare")
          fail(name, line, "mode must be scatter|solve|converge|compare");
        cfg.mode = val;
        have_mode = true;
      } else {
        cfg.workers = parse_int(name, line, val);
        if (cfg.workers < 0) fail(name, line, "workers must be >= 0");
      }
    }
  }

  if (!have_mode) throw ConfigError(name + ": missing [run] mode");
  if (terms.empty()) throw ConfigError(name + ": missing [potential] term");
  cfg.potential = terms.size() == 1 ? terms[0] : sum_of(std::move(terms));
  if (truncate_left) cfg.potential = cfg.potential.truncate_left(*truncate_left);
  if (pot_shift) cfg.potential = cfg.potential.shift(*pot_shift);
  std::ostringstream pt;
  for (std::size_t i = 0; i < term_lines.size(); ++i)
    pt << (i ? " + " : "") << term_lines[i];
  cfg.potential_text = pt.str();

  if (!(cfg.kgrid.k_min > 0) || !(cfg.kgrid.k_max > cfg.kgrid.k_min) || cfg.kgrid.n_half < 8)
    throw ConfigError(name + ": [kgrid] needs 0 < k_min < k_max and n_half >= 8");
  if (cfg.n_x < 2) throw ConfigError(name + ": [solve] n_x must be >= 2");
  if (cfg.disc.n_quad < 8) throw ConfigError(name + ": [disc] n_quad must be >= 8");
  if (cfg.mode == "compare" && !(cfg.compare_t > 0))
    throw ConfigError(name + ": [compare] t must be > 0");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace kdv
