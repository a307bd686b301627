// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tevlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

class Reader {
 public:
  Reader(const IniFile& ini, std::string section) : ini_(ini), section_(std::move(section)) {
    auto it = ini.sections.find(section_);
    if (it != ini.sections.end()) values_ = &it->second;
  }

  bool present() const { return values_ != nullptr; }
  int section_line() const {
    auto it = ini_.section_lines.find(section_);
    return it == ini_.section_lines.end() ? ini_.last_line : it->second;
  }

  const IniValue* find(const std::string& key) {
    used_.insert(key);
    if (!values_) return nullptr;
    auto it = values_->find(key);
    return it == values_->end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail(const IniValue& v, const std::string& key, const std::string& what) const {
    throw ConfigError(ini_.path, v.line, "[" + section_ + "] " + key + ": " + what);
  }

  double real(const std::string& key, double fallback) {
    const IniValue* v = find(key);
    if (!v) return fallback;
    return parse_real(*v, key, v->text);
  }

  double parse_real(const IniValue& v, const std::string& key, const std::string& text) const {
    double x = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e) fail(v, key, "expected a number, got '" + text + "'");
    return x;
  }

  double positive(const std::string& key, double fallback) {
    const double x = real(key, fallback);
    if (!(x > 0.0)) fail(*find(key), key, "must be positive");
    return x;
  }

  int integer(const std::string& key, int fallback, int lo, int hi) {
    const IniValue* v = find(key);
    if (!v) return fallback;
    long long x = 0;
    const char* b = v->text.data();
    const char* e = b + v->text.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e) fail(*v, key, "expected an integer, got '" + v->text + "'");
    if (x < lo || x > hi) fail(*v, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  bool boolean(const std::string& key, bool fallback) {
    const IniValue* v = find(key);
    if (!v) return fallback;
    if (v->text == "true" || v->text == "yes" || v->text == "1") return true;
    if (v->text == "false" || v->text == "no" || v->text == "0") return false;
    fail(*v, key, "expected true or false");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const IniValue* v = find(key);
    return v ? v->text : fallback;
  }

  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) {
    const IniValue* v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& w : split_ws(v->text)) out.push_back(parse_real(*v, key, w));
    if (out.empty()) fail(*v, key, "empty list");
    return out;
  }

  /// Rejects keys that were never queried.
  void finish() const {
    if (!values_) return;
    for (const auto& [k, v] : *values_) {
      if (!used_.count(k)) fail(v, k, "unknown key");
    }
  }

 private:
  const IniFile& ini_;
  std::string section_;
  const std::map<std::string, IniValue>* values_ = nullptr;
  std::set<std::string> used_;
};

SymMat2 parse_matrix(Reader& r, const IniValue& v, const std::string& key, const std::vector<std::string>& w) {
  if (w.size() != 3) r.fail(v, key, "a matrix needs three entries a11 a12 a22");
  return {r.parse_real(v, key, w[0]), r.parse_real(v, key, w[1]), r.parse_real(v, key, w[2])};
}

// `a11 a12 a22` or `radial a11 a12 a22 / a11 a12 a22 ...`
MatrixField matrix_field(Reader& r, const std::string& key, SymMat2 fallback, std::string& echo) {
  const IniValue* v = r.find(key);
  if (!v) {
    echo += key + " = default; ";
    return fallback;
  }
  echo += key + " = " + v->text + "; ";
  auto words = split_ws(v->text);
  if (!words.empty() && words[0] == "radial") {
    RadialPolynomial<SymMat2> poly;
    std::vector<std::string> cur;
    for (std::size_t i = 1; i <= words.size(); ++i) {
      if (i == words.size() || words[i] == "/") {
        poly.coefficients.push_back(parse_matrix(r, *v, key, cur));
        cur.clear();
      } else {
        cur.push_back(words[i]);
      }
    }
    return MatrixField(poly);
  }
  return parse_matrix(r, *v, key, words);
}

// `value` or `radial c0 c1 ...`
ScalarField scalar_field(Reader& r, const std::string& key, double fallback, std::string& echo) {
  const IniValue* v = r.find(key);
  if (!v) {
    echo += key + " = default; ";
    return fallback;
  }
  echo += key + " = " + v->text + "; ";
  auto words = split_ws(v->text);
  if (!words.empty() && words[0] == "radial") {
    RadialPolynomial<double> poly;
    for (std::size_t i = 1; i < words.size(); ++i) poly.coefficients.push_back(r.parse_real(*v, key, words[i]));
    if (poly.coefficients.empty()) r.fail(*v, key, "radial field needs coefficients");
    return ScalarField(poly);
  }
  if (words.size() != 1) r.fail(*v, key, "expected one number or 'radial c0 c1 ...'");
  return r.parse_real(*v, key, words[0]);
}

}  // namespace

ConfigError::ConfigError(const std::string& file, int line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

IniFile parse_ini(const std::string& text, const std::string& path) {
  IniFile ini;
  ini.path = path;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(path, line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (ini.sections.count(section)) throw ConfigError(path, line, "duplicate section [" + section + "]");
      ini.sections[section];
      ini.section_lines[section] = line;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(path, line, "expected 'key = value'");
    if (section.empty()) throw ConfigError(path, line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(path, line, "empty key");
    auto& sec = ini.sections[section];
    if (sec.count(key)) throw ConfigError(path, line, "duplicate key '" + key + "' in [" + section + "]");
    sec[key] = {value, line};
  }
  ini.last_line = line;
  return ini;
}

RunConfig load_config(const std::string& text, const std::string& path, bool media_required) {
  const IniFile ini = parse_ini(text, path);
  static const std::set<std::string> known = {"domain", "media", "solver", "analysis", "oracle", "output", "run"};
  for (const auto& [name, keys] : ini.sections) {
    if (!known.count(name)) throw ConfigError(path, ini.section_lines.at(name), "unknown section [" + name + "]");
  }
  RunConfig c;
  c.source_text = text;

  Reader domain(ini, "domain");
  c.domain_kind = domain.text("kind", "disk");
  if (c.domain_kind != "disk" && c.domain_kind != "file") {
    domain.fail(*domain.find("kind"), "kind", "expected 'disk' or 'file'");
  }
  c.level = domain.integer("level", c.level, 0, kDefaultDiskLevelCap);
  c.mesh_path = domain.text("path", "");
  if (c.domain_kind == "file" && c.mesh_path.empty()) {
    throw ConfigError(path, domain.section_line(), "[domain] kind = file needs a path");
  }
  domain.finish();

  Reader media(ini, "media");
  if (media_required && !media.present()) {
    throw ConfigError(path, ini.last_line, "missing [media] section (required by this command)");
  }
  c.media.A1 = matrix_field(media, "A1", SymMat2::identity(), c.media_text);
  c.media.Sigma1 = scalar_field(media, "Sigma1", 1.0, c.media_text);
  c.media.A2 = matrix_field(media, "A2", SymMat2::identity(), c.media_text);
  c.media.Sigma2 = scalar_field(media, "Sigma2", 1.0, c.media_text);
  c.media.Lambda = media.real("Lambda", 1.0);
  if (c.media.Lambda < 1.0) media.fail(*media.find("Lambda"), "Lambda", "must be >= 1");
  c.media_text += "Lambda = " + std::to_string(c.media.Lambda);
  media.finish();

  Reader solver(ini, "solver");
  c.t_max = solver.positive("t_max", c.t_max);
  c.nev = solver.integer("nev", c.nev, 1, 1000);
  c.tol = solver.positive("tol", c.tol);
  c.sector = solver.positive("sector", c.sector);
  if (const IniValue* v = solver.find("shifts")) {
    // re,im pairs separated by whitespace
    for (const auto& w : split_ws(v->text)) {
      const auto comma = w.find(',');
      if (comma == std::string::npos) solver.fail(*v, "shifts", "expected re,im pairs");
      c.shifts.emplace_back(solver.parse_real(*v, "shifts", w.substr(0, comma)),
                            solver.parse_real(*v, "shifts", w.substr(comma + 1)));
    }
  }
  c.Lambda0 = solver.positive("Lambda0", c.Lambda0);
  c.epsilon0 = solver.positive("epsilon0", c.epsilon0);
  c.rays = solver.reals("rays", c.rays);
  solver.finish();

  Reader analysis(ini, "analysis");
  c.weyl_lo = analysis.positive("weyl_lo", c.weyl_lo);
  c.weyl_hi = analysis.positive("weyl_hi", c.weyl_hi);
  if (!(c.weyl_lo < c.weyl_hi && c.weyl_hi <= 1.0)) {
    analysis.fail(*analysis.find("weyl_hi"), "weyl_hi", "need weyl_lo < weyl_hi <= 1");
  }
  c.weyl_grid = analysis.integer("weyl_grid", c.weyl_grid, 2, 100000);
  c.tauberian = analysis.boolean("tauberian", c.tauberian);
  c.tauberian_lo = analysis.positive("tauberian_lo", c.tauberian_lo);
  c.tauberian_hi = analysis.positive("tauberian_hi", c.tauberian_hi);
  c.tauberian_points = analysis.integer("tauberian_points", c.tauberian_points, 2, 100000);
  c.scan_t_min = analysis.positive("scan_t_min", c.scan_t_min);
  c.scan_t_max = analysis.positive("scan_t_max", c.scan_t_max);
  if (c.scan_t_max < c.scan_t_min) {
    analysis.fail(*analysis.find("scan_t_max"), "scan_t_max", "must not be below scan_t_min");
  }
  c.scan_points = analysis.integer("scan_points", c.scan_points, 2, 10000);
  c.power_iterations = analysis.integer("power_iterations", c.power_iterations, 1, 100000);
  c.power_restarts = analysis.integer("power_restarts", c.power_restarts, 1, 1000);
  c.trace_t = analysis.positive("trace_t", c.trace_t);
  c.dense_cap = analysis.integer("dense_cap", c.dense_cap, 1, 20000);
  analysis.finish();

  Reader oracle(ini, "oracle");
  c.oracle_n = oracle.positive("n", c.oracle_n);
  c.oracle_max_mode = oracle.integer("max_mode", c.oracle_max_mode, 0, 1000);
  c.oracle_k_max = oracle.positive("k_max", c.oracle_k_max);
  c.oracle_complex = oracle.boolean("complex", c.oracle_complex);
  oracle.finish();

  Reader output(ini, "output");
  c.out_dir = output.text("dir", c.out_dir);
  output.finish();

  Reader run(ini, "run");
  c.seed = static_cast<std::uint64_t>(run.integer("seed", 0, 0, 2147483647));
  run.finish();
  return c;
}

RunConfig load_config_file(const std::string& path, bool media_required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), path, media_required);
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tevlab::cli
