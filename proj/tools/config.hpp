// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: flat INI sections with `key = value` lines. `#` and `;`
// start comments. Every parse or validation error carries the offending line.

#pragma once

#include <cstdint>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tevlab/media.hpp"

namespace tevlab::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct IniValue {
  std::string text;
  int line = 0;
};

/// section -> key -> value. Keys are case-sensitive.
struct IniFile {
  std::string path;
  int last_line = 0;
  std::map<std::string, std::map<std::string, IniValue>> sections;
  std::map<std::string, int> section_lines;
};

IniFile parse_ini(const std::string& text, const std::string& path = "<config>");

struct RunConfig {
  // [domain]
  std::string domain_kind = "disk";  // disk | file
  int level = 3;
  std::string mesh_path;

  // [media]
  MediumPair media;
  std::string media_text;  // canonical description echoed in reports

  // [solver]
  double t_max = 60.0;
  int nev = 60;
  double tol = 1e-10;
  double sector = 0.7853981633974483;
  std::vector<std::complex<double>> shifts;
  double Lambda0 = 10.0;
  double epsilon0 = 0.39269908169872414;
  std::vector<double> rays = {1.5707963267948966};

  // [analysis]
  double weyl_lo = 0.2;
  double weyl_hi = 0.9;
  int weyl_grid = 64;
  bool tauberian = true;
  double tauberian_lo = 0.3;  // grid T^{1/8} in [lo, hi] t_max
  double tauberian_hi = 0.6;
  int tauberian_points = 16;
  double scan_t_min = 10.0;
  double scan_t_max = 1000.0;
  int scan_points = 12;
  int power_iterations = 30;
  int power_restarts = 3;
  double trace_t = 100.0;
  int dense_cap = 400;

  // [oracle]
  double oracle_n = 4.0;
  int oracle_max_mode = 30;
  double oracle_k_max = 15.0;
  bool oracle_complex = true;

  // [output] and [run]
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  std::string source_text;  // raw config, hashed for the manifest
};

/// Parses and validates. Throws ConfigError. `media_required` makes a missing
/// [media] section an error.
RunConfig load_config(const std::string& text, const std::string& path, bool media_required);
RunConfig load_config_file(const std::string& path, bool media_required);

/// FNV-1a 64-bit hash of the raw config text, as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace tevlab::cli
