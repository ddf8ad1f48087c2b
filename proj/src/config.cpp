// Copyright 2026 The qvib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qvib/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "qvib/errors.hpp"

namespace qvib {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// strip a trailing comment, leaving '#' inside quotes alone
std::string strip_comment(const std::string& s) {
  bool q = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') q = !q;
    if (s[i] == '#' && !q) return s.substr(0, i);
  }
  return s;
}

struct Value {
  std::string raw;
  int line = 0;
};

[[noreturn]] void bad(const std::string& origin, int line, const std::string& msg) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + msg);
}

double as_double(const std::string& origin, const std::string& key, const Value& v) {
  double x = 0;
  const char* b = v.raw.data();
  const char* e = b + v.raw.size();
  if (!v.raw.empty() && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e) bad(origin, v.line, "'" + key + "' expects a number, got '" + v.raw + "'");
  return x;
}

long as_long(const std::string& origin, const std::string& key, const Value& v) {
  long x = 0;
  auto [p, ec] = std::from_chars(v.raw.data(), v.raw.data() + v.raw.size(), x);
  if (ec != std::errc() || p != v.raw.data() + v.raw.size())
    bad(origin, v.line, "'" + key + "' expects an integer, got '" + v.raw + "'");
  return x;
}

bool as_bool(const std::string& origin, const std::string& key, const Value& v) {
  if (v.raw == "true") return true;
  if (v.raw == "false") return false;
  bad(origin, v.line, "'" + key + "' expects true or false");
}

std::string as_string(const std::string& origin, const std::string& key, const Value& v) {
  if (v.raw.size() < 2 || v.raw.front() != '"' || v.raw.back() != '"')
    bad(origin, v.line, "'" + key + "' expects a quoted string");
  return v.raw.substr(1, v.raw.size() - 2);
}

std::vector<int> as_int_list(const std::string& origin, const std::string& key, const Value& v) {
  if (v.raw.size() < 2 || v.raw.front() != '[' || v.raw.back() != ']')
    bad(origin, v.line, "'" + key + "' expects a list like [1, 2]");
  std::vector<int> out;
  std::stringstream ss(v.raw.substr(1, v.raw.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(as_long(origin, key, {item, v.line})));
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(15);
  o << x;
  return o.str();
}

std::string list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  c.x1 = {"x1", 8, -0.55, 0.55, 1.00728, {2.5, 400.0}, {100.0, 16000.0}};
  c.x2 = {"x2", 8, -35.0, 35.0, 2.0, {1.47, 235.0}, {7.0, 1120.0}};
  c.states = {
      {"x1", "upper", {1, 2, 3, 4}}, {"x1", "lower", {5, 6, 7, 8}}, {"x2", "upper", {1, 2}},
      {"x2", "lower", {6, 7, 8}},    {"x1", "full", {1, 2}},        {"x2", "full", {1}},
  };
  return c;
}

const ModeSpec& PipelineConfig::mode(const std::string& name) const {
  if (name == "x1") return x1;
  if (name == "x2") return x2;
  throw DomainError("unknown mode '" + name + "'");
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& m) { throw ParseError("config: " + m); };
  if (outdir.empty()) fail("output.dir is empty");
  for (const ModeSpec* m : {&x1, &x2}) {
    // two-qubit blocks and the 3-qubit shuffled map fix the grid at 8 points
    if (m->points != 8) fail(m->name + "_points must be 8");
    if (!(m->hi > m->lo)) fail(m->name + " grid range is empty");
    if (!(m->mass_amu > 0)) fail(m->name + ".mass_amu must be positive");
    try {
      m->block.validate();
      m->full.validate();
    } catch (const std::exception& e) {
      fail(m->name + " schedule: " + e.what());
    }
  }
  if (daf_m < 0) fail("daf.m must be nonnegative");
  if (!(daf_sigma_ratio > 0)) fail("daf.sigma_ratio must be positive");
  if (!(channel_dt_fs > 0)) fail("channels.dt_fs must be positive");
  if (!(channel_tol >= 0 && channel_tol < 1)) fail("channels.tol must lie in [0, 1)");
  if (shots < 1) fail("run.shots must be positive");
  if (!(noise >= 0 && noise <= 1)) fail("run.noise must lie in [0, 1]");
  if (workers < 1) fail("run.workers must be positive");
  if (!(peak_floor > 0 && peak_floor < 1)) fail("analysis.peak_floor must lie in (0, 1)");
  if (mae_levels < 1 || mae_levels > x1.points * x2.points) fail("analysis.mae_levels out of range");
  for (const auto& r : states) {
    const ModeSpec& m = mode(r.mode);
    const int h = m.points / 2;
    for (int g : r.grid_labels) {
      const bool ok = r.run == "upper" ? (g >= 1 && g <= h)
                      : r.run == "lower" ? (g > h && g <= m.points)
                                         : (g >= 1 && g <= m.points);
      if (!ok) fail("initial state " + std::to_string(g) + " is not valid for " + r.mode + "-" + r.run);
    }
  }
}

PipelineConfig parse_config(std::istream& in, const std::string& origin) {
  std::map<std::string, Value> kv;
  std::string line, section;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') bad(origin, ln, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) bad(origin, ln, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(origin, ln, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) bad(origin, ln, "expected 'key = value'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) bad(origin, ln, "duplicate key '" + full + "'");
    kv[full] = {val, ln};
  }

  PipelineConfig c = PipelineConfig::defaults();
  using Setter = std::function<void(const std::string&, const Value&)>;
  auto num = [&](double& dst) -> Setter { return [&, p = &dst](auto& k, auto& v) { *p = as_double(origin, k, v); }; };
  auto integer = [&](auto& dst) -> Setter {
    return [&, p = &dst](auto& k, auto& v) { *p = static_cast<std::remove_reference_t<decltype(dst)>>(as_long(origin, k, v)); };
  };
  std::map<std::string, Setter> setters = {
      {"output.dir", [&](auto& k, auto& v) { c.outdir = as_string(origin, k, v); }},
      {"daf.m", integer(c.daf_m)},
      {"daf.sigma_ratio", num(c.daf_sigma_ratio)},
      {"pes.file", [&](auto& k, auto& v) { c.pes_file = as_string(origin, k, v); }},
      {"pes.barrier_kcal", num(c.pes.barrier_kcal)},
      {"pes.well_angstrom", num(c.pes.well_angstrom)},
      {"pes.torsion_kcal", num(c.pes.torsion_kcal)},
      {"pes.gating", num(c.pes.gating)},
      {"pes.bilinear_kcal", num(c.pes.bilinear_kcal)},
      {"pes.torsion_ref_deg", num(c.pes.torsion_ref_deg)},
      {"channels.dt_fs", num(c.channel_dt_fs)},
      {"channels.tol", num(c.channel_tol)},
      {"run.shots", integer(c.shots)},
      {"run.noise", num(c.noise)},
      {"run.seed", [&](auto& k, auto& v) {
         const long s = as_long(origin, k, v);
         if (s < 0) bad(origin, v.line, "run.seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"run.workers", integer(c.workers)},
      {"run.statevector", [&](auto& k, auto& v) { c.statevector = as_bool(origin, k, v); }},
      {"analysis.peak_floor", num(c.peak_floor)},
      {"analysis.mae_levels", integer(c.mae_levels)},
  };
  for (ModeSpec* m : {&c.x1, &c.x2}) {
    const std::string g = "grid." + m->name + "_";
    const std::string s = "schedule." + m->name + "_";
    setters[g + "points"] = integer(m->points);
    setters[g + "lo"] = num(m->lo);
    setters[g + "hi"] = num(m->hi);
    setters[g + "mass_amu"] = num(m->mass_amu);
    setters[s + "block_dt_fs"] = num(m->block.dt_fs);
    setters[s + "block_total_fs"] = num(m->block.total_fs);
    setters[s + "full_dt_fs"] = num(m->full.dt_fs);
    setters[s + "full_total_fs"] = num(m->full.total_fs);
  }
  for (auto& row : c.states)
    setters["states." + row.mode + "_" + row.run] = [&, r = &row](auto& k, auto& v) {
      r->grid_labels = as_int_list(origin, k, v);
    };

  for (const auto& [k, v] : kv) {
    const auto it = setters.find(k);
    if (it == setters.end()) bad(origin, v.line, "unknown key '" + k + "'");
    it->second(k, v);
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config '" + path + "'");
  return parse_config(f, path);
}

std::string config_to_toml(const PipelineConfig& c) {
  std::ostringstream o;
  o << "# qvib pipeline configuration\n\n[output]\ndir = \"" << c.outdir << "\"\n\n[grid]\n";
  for (const ModeSpec* m : {&c.x1, &c.x2}) {
    o << m->name << "_points = " << m->points << "\n"
      << m->name << "_lo = " << fmt(m->lo) << "\n"
      << m->name << "_hi = " << fmt(m->hi) << "\n"
      << m->name << "_mass_amu = " << fmt(m->mass_amu) << "\n";
  }
  o << "\n[daf]\nm = " << c.daf_m << "\nsigma_ratio = " << fmt(c.daf_sigma_ratio) << "\n\n[pes]\n";
  if (!c.pes_file.empty()) o << "file = \"" << c.pes_file << "\"\n";
  o << "barrier_kcal = " << fmt(c.pes.barrier_kcal) << "\nwell_angstrom = " << fmt(c.pes.well_angstrom)
    << "\ntorsion_kcal = " << fmt(c.pes.torsion_kcal) << "\ngating = " << fmt(c.pes.gating)
    << "\nbilinear_kcal = " << fmt(c.pes.bilinear_kcal) << "\ntorsion_ref_deg = " << fmt(c.pes.torsion_ref_deg)
    << "\n\n[channels]\ndt_fs = " << fmt(c.channel_dt_fs) << "\ntol = " << fmt(c.channel_tol) << "\n\n[schedule]\n";
  for (const ModeSpec* m : {&c.x1, &c.x2})
    o << m->name << "_block_dt_fs = " << fmt(m->block.dt_fs) << "\n"
      << m->name << "_block_total_fs = " << fmt(m->block.total_fs) << "\n"
      << m->name << "_full_dt_fs = " << fmt(m->full.dt_fs) << "\n"
      << m->name << "_full_total_fs = " << fmt(m->full.total_fs) << "\n";
  o << "\n[states]\n";
  for (const auto& r : c.states) o << r.mode << "_" << r.run << " = " << list(r.grid_labels) << "\n";
  o << "\n[run]\nshots = " << c.shots << "\nnoise = " << fmt(c.noise) << "\nseed = " << c.seed
    << "\nworkers = " << c.workers << "\nstatevector = " << (c.statevector ? "true" : "false")
    << "\n\n[analysis]\npeak_floor = " << fmt(c.peak_floor) << "\nmae_levels = " << c.mae_levels << "\n";
  return o.str();
}

}  // namespace qvib
