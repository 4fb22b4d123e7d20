#include "mbrl/bench/config.hpp"

#include <climits>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mbrl {

namespace {

const std::set<std::string> kAlgos = {"rs",    "pets_rs", "pets_cem",
                                      "gt_rs", "gt_cem",  "ilqg"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for key '" + key +
                              "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const long v = parse_long(key, value);
  if (v < INT_MIN || v > INT_MAX) bad_value(key, value);
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, value);
    out.push_back(parse_int(key, item));
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "run.env") { env = value; return; }
  if (key == "run.algo") { algo = value; return; }
  if (key == "run.total_steps") { total_steps = parse_long(key, value); return; }
  if (key == "run.seeds") { seeds = parse_int(key, value); return; }
  if (key == "run.master_seed") { master_seed = parse_u64(key, value); return; }
  if (key == "run.retrain_every") { retrain_every = parse_long(key, value); return; }
  if (key == "run.scheme") { scheme = value; return; }
  if (key == "run.penalty_multiplier") {
    penalty_multiplier = parse_double(key, value);
    return;
  }
  if (key == "run.alive_bonus") { alive_bonus = parse_double(key, value); return; }
  if (key == "run.extra_steps") { extra_steps = parse_int(key, value); return; }
  if (key == "run.out") { out_dir = value; return; }
  if (key == "run.workers") { workers = parse_int(key, value); return; }
  if (key == "noise.sigma_o") { sigma_o = parse_double(key, value); return; }
  if (key == "noise.sigma_a") { sigma_a = parse_double(key, value); return; }
  if (key.rfind("env.", 0) == 0) {
    env_params[key.substr(4)] = parse_double(key, value);
    return;
  }
  if (key == "planner.rs.population") { rs.population = parse_int(key, value); return; }
  if (key == "planner.rs.horizon") { rs.horizon = parse_int(key, value); return; }
  if (key == "planner.cem.population") { cem.population = parse_int(key, value); return; }
  if (key == "planner.cem.elites") { cem.elites = parse_int(key, value); return; }
  if (key == "planner.cem.iterations") { cem.iterations = parse_int(key, value); return; }
  if (key == "planner.cem.alpha") { cem.alpha = parse_double(key, value); return; }
  if (key == "planner.cem.init_std_frac") {
    cem.init_std_frac = parse_double(key, value);
    return;
  }
  if (key == "planner.cem.horizon") { cem.horizon = parse_int(key, value); return; }
  if (key == "planner.ilqg.horizon") { ilqg.horizon = parse_int(key, value); return; }
  if (key == "planner.ilqg.updates") { ilqg.updates = parse_int(key, value); return; }
  if (key == "planner.ilqg.backtracks") { ilqg.backtracks = parse_int(key, value); return; }
  if (key == "planner.ilqg.restarts") { ilqg.restarts = parse_int(key, value); return; }
  if (key == "planner.ilqg.fd_eps") { ilqg.fd_eps = parse_double(key, value); return; }
  if (key == "dynamics.members") { dyn.members = parse_int(key, value); return; }
  if (key == "dynamics.hidden") { dyn.hidden = parse_int_list(key, value); return; }
  if (key == "dynamics.activation") { dyn.activation = value; return; }
  if (key == "dynamics.lr") { dyn.lr = parse_double(key, value); return; }
  if (key == "dynamics.batch") { dyn.batch = parse_int(key, value); return; }
  if (key == "dynamics.holdout") { dyn.holdout = parse_double(key, value); return; }
  if (key == "dynamics.bootstrap") { dyn.bootstrap = parse_bool(key, value); return; }
  if (key == "dynamics.epochs") { dyn.epochs = parse_int(key, value); return; }
  if (key == "dynamics.multistep") { dyn.multistep = parse_int(key, value); return; }
  if (key == "dynamics.propagation") { dyn.propagation = value; return; }
  if (key == "dynamics.particles") { dyn.particles = parse_int(key, value); return; }
  if (key == "dynamics.warmup_episodes") {
    dyn.warmup_episodes = parse_int(key, value);
    return;
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header '" + t + "'");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section != "run" && section != "noise" && section != "env" &&
          section != "planner.rs" && section != "planner.cem" &&
          section != "planner.ilqg" && section != "dynamics") {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + t + "'");
    }
    if (section.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any section");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    }
    cfg.set(section + "." + key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

void ExperimentConfig::validate() const {
  if (kAlgos.find(algo) == kAlgos.end()) {
    std::string names;
    for (const auto& a : kAlgos) names += (names.empty() ? "" : "|") + a;
    throw std::invalid_argument("config: unknown algo '" + algo + "' (" + names + ")");
  }
  if (seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");
  if (total_steps < 1) throw std::invalid_argument("config: total_steps must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (retrain_every < 0) throw std::invalid_argument("config: retrain_every must be >= 0");
  if (sigma_o < 0.0 || sigma_a < 0.0) {
    throw std::invalid_argument("config: noise sigmas must be >= 0");
  }
  make_scheme(scheme, penalty_multiplier, alive_bonus, extra_steps);
  if (!is_gt()) {
    propagation_from_string(dyn.propagation);
    activation_from_string(dyn.activation);
    if (dyn.members < 1) throw std::invalid_argument("config: dynamics members >= 1");
    if (dyn.particles < 1) throw std::invalid_argument("config: dynamics particles >= 1");
    if (dyn.epochs < 1) throw std::invalid_argument("config: dynamics epochs >= 1");
    if (dyn.multistep < 1) throw std::invalid_argument("config: dynamics multistep >= 1");
    if (dyn.warmup_episodes < 1) {
      throw std::invalid_argument("config: learned algos need warmup_episodes >= 1");
    }
    if (dyn.holdout < 0.0 || dyn.holdout >= 1.0) {
      throw std::invalid_argument("config: dynamics holdout must be in [0, 1)");
    }
  }
}

std::string ExperimentConfig::canonical_string() const {
  std::string s;
  s += "[run]\n";
  s += "algo = " + algo + "\n";
  s += "alive_bonus = " + fmt_double(alive_bonus) + "\n";
  s += "env = " + env + "\n";
  s += "extra_steps = " + std::to_string(extra_steps) + "\n";
  s += "master_seed = " + std::to_string(master_seed) + "\n";
  s += "out = " + out_dir + "\n";
  s += "penalty_multiplier = " + fmt_double(penalty_multiplier) + "\n";
  s += "retrain_every = " + std::to_string(retrain_every) + "\n";
  s += "scheme = " + scheme + "\n";
  s += "seeds = " + std::to_string(seeds) + "\n";
  s += "total_steps = " + std::to_string(total_steps) + "\n";
  s += "[noise]\n";
  s += "sigma_a = " + fmt_double(sigma_a) + "\n";
  s += "sigma_o = " + fmt_double(sigma_o) + "\n";
  if (!env_params.empty()) {
    s += "[env]\n";
    for (const auto& [k, v] : env_params) s += k + " = " + fmt_double(v) + "\n";
  }
  s += "[planner.rs]\n";
  s += "horizon = " + std::to_string(rs.horizon) + "\n";
  s += "population = " + std::to_string(rs.population) + "\n";
  s += "[planner.cem]\n";
  s += "alpha = " + fmt_double(cem.alpha) + "\n";
  s += "elites = " + std::to_string(cem.elites) + "\n";
  s += "horizon = " + std::to_string(cem.horizon) + "\n";
  s += "init_std_frac = " + fmt_double(cem.init_std_frac) + "\n";
  s += "iterations = " + std::to_string(cem.iterations) + "\n";
  s += "population = " + std::to_string(cem.population) + "\n";
  s += "[planner.ilqg]\n";
  s += "backtracks = " + std::to_string(ilqg.backtracks) + "\n";
  s += "fd_eps = " + fmt_double(ilqg.fd_eps) + "\n";
  s += "horizon = " + std::to_string(ilqg.horizon) + "\n";
  s += "restarts = " + std::to_string(ilqg.restarts) + "\n";
  s += "updates = " + std::to_string(ilqg.updates) + "\n";
  s += "[dynamics]\n";
  s += "activation = " + dyn.activation + "\n";
  s += "batch = " + std::to_string(dyn.batch) + "\n";
  s += "bootstrap = " + std::string(dyn.bootstrap ? "true" : "false") + "\n";
  s += "epochs = " + std::to_string(dyn.epochs) + "\n";
  s += "hidden = " + fmt_int_list(dyn.hidden) + "\n";
  s += "holdout = " + fmt_double(dyn.holdout) + "\n";
  s += "lr = " + fmt_double(dyn.lr) + "\n";
  s += "members = " + std::to_string(dyn.members) + "\n";
  s += "multistep = " + std::to_string(dyn.multistep) + "\n";
  s += "particles = " + std::to_string(dyn.particles) + "\n";
  s += "propagation = " + dyn.propagation + "\n";
  s += "warmup_episodes = " + std::to_string(dyn.warmup_episodes) + "\n";
  return s;
}

std::string ExperimentConfig::fingerprint() const {
  const std::string s = canonical_string();
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

NoiseConfig ExperimentConfig::noise() const {
  NoiseConfig n;
  n.sigma_o = sigma_o;
  n.sigma_a = sigma_a;
  return n;
}

SchemeConfig ExperimentConfig::scheme_config() const {
  return make_scheme(scheme, penalty_multiplier, alive_bonus, extra_steps);
}

EnsembleConfig ExperimentConfig::ensemble_config(const EnvSpec& spec) const {
  EnsembleConfig e;
  e.obs_dim = spec.obs_dim;
  e.act_dim = spec.act_dim;
  e.members = dyn.members;
  e.kind = (algo == "pets_rs" || algo == "pets_cem") ? DynKind::kProbabilistic
                                                     : DynKind::kDeterministic;
  e.hidden = dyn.hidden;
  e.act = activation_from_string(dyn.activation);
  e.lr = dyn.lr;
  e.batch = dyn.batch;
  e.holdout = dyn.holdout;
  e.bootstrap = dyn.bootstrap;
  e.ms_horizon = dyn.multistep;
  return e;
}

}  // namespace mbrl
