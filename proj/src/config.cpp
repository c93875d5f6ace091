#include "mspinn/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mspinn::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KVDoc KVDoc::parse(const std::string& text) {
  KVDoc doc;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    if (doc.index_.count(key) != 0) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    doc.index_[key] = doc.entries_.size();
    doc.entries_.emplace_back(key, value);
  }
  return doc;
}

KVDoc KVDoc::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse(buf.str());
}

void KVDoc::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
    return;
  }
  index_[key] = entries_.size();
  entries_.emplace_back(key, value);
}

bool KVDoc::has(const std::string& key) const {
  consumed_[key] = true;
  return index_.count(key) != 0;
}

const std::string& KVDoc::get(const std::string& key) const {
  consumed_[key] = true;
  auto it = index_.find(key);
  if (it == index_.end()) throw ConfigError("missing required field '" + key + "'");
  return entries_[it->second].second;
}

std::string KVDoc::get_or(const std::string& key, const std::string& fallback) const {
  consumed_[key] = true;
  auto it = index_.find(key);
  return it == index_.end() ? fallback : entries_[it->second].second;
}

std::string KVDoc::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  return os.str();
}

std::vector<std::string> KVDoc::unconsumed_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (consumed_.find(k) == consumed_.end()) out.push_back(k);
  }
  return out;
}

namespace {

Real parse_real(const KVDoc& doc, const std::string& key, Real fallback) {
  if (!doc.has(key)) return fallback;
  const std::string& s = doc.get(key);
  try {
    std::size_t pos = 0;
    const Real v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': cannot parse real value '" + s + "'");
  }
}

long parse_long(const KVDoc& doc, const std::string& key, long fallback) {
  if (!doc.has(key)) return fallback;
  const std::string& s = doc.get(key);
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("field '" + key + "': cannot parse integer '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const KVDoc& doc, const std::string& key, std::uint64_t fallback) {
  if (!doc.has(key)) return fallback;
  const std::string& s = doc.get(key);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("field '" + key + "': cannot parse unsigned integer '" + s + "'");
  }
  return v;
}

bool parse_bool(const KVDoc& doc, const std::string& key, bool fallback) {
  if (!doc.has(key)) return fallback;
  const std::string& s = doc.get(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("field '" + key + "': expected true/false, got '" + s + "'");
}

std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(const KVDoc& doc) {
  ExperimentConfig cfg;
  cfg.problem_type = doc.get_or("problem.type", "burgers");
  if (cfg.problem_type != "burgers" && cfg.problem_type != "helmholtz") {
    throw ConfigError("field 'problem.type': unknown problem '" + cfg.problem_type + "'");
  }
  cfg.viscosity = parse_real(doc, "problem.viscosity", 1.0);
  cfg.helmholtz.eps_r = parse_real(doc, "problem.eps_r", 1.0);
  cfg.helmholtz.omega = parse_real(doc, "problem.omega", kTwoPi);
  cfg.helmholtz.radius = parse_real(doc, "problem.radius", 0.25);
  cfg.helmholtz.n_trunc = static_cast<int>(parse_long(doc, "problem.n_trunc", 15));

  const std::string method = doc.get_or("run.method", "pinn");
  const auto m = multistage::method_from_string(method);
  if (!m) throw ConfigError("field 'run.method': unknown method '" + method + "'");
  cfg.run.method = *m;
  cfg.run.stages = static_cast<int>(parse_long(doc, "run.stages", 2));
  cfg.run.master_seed = parse_u64(doc, "run.seed", 1);
  cfg.run.counts.interior = static_cast<int>(parse_long(doc, "run.interior_points", 2540));
  cfg.run.counts.boundary = static_cast<int>(parse_long(doc, "run.boundary_points", 80));
  cfg.run.counts.initial = static_cast<int>(parse_long(doc, "run.initial_points", 80));
  cfg.run.weights.pde = parse_real(doc, "run.weight_pde", 1.0);
  cfg.run.weights.boundary = parse_real(doc, "run.weight_boundary", 1.0);
  cfg.run.weights.initial = parse_real(doc, "run.weight_initial", 1.0);
  cfg.run.spectrum_grid = static_cast<int>(parse_long(doc, "run.spectrum_grid", 64));

  cfg.run.init.depth = static_cast<int>(parse_long(doc, "net.depth", 4));
  cfg.run.init.width = static_cast<int>(parse_long(doc, "net.width", 20));
  cfg.run.init.modes = static_cast<int>(parse_long(doc, "net.modes", 20));
  cfg.run.init.freeze_first_layer = parse_bool(doc, "net.freeze_first_layer", false);

  cfg.run.optim.adam_steps = parse_long(doc, "optim.adam_steps", 5000);
  cfg.run.optim.adam_lr = parse_real(doc, "optim.adam_lr", 1e-3);
  cfg.run.optim.adam_beta1 = parse_real(doc, "optim.adam_beta1", 0.9);
  cfg.run.optim.adam_beta2 = parse_real(doc, "optim.adam_beta2", 0.999);
  cfg.run.optim.adam_eps = parse_real(doc, "optim.adam_eps", 1e-8);
  cfg.run.optim.lbfgs_max_iters = parse_long(doc, "optim.lbfgs_max_iters", 2000);
  cfg.run.optim.lbfgs_history = static_cast<int>(parse_long(doc, "optim.lbfgs_history", 10));
  cfg.run.optim.lbfgs_grad_tol = parse_real(doc, "optim.lbfgs_grad_tol", 1e-9);
  cfg.run.optim.wolfe_c1 = parse_real(doc, "optim.wolfe_c1", 1e-4);
  cfg.run.optim.wolfe_c2 = parse_real(doc, "optim.wolfe_c2", 0.9);

  cfg.export_grid = static_cast<int>(parse_long(doc, "output.export_grid", 64));
  if (cfg.export_grid < 2) throw ConfigError("field 'output.export_grid': must be >= 2");

  const auto unknown = doc.unconsumed_keys();
  if (!unknown.empty()) {
    throw ConfigError("unknown field '" + unknown.front() + "'");
  }

  try {
    cfg.run.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid run settings: ") + e.what());
  }
  if (cfg.problem_type == "burgers" && cfg.viscosity <= 0.0) {
    throw ConfigError("field 'problem.viscosity': must be > 0");
  }
  return cfg;
}

KVDoc ExperimentConfig::to_kv() const {
  KVDoc doc;
  doc.set("problem.type", problem_type);
  if (problem_type == "burgers") {
    doc.set("problem.viscosity", format_real(viscosity));
  } else {
    doc.set("problem.eps_r", format_real(helmholtz.eps_r));
    doc.set("problem.omega", format_real(helmholtz.omega));
    doc.set("problem.radius", format_real(helmholtz.radius));
    doc.set("problem.n_trunc", std::to_string(helmholtz.n_trunc));
  }
  doc.set("run.method", multistage::to_string(run.method));
  doc.set("run.stages", std::to_string(run.stages));
  doc.set("run.seed", std::to_string(run.master_seed));
  doc.set("run.interior_points", std::to_string(run.counts.interior));
  doc.set("run.boundary_points", std::to_string(run.counts.boundary));
  doc.set("run.initial_points", std::to_string(run.counts.initial));
  doc.set("run.weight_pde", format_real(run.weights.pde));
  doc.set("run.weight_boundary", format_real(run.weights.boundary));
  doc.set("run.weight_initial", format_real(run.weights.initial));
  doc.set("run.spectrum_grid", std::to_string(run.spectrum_grid));
  doc.set("net.depth", std::to_string(run.init.depth));
  doc.set("net.width", std::to_string(run.init.width));
  doc.set("net.modes", std::to_string(run.init.modes));
  doc.set("net.freeze_first_layer", run.init.freeze_first_layer ? "true" : "false");
  doc.set("optim.adam_steps", std::to_string(run.optim.adam_steps));
  doc.set("optim.adam_lr", format_real(run.optim.adam_lr));
  doc.set("optim.adam_beta1", format_real(run.optim.adam_beta1));
  doc.set("optim.adam_beta2", format_real(run.optim.adam_beta2));
  doc.set("optim.adam_eps", format_real(run.optim.adam_eps));
  doc.set("optim.lbfgs_max_iters", std::to_string(run.optim.lbfgs_max_iters));
  doc.set("optim.lbfgs_history", std::to_string(run.optim.lbfgs_history));
  doc.set("optim.lbfgs_grad_tol", format_real(run.optim.lbfgs_grad_tol));
  doc.set("optim.wolfe_c1", format_real(run.optim.wolfe_c1));
  doc.set("optim.wolfe_c2", format_real(run.optim.wolfe_c2));
  doc.set("output.export_grid", std::to_string(export_grid));
  return doc;
}

std::unique_ptr<problems::Problem> ExperimentConfig::make_problem() const {
  if (problem_type == "burgers") {
    return std::make_unique<problems::BurgersProblem>(viscosity);
  }
  return std::make_unique<problems::HelmholtzProblem>(helmholtz);
}

Real ExperimentConfig::problem_parameter() const {
  return problem_type == "burgers" ? viscosity : helmholtz.eps_r;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return ExperimentConfig::from_kv(KVDoc::parse_file(path));
}

}  // namespace mspinn::config
