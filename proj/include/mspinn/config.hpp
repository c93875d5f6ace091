#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mspinn/multistage.hpp"
#include "mspinn/problems.hpp"

namespace mspinn::config {

/// Thrown on malformed or invalid configuration input; message carries the
/// line number or field name.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented `key = value` document with `#` comments. Keys are dotted
/// paths; order is preserved for serialization.
class KVDoc {
public:
  static KVDoc parse(const std::string& text);
  static KVDoc parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string serialize() const;

  /// Keys consumed via get/get_or/has; used to reject unknown fields.
  std::vector<std::string> unconsumed_keys() const;

private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
  mutable std::map<std::string, bool> consumed_;
};

/// Everything one experiment needs: the problem and the run settings.
struct ExperimentConfig {
  std::string problem_type = "burgers";  // burgers | helmholtz
  Real viscosity = 1.0;                  // burgers
  problems::HelmholtzConfig helmholtz;   // helmholtz
  multistage::RunConfig run;
  int export_grid = 64;

  static ExperimentConfig from_kv(const KVDoc& doc);
  KVDoc to_kv() const;

  std::unique_ptr<problems::Problem> make_problem() const;
  /// Scalar problem parameter used for comparison-table grouping
  /// (viscosity for Burgers, eps_r for Helmholtz).
  Real problem_parameter() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace mspinn::config
