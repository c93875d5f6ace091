#pragma once

#include <filesystem>

#include "mspinn/config.hpp"

namespace mspinn::artifacts {

namespace fs = std::filesystem;

/// 17 significant digits; round-trips doubles exactly.
std::string format_real(Real v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const fs::path& path);

void write_loss_csv(const fs::path& path, const std::vector<optim::LossSample>& history);
std::vector<optim::LossSample> read_loss_csv(const fs::path& path);

/// Inclusive uniform grid of composite values: columns x, y (or x, t for
/// time-dependent problems), then one column per output component.
void write_solution_grid_csv(const fs::path& path, const multistage::CompositeSolution& sol,
                             const problems::Problem& problem, int grid_n);

/// Residual fields on the spectrum grid: x, y|t, then one residual column
/// per component.
void write_residual_csv(const fs::path& path, const std::vector<spectral::GridField>& fields,
                        bool time_dependent);

/// Spectrum dump: one `mode` row per DFT cell (k_x, k_y, amplitude, phase,
/// power) followed by n_f `top` rows. Row count = grid size + n_f.
void write_spectrum_csv(const fs::path& path, const spectral::Spectrum& spectrum,
                        const spectral::SpectralModes& top);

/// Serialized run report (key-value schema; see README).
void write_report(const fs::path& path, const config::ExperimentConfig& cfg,
                  const multistage::RunOutput& out,
                  const std::vector<std::string>& checkpoint_names,
                  const std::vector<std::string>& loss_csv_names);

/// Report fields needed by `compare` and `evaluate`.
struct LoadedReport {
  std::string method;
  std::string problem;
  Real problem_parameter = 0.0;
  std::uint64_t seed = 0;
  std::vector<Real> l2_errors;
  std::vector<Real> epsilon_history;
  bool monotone_epsilon = false;
  std::vector<std::string> checkpoint_names;
  std::vector<Real> stage_epsilons;
};

LoadedReport read_report(const fs::path& path);

/// Rebuild the composite from a run directory (report + checkpoints).
multistage::CompositeSolution load_composite(const fs::path& run_dir);

/// Comparison table across run reports: one row per method, one
/// L2(component) column per problem parameter, mirroring the benchmark
/// table layout. Missing cells are "n/a".
void write_compare_csv(const fs::path& path, const std::vector<LoadedReport>& reports);

/// Fresh timestamped run directory under root (never reuses an existing one).
fs::path make_run_directory(const fs::path& root, const std::string& config_stem,
                            std::uint64_t seed);

}  // namespace mspinn::artifacts
