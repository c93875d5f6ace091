#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "mspinn/artifacts.hpp"
#include "mspinn/config.hpp"
#include "mspinn/multistage.hpp"
#include "mspinn/network.hpp"

namespace fs = std::filesystem;
using namespace mspinn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTraining = 3;

fs::path output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MSPINN_OUT_ROOT")) return env;
  return "runs";
}

int cmd_run(const std::string& config_path, const std::string& out_flag, long seed_override,
            int stages_override) {
  config::ExperimentConfig cfg;
  try {
    cfg = config::load_experiment_config(config_path);
    if (seed_override >= 0) cfg.run.master_seed = static_cast<std::uint64_t>(seed_override);
    if (stages_override >= 0) cfg.run.stages = stages_override;
    cfg.run.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto problem = cfg.make_problem();
  const fs::path run_dir = artifacts::make_run_directory(
      output_root(out_flag), fs::path(config_path).stem().string(), cfg.run.master_seed);
  std::cout << "run directory: " << run_dir.string() << "\n";

  multistage::RunOutput out;
  try {
    out = multistage::run(cfg.run, *problem);
  } catch (const TrainingAbort& e) {
    std::cerr << "training aborted at stage " << e.stage_index << ": " << e.what() << "\n";
    return kExitTraining;
  }

  std::vector<std::string> checkpoints, loss_csvs;
  for (std::size_t s = 0; s < out.solution.stages.size(); ++s) {
    const std::string ck = "stage" + std::to_string(s) + ".net";
    const std::string lc = "loss_stage" + std::to_string(s) + ".csv";
    network::save_checkpoint(out.solution.stages[s].net, run_dir / ck);
    artifacts::write_loss_csv(run_dir / lc, out.solution.stages[s].loss_history);
    checkpoints.push_back(ck);
    loss_csvs.push_back(lc);
  }
  artifacts::write_solution_grid_csv(run_dir / "solution_grid.csv", out.solution, *problem,
                                     cfg.export_grid);
  {
    const auto fields = multistage::residual_field(out.solution, *problem,
                                                   cfg.run.spectrum_grid);
    artifacts::write_residual_csv(run_dir / "residual_grid.csv", fields,
                                  problem->time_dependent());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto spec = spectral::dft2(fields[c]);
      const int avail = (spec.nx * spec.ny) / 2;
      const auto top = spectral::extract_top_modes(
          spec, std::min(cfg.run.init.modes, avail));
      artifacts::write_spectrum_csv(
          run_dir / ("residual_spectrum_c" + std::to_string(c) + ".csv"), spec, top);
    }
  }
  artifacts::write_report(run_dir / "report.txt", cfg, out, checkpoints, loss_csvs);

  std::cout << "method " << out.report.method << " stages "
            << out.solution.stages.size() << "\n";
  std::cout << "epsilon history:";
  for (Real e : out.report.epsilon_history) std::cout << ' ' << e;
  std::cout << "\n";
  if (!out.report.l2_errors.empty()) {
    std::cout << "relative L2:";
    for (Real e : out.report.l2_errors) std::cout << ' ' << e;
    std::cout << "\n";
  }
  std::cout << "monotone epsilon: " << (out.report.monotone_epsilon ? "true" : "false") << "\n";
  return 0;
}

int cmd_compare(const std::string& dir, const std::string& out_file) {
  std::vector<artifacts::LoadedReport> reports;
  std::vector<std::string> missing;
  if (!fs::exists(dir)) {
    std::cerr << "compare: directory not found: " << dir << "\n";
    return kExitConfig;
  }
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "report.txt") {
      try {
        reports.push_back(artifacts::read_report(entry.path()));
      } catch (const std::exception& e) {
        missing.push_back(entry.path().string() + " (" + e.what() + ")");
      }
    }
  }
  for (const std::string& m : missing) std::cerr << "warning: skipped " << m << "\n";
  if (reports.empty()) {
    std::cerr << "compare: no readable run reports under " << dir << "\n";
    return kExitConfig;
  }
  artifacts::write_compare_csv(out_file, reports);
  std::cout << "wrote " << out_file << " (" << reports.size() << " runs)\n";
  return 0;
}

int cmd_spectrum(const std::string& config_path, const std::string& checkpoint,
                 int grid, const std::string& out_file) {
  config::ExperimentConfig cfg;
  try {
    cfg = config::load_experiment_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto problem = cfg.make_problem();
  multistage::CompositeSolution sol;
  multistage::StageRecord rec;
  try {
    rec.net = network::load_checkpoint(checkpoint);
  } catch (const std::exception& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (rec.net.output_dim() != problem->output_dim() || rec.net.input_dim() != 2) {
    std::cerr << "checkpoint/problem mismatch: network is " << rec.net.input_dim() << "->"
              << rec.net.output_dim() << ", problem needs 2->" << problem->output_dim() << "\n";
    return kExitConfig;
  }
  rec.epsilon = 1.0;
  sol.stages.push_back(std::move(rec));

  const auto fields = multistage::residual_field(sol, *problem, grid);
  const fs::path base(out_file);
  artifacts::write_residual_csv(base.parent_path().empty()
                                    ? fs::path("residual_" + base.filename().string())
                                    : base.parent_path() / ("residual_" + base.filename().string()),
                                fields, problem->time_dependent());
  for (std::size_t c = 0; c < fields.size(); ++c) {
    const auto spec = spectral::dft2(fields[c]);
    const int avail = (spec.nx * spec.ny) / 2;
    const auto top = spectral::extract_top_modes(spec, std::min(cfg.run.init.modes, avail));
    fs::path out = base;
    if (fields.size() > 1) {
      out = base.parent_path() / (base.stem().string() + "_c" + std::to_string(c) +
                                  base.extension().string());
    }
    artifacts::write_spectrum_csv(out, spec, top);
    std::cout << "wrote " << out.string() << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& run_dir, int grid) {
  multistage::CompositeSolution sol;
  artifacts::LoadedReport rep;
  try {
    rep = artifacts::read_report(fs::path(run_dir) / "report.txt");
    sol = artifacts::load_composite(run_dir);
  } catch (const std::exception& e) {
    std::cerr << "evaluate: " << e.what() << "\n";
    return kExitConfig;
  }
  std::unique_ptr<problems::Problem> problem;
  if (rep.problem == "burgers") {
    problem = std::make_unique<problems::BurgersProblem>(rep.problem_parameter);
  } else {
    problems::HelmholtzConfig hc;
    hc.eps_r = rep.problem_parameter;
    problem = std::make_unique<problems::HelmholtzProblem>(hc);
  }
  const VecX err = multistage::evaluate_error(sol, *problem, grid);
  std::cout << "relative L2 on " << grid << "x" << grid << " grid:";
  for (Eigen::Index i = 0; i < err.size(); ++i) std::cout << ' ' << err(i);
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral-prior multistage PINN solver"};
  app.require_subcommand(1);

  std::string config_path, out_flag, checkpoint, compare_dir;
  std::string compare_out = "compare.csv";
  std::string spectrum_out = "spectrum.csv";
  std::string eval_dir;
  long seed_override = -1;
  int stages_override = -1;
  int grid = 64;
  int eval_grid = 65;

  auto* run = app.add_subcommand("run", "train a configured method and emit artifacts");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--out", out_flag, "output root directory (default: runs or $MSPINN_OUT_ROOT)");
  run->add_option("--seed", seed_override, "override run.seed");
  run->add_option("--stages", stages_override, "override run.stages");

  auto* cmp = app.add_subcommand("compare", "tabulate L2 errors across completed runs");
  cmp->add_option("--dir", compare_dir, "directory containing run directories")->required();
  cmp->add_option("--out", compare_out, "output csv path");

  auto* spec = app.add_subcommand("spectrum", "dump residual spectrum of a checkpoint");
  spec->add_option("--config", config_path, "configuration file (problem definition)")
      ->required();
  spec->add_option("--checkpoint", checkpoint, "network checkpoint")->required();
  spec->add_option("--grid", grid, "spectrum grid resolution");
  spec->add_option("--out", spectrum_out, "output csv path");

  auto* ev = app.add_subcommand("evaluate", "L2 error of a completed run against the oracle");
  ev->add_option("--run", eval_dir, "run directory (with report.txt)")->required();
  ev->add_option("--grid", eval_grid, "evaluation grid resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_flag, seed_override, stages_override);
    if (cmp->parsed()) return cmd_compare(compare_dir, compare_out);
    if (spec->parsed()) return cmd_spectrum(config_path, checkpoint, grid, spectrum_out);
    if (ev->parsed()) return cmd_evaluate(eval_dir, eval_grid);
  } catch (const TrainingAbort& e) {
    std::cerr << "training aborted at stage " << e.stage_index << ": " << e.what() << "\n";
    return kExitTraining;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
