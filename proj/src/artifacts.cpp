#include "mspinn/artifacts.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mspinn/network.hpp"

namespace mspinn::artifacts {

std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  return os;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Real to_real(const std::string& s) { return std::stod(s); }

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open csv: " + path.string());
  CsvTable t;
  std::string line;
  if (std::getline(is, line)) t.header = split(line, ',');
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line, ','));
  }
  return t;
}

void write_loss_csv(const fs::path& path, const std::vector<optim::LossSample>& history) {
  auto os = open_out(path);
  os << "step,phase,loss\n";
  for (const optim::LossSample& s : history) {
    os << s.step << ',' << (s.phase == optim::Phase::adam ? "adam" : "lbfgs") << ','
       << format_real(s.loss) << '\n';
  }
}

std::vector<optim::LossSample> read_loss_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  std::vector<optim::LossSample> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    if (row.size() != 3) throw std::runtime_error("loss csv: malformed row");
    optim::LossSample s;
    s.step = std::stol(row[0]);
    s.phase = row[1] == "adam" ? optim::Phase::adam : optim::Phase::lbfgs;
    s.loss = to_real(row[2]);
    out.push_back(s);
  }
  return out;
}

void write_solution_grid_csv(const fs::path& path, const multistage::CompositeSolution& sol,
                             const problems::Problem& problem, int grid_n) {
  const Domain& dom = problem.domain();
  const Eigen::Index n_pts = static_cast<Eigen::Index>(grid_n) * grid_n;
  MatX X(n_pts, 2);
  for (int ix = 0; ix < grid_n; ++ix) {
    const Real x = dom.lo[0] + dom.length(0) * ix / (grid_n - 1);
    for (int iy = 0; iy < grid_n; ++iy) {
      const Real y = dom.lo[1] + dom.length(1) * iy / (grid_n - 1);
      X(static_cast<Eigen::Index>(ix) * grid_n + iy, 0) = x;
      X(static_cast<Eigen::Index>(ix) * grid_n + iy, 1) = y;
    }
  }
  const MatX u = sol.values(X);
  auto os = open_out(path);
  os << "x," << (problem.time_dependent() ? "t" : "y");
  for (int o = 0; o < sol.output_dim(); ++o) os << ",u" << o;
  os << '\n';
  for (Eigen::Index p = 0; p < n_pts; ++p) {
    os << format_real(X(p, 0)) << ',' << format_real(X(p, 1));
    for (int o = 0; o < sol.output_dim(); ++o) os << ',' << format_real(u(p, o));
    os << '\n';
  }
}

void write_residual_csv(const fs::path& path, const std::vector<spectral::GridField>& fields,
                        bool time_dependent) {
  if (fields.empty()) throw InvalidInput("write_residual_csv: no fields");
  const spectral::GridField& f0 = fields.front();
  auto os = open_out(path);
  os << "x," << (time_dependent ? "t" : "y");
  for (std::size_t c = 0; c < fields.size(); ++c) os << ",r" << c;
  os << '\n';
  for (int ix = 0; ix < f0.nx; ++ix) {
    for (int iy = 0; iy < f0.ny; ++iy) {
      os << format_real(f0.x_of(ix)) << ',' << format_real(f0.y_of(iy));
      for (const spectral::GridField& f : fields) os << ',' << format_real(f.at(ix, iy));
      os << '\n';
    }
  }
}

void write_spectrum_csv(const fs::path& path, const spectral::Spectrum& spectrum,
                        const spectral::SpectralModes& top) {
  auto os = open_out(path);
  os << "row_kind,k_x,k_y,amplitude,phase,power\n";
  for (int jx = 0; jx < spectrum.nx; ++jx) {
    for (int jy = 0; jy < spectrum.ny; ++jy) {
      const auto k = spectrum.angular_frequency(jx, jy);
      const Real amp = spectrum.amplitude(jx, jy);
      os << "mode," << format_real(k[0]) << ',' << format_real(k[1]) << ','
         << format_real(amp) << ',' << format_real(spectrum.phase(jx, jy)) << ','
         << format_real(amp * amp) << '\n';
    }
  }
  for (const spectral::Mode& m : top.modes) {
    const Real amp = top.scale * m.alpha;
    os << "top," << format_real(m.k[0]) << ',' << format_real(m.k[1]) << ','
       << format_real(amp) << ',' << format_real(m.theta) << ',' << format_real(amp * amp)
       << '\n';
  }
}

void write_report(const fs::path& path, const config::ExperimentConfig& cfg,
                  const multistage::RunOutput& out,
                  const std::vector<std::string>& checkpoint_names,
                  const std::vector<std::string>& loss_csv_names) {
  config::KVDoc doc;
  doc.set("report.schema", "1");
  doc.set("report.method", out.report.method);
  doc.set("report.problem", out.report.problem);
  doc.set("report.problem_parameter", format_real(cfg.problem_parameter()));
  doc.set("report.seed", std::to_string(out.report.master_seed));
  doc.set("report.stage_count", std::to_string(out.solution.stages.size()));
  {
    std::ostringstream eh;
    for (std::size_t i = 0; i < out.report.epsilon_history.size(); ++i) {
      if (i) eh << ' ';
      eh << format_real(out.report.epsilon_history[i]);
    }
    doc.set("report.epsilon_history", eh.str());
  }
  doc.set("report.monotone_epsilon", out.report.monotone_epsilon ? "true" : "false");
  doc.set("report.early_stop", out.report.early_stop ? "true" : "false");
  doc.set("report.rff_uniform_fallback", out.report.rff_uniform_fallback ? "true" : "false");
  doc.set("report.line_search_warnings", out.report.line_search_warnings ? "true" : "false");
  doc.set("report.l2_error_count", std::to_string(out.report.l2_errors.size()));
  for (std::size_t i = 0; i < out.report.l2_errors.size(); ++i) {
    doc.set("report.l2_error." + std::to_string(i), format_real(out.report.l2_errors[i]));
  }
  for (std::size_t s = 0; s < out.solution.stages.size(); ++s) {
    const multistage::StageRecord& r = out.solution.stages[s];
    const std::string p = "stage." + std::to_string(s) + ".";
    doc.set(p + "init", r.init_kind);
    doc.set(p + "epsilon", format_real(r.epsilon));
    doc.set(p + "seed", std::to_string(r.seed));
    doc.set(p + "objective", format_real(r.stage_objective));
    doc.set(p + "composite_loss", format_real(r.composite_loss));
    doc.set(p + "residual_rms_after", format_real(r.residual_rms_after));
    doc.set(p + "kappa", format_real(r.kappa));
    if (s < checkpoint_names.size()) doc.set(p + "checkpoint", checkpoint_names[s]);
    if (s < loss_csv_names.size()) doc.set(p + "loss_csv", loss_csv_names[s]);
  }
  const config::KVDoc echo = cfg.to_kv();
  for (const auto& [k, v] : echo.entries()) doc.set("config." + k, v);
  auto os = open_out(path);
  os << doc.serialize();
}

LoadedReport read_report(const fs::path& path) {
  const config::KVDoc doc = config::KVDoc::parse_file(path.string());
  LoadedReport r;
  r.method = doc.get("report.method");
  r.problem = doc.get("report.problem");
  r.problem_parameter = to_real(doc.get("report.problem_parameter"));
  r.seed = std::stoull(doc.get("report.seed"));
  const int l2n = std::stoi(doc.get("report.l2_error_count"));
  for (int i = 0; i < l2n; ++i) {
    r.l2_errors.push_back(to_real(doc.get("report.l2_error." + std::to_string(i))));
  }
  {
    std::istringstream eh(doc.get("report.epsilon_history"));
    Real v;
    while (eh >> v) r.epsilon_history.push_back(v);
  }
  r.monotone_epsilon = doc.get("report.monotone_epsilon") == "true";
  const int stages = std::stoi(doc.get("report.stage_count"));
  for (int s = 0; s < stages; ++s) {
    const std::string p = "stage." + std::to_string(s) + ".";
    r.checkpoint_names.push_back(doc.get(p + "checkpoint"));
    r.stage_epsilons.push_back(to_real(doc.get(p + "epsilon")));
  }
  return r;
}

multistage::CompositeSolution load_composite(const fs::path& run_dir) {
  const LoadedReport r = read_report(run_dir / "report.txt");
  multistage::CompositeSolution sol;
  for (std::size_t s = 0; s < r.checkpoint_names.size(); ++s) {
    multistage::StageRecord rec;
    rec.net = network::load_checkpoint(run_dir / r.checkpoint_names[s]);
    rec.epsilon = r.stage_epsilons[s];
    sol.stages.push_back(std::move(rec));
  }
  if (sol.stages.empty()) throw std::runtime_error("load_composite: report lists no stages");
  return sol;
}

void write_compare_csv(const fs::path& path, const std::vector<LoadedReport>& reports) {
  // Column groups: one per (problem, parameter) pair, in ascending order.
  std::set<std::pair<std::string, Real>> groups;
  std::size_t max_comp = 1;
  for (const LoadedReport& r : reports) {
    groups.insert({r.problem, r.problem_parameter});
    max_comp = std::max(max_comp, r.l2_errors.size());
  }
  const std::vector<std::string> method_order = {"pinn", "msnn", "si_mspinn", "rff_mspinn"};
  std::vector<std::string> methods;
  for (const std::string& m : method_order) {
    for (const LoadedReport& r : reports) {
      if (r.method == m) {
        methods.push_back(m);
        break;
      }
    }
  }

  auto os = open_out(path);
  os << "method";
  for (const auto& [prob, param] : groups) {
    for (std::size_t c = 0; c < max_comp; ++c) {
      os << ',' << prob << "_param=" << format_real(param) << "_l2_" << c;
    }
  }
  os << '\n';
  for (const std::string& m : methods) {
    os << m;
    for (const auto& [prob, param] : groups) {
      const LoadedReport* found = nullptr;
      for (const LoadedReport& r : reports) {
        if (r.method == m && r.problem == prob && r.problem_parameter == param) {
          found = &r;
          break;
        }
      }
      for (std::size_t c = 0; c < max_comp; ++c) {
        if (found != nullptr && c < found->l2_errors.size()) {
          os << ',' << format_real(found->l2_errors[c]);
        } else {
          os << ",n/a";
        }
      }
    }
    os << '\n';
  }
}

fs::path make_run_directory(const fs::path& root, const std::string& config_stem,
                            std::uint64_t seed) {
  fs::create_directories(root);
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm);
  std::ostringstream base;
  base << config_stem << '-' << stamp << "-s" << seed;
  fs::path dir = root / base.str();
  for (int k = 1; fs::exists(dir); ++k) {
    dir = root / (base.str() + "-" + std::to_string(k));
  }
  fs::create_directories(dir);
  return dir;
}

}  // namespace mspinn::artifacts
