#include "proxmm/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "proxmm/problems.hpp"

namespace proxmm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  }
  if (used != value.size())
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + value);
  }
  if (used != value.size())
    throw ConfigError("config: bad integer value for '" + key + "': " + value);
  return v;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  return out;
}

Matrix parse_matrix(const std::string& key, const std::string& value) {
  std::vector<std::vector<double>> rows;
  std::string remaining = value;
  std::size_t pos = 0;
  while (pos != std::string::npos) {
    const std::size_t next = remaining.find(';', pos);
    const std::string row_text =
        remaining.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    pos = next == std::string::npos ? next : next + 1;
    auto row = parse_number_list(key, row_text);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("config: empty matrix for '" + key + "'");
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols) throw ConfigError("config: ragged matrix for '" + key + "'");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");

    if (key == "task") cfg.task = value;
    else if (key == "solver") cfg.solver = value;
    else if (key == "input") cfg.input = value;
    else if (key == "output_prefix") cfg.output_prefix = value;
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "c0") cfg.c0 = parse_double(key, value);
    else if (key == "c_factor") cfg.c_factor = parse_double(key, value);
    else if (key == "c_cap") cfg.c_cap = parse_double(key, value);
    else if (key == "eps0") cfg.eps0 = parse_double(key, value);
    else if (key == "kappa") cfg.kappa = parse_double(key, value);
    else if (key == "r") cfg.r = static_cast<int>(parse_long(key, value));
    else if (key == "kkt_tol") cfg.kkt_tol = parse_double(key, value);
    else if (key == "max_outer") cfg.max_outer = static_cast<int>(parse_long(key, value));
    else if (key == "max_inner") cfg.max_inner = static_cast<int>(parse_long(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "noise_density") cfg.noise_density = parse_double(key, value);
    else if (key == "A") {
      cfg.lasso_a = parse_matrix(key, value);
      cfg.has_a = true;
    } else if (key == "b") {
      const auto vals = parse_number_list(key, value);
      if (vals.empty()) throw ConfigError("config: empty vector for 'b'");
      cfg.lasso_b = Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
      cfg.has_b = true;
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

std::string trace_csv(const ConvergenceTrace& trace) {
  std::string out = "k,c,eps,objective,kkt_stat,kkt_feas,inner_iters,inner_grad_norm,wall_ms\n";
  char buf[512];
  for (const TraceRow& row : trace.rows) {
    char obj[64];
    if (row.objective.is_finite())
      std::snprintf(obj, sizeof obj, "%.17g", row.objective.value());
    else
      std::snprintf(obj, sizeof obj, "inf");
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s,%.17g,%.17g,%d,%.17g,%.3f\n", row.k, row.c,
                  row.eps, obj, row.kkt_stat, row.kkt_feas, row.inner_iters, row.inner_grad_norm,
                  row.wall_ms);
    out += buf;
  }
  return out;
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::InnerStalled: return "inner-stalled";
  }
  return "unknown";
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.task != "denoise" && cfg.task != "lasso")
      throw ConfigError("config: task must be 'denoise' or 'lasso'");
    if (cfg.solver != "pmm" && cfg.solver != "alm" && cfg.solver != "admm" &&
        cfg.solver != "fbn")
      throw ConfigError("config: solver must be one of pmm, alm, admm, fbn");
    if (cfg.output_prefix.empty()) throw ConfigError("config: output_prefix is required");

    // Assemble the problem and starting point.
    Image observed;
    Problem problem = [&]() -> Problem {
      if (cfg.task == "denoise") {
        if (cfg.input.empty()) throw ConfigError("config: denoise requires input");
        const Image clean = read_pgm(cfg.input);
        observed = cfg.noise_density > 0.0
                       ? salt_pepper_noise(clean, cfg.noise_density, cfg.seed)
                       : clean;
        return build_l1tv(observed, cfg.alpha);
      }
      if (!cfg.has_a || !cfg.has_b) throw ConfigError("config: lasso requires A and b");
      return build_lasso(cfg.lasso_a, cfg.lasso_b, cfg.alpha);
    }();

    const Vector x0 = cfg.task == "denoise" ? observed.pixels : Vector::Zero(problem.n());
    const Vector lambda0 = Vector::Zero(problem.m());

    ConvergenceTrace trace;
    Vector solution;
    if (cfg.solver == "pmm" || cfg.solver == "alm") {
      OuterConfig ocfg;
      ocfg.c_schedule = cfg.c_factor > 1.0
                            ? CSchedule::geometric(cfg.c0, cfg.c_factor, cfg.c_cap)
                            : CSchedule::constant(cfg.c0);
      ocfg.eps_schedule = EpsSchedule{cfg.eps0, cfg.kappa};
      ocfg.r = cfg.r;
      ocfg.max_outer = cfg.max_outer;
      ocfg.kkt_tol = cfg.kkt_tol;
      ocfg.inner.max_iters = cfg.max_inner;
      SolveResult res = cfg.solver == "pmm" ? pmm_solve(problem, ocfg, x0, lambda0)
                                            : alm_solve(problem, ocfg, x0, lambda0);
      trace = std::move(res.trace);
      solution = std::move(res.state.x);
    } else if (cfg.solver == "admm") {
      AdmmResult res = admm_solve(problem, cfg.c0, cfg.max_outer, cfg.kkt_tol, x0,
                                  problem.e.apply(x0), lambda0);
      trace = std::move(res.trace);
      solution = std::move(res.state.x);
    } else {  // fbn
      if (!std::holds_alternative<LinearOperator::Identity>(problem.e.node()))
        throw ConfigError("config: solver 'fbn' requires a task with E = identity (lasso)");
      FbnConfig fcfg;
      fcfg.tol = cfg.kkt_tol;
      fcfg.max_iters = cfg.max_outer;
      FbnResult res = fb_newton_solve(problem, cfg.c0, fcfg);
      trace = std::move(res.trace);
      solution = std::move(res.x);
    }

    const std::filesystem::path parent = std::filesystem::path(cfg.output_prefix).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    write_text_file(cfg.output_prefix + ".trace.csv", trace_csv(trace));
    if (cfg.task == "denoise") {
      if (cfg.noise_density > 0.0) write_pgm(observed, cfg.output_prefix + ".noisy.pgm");
      Image restored;
      restored.side = observed.side;
      restored.pixels = solution.cwiseMax(0.0).cwiseMin(1.0);
      write_pgm(restored, cfg.output_prefix + ".out.pgm");
    }

    const double final_obj =
        trace.rows.empty() ? objective_value(problem, solution).value_or(
                                 std::numeric_limits<double>::infinity())
                           : trace.rows.back().objective.value_or(
                                 std::numeric_limits<double>::infinity());
    out << cfg.task << "/" << cfg.solver << ": " << status_name(trace.status) << " after "
        << trace.rows.size() << " iterations, objective " << final_obj << "\n";
    return trace.status == SolveStatus::Converged ? kExitSolved : kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_config_file(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_run_config(path);
    return run(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace proxmm
