#include "dagopt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dagopt/errors.hpp"

namespace dagopt {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_line(const std::string& line, char sep = ',') {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& token, const std::string& where) {
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    while (used < token.size() &&
           std::isspace(static_cast<unsigned char>(token[used]))) {
      ++used;
    }
    if (used != token.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw IoError("bad number '" + token + "' in " + where);
  }
}

std::vector<std::vector<double>> read_csv_rows(
    const std::filesystem::path& path, bool skip_header) {
  std::istringstream stream(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    for (const auto& token : split_line(line)) {
      row.push_back(parse_double(token, path.string()));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("ragged CSV: " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty CSV: " + path.string());
  return rows;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json adjacency_to_json(const Adjacency& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Mat>
Mat json_to_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) {
    throw IoError("expected nested array in " + where);
  }
  Mat m(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw IoError("ragged nested array in " + where);
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = row[static_cast<std::size_t>(j)]
                    .get<typename Mat::Scalar>();
    }
  }
  return m;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

void write_matrix_csv(const std::filesystem::path& path, const Adjacency& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += std::to_string(m(i, j));
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  return rows_to_matrix(read_csv_rows(path, /*skip_header=*/false));
}

Adjacency read_adjacency_csv(const std::filesystem::path& path) {
  const Matrix m = read_matrix_csv(path);
  Adjacency adj(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v != 0.0 && v != 1.0) {
        throw IoError("adjacency entries must be 0/1: " + path.string());
      }
      adj(i, j) = static_cast<int>(v);
    }
  }
  return adj;
}

void write_dataset(const std::filesystem::path& base, const Dataset& data) {
  std::string csv;
  for (Eigen::Index j = 0; j < data.d(); ++j) {
    if (j) csv += ',';
    csv += "X" + std::to_string(j + 1);
  }
  csv += '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.d(); ++j) {
      if (j) csv += ',';
      csv += format_double(data.x(i, j));
    }
    csv += '\n';
  }
  atomic_write_text(base.string() + ".csv", csv);

  json meta;
  meta["seed"] = data.seed;
  meta["noise_std"] = data.noise_std;
  meta["n"] = data.n();
  meta["d"] = data.d();
  if (data.ground_truth) meta["ground_truth"] = adjacency_to_json(*data.ground_truth);
  if (data.true_weights) meta["true_weights"] = matrix_to_json(*data.true_weights);
  atomic_write_text(base.string() + ".meta.json", meta.dump(2) + "\n");
}

Dataset read_dataset(const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  fs::path csv_path = base;
  if (csv_path.extension() != ".csv") csv_path += ".csv";
  const Matrix x = rows_to_matrix(read_csv_rows(csv_path, /*skip_header=*/true));

  std::optional<Adjacency> truth;
  std::optional<WeightMatrix> weights;
  std::uint64_t seed = 0;
  double noise_std = 1.0;

  fs::path meta_path = csv_path;
  meta_path.replace_extension();
  meta_path += ".meta.json";
  if (fs::exists(meta_path)) {
    json meta;
    try {
      meta = json::parse(read_file(meta_path));
    } catch (const json::exception& e) {
      throw IoError("bad metadata JSON " + meta_path.string() + ": " + e.what());
    }
    seed = meta.value("seed", std::uint64_t{0});
    noise_std = meta.value("noise_std", 1.0);
    if (meta.contains("ground_truth")) {
      truth = json_to_matrix<Adjacency>(meta["ground_truth"], meta_path.string());
    }
    if (meta.contains("true_weights")) {
      weights = json_to_matrix<Matrix>(meta["true_weights"], meta_path.string());
    }
  }
  return Dataset::from_matrix(x, std::move(truth), std::move(weights), seed,
                              noise_std);
}

std::string trace_to_csv(const Trace& trace, bool include_timings) {
  std::string out =
      "k,rho,alpha,h,f,l1,inner_iters,inner_status,grad_norm,cycles_005,"
      "seconds\n";
  for (const auto& r : trace) {
    out += std::to_string(r.k) + ',' + format_double(r.rho) + ',' +
           format_double(r.alpha) + ',' + format_double(r.h) + ',' +
           format_double(r.f) + ',' + format_double(r.l1) + ',' +
           std::to_string(r.inner_iters) + ',' + to_string(r.inner_status) +
           ',' + format_double(r.grad_norm) + ',' +
           std::to_string(r.cycles_005) + ',' +
           format_double(include_timings ? r.seconds : 0.0) + '\n';
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace,
                     bool include_timings) {
  atomic_write_text(path, trace_to_csv(trace, include_timings));
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::istringstream stream(read_file(path));
  std::string line;
  if (!std::getline(stream, line)) throw IoError("empty trace: " + path.string());
  Trace trace;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 11) throw IoError("bad trace row: " + path.string());
    IterationRecord r;
    r.k = static_cast<int>(parse_double(fields[0], path.string()));
    r.rho = parse_double(fields[1], path.string());
    r.alpha = parse_double(fields[2], path.string());
    r.h = parse_double(fields[3], path.string());
    r.f = parse_double(fields[4], path.string());
    r.l1 = parse_double(fields[5], path.string());
    r.inner_iters = static_cast<int>(parse_double(fields[6], path.string()));
    if (fields[7] == "converged") r.inner_status = InnerStatus::Converged;
    else if (fields[7] == "max_iters") r.inner_status = InnerStatus::MaxIters;
    else if (fields[7] == "numerical_failure") r.inner_status = InnerStatus::NumericalFailure;
    else throw IoError("bad inner_status '" + fields[7] + "': " + path.string());
    r.grad_norm = parse_double(fields[8], path.string());
    r.cycles_005 = static_cast<long>(parse_double(fields[9], path.string()));
    r.seconds = parse_double(fields[10], path.string());
    trace.push_back(r);
  }
  return trace;
}

void write_solve_summary(const std::filesystem::path& path,
                         const SolveResult& result, const SolverConfig& cfg,
                         bool include_timings) {
  json summary;
  summary["termination"] = to_string(result.termination);
  summary["outer_iterations"] = result.trace.size();
  summary["method"] = to_string(cfg.kind);
  summary["optimizer"] = to_string(cfg.optimizer);
  summary["threshold"] = cfg.omega;
  if (!result.trace.empty()) {
    const auto& last = result.trace.back();
    summary["h_final"] = last.h;
    summary["f_final"] = last.f;
    summary["rho_final"] = last.rho;
    summary["alpha_final"] = last.alpha;
  }
  double total_seconds = 0.0;
  for (const auto& r : result.trace) total_seconds += r.seconds;
  summary["seconds_total"] = include_timings ? total_seconds : 0.0;
  summary["edges_at_threshold"] = result.thresholded.sum();
  atomic_write_text(path, summary.dump(2) + "\n");
}

namespace {

const std::unordered_map<std::string, SolverKind> kKindNames = {
    {"qpm", SolverKind::Qpm}, {"alm", SolverKind::Alm}};
const std::unordered_map<std::string, OptimizerKind> kOptimizerNames = {
    {"lbfgs", OptimizerKind::Lbfgs},
    {"adam", OptimizerKind::Adam},
    {"momentum", OptimizerKind::Momentum}};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double config_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

int config_int(const std::string& key, const std::string& value) {
  const double v = config_double(key, value);
  if (v != static_cast<int>(v)) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

SolverKind parse_solver_kind(const std::string& name) {
  const auto it = kKindNames.find(name);
  if (it == kKindNames.end()) {
    throw ConfigError("kind", "must be qpm or alm, got '" + name + "'");
  }
  return it->second;
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
  const auto it = kOptimizerNames.find(name);
  if (it == kOptimizerNames.end()) {
    throw ConfigError("optimizer",
                      "must be lbfgs, adam or momentum, got '" + name + "'");
  }
  return it->second;
}

ConstraintKind parse_constraint_name(const std::string& name) {
  if (name == "exp") return ConstraintKind::exponential();
  if (name == "bin") return ConstraintKind{ConstraintKind::Tag::Bin, 0.0};
  throw ConfigError("constraint", "must be exp or bin, got '" + name + "'");
}

SolverConfig parse_solver_config_text(const std::string& text) {
  SolverConfig cfg;
  double bin_c = 0.0;  // 0 = use the 1/d default at solve time
  bool use_bin = false;

  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(trim(line), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "kind") {
      const auto it = kKindNames.find(value);
      if (it == kKindNames.end()) throw ConfigError(key, "must be qpm or alm");
      cfg.kind = it->second;
    } else if (key == "constraint") {
      if (value == "exp") use_bin = false;
      else if (value == "bin") use_bin = true;
      else throw ConfigError(key, "must be exp or bin");
    } else if (key == "bin_c") {
      bin_c = config_double(key, value);
      if (!(bin_c > 0.0)) throw ConfigError(key, "must be > 0");
    } else if (key == "rho0") {
      cfg.rho0 = config_double(key, value);
    } else if (key == "beta") {
      cfg.beta = config_double(key, value);
    } else if (key == "gamma") {
      cfg.gamma = config_double(key, value);
    } else if (key == "alpha0") {
      cfg.alpha0 = config_double(key, value);
    } else if (key == "eps_h") {
      cfg.eps_h = config_double(key, value);
    } else if (key == "rho_max") {
      cfg.rho_max = config_double(key, value);
    } else if (key == "tau_kind") {
      if (value == "constant") cfg.tau.kind = TauSchedule::Kind::Constant;
      else if (value == "geometric") cfg.tau.kind = TauSchedule::Kind::Geometric;
      else throw ConfigError(key, "must be constant or geometric");
    } else if (key == "tau0") {
      cfg.tau.tau0 = config_double(key, value);
    } else if (key == "tau_decay") {
      cfg.tau.decay = config_double(key, value);
    } else if (key == "tau_floor") {
      cfg.tau.floor = config_double(key, value);
    } else if (key == "lambda") {
      cfg.lambda = config_double(key, value);
    } else if (key == "optimizer") {
      const auto it = kOptimizerNames.find(value);
      if (it == kOptimizerNames.end()) {
        throw ConfigError(key, "must be lbfgs, adam or momentum");
      }
      cfg.optimizer = it->second;
    } else if (key == "lbfgs_memory") {
      cfg.lbfgs_memory = config_int(key, value);
    } else if (key == "inner_max_iters") {
      cfg.inner_max_iters = config_int(key, value);
    } else if (key == "adam_step") {
      cfg.adam_step = config_double(key, value);
    } else if (key == "momentum_step") {
      cfg.momentum_step = config_double(key, value);
    } else if (key == "momentum") {
      cfg.momentum = config_double(key, value);
    } else if (key == "max_outer") {
      cfg.max_outer = config_int(key, value);
    } else if (key == "omega") {
      cfg.omega = config_double(key, value);
    } else {
      throw ConfigError(key, "unknown field");
    }
  }

  if (use_bin) {
    // A d-independent scaling must be given explicitly; otherwise the
    // solver applies c = 1/d once it sees the data dimension.
    cfg.constraint = bin_c > 0.0 ? ConstraintKind::binomial(bin_c)
                                 : ConstraintKind{ConstraintKind::Tag::Bin, 0.0};
  } else {
    cfg.constraint = ConstraintKind::exponential();
  }
  return cfg;
}

SolverConfig read_solver_config(const std::filesystem::path& path) {
  return parse_solver_config_text(read_file(path));
}

std::string solver_config_to_text(const SolverConfig& cfg) {
  std::string out;
  out += std::string("kind = ") + to_string(cfg.kind) + '\n';
  out += std::string("constraint = ") +
         (cfg.constraint.tag == ConstraintKind::Tag::Exp ? "exp" : "bin") + '\n';
  if (cfg.constraint.tag == ConstraintKind::Tag::Bin && cfg.constraint.c > 0.0) {
    out += "bin_c = " + format_double(cfg.constraint.c) + '\n';
  }
  out += "rho0 = " + format_double(cfg.rho0) + '\n';
  out += "beta = " + format_double(cfg.beta) + '\n';
  out += "gamma = " + format_double(cfg.gamma) + '\n';
  out += "alpha0 = " + format_double(cfg.alpha0) + '\n';
  out += "eps_h = " + format_double(cfg.eps_h) + '\n';
  out += "rho_max = " + format_double(cfg.rho_max) + '\n';
  out += std::string("tau_kind = ") +
         (cfg.tau.kind == TauSchedule::Kind::Constant ? "constant" : "geometric") +
         '\n';
  out += "tau0 = " + format_double(cfg.tau.tau0) + '\n';
  if (cfg.tau.kind == TauSchedule::Kind::Geometric) {
    out += "tau_decay = " + format_double(cfg.tau.decay) + '\n';
    out += "tau_floor = " + format_double(cfg.tau.floor) + '\n';
  }
  out += "lambda = " + format_double(cfg.lambda) + '\n';
  out += std::string("optimizer = ") + to_string(cfg.optimizer) + '\n';
  out += "lbfgs_memory = " + std::to_string(cfg.lbfgs_memory) + '\n';
  out += "inner_max_iters = " + std::to_string(cfg.inner_max_iters) + '\n';
  out += "adam_step = " + format_double(cfg.adam_step) + '\n';
  out += "momentum_step = " + format_double(cfg.momentum_step) + '\n';
  out += "momentum = " + format_double(cfg.momentum) + '\n';
  out += "max_outer = " + std::to_string(cfg.max_outer) + '\n';
  out += "omega = " + format_double(cfg.omega) + '\n';
  return out;
}

}  // namespace dagopt
