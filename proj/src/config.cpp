#include "pensplit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pensplit/trace.hpp"

namespace pensplit {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

/// Flat INI-style document: [section] headers, key = value lines,
/// '#' comments. Duplicate keys are an error.
std::map<std::string, Section> parse_sections(const std::string& text) {
  std::map<std::string, Section> doc;
  std::string current;
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: unterminated section header on line " +
                          std::to_string(line_no));
      }
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) {
        throw ConfigError("config: empty section name on line " + std::to_string(line_no));
      }
      doc[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected 'key = value' on line " + std::to_string(line_no));
    }
    if (current.empty()) {
      throw ConfigError("config: key outside any section on line " + std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config: empty key on line " + std::to_string(line_no));
    }
    if (doc[current].count(key)) {
      throw ConfigError("config: duplicate key '" + key + "' on line " +
                        std::to_string(line_no));
    }
    doc[current][key] = Entry{trim(line.substr(eq + 1)), line_no};
  }
  return doc;
}

double parse_number(const std::string& key, const Entry& e) {
  std::string s = e.value;
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config: malformed number for key '" + key + "' on line " +
                      std::to_string(e.line));
  }
  return v;
}

long parse_integer(const std::string& key, const Entry& e) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw ConfigError("config: malformed integer for key '" + key + "' on line " +
                      std::to_string(e.line));
  }
  return v;
}

bool parse_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError("config: malformed boolean for key '" + key + "' on line " +
                    std::to_string(e.line));
}

std::vector<double> parse_number_list(const std::string& key, const Entry& e,
                                      const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(text);
  while (is >> token) {
    if (token == "inf" || token == "+inf") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    if (token == "-inf") {
      out.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ConfigError("config: malformed number '" + token + "' for key '" + key +
                        "' on line " + std::to_string(e.line));
    }
    out.push_back(v);
  }
  return out;
}

Vector parse_vector(const std::string& key, const Entry& e) {
  std::string s = e.value;
  for (char& ch : s) {
    if (ch == ',') ch = ' ';
  }
  const std::vector<double> vals = parse_number_list(key, e, s);
  if (vals.empty()) {
    throw ConfigError("config: empty vector for key '" + key + "' on line " +
                      std::to_string(e.line));
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

/// Rows separated by ';', entries by whitespace or commas.
Matrix parse_matrix(const std::string& key, const Entry& e) {
  std::vector<std::vector<double>> rows;
  std::string s = e.value;
  for (char& ch : s) {
    if (ch == ',') ch = ' ';
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(';', start);
    const std::string row_text =
        pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start);
    rows.push_back(parse_number_list(key, e, row_text));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (rows.empty() || rows[0].empty()) {
    throw ConfigError("config: empty matrix for key '" + key + "' on line " +
                      std::to_string(e.line));
  }
  const std::size_t cols = rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != cols) {
      throw ConfigError("config: ragged matrix for key '" + key + "' on line " +
                        std::to_string(e.line));
    }
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void reject_unknown_keys(const std::string& section, const Section& sec,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, entry] : sec) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + key + "' in section [" + section +
                        "] on line " + std::to_string(entry.line));
    }
  }
}

const Entry& require_key(const std::string& section, const Section& sec,
                         const std::string& key) {
  const auto it = sec.find(key);
  if (it == sec.end()) {
    throw ConfigError("config: missing required key '" + key + "' in section [" + section +
                      "]");
  }
  return it->second;
}

const std::map<std::string, std::set<std::string>>& problem_schemas() {
  static const std::map<std::string, std::set<std::string>> schemas = {
      {"quadratic_over_nullspace", {"name", "d", "L", "box_lo", "box_hi"}},
      {"strongly_monotone", {"name", "gamma", "target", "box_lo", "box_hi"}},
      {"saddle_composite", {"name", "Q1", "d1", "Q2", "K", "L"}},
  };
  return schemas;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const auto doc = parse_sections(text);
  static const std::set<std::string> known_sections = {"problem", "solver", "schedule",
                                                       "stopping", "run"};
  for (const auto& [name, sec] : doc) {
    if (!known_sections.count(name)) {
      throw ConfigError("config: unknown section [" + name + "]");
    }
  }

  RunConfig cfg;

  // [problem]
  const auto problem_it = doc.find("problem");
  if (problem_it == doc.end()) throw ConfigError("config: missing section [problem]");
  const Section& prob = problem_it->second;
  cfg.problem_name = require_key("problem", prob, "name").value;
  const auto schema = problem_schemas().find(cfg.problem_name);
  if (schema == problem_schemas().end()) {
    throw ConfigError("config: unknown problem '" + cfg.problem_name + "'");
  }
  reject_unknown_keys("problem", prob, schema->second);
  for (const auto& [key, entry] : prob) {
    if (key != "name") cfg.problem_params[key] = entry.value;
  }

  // [solver]
  const auto solver_it = doc.find("solver");
  if (solver_it == doc.end()) throw ConfigError("config: missing section [solver]");
  const Section& solver = solver_it->second;
  reject_unknown_keys("solver", solver, {"name", "x0", "v0"});
  const std::string solver_name = require_key("solver", solver, "name").value;
  const auto kind = solver_kind_from_string(solver_name);
  if (!kind) throw ConfigError("config: unknown solver '" + solver_name + "'");
  cfg.solver = *kind;
  if (solver.count("x0")) cfg.x0 = parse_vector("x0", solver.at("x0"));
  if (solver.count("v0")) cfg.v0 = parse_vector("v0", solver.at("v0"));

  // [schedule]
  const auto sched_it = doc.find("schedule");
  if (sched_it == doc.end()) throw ConfigError("config: missing section [schedule]");
  const Section& sched = sched_it->second;
  reject_unknown_keys("schedule", sched, {"lambda0", "p", "beta0", "q"});
  cfg.lambda0 = parse_number("lambda0", require_key("schedule", sched, "lambda0"));
  cfg.p = parse_number("p", require_key("schedule", sched, "p"));
  cfg.beta0 = parse_number("beta0", require_key("schedule", sched, "beta0"));
  cfg.q = parse_number("q", require_key("schedule", sched, "q"));
  if (!(cfg.lambda0 > 0.0)) {
    throw ConfigError("config: lambda0 must be positive (line " +
                      std::to_string(sched.at("lambda0").line) + ")");
  }
  if (!(cfg.beta0 > 0.0)) {
    throw ConfigError("config: beta0 must be positive (line " +
                      std::to_string(sched.at("beta0").line) + ")");
  }

  // [stopping] (optional; defaults)
  if (const auto it = doc.find("stopping"); it != doc.end()) {
    reject_unknown_keys("stopping", it->second, {"max_iter", "tol", "record_every"});
    if (it->second.count("max_iter")) {
      cfg.stopping.max_iter = parse_integer("max_iter", it->second.at("max_iter"));
      if (cfg.stopping.max_iter < 0) throw ConfigError("config: max_iter must be >= 0");
    }
    if (it->second.count("tol")) {
      cfg.stopping.tol = parse_number("tol", it->second.at("tol"));
      if (!(cfg.stopping.tol > 0.0)) throw ConfigError("config: tol must be positive");
    }
    if (it->second.count("record_every")) {
      cfg.stopping.record_every = parse_integer("record_every", it->second.at("record_every"));
      if (cfg.stopping.record_every < 1) {
        throw ConfigError("config: record_every must be >= 1");
      }
    }
  }

  // [run] (optional)
  if (const auto it = doc.find("run"); it != doc.end()) {
    reject_unknown_keys("run", it->second, {"seed", "output", "override_admissibility"});
    if (it->second.count("seed")) {
      const long s = parse_integer("seed", it->second.at("seed"));
      if (s < 0) throw ConfigError("config: seed must be nonnegative");
      cfg.seed = static_cast<unsigned>(s);
    }
    if (it->second.count("output")) cfg.output_path = it->second.at("output").value;
    if (it->second.count("override_admissibility")) {
      cfg.override_admissibility =
          parse_bool("override_admissibility", it->second.at("override_admissibility"));
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

namespace {

Entry fake_entry(const std::string& value) { return Entry{value, 0}; }

std::optional<BoxBounds> box_from_params(const RunConfig& cfg) {
  const bool has_lo = cfg.problem_params.count("box_lo") > 0;
  const bool has_hi = cfg.problem_params.count("box_hi") > 0;
  if (has_lo != has_hi) {
    throw ConfigError("config: box_lo and box_hi must be given together");
  }
  if (!has_lo) return std::nullopt;
  return BoxBounds{parse_vector("box_lo", fake_entry(cfg.problem_params.at("box_lo"))),
                   parse_vector("box_hi", fake_entry(cfg.problem_params.at("box_hi")))};
}

const std::string& require_param(const RunConfig& cfg, const std::string& key) {
  const auto it = cfg.problem_params.find(key);
  if (it == cfg.problem_params.end()) {
    throw ConfigError("config: problem '" + cfg.problem_name + "' requires key '" + key +
                      "'");
  }
  return it->second;
}

}  // namespace

ProblemInstance build_problem(const RunConfig& cfg) {
  if (cfg.problem_name == "quadratic_over_nullspace") {
    const Vector d = parse_vector("d", fake_entry(require_param(cfg, "d")));
    const Matrix l = parse_matrix("L", fake_entry(require_param(cfg, "L")));
    return make_quadratic_over_nullspace(d, LinearMap(l), box_from_params(cfg));
  }
  if (cfg.problem_name == "strongly_monotone") {
    const double gamma = parse_number("gamma", fake_entry(require_param(cfg, "gamma")));
    const Vector target = parse_vector("target", fake_entry(require_param(cfg, "target")));
    const int n = static_cast<int>(target.size());
    const std::optional<BoxBounds> box = box_from_params(cfg);
    ConvexSet c = box ? ConvexSet::box(box->lo, box->hi) : ConvexSet::whole_space(n);
    MonotoneOperator b = MonotoneOperator::projection_residual(c);
    return make_strongly_monotone(gamma, target, std::move(b), std::move(c));
  }
  if (cfg.problem_name == "saddle_composite") {
    const Matrix q1 = parse_matrix("Q1", fake_entry(require_param(cfg, "Q1")));
    const Vector d1 = parse_vector("d1", fake_entry(require_param(cfg, "d1")));
    const Matrix q2 = parse_matrix("Q2", fake_entry(require_param(cfg, "Q2")));
    const Matrix k = parse_matrix("K", fake_entry(require_param(cfg, "K")));
    const Matrix l = parse_matrix("L", fake_entry(require_param(cfg, "L")));
    return make_saddle_composite(q1, d1, q2, LinearMap(k), LinearMap(l));
  }
  throw ConfigError("config: unknown problem '" + cfg.problem_name + "'");
}

namespace {

/// A representative nonzero element of ran N_C, if the range is nontrivial.
std::optional<Vector> representative_normal_range_element(const ConvexSet& c) {
  const int n = c.dim();
  switch (c.kind()) {
    case ConvexSet::Kind::Box: {
      Vector p = Vector::Zero(n);
      bool any = false;
      for (int i = 0; i < n; ++i) {
        if (std::isfinite(c.lower()(i))) {
          p(i) = -1.0;
          any = true;
        } else if (std::isfinite(c.upper()(i))) {
          p(i) = 1.0;
          any = true;
        }
      }
      return any ? std::optional<Vector>(p) : std::nullopt;
    }
    case ConvexSet::Kind::Subspace: {
      Vector g = Vector::Ones(c.map().rows());
      Vector p = c.map().apply_adjoint(g);
      if (p.norm() <= 1e-12) {
        // All-ones annihilated by L^T; fall back to single rows.
        for (int i = 0; i < c.map().rows(); ++i) {
          p = c.map().apply_adjoint(Vector::Unit(c.map().rows(), i));
          if (p.norm() > 1e-12) return p;
        }
        return std::nullopt;
      }
      return p;
    }
    case ConvexSet::Kind::Singleton:
      return Vector::Ones(n);
    case ConvexSet::Kind::Ball:
      return Vector::Unit(n, 0);
    case ConvexSet::Kind::WholeSpace:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string hypothesis_ii_status(const ProblemInstance& pr, const PolynomialSchedule& s) {
  const std::optional<Vector> p = representative_normal_range_element(pr.c);
  if (!p) return "trivial";  // ran N_C = {0}: the gap sum is identically zero
  try {
    const PenaltyGap g = penalty_gap(pr.b, pr.c, *p, s.beta(1));
    return g.exact ? "exact" : "upper_bound";
  } catch (const UnsupportedError&) {
    return "unverified";
  } catch (const DomainError&) {
    return "unverified";
  }
}

nlohmann::json schedule_report_json(const ScheduleReport& rep) {
  nlohmann::json j;
  j["in_l2"] = rep.in_l2;
  j["in_l1"] = rep.in_l1;
  j["l2_not_l1"] = rep.l2_not_l1;
  j["penalty_ratio_summable"] = rep.penalty_ratio_summable;
  j["lambda_limit"] =
      rep.lambda_limit.is_finite() ? nlohmann::json(rep.lambda_limit.value()) : "inf";
  j["lambda_beta_limit"] = rep.lambda_beta_limit.is_finite()
                               ? nlohmann::json(rep.lambda_beta_limit.value())
                               : "inf";
  return j;
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Rejected: return "rejected";
    case RunStatus::AbortedNonFinite: return "aborted_nonfinite";
  }
  return "?";
}

}  // namespace

int run_command(const RunConfig& cfg) {
  const ProblemInstance pr = build_problem(cfg);

  // Randomized integrity audits (seeded from the config; the solver path
  // itself is deterministic).
  const ModuliAudit audit = audit_moduli(pr, 200, cfg.seed == 0 ? 20240002 : cfg.seed);
  if (!audit.ok) {
    throw std::logic_error("problem integrity audit failed: " + audit.detail);
  }
  if (pr.oracle &&
      !verify_oracle(pr, *pr.oracle, 1e-8, 500, cfg.seed == 0 ? 20240001 : cfg.seed)) {
    throw std::logic_error("oracle certificate failed the zero-set check");
  }

  const PolynomialSchedule schedule(cfg.lambda0, cfg.p, cfg.beta0, cfg.q);
  RunOptions opts;
  opts.x0 = cfg.x0;
  opts.v0 = cfg.v0;
  opts.override_admissibility = cfg.override_admissibility;

  const RunResult result = run(pr, schedule, cfg.solver, cfg.stopping, opts);

  if (result.status == RunStatus::Rejected) {
    for (const std::string& r : result.reject_reasons) {
      std::cerr << "hypothesis rejected: " << r << "\n";
    }
  }

  const ScheduleReport rep = classify(schedule);
  const Admissibility adm = admissible_for(schedule, cfg.solver, pr.schedule_moduli(cfg.solver));
  nlohmann::json summary;
  summary["problem"] = cfg.problem_name;
  summary["solver"] = to_string(cfg.solver);
  summary["schedule"] = {{"lambda0", cfg.lambda0}, {"p", cfg.p}, {"beta0", cfg.beta0},
                         {"q", cfg.q}};
  summary["schedule_report"] = schedule_report_json(rep);
  summary["admissible"] = adm.ok;
  summary["admissibility_reasons"] = adm.reasons;
  summary["hypothesis_ii"] = hypothesis_ii_status(pr, schedule);
  summary["status"] = status_name(result.status);
  summary["iterations"] = result.iterations;
  summary["stopped_by_tolerance"] = result.stopped_by_tolerance;
  summary["hypothesis_unverified"] = result.hypothesis_unverified;
  summary["oracle_present"] = pr.oracle.has_value();
  if (!result.records.empty()) {
    const IterationRecord& last = result.records.back();
    nlohmann::json fin;
    fin["n"] = last.n;
    fin["step_displacement"] = last.step_displacement;
    fin["penalty_residual"] = last.penalty_residual;
    if (last.oracle_error_x) fin["oracle_error_x"] = *last.oracle_error_x;
    if (last.oracle_error_z) fin["oracle_error_z"] = *last.oracle_error_z;
    summary["final"] = fin;
  }

  try {
    write_trace(result.records, cfg.output_path);
    write_text_file(summary.dump(2) + "\n", cfg.output_path + ".summary.json");
  } catch (const TraceIoError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  }

  switch (result.status) {
    case RunStatus::Completed: return 0;
    case RunStatus::Rejected: return 2;
    case RunStatus::AbortedNonFinite: return 3;
  }
  return 0;
}

std::string describe_problems() {
  std::string out;
  out += "quadratic_over_nullspace: d (vector), L (matrix), box_lo/box_hi (vectors, optional)\n";
  out += "strongly_monotone: gamma (number), target (vector), box_lo/box_hi (vectors, optional)\n";
  out += "saddle_composite: Q1 (matrix), d1 (vector), Q2 (matrix), K (matrix), L (matrix)\n";
  return out;
}

std::string describe_schedule(const PolynomialSchedule& s, SolverKind kind,
                              const ScheduleModuli& moduli) {
  const ScheduleReport rep = classify(s);
  std::ostringstream os;
  os << "schedule: lambda_n = " << s.lambda0() << " * n^-" << s.p() << ", beta_n = "
     << s.beta0() << " * n^" << s.q() << "\n";
  os << "  in l2: " << (rep.in_l2 ? "yes" : "no") << "\n";
  os << "  in l1: " << (rep.in_l1 ? "yes" : "no") << "\n";
  os << "  l2 \\ l1 (hypothesis (iii)): " << (rep.l2_not_l1 ? "yes" : "no") << "\n";
  os << "  sum lambda/beta finite (hypothesis (ii) sufficient): "
     << (rep.penalty_ratio_summable ? "yes" : "no") << "\n";
  os << "  lim lambda_n beta_n: " << rep.lambda_beta_limit << "\n";
  const Admissibility adm = admissible_for(s, kind, moduli);
  os << "  admissible for " << to_string(kind) << ": " << (adm.ok ? "yes" : "no") << "\n";
  for (const std::string& r : adm.reasons) os << "    " << r << "\n";
  return os.str();
}

}  // namespace pensplit
