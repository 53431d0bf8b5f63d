#include "riskalloc/serialize.hpp"

#include <cmath>
#include <limits>

#include "riskalloc/format.hpp"

namespace riskalloc {

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::Parse, field + ": " + msg);
}

const Json& member(const Json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

std::vector<double> number_array(const Json& v, const std::string& path,
                                 std::optional<std::size_t> expected) {
  if (!v.is_array()) parse_fail(path, "expected an array of numbers");
  if (expected && v.size() != *expected) {
    parse_fail(path, "expected " + std::to_string(*expected) + " numbers, got " +
                         std::to_string(v.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      parse_fail(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    const double d = v[i].get<double>();
    if (!std::isfinite(d) || d < 0.0) {
      parse_fail(path + "[" + std::to_string(i) + "]",
                 "must be finite and nonnegative");
    }
    out.push_back(d);
  }
  return out;
}

std::string optional_name(const Json& obj, const std::string& path) {
  auto it = obj.find("name");
  if (it == obj.end()) return {};
  if (!it->is_string()) parse_fail(path + ".name", "expected a string");
  return it->get<std::string>();
}

Json round_all(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double d : v) arr.push_back(round_significant(d));
  return arr;
}

}  // namespace

Json problem_to_json(const ProblemInstance& problem) {
  const auto& labels = problem.labels();
  const Matrix& mu = problem.species().mean_traits();
  const Matrix& var = problem.species().trait_variances();
  const Matrix& req = problem.tasks().requirements();

  Json doc = Json::object();
  if (!labels.traits.empty()) doc["trait_names"] = labels.traits;
  Json species = Json::array();
  for (std::size_t s = 0; s < problem.num_species(); ++s) {
    Json e = Json::object();
    if (!labels.species.empty()) e["name"] = labels.species[s];
    e["mu"] = std::vector<double>(mu.row(s).begin(), mu.row(s).end());
    e["var"] = std::vector<double>(var.row(s).begin(), var.row(s).end());
    e["count"] = problem.team().count(s);
    species.push_back(std::move(e));
  }
  doc["species"] = std::move(species);
  Json tasks = Json::array();
  for (std::size_t m = 0; m < problem.num_tasks(); ++m) {
    Json e = Json::object();
    if (!labels.tasks.empty()) e["name"] = labels.tasks[m];
    e["requirements"] =
        std::vector<double>(req.row(m).begin(), req.row(m).end());
    tasks.push_back(std::move(e));
  }
  doc["tasks"] = std::move(tasks);
  return doc;
}

ProblemInstance problem_from_json(const Json& doc) {
  if (!doc.is_object()) parse_fail("<root>", "expected an object");
  const Json& species = member(doc, "<root>", "species");
  const Json& tasks = member(doc, "<root>", "tasks");
  if (!species.is_array() || species.empty()) {
    parse_fail("species", "expected a nonempty array");
  }
  if (!tasks.is_array() || tasks.empty()) {
    parse_fail("tasks", "expected a nonempty array");
  }

  ProblemLabels labels;
  std::optional<std::size_t> traits;
  if (auto it = doc.find("trait_names"); it != doc.end()) {
    if (!it->is_array()) parse_fail("trait_names", "expected an array");
    for (std::size_t u = 0; u < it->size(); ++u) {
      if (!(*it)[u].is_string()) {
        parse_fail("trait_names[" + std::to_string(u) + "]",
                   "expected a string");
      }
      labels.traits.push_back((*it)[u].get<std::string>());
    }
    traits = labels.traits.size();
  }

  std::vector<std::vector<double>> mu_rows, var_rows, req_rows;
  std::vector<std::int64_t> counts;
  bool any_species_name = false;
  for (std::size_t s = 0; s < species.size(); ++s) {
    const std::string path = "species[" + std::to_string(s) + "]";
    const Json& e = species[s];
    if (!e.is_object()) parse_fail(path, "expected an object");
    mu_rows.push_back(number_array(member(e, path, "mu"), path + ".mu", traits));
    if (!traits) traits = mu_rows.back().size();
    var_rows.push_back(
        number_array(member(e, path, "var"), path + ".var", traits));
    const Json& c = member(e, path, "count");
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
      parse_fail(path + ".count", "expected a nonnegative integer");
    }
    counts.push_back(c.get<std::int64_t>());
    labels.species.push_back(optional_name(e, path));
    any_species_name |= e.contains("name");
  }
  if (*traits == 0) parse_fail("species[0].mu", "need at least one trait");

  bool any_task_name = false;
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    const std::string path = "tasks[" + std::to_string(m) + "]";
    const Json& e = tasks[m];
    if (!e.is_object()) parse_fail(path, "expected an object");
    req_rows.push_back(number_array(member(e, path, "requirements"),
                                    path + ".requirements", traits));
    labels.tasks.push_back(optional_name(e, path));
    any_task_name |= e.contains("name");
  }
  if (!any_species_name) labels.species.clear();
  if (!any_task_name) labels.tasks.clear();

  auto to_matrix = [](const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
  };
  try {
    return ProblemInstance(
        SpeciesTraitModel(to_matrix(mu_rows), to_matrix(var_rows)),
        TeamComposition(std::move(counts)),
        TaskRequirements(to_matrix(req_rows)), std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, std::string("invalid problem: ") + e.what());
  }
}

ProblemInstance parse_problem(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("malformed JSON: ") + e.what());
  }
  return problem_from_json(doc);
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

Json allocation_to_json(const IntMatrix& x) {
  Json rows = Json::array();
  for (std::size_t m = 0; m < x.rows(); ++m) {
    rows.push_back(std::vector<std::int64_t>(x.row(m).begin(), x.row(m).end()));
  }
  return rows;
}

IntMatrix allocation_from_json(const Json& doc, std::string_view field) {
  const std::string path(field);
  if (!doc.is_array() || doc.empty()) parse_fail(path, "expected a nonempty matrix");
  const std::size_t cols = doc[0].is_array() ? doc[0].size() : 0;
  IntMatrix x(doc.size(), cols);
  for (std::size_t m = 0; m < doc.size(); ++m) {
    const std::string row_path = path + "[" + std::to_string(m) + "]";
    if (!doc[m].is_array() || doc[m].size() != cols || cols == 0) {
      parse_fail(row_path, "expected a row of " + std::to_string(cols) +
                               " integers");
    }
    for (std::size_t s = 0; s < cols; ++s) {
      const Json& v = doc[m][s];
      if (!v.is_number_integer()) {
        parse_fail(row_path + "[" + std::to_string(s) + "]",
                   "expected an integer");
      }
      x(m, s) = v.get<std::int64_t>();
    }
  }
  return x;
}

Json config_to_json(const SolverConfig& cfg) {
  Json c = Json::object();
  c["num_starts"] = cfg.num_starts;
  c["max_iters_per_start"] = cfg.max_iters_per_start;
  c["step_init"] = cfg.step_init;
  c["armijo_c"] = cfg.armijo_c;
  c["step_shrink"] = cfg.step_shrink;
  c["convergence_tol"] = cfg.convergence_tol;
  c["beta_schedule"] = cfg.beta_schedule;
  c["lambda"] = cfg.lambda;
  c["hill_climb_max_moves"] = cfg.hill_climb_max_moves;
  c["seed"] = cfg.seed;
  return c;
}

Json solution_to_json(const Solution& solution, const SolverConfig& cfg,
                      bool include_timing) {
  std::vector<double> probs;
  for (double lp : solution.task_log_probs) probs.push_back(std::exp(lp));

  Json doc = Json::object();
  doc["method"] = std::string(method_name(solution.method));
  doc["allocation"] = allocation_to_json(solution.allocation.assignment());
  doc["task_probs"] = round_all(probs);
  doc["task_log_probs"] = round_all(solution.task_log_probs);
  doc["min_task_prob"] = round_significant(std::exp(solution.min_log_prob));
  Json stats = Json::object();
  stats["iterations"] = solution.stats.iterations;
  stats["starts"] = solution.stats.starts;
  stats["seconds"] = include_timing
                         ? Json(round_significant(solution.stats.seconds, 6))
                         : Json(nullptr);
  doc["solve_stats"] = std::move(stats);
  doc["config_echo"] = config_to_json(cfg);
  return doc;
}

Json references_to_json(const std::string& name, const Preset& preset) {
  Json doc = Json::object();
  doc["preset"] = name;
  Json allocs = Json::object();
  for (const auto& [label, alloc] : preset.references) {
    allocs[label] = allocation_to_json(alloc.assignment());
  }
  doc["allocations"] = std::move(allocs);
  return doc;
}

}  // namespace riskalloc
