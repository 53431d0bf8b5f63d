#include "riskalloc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "riskalloc/format.hpp"
#include "riskalloc/rng.hpp"

namespace riskalloc {

namespace {

void check_range(const std::array<double, 2>& r, const char* what) {
  if (!(r[0] <= r[1]) || !std::isfinite(r[0]) || !std::isfinite(r[1]) ||
      r[0] < 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("generator config: bad range for ") + what);
  }
}

double draw(std::mt19937_64& rng, const std::array<double, 2>& r) {
  return std::uniform_real_distribution<double>(r[0], r[1])(rng);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (num_species == 0 || num_traits == 0 || num_tasks == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "generator config: dimensions must be positive");
  }
  if (num_species != num_traits) {
    throw Error(ErrorKind::InvalidArgument,
                "generator config: dominant traits need num_species == "
                "num_traits");
  }
  check_range(dominant_mu_range, "dominant_mu_range");
  check_range(nondominant_mu_range, "nondominant_mu_range");
  check_range(dominant_var_range, "dominant_var_range");
  check_range(nondominant_var_range, "nondominant_var_range");
  check_range(requirement_fraction_range, "requirement_fraction_range");
  if (count_range[0] < 0 || count_range[0] > count_range[1]) {
    throw Error(ErrorKind::InvalidArgument,
                "generator config: bad range for count_range");
  }
}

ProblemInstance generate_instance(const GeneratorConfig& cfg,
                                  std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t S = cfg.num_species;
  const std::size_t U = cfg.num_traits;
  const std::size_t M = cfg.num_tasks;

  Matrix mu(S, U);
  Matrix var(S, U);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t u = 0; u < U; ++u) {
      const bool dominant = (u == s);
      mu(s, u) = draw(rng, dominant ? cfg.dominant_mu_range
                                    : cfg.nondominant_mu_range);
      var(s, u) = draw(rng, dominant ? cfg.dominant_var_range
                                     : cfg.nondominant_var_range);
    }
  }
  std::uniform_int_distribution<std::int64_t> count(cfg.count_range[0],
                                                    cfg.count_range[1]);
  std::vector<std::int64_t> counts(S);
  for (auto& c : counts) c = count(rng);

  std::vector<double> capability(U, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t u = 0; u < U; ++u) {
      capability[u] += static_cast<double>(counts[s]) * mu(s, u);
    }
  }
  Matrix req(M, U);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t u = 0; u < U; ++u) {
      req(m, u) = draw(rng, cfg.requirement_fraction_range) * capability[u] /
                  static_cast<double>(M);
    }
  }
  return ProblemInstance(SpeciesTraitModel(std::move(mu), std::move(var)),
                         TeamComposition(std::move(counts)),
                         TaskRequirements(std::move(req)));
}

ProblemInstance generate_instance(const GeneratorConfig& cfg,
                                  std::uint64_t instance_id) {
  std::mt19937_64 rng(derive_seed(cfg.seed, instance_id));
  return generate_instance(cfg, rng);
}

Preset robotarium_preset() {
  Matrix mu{{2.0, 1.0}, {1.0, 2.0}};
  Matrix var{{0.5, 1.0}, {1.0, 0.5}};
  Matrix req{{11.0, 0.0}, {0.0, 14.0}};
  TeamComposition team({6, 9});
  ProblemLabels labels{{"species_1", "species_2"},
                       {"debris_removal", "firefighting"},
                       {"payload", "water"}};
  Preset preset{ProblemInstance(SpeciesTraitModel(std::move(mu), std::move(var)),
                                team, TaskRequirements(std::move(req)),
                                std::move(labels)),
                {}};
  preset.references.emplace_back("ours", Allocation({{6, 1}, {0, 8}}, team));
  preset.references.emplace_back("risk_averse",
                                 Allocation({{4, 3}, {2, 6}}, team));
  preset.references.emplace_back("risk_neutral",
                                 Allocation({{5, 3}, {1, 6}}, team));
  return preset;
}

std::vector<std::string> preset_names() { return {"robotarium"}; }

Preset make_preset(const std::string& name) {
  if (name == "robotarium") return robotarium_preset();
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::InvalidArgument,
              "unknown preset '" + name + "' (available: " + known + ")");
}

std::uint64_t instance_hash(const ProblemInstance& problem) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto feed_matrix = [&](const Matrix& m) {
    const std::uint64_t dims[2] = {m.rows(), m.cols()};
    feed(dims, sizeof dims);
    feed(m.data().data(), m.size() * sizeof(double));
  };
  feed_matrix(problem.species().mean_traits());
  feed_matrix(problem.species().trait_variances());
  feed_matrix(problem.tasks().requirements());
  const auto& counts = problem.team().counts();
  feed(counts.data(), counts.size() * sizeof(std::int64_t));
  return h;
}

std::vector<BenchmarkRecord> run_benchmark(std::size_t n_instances,
                                           const std::vector<Method>& methods,
                                           const GeneratorConfig& gen_cfg,
                                           const SolverConfig& solver_cfg,
                                           unsigned threads) {
  if (n_instances == 0) {
    throw Error(ErrorKind::InvalidArgument, "need at least one instance");
  }
  if (methods.empty()) {
    throw Error(ErrorKind::InvalidArgument, "need at least one method");
  }
  gen_cfg.validate();
  solver_cfg.validate();

  std::vector<BenchmarkRecord> records(n_instances * methods.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < n_instances; i = next++) {
      try {
        const ProblemInstance problem = generate_instance(gen_cfg, i);
        const std::uint64_t hash = instance_hash(problem);
        SolverConfig cfg = solver_cfg;
        cfg.seed = derive_seed(solver_cfg.seed, i);
        for (std::size_t k = 0; k < methods.size(); ++k) {
          const Solution sol = solve(problem, methods[k], cfg);
          BenchmarkRecord& rec = records[i * methods.size() + k];
          rec.instance_id = i;
          rec.method = methods[k];
          for (double lp : sol.task_log_probs) {
            rec.task_probs.push_back(std::exp(lp));
          }
          rec.min_task_prob = *std::min_element(rec.task_probs.begin(),
                                                rec.task_probs.end());
          rec.solve_seconds = sol.stats.seconds;
          rec.instance_hash = hash;
          rec.allocation = sol.allocation.assignment();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n_instances;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, n_instances));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return records;
}

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "quantiles of an empty sample");
  }
  std::sort(values.begin(), values.end());
  auto at = [&values](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

std::vector<MethodSummary> summarize(
    const std::vector<BenchmarkRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorKind::InvalidArgument, "no benchmark records to summarize");
  }
  std::map<Method, std::pair<std::vector<double>, std::vector<double>>> by;
  for (const auto& r : records) {
    auto& [pooled, mins] = by[r.method];
    pooled.insert(pooled.end(), r.task_probs.begin(), r.task_probs.end());
    mins.push_back(r.min_task_prob);
  }
  std::vector<MethodSummary> out;
  for (auto& [method, samples] : by) {
    MethodSummary s;
    s.method = method;
    s.records = samples.second.size();
    s.pooled_task_probs = quantiles(std::move(samples.first));
    s.min_task_probs = quantiles(std::move(samples.second));
    out.push_back(s);
  }
  return out;
}

std::string format_summary_table(const std::vector<MethodSummary>& summary) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  auto row = [&os](std::string_view method, std::string_view stat,
                   const Quantiles& q) {
    os << std::left << std::setw(10) << method << std::setw(12) << stat
       << std::right << std::setw(9) << q.min << std::setw(9) << q.q1
       << std::setw(9) << q.median << std::setw(9) << q.q3 << std::setw(9)
       << q.max << std::setw(9) << q.iqr() << '\n';
  };
  os << std::left << std::setw(10) << "method" << std::setw(12) << "statistic"
     << std::right << std::setw(9) << "min" << std::setw(9) << "q1"
     << std::setw(9) << "median" << std::setw(9) << "q3" << std::setw(9)
     << "max" << std::setw(9) << "iqr" << '\n';
  for (const auto& s : summary) {
    row(method_name(s.method), "task_prob", s.pooled_task_probs);
    row(method_name(s.method), "min_prob", s.min_task_probs);
  }
  return os.str();
}

std::string records_to_csv(const std::vector<BenchmarkRecord>& records,
                           bool include_timing) {
  std::size_t tasks = 0;
  for (const auto& r : records) tasks = std::max(tasks, r.task_probs.size());

  std::ostringstream os;
  os << "instance_id,method";
  for (std::size_t m = 0; m < tasks; ++m) os << ",task_prob_" << (m + 1);
  os << ",min_task_prob,solve_seconds\n";
  for (const auto& r : records) {
    os << r.instance_id << ',' << method_name(r.method);
    for (std::size_t m = 0; m < tasks; ++m) {
      os << ',';
      if (m < r.task_probs.size()) os << format_real(r.task_probs[m]);
    }
    os << ',' << format_real(r.min_task_prob) << ','
       << (include_timing ? format_real(r.solve_seconds, 6) : "NA") << '\n';
  }
  return os.str();
}

}  // namespace riskalloc
