// Command-line front end: closed-form evaluators, Monte Carlo simulation,
// parameter sweeps and the transcript privacy test.
//
// Exit codes: 0 success, 1 usage error, 2 invariant violation.

#include "pircache/analysis.hpp"
#include "pircache/harness.hpp"
#include "pircache/placement.hpp"
#include "pircache/retrieval.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace pircache;

namespace {

constexpr int kUsage = 1;
constexpr int kViolation = 2;

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string show(const Rational& r) { return to_fraction_string(r) + " = " + fixed(to_double(r)); }

// Writes to --out when given, stdout otherwise.
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open output file " + path);
  write(file);
}

std::vector<std::uint32_t> one_based_files(const std::vector<std::size_t>& files) {
  std::vector<std::uint32_t> out;
  for (auto f : files) {
    if (f == 0) throw std::invalid_argument("--files are 1-based");
    out.push_back(static_cast<std::uint32_t>(f - 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PIR from decentralized uncoded caching databases"};
  app.require_subcommand(1);

  std::size_t k = 3, n = 2, file_bits = 900, trials = 10, restarts = 20, sessions = 10000;
  std::string mu_text = "1/3", config_path, out, mode = "full", policy_kind = "uniform-random";
  std::string vary = "n", values;
  std::vector<std::size_t> files;
  std::uint64_t seed = 1, lambda = 4;
  bool envelope = false, no_permute = false, per_l = false;
  std::string export_path;

  auto common = [&](CLI::App* sub, bool with_mu) {
    sub->add_option("--k", k, "number of files K")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "number of caching databases N (replicas n for classical/privacy-test)");
    if (with_mu) sub->add_option("--mu", mu_text, "storage ratio as p/q or decimal");
  };

  auto* capacity = app.add_subcommand("capacity", "optimal normalized download cost");
  common(capacity, true);

  auto* classical = app.add_subcommand("classical", "replicated-database capacity 1 + 1/n + ...");
  common(classical, false);

  auto* env = app.add_subcommand("envelope", "centralized caching tradeoff corner points");
  common(env, true);

  auto* converse = app.add_subcommand("converse", "per-realization and expected converse bounds");
  common(converse, true);
  converse->add_option("--file-bits", file_bits, "bits per file L")->check(CLI::PositiveNumber);
  converse->add_option("--seed", seed, "placement seed");
  converse->add_option("--policy", policy_kind, "uniform-random | whole-file-prefix");
  converse->add_option("--files", files, "1-based files for whole-file-prefix");
  converse->add_option("--export-realization", export_path, "write the realization as JSON");

  auto* optimize = app.add_subcommand("optimize", "minimize the expected bound over marginals");
  common(optimize, true);
  optimize->add_option("--file-bits", file_bits, "bits per file L")->check(CLI::PositiveNumber);
  optimize->add_option("--restarts", restarts, "random feasible starts")->check(CLI::PositiveNumber);
  optimize->add_option("--seed", seed, "restart seed");
  optimize->add_flag("--per-l", per_l, "also minimize each E[x_l] separately");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo placement + private retrieval");
  common(simulate, true);
  simulate->add_option("--file-bits", file_bits, "bits per file L")->check(CLI::PositiveNumber);
  simulate->add_option("--trials", trials, "independent trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--config", config_path, "JSON experiment config (flags override)");
  simulate->add_option("--out", out, "CSV output path (default stdout)");
  simulate->add_option("--mode", mode, "full | cost-only")->check(CLI::IsMember({"full", "cost-only"}));
  simulate->add_option("--policy", policy_kind, "uniform-random | whole-file-prefix");
  simulate->add_option("--files", files, "1-based files for whole-file-prefix");

  auto* sweep = app.add_subcommand("sweep", "formula (and simulated) cost over N or mu");
  common(sweep, true);
  sweep->add_option("--vary", vary, "n | mu")->check(CLI::IsMember({"n", "mu"}));
  sweep->add_option("--values", values, "grid from:to:step or comma list")->required();
  sweep->add_flag("--envelope", envelope, "add the centralized envelope column");
  sweep->add_option("--trials", trials, "simulated trials per point (0 = formula only)");
  sweep->add_option("--file-bits", file_bits, "bits per file for simulated columns");
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--out", out, "CSV output path (default stdout)");

  auto* privacy = app.add_subcommand("privacy-test", "chi-square test of per-database transcripts");
  common(privacy, false);
  privacy->add_option("--lambda", lambda, "subfile length (n^K or 2 n^K)");
  privacy->add_option("--sessions", sessions, "sessions per desired file")->check(CLI::PositiveNumber);
  privacy->add_option("--seed", seed, "master seed");
  privacy->add_flag("--no-permute", no_permute, "negative control: skip the random permutations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (capacity->parsed()) {
      std::cout << show(capacity_decentralized<Rational>(k, n, parse_ratio(mu_text))) << '\n';
      return 0;
    }

    if (classical->parsed()) {
      std::cout << show(capacity_classical<Rational>(k, n)) << '\n';
      return 0;
    }

    if (env->parsed()) {
      const CentralizedEnvelope<Rational> envelope_fn(k, n);
      std::cout << "t,mu,cost,cost_decimal\n";
      for (std::size_t t = 0; t < envelope_fn.corners().size(); ++t) {
        const auto& c = envelope_fn.corners()[t];
        std::cout << t << ',' << to_fraction_string(c.mu) << ',' << to_fraction_string(c.cost) << ','
                  << fixed(to_double(c.cost)) << '\n';
      }
      if (env->count("--mu")) {
        const Rational mu = parse_ratio(mu_text);
        std::cout << "# envelope(" << to_fraction_string(mu) << ") = " << show(envelope_fn(mu))
                  << "; decentralized = " << show(capacity_decentralized<Rational>(k, n, mu)) << '\n';
      }
      return 0;
    }

    if (converse->parsed()) {
      const Rational mu = parse_ratio(mu_text);
      PlacementPolicy policy = policy_kind == "uniform-random"
                                   ? PlacementPolicy::uniform(mu)
                                   : PlacementPolicy::whole_files(mu, one_based_files(files));
      policy.kind = placement_kind_from_string(policy_kind);
      const auto realization = sample_placement(policy, k, file_bits, n, seed);
      if (!export_path.empty()) {
        std::ofstream file(export_path);
        file << realization_to_json(realization).dump(2) << '\n';
      }
      const auto partition = partition_by_storage_set(realization, k, file_bits);
      const auto terms = converse_bound_realization(partition);
      for (std::size_t l = 1; l <= terms.x.size(); ++l)
        std::cout << "x_" << l << " = " << show(terms.x[l - 1]) << '\n';
      std::cout << "bound = " << show(terms.bound) << '\n';
      if (k == 3 && n == 2)
        std::cout << "bound (conditional-entropy form) = "
                  << show(converse_bound_three_files_two_databases(realization, file_bits)) << '\n';
      const auto uniform = MarginalProfile<Rational>::uniform(static_cast<Eigen::Index>(k),
                                                              static_cast<Eigen::Index>(file_bits), mu);
      std::cout << "expected bound (uniform marginals) = "
                << show(expected_converse_bound(uniform, n)) << '\n';
      const auto cost = retrieval_cost(partition);
      std::cout << "scheme download = " << cost.total << " (ideal " << fixed(cost.ideal) << ")\n";
      if (Rational(cost.total) < terms.bound) {
        std::cerr << "invariant violation: download below converse bound\n";
        return kViolation;
      }
      return 0;
    }

    if (optimize->parsed()) {
      const double mu = to_double(parse_ratio(mu_text));
      OptimizerOptions options;
      options.restarts = restarts;
      options.seed = seed;
      const auto r = minimize_expected_bound(k, n, mu, file_bits, options);
      std::cout << "uniform value = " << std::setprecision(15) << r.uniform_value << '\n'
                << "best value = " << r.best_value << '\n'
                << "best - uniform = " << r.best_value - r.uniform_value << '\n'
                << "projected gradient norm at uniform = " << r.gradient_norm_at_uniform << '\n'
                << "projected gradient norm at best = " << r.gradient_norm_at_best << '\n'
                << "converged = " << (r.converged ? "yes" : "no") << '\n';
      if (per_l) {
        for (std::size_t l = 1; l <= n + 1; ++l) {
          const auto rl = minimize_expected_storage_weight(k, n, l, mu, file_bits, options);
          std::cout << "E[x_" << l << "]: uniform = " << rl.uniform_value
                    << " best = " << rl.best_value
                    << (rl.best_value < rl.uniform_value - 1e-9 ? "  (uniform not minimal)" : "")
                    << '\n';
        }
      }
      return 0;
    }

    if (simulate->parsed()) {
      ExperimentConfig config;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot read config " + config_path);
        config = config_from_json(nlohmann::json::parse(in));
      }
      if (simulate->count("--k")) config.files = k;
      if (simulate->count("--n")) config.databases = n;
      if (simulate->count("--mu")) config.mu = parse_ratio(mu_text);
      if (simulate->count("--file-bits")) config.file_bits = file_bits;
      if (simulate->count("--trials")) config.trials = trials;
      if (simulate->count("--seed")) config.seed = seed;
      if (simulate->count("--out")) config.out = out;
      if (simulate->count("--mode"))
        config.mode = mode == "full" ? SimulationMode::FullProtocol : SimulationMode::CostOnly;
      if (simulate->count("--policy")) {
        config.policy.kind = placement_kind_from_string(policy_kind);
        config.policy.files = one_based_files(files);
      }
      config.policy.mu = config.mu;
      validate_config(config);

      const auto stats = simulate_trials(config.simulation());
      emit(config.out, [&](std::ostream& os) { write_simulation_csv(os, stats, config.file_bits); });
      if (auto bad = first_violation(stats)) {
        const auto& t = stats.trials[*bad];
        std::cerr << "invariant violation in trial " << *bad << ": "
                  << (!t.reliable ? "recovered file differs from stored file"
                                  : "download below converse bound")
                  << '\n';
        return kViolation;
      }
      return 0;
    }

    if (sweep->parsed()) {
      SweepSpec spec;
      spec.vary = vary == "n" ? SweepParameter::Databases : SweepParameter::Ratio;
      spec.values = parse_grid(values);
      spec.files = k;
      spec.databases = n;
      spec.mu = parse_ratio(mu_text);
      spec.envelope = envelope;
      spec.trials = sweep->count("--trials") ? trials : 0;
      spec.file_bits = file_bits;
      spec.seed = seed;
      const auto rows = run_sweep(spec);
      emit(out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
      return 0;
    }

    if (privacy->parsed()) {
      PrivacyTestSpec spec;
      spec.files = k;
      spec.replicas = n;
      spec.lambda = lambda;
      spec.sessions = sessions;
      spec.seed = seed;
      spec.skip_permutations = no_permute;
      const auto r = run_privacy_test(spec);
      std::cout << "theta_a,theta_b,database,chi2,dof,p_value\n";
      for (const auto& c : r.comparisons)
        std::cout << c.theta_a << ',' << c.theta_b << ',' << c.database << ','
                  << fixed(c.test.statistic, 4) << ',' << c.test.dof << ','
                  << std::setprecision(6) << c.test.p_value << '\n';
      std::cout << "# structural histograms equal: " << (r.structural_equal ? "yes" : "no") << '\n'
                << "# min p-value " << r.min_p_value << " at significance " << r.significance
                << ": " << (r.passed ? "PASS" : "FAIL") << '\n';
      return r.passed ? 0 : kViolation;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
  return kUsage;
}
