#include "pircache/harness.hpp"

#include "pircache/analysis.hpp"
#include "pircache/random.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pircache {

SimulationConfig ExperimentConfig::simulation() const {
  SimulationConfig sim;
  sim.files = files;
  sim.databases = databases;
  sim.mu = mu;
  sim.file_bits = file_bits;
  sim.trials = trials;
  sim.seed = seed;
  sim.policy = policy;
  sim.policy.mu = mu;
  sim.mode = mode;
  return sim;
}

namespace {

Rational ratio_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_ratio(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) {
    std::ostringstream os;
    os << std::setprecision(15) << v.get<double>();
    return parse_ratio(os.str());
  }
  throw std::invalid_argument("mu must be a string such as \"1/3\" or a number");
}

std::string decimal(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (doc.contains("K")) base.files = doc["K"].get<std::size_t>();
  if (doc.contains("N")) base.databases = doc["N"].get<std::size_t>();
  if (doc.contains("mu")) base.mu = ratio_from_json(doc["mu"]);
  if (doc.contains("L")) base.file_bits = doc["L"].get<std::size_t>();
  if (doc.contains("trials")) base.trials = doc["trials"].get<std::size_t>();
  if (doc.contains("seed")) base.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("out")) base.out = doc["out"].get<std::string>();
  if (doc.contains("mode")) {
    const auto mode = doc["mode"].get<std::string>();
    if (mode == "full") base.mode = SimulationMode::FullProtocol;
    else if (mode == "cost-only") base.mode = SimulationMode::CostOnly;
    else throw std::invalid_argument("mode must be \"full\" or \"cost-only\"");
  }
  if (doc.contains("policy")) {
    const auto& p = doc["policy"];
    PlacementPolicy policy;
    policy.kind = placement_kind_from_string(p.at("kind").get<std::string>());
    if (p.contains("files")) {
      for (auto f : p["files"].get<std::vector<std::int64_t>>()) {
        if (f < 1) throw std::invalid_argument("policy files are 1-based");
        policy.files.push_back(static_cast<std::uint32_t>(f - 1));
      }
    }
    if (p.contains("sets")) {
      nlohmann::json wrapped = {{"N", p["sets"].size()}, {"budget", 0}, {"sets", p["sets"]}};
      policy.sets = realization_from_json(wrapped).sets;
    }
    base.policy = std::move(policy);
  }
  base.policy.mu = base.mu;
  return base;
}

void validate_config(const ExperimentConfig& config) {
  if (config.files == 0) throw std::invalid_argument("K must be positive");
  if (config.file_bits == 0) throw std::invalid_argument("L must be positive");
  if (config.trials == 0) throw std::invalid_argument("trials must be positive");
  if (config.mu < 0 || config.mu > 1) throw std::invalid_argument("mu must lie in [0, 1]");
  if (config.databases > StorageSet::kMaxDatabases)
    throw std::invalid_argument("at most 63 databases are supported");
}

void write_simulation_csv(std::ostream& os, const TrialStatistics& stats, std::size_t file_bits) {
  os << "trial,theta,total_D,ideal_D,D_over_L,converse_bound,seed\n";
  double total = 0, ideal = 0, bound = 0;
  for (const auto& t : stats.trials) {
    const double b = to_double(t.converse_bound);
    os << t.trial << ',' << t.theta + 1 << ',' << t.total << ',' << decimal(t.ideal) << ','
       << decimal(t.normalized) << ',' << decimal(b) << ',' << t.seed << '\n';
    total += static_cast<double>(t.total);
    ideal += t.ideal;
    bound += b;
  }
  const auto n = static_cast<double>(stats.trials.size());
  os << "summary,," << decimal(total / n) << ',' << decimal(ideal / n) << ',' << decimal(stats.mean)
     << ',' << decimal(bound / n) << ",\n";
  os << "# mean=" << decimal(stats.mean) << " std=" << decimal(stats.stddev)
     << " formula=" << to_fraction_string(stats.formula) << " (" << decimal(to_double(stats.formula))
     << ") relative_gap=" << decimal(stats.relative_gap()) << " L=" << file_bits << '\n';
}

std::optional<std::size_t> first_violation(const TrialStatistics& stats) {
  for (const auto& t : stats.trials)
    if (!t.reliable || !t.dominates_bound) return t.trial;
  return std::nullopt;
}

std::vector<Rational> parse_grid(const std::string& text) {
  std::vector<Rational> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("grid must look like from:to:step");
    const Rational from = parse_ratio(parts[0]);
    const Rational to = parse_ratio(parts[1]);
    const Rational step = parse_ratio(parts[2]);
    if (step <= 0) throw std::invalid_argument("grid step must be positive");
    for (Rational v = from; v <= to; v += step) out.push_back(v);
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_ratio(part));
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const Rational& v = spec.values[i];
    std::size_t databases = spec.databases;
    Rational mu = spec.mu;
    if (spec.vary == SweepParameter::Databases) {
      if (v < 0 || boost::multiprecision::denominator(v) != 1)
        throw std::invalid_argument("N values must be non-negative integers");
      databases = floor_to_count(v);
    } else {
      mu = v;
    }

    SweepRow row;
    row.param = v;
    row.formula = capacity_decentralized<Rational>(spec.files, databases, mu);
    if (spec.envelope && databases >= 1)
      row.envelope = CentralizedEnvelope<Rational>(spec.files, databases)(mu);
    if (spec.trials > 0) {
      SimulationConfig sim;
      sim.files = spec.files;
      sim.databases = databases;
      sim.mu = mu;
      sim.file_bits = spec.file_bits;
      sim.trials = spec.trials;
      sim.seed = derive_seed(spec.seed, i);
      sim.policy = PlacementPolicy::uniform(mu);
      sim.mode = SimulationMode::CostOnly;
      const auto stats = simulate_trials(sim);
      row.sim_mean = stats.mean;
      row.sim_std = stats.stddev;
      row.sim_ideal_mean = stats.ideal_mean;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "param,formula_cost,envelope_cost,sim_mean,sim_std,sim_ideal_mean\n";
  for (const auto& r : rows) {
    os << decimal(to_double(r.param)) << ',' << decimal(to_double(r.formula)) << ',';
    if (r.envelope) os << decimal(to_double(*r.envelope));
    os << ',';
    if (r.sim_mean) os << decimal(*r.sim_mean);
    os << ',';
    if (r.sim_std) os << decimal(*r.sim_std);
    os << ',';
    if (r.sim_ideal_mean) os << decimal(*r.sim_ideal_mean);
    os << '\n';
  }
}

double chi_square_survival(double statistic, double dof) {
  if (dof <= 0) return 1.0;
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

ChiSquareResult chi_square_homogeneity(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b,
                                       std::uint64_t min_pooled) {
  if (a.size() != b.size()) throw std::invalid_argument("count vectors differ in length");
  std::vector<std::pair<double, double>> cells;
  double rare_a = 0, rare_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] < min_pooled) {
      rare_a += static_cast<double>(a[i]);
      rare_b += static_cast<double>(b[i]);
    } else {
      cells.emplace_back(static_cast<double>(a[i]), static_cast<double>(b[i]));
    }
  }
  if (rare_a + rare_b > 0) cells.emplace_back(rare_a, rare_b);

  double na = 0, nb = 0;
  for (auto [x, y] : cells) {
    na += x;
    nb += y;
  }
  ChiSquareResult out;
  if (cells.size() < 2 || na == 0 || nb == 0) return out;
  const double total = na + nb;
  for (auto [x, y] : cells) {
    const double ea = (x + y) * na / total;
    const double eb = (x + y) * nb / total;
    out.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  out.dof = static_cast<double>(cells.size() - 1);
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

PrivacyTestResult run_privacy_test(const PrivacyTestSpec& spec) {
  if (spec.files < 1 || spec.files > 3 || spec.replicas < 2 || spec.replicas > 3)
    throw std::invalid_argument(
        "privacy test bins whole transcripts; use 1 <= K <= 3 and 2 <= n <= 3");
  const std::uint64_t block = block_length(spec.replicas, spec.files);
  if (spec.lambda == 0 || spec.lambda > 2 * block || spec.lambda % block != 0)
    throw std::invalid_argument("privacy test needs lambda = n^K or 2 n^K (here n^K = " +
                                std::to_string(block) + ")");
  if (spec.sessions == 0) throw std::invalid_argument("privacy test needs sessions >= 1");

  PlanOptions options;
  options.skip_permutations = spec.skip_permutations;

  // transcripts[theta][database] : serialization -> count
  std::vector<std::vector<std::map<std::string, std::uint64_t>>> counts(
      spec.files, std::vector<std::map<std::string, std::uint64_t>>(spec.replicas));
  PrivacyTestResult result;
  result.significance = spec.significance;
  std::vector<PrivacyHistogram> reference;

  for (std::size_t theta = 0; theta < spec.files; ++theta) {
    const std::uint64_t stream = derive_seed(spec.seed, theta);
    for (std::size_t s = 0; s < spec.sessions; ++s) {
      const auto plan = generate_query_plan(spec.replicas, spec.files, theta, spec.lambda,
                                            derive_seed(stream, s), options);
      if (s == 0) {
        auto hist = structural_privacy_histogram(plan);
        if (theta == 0) reference = std::move(hist);
        else result.structural_equal = result.structural_equal && hist == reference;
      }
      for (std::size_t d = 0; d < spec.replicas; ++d) ++counts[theta][d][serialize_transcript(plan, d)];
    }
  }

  for (std::size_t a = 0; a < spec.files; ++a) {
    for (std::size_t b = a + 1; b < spec.files; ++b) {
      for (std::size_t d = 0; d < spec.replicas; ++d) {
        std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> joint;
        for (const auto& [key, c] : counts[a][d]) joint[key].first = c;
        for (const auto& [key, c] : counts[b][d]) joint[key].second = c;
        std::vector<std::uint64_t> va, vb;
        for (const auto& [key, c] : joint) {
          va.push_back(c.first);
          vb.push_back(c.second);
        }
        result.comparisons.push_back({a + 1, b + 1, d, chi_square_homogeneity(va, vb)});
        result.min_p_value = std::min(result.min_p_value, result.comparisons.back().test.p_value);
      }
    }
  }
  const double threshold =
      spec.significance / static_cast<double>(std::max<std::size_t>(1, result.comparisons.size()));
  result.passed = result.structural_equal && result.min_p_value > threshold;
  return result;
}

}  // namespace pircache
