#pragma once

#include "pircache/pir_protocol.hpp"
#include "pircache/placement.hpp"
#include "pircache/rational.hpp"
#include "pircache/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pircache {

/// Experiment description shared by the config file and the command line.
struct ExperimentConfig {
  std::size_t files = 3;
  std::size_t databases = 2;
  Rational mu{1, 3};
  std::size_t file_bits = 900;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  PlacementPolicy policy = PlacementPolicy::uniform(Rational(1, 3));
  SimulationMode mode = SimulationMode::FullProtocol;
  std::string out;  // empty = stdout

  SimulationConfig simulation() const;
};

/// Keys: K, N, mu ("1/3" or number), L, trials, seed, out, mode
/// ("full" | "cost-only"), policy {kind, files (1-based), sets}.
/// Missing keys keep their current values in `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});

/// Throws std::invalid_argument for non-positive counts or mu outside [0,1].
void validate_config(const ExperimentConfig& config);

/// Columns: trial,theta,total_D,ideal_D,D_over_L,converse_bound,seed (theta
/// 1-based), then a "summary" row with column means and a trailing
/// "# mean=... std=... formula=... relative_gap=..." comment line.
void write_simulation_csv(std::ostream& os, const TrialStatistics& stats, std::size_t file_bits);

/// Index of the first trial violating reliability or bound dominance.
std::optional<std::size_t> first_violation(const TrialStatistics& stats);

enum class SweepParameter { Databases, Ratio };

struct SweepSpec {
  SweepParameter vary = SweepParameter::Databases;
  std::vector<Rational> values;  // N values (integers) or mu values
  std::size_t files = 10;
  std::size_t databases = 5;     // fixed N when varying mu
  Rational mu{1, 2};             // fixed mu when varying N
  bool envelope = false;         // add the centralized envelope column (needs N >= 1)
  std::size_t trials = 0;        // 0 = formula only
  std::size_t file_bits = 0;
  std::uint64_t seed = 1;
};

struct SweepRow {
  Rational param;
  Rational formula;
  std::optional<Rational> envelope;
  std::optional<double> sim_mean;
  std::optional<double> sim_std;
  std::optional<double> sim_ideal_mean;
};

/// Grid "a:b:step" (inclusive, exact rationals) or a comma list.
std::vector<Rational> parse_grid(const std::string& text);

std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Columns: param,formula_cost,envelope_cost,sim_mean,sim_std,sim_ideal_mean
/// (empty cells where a column was not requested).
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Upper-tail probability of a chi-square variable.
double chi_square_survival(double statistic, double dof);

struct ChiSquareResult {
  double statistic = 0;
  double dof = 0;
  double p_value = 1;
};

/// Homogeneity test for two count vectors over the same categories.
/// Categories whose pooled count is below `min_pooled` are merged into one.
ChiSquareResult chi_square_homogeneity(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b,
                                       std::uint64_t min_pooled = 10);

struct PrivacyComparison {
  std::size_t theta_a = 0;  // 1-based
  std::size_t theta_b = 0;
  std::size_t database = 0;
  ChiSquareResult test;
};

struct PrivacyTestResult {
  std::vector<PrivacyComparison> comparisons;
  double min_p_value = 1;
  double significance = 0.01;
  bool structural_equal = true;
  /// min p-value above significance / #comparisons (family-wise level).
  bool passed = false;
};

struct PrivacyTestSpec {
  std::size_t files = 2;
  std::size_t replicas = 2;
  std::uint64_t lambda = 4;
  std::size_t sessions = 10000;
  std::uint64_t seed = 1;
  double significance = 0.01;
  bool skip_permutations = false;  // negative control
};

/// Throws std::invalid_argument for instances beyond K <= 3, n <= 3,
/// lambda <= 2 n^K.
PrivacyTestResult run_privacy_test(const PrivacyTestSpec& spec);

}  // namespace pircache
