#pragma once

#include "pircache/core_model.hpp"
#include "pircache/marginal_profile.hpp"
#include "pircache/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pircache {

enum class PlacementKind { UniformRandom, WholeFiles, ExplicitSets };

std::string to_string(PlacementKind kind);
PlacementKind placement_kind_from_string(const std::string& name);

/// How every database chooses its cached bits. All databases use the same
/// policy with independent randomness.
struct PlacementPolicy {
  PlacementKind kind = PlacementKind::UniformRandom;
  Rational mu;
  std::vector<std::uint32_t> files;               // WholeFiles: zero-based file indices
  std::vector<std::vector<BitAddress>> sets;      // ExplicitSets: one set per database

  static PlacementPolicy uniform(Rational mu);
  static PlacementPolicy whole_files(Rational mu, std::vector<std::uint32_t> files);
  static PlacementPolicy explicit_sets(Rational mu, std::vector<std::vector<BitAddress>> sets);
};

/// floor(mu * K * L).
std::size_t storage_budget(const Rational& mu, std::size_t files, std::size_t file_bits);

/// Draws H_1..H_N. Uniform: each H_d is an independent uniformly random
/// budget-sized subset. Whole files: every H_d is all bits of the listed files.
/// Explicit: copies the literal sets (exactly N of them).
/// Throws BudgetViolation when a deterministic policy exceeds the budget and
/// std::invalid_argument for mu outside [0, 1] or malformed sets.
CacheRealization sample_placement(const PlacementPolicy& policy, std::size_t files,
                                  std::size_t file_bits, std::size_t databases,
                                  std::uint64_t seed);

struct BudgetReport {
  std::size_t budget = 0;
  std::vector<std::size_t> offending;  // 1-based database ids

  bool ok() const { return offending.empty(); }
};

BudgetReport validate_budget(const CacheRealization& realization, const Rational& mu,
                             std::size_t files, std::size_t file_bits);

/// Frequency with which each address lands in H_1 over `trials` draws.
MarginalProfile<double> empirical_marginals(const PlacementPolicy& policy, std::size_t files,
                                            std::size_t file_bits, std::size_t trials,
                                            std::uint64_t seed);

}  // namespace pircache
