#include "pircache/placement.hpp"

#include "pircache/errors.hpp"
#include "pircache/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pircache {

std::string to_string(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::UniformRandom: return "uniform-random";
    case PlacementKind::WholeFiles: return "whole-file-prefix";
    case PlacementKind::ExplicitSets: return "explicit-sets";
  }
  return "unknown";
}

PlacementKind placement_kind_from_string(const std::string& name) {
  if (name == "uniform-random" || name == "uniform") return PlacementKind::UniformRandom;
  if (name == "whole-file-prefix" || name == "whole-files") return PlacementKind::WholeFiles;
  if (name == "explicit-sets") return PlacementKind::ExplicitSets;
  throw std::invalid_argument("unknown placement kind '" + name + "'");
}

PlacementPolicy PlacementPolicy::uniform(Rational mu) {
  return {PlacementKind::UniformRandom, std::move(mu), {}, {}};
}

PlacementPolicy PlacementPolicy::whole_files(Rational mu, std::vector<std::uint32_t> files) {
  return {PlacementKind::WholeFiles, std::move(mu), std::move(files), {}};
}

PlacementPolicy PlacementPolicy::explicit_sets(Rational mu,
                                               std::vector<std::vector<BitAddress>> sets) {
  return {PlacementKind::ExplicitSets, std::move(mu), {}, std::move(sets)};
}

std::size_t storage_budget(const Rational& mu, std::size_t files, std::size_t file_bits) {
  if (mu < 0 || mu > 1) throw std::invalid_argument("storage ratio mu must lie in [0, 1]");
  return floor_to_count(mu * Rational(files) * Rational(file_bits));
}

namespace {

std::vector<BitAddress> to_addresses(std::span<const std::size_t> flat, std::size_t file_bits) {
  std::vector<BitAddress> out;
  out.reserve(flat.size());
  for (std::size_t v : flat)
    out.push_back({static_cast<std::uint32_t>(v / file_bits),
                   static_cast<std::uint32_t>(v % file_bits)});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CacheRealization sample_placement(const PlacementPolicy& policy, std::size_t files,
                                  std::size_t file_bits, std::size_t databases,
                                  std::uint64_t seed) {
  if (databases > StorageSet::kMaxDatabases)
    throw std::invalid_argument("at most 63 databases are supported");

  CacheRealization out;
  out.budget = storage_budget(policy.mu, files, file_bits);

  switch (policy.kind) {
    case PlacementKind::UniformRandom: {
      // Partial Fisher-Yates. The pool is not reset between databases: the
      // first `budget` slots are a uniform subset whatever the starting order.
      std::vector<std::size_t> pool(files * file_bits);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t d = 0; d < databases; ++d) {
        Rng rng(derive_seed(seed, d + 1));
        for (std::size_t i = 0; i < out.budget; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
          std::swap(pool[i], pool[pick(rng)]);
        }
        out.sets.push_back(to_addresses(std::span(pool).first(out.budget), file_bits));
      }
      break;
    }
    case PlacementKind::WholeFiles: {
      std::vector<std::uint32_t> listed = policy.files;
      std::sort(listed.begin(), listed.end());
      if (std::adjacent_find(listed.begin(), listed.end()) != listed.end())
        throw std::invalid_argument("whole-file placement lists a file twice");
      if (!listed.empty() && listed.back() >= files)
        throw std::invalid_argument("whole-file placement names a missing file");
      if (listed.size() * file_bits > out.budget)
        throw BudgetViolation("listed files need " + std::to_string(listed.size() * file_bits) +
                              " bits, budget is " + std::to_string(out.budget));
      std::vector<BitAddress> set;
      for (auto f : listed)
        for (std::size_t i = 0; i < file_bits; ++i) set.push_back({f, static_cast<std::uint32_t>(i)});
      out.sets.assign(databases, set);
      break;
    }
    case PlacementKind::ExplicitSets: {
      if (policy.sets.size() != databases)
        throw std::invalid_argument("explicit placement needs exactly one set per database");
      out.sets = policy.sets;
      for (auto& s : out.sets) std::sort(s.begin(), s.end());
      break;
    }
  }

  check_realization(out, files, file_bits);
  return out;
}

BudgetReport validate_budget(const CacheRealization& realization, const Rational& mu,
                             std::size_t files, std::size_t file_bits) {
  BudgetReport report;
  report.budget = storage_budget(mu, files, file_bits);
  for (std::size_t d = 0; d < realization.sets.size(); ++d)
    if (realization.sets[d].size() > report.budget) report.offending.push_back(d + 1);
  return report;
}

MarginalProfile<double> empirical_marginals(const PlacementPolicy& policy, std::size_t files,
                                            std::size_t file_bits, std::size_t trials,
                                            std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("empirical marginals need at least one trial");
  PlacementPolicy single = policy;
  if (single.kind == PlacementKind::ExplicitSets) single.sets.resize(1);

  Eigen::ArrayXXd counts = Eigen::ArrayXXd::Zero(files, file_bits);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto realization = sample_placement(single, files, file_bits, 1, derive_seed(seed, t));
    for (const auto& a : realization.sets.front()) counts(a.file, a.position) += 1.0;
  }
  return {counts / static_cast<double>(trials), to_double(policy.mu)};
}

}  // namespace pircache
