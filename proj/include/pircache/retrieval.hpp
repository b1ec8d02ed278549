#pragma once

#include "pircache/analysis.hpp"
#include "pircache/core_model.hpp"
#include "pircache/pir_protocol.hpp"
#include "pircache/placement.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace pircache {

/// Downloaded-bit accounting for one retrieval.
struct CostReport {
  std::vector<std::uint64_t> per_database;  // DB_0 .. DB_N
  std::vector<std::pair<StorageSet, std::uint64_t>> per_partition;
  std::uint64_t total = 0;
  /// total minus the cost of zero padding (padded - longest subfile symbols
  /// priced at the per-symbol rate of their partition).
  double ideal = 0;
  std::size_t file_bits = 0;

  double normalized() const { return static_cast<double>(total) / static_cast<double>(file_bits); }
  double ideal_normalized() const { return ideal / static_cast<double>(file_bits); }
};

/// One partition's exchange: the plan sent to the databases of `set` (in
/// ascending database order) and the answers they returned.
struct PartitionTranscript {
  StorageSet set;
  QueryPlan plan;
  std::vector<AnswerString> answers;
};

struct RetrievalResult {
  std::vector<Bit> recovered;  // the desired file, L bits
  CostReport cost;
  std::vector<PartitionTranscript> transcripts;
};

/// A database's view of the system: the data center holds everything, DB_d
/// only the addresses of H_d.
class DatabaseNode {
 public:
  DatabaseNode(std::size_t id, const FileStore& store, const CacheRealization& realization);

  std::size_t id() const { return id_; }
  bool holds(BitAddress a) const;

  /// Per-file symbol arrays for one partition entry, built from this node's
  /// own content and zero-padded to `length` (n >= 2) or kept at the raw
  /// per-file lengths (n = 1). Throws ProtocolViolation for an entry address
  /// the node does not hold.
  SymbolArrays symbols_for(const PartitionEntry& entry) const;

  AnswerString answer(std::span<const SumQuery> queries, const PartitionEntry& entry) const;

 private:
  std::size_t id_;
  const FileStore* store_;
  std::vector<bool> held_;  // empty for the data center
};

/// Privately retrieves file theta (zero-based) from DB_0..DB_N: runs the
/// replicated-database scheme independently on every storage-set partition,
/// decodes, strips padding and reassembles. The caller compares `recovered`
/// with the store; protocol errors surface as ProtocolViolation.
RetrievalResult retrieve_file(const FileStore& store, const CacheRealization& realization,
                              std::size_t theta, std::uint64_t seed);

/// Download cost of the same scheme computed from the partition alone via
/// the per-block query counts. Equal to retrieve_file(...).cost.
CostReport retrieval_cost(const StorageSetPartition& partition);

/// Every query a database received names either an address it holds or a
/// zero-padding position.
bool check_query_locality(const StorageSetPartition& partition,
                          const CacheRealization& realization,
                          std::span<const PartitionTranscript> transcripts);

enum class SimulationMode {
  FullProtocol,  // generate queries, answer, decode, verify
  CostOnly,      // partition + closed-form query counts
};

struct SimulationConfig {
  std::size_t files = 0;
  std::size_t databases = 0;
  Rational mu;
  std::size_t file_bits = 0;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  PlacementPolicy policy;
  SimulationMode mode = SimulationMode::FullProtocol;
  std::size_t threads = 0;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t theta = 0;  // zero-based
  std::uint64_t seed = 0;
  std::uint64_t total = 0;
  double ideal = 0;
  double normalized = 0;
  Rational converse_bound;
  bool reliable = true;          // recovered == stored (always true in CostOnly)
  bool dominates_bound = true;   // total >= converse_bound
};

struct TrialStatistics {
  std::vector<TrialRecord> trials;
  double mean = 0;  // of total / L
  double stddev = 0;
  double ideal_mean = 0;
  Rational formula;  // capacity for the configured (K, N, mu)

  bool all_reliable() const;
  bool all_dominate() const;
  double relative_gap() const;
};

/// Independent (placement, retrieval) trials with theta cycled over the
/// files. Trial t draws everything from derive_seed(config.seed, t).
TrialStatistics simulate_trials(const SimulationConfig& config);

}  // namespace pircache
