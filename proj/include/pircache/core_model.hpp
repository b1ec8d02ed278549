#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pircache {

using Bit = std::uint8_t;

/// Zero-based (file, position) coordinate of a single stored bit.
struct BitAddress {
  std::uint32_t file = 0;
  std::uint32_t position = 0;

  friend auto operator<=>(const BitAddress&, const BitAddress&) = default;
};

/// The data center's K files of L bits each, regenerable from (K, L, seed).
class FileStore {
 public:
  using BitMatrix = Eigen::Array<Bit, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FileStore(BitMatrix bits, std::uint64_t seed);

  std::size_t files() const { return static_cast<std::size_t>(bits_.rows()); }
  std::size_t file_bits() const { return static_cast<std::size_t>(bits_.cols()); }
  std::uint64_t seed() const { return seed_; }

  Bit bit(BitAddress a) const { return bits_(a.file, a.position); }
  const BitMatrix& bits() const { return bits_; }
  std::vector<Bit> file(std::size_t index) const;

 private:
  BitMatrix bits_;
  std::uint64_t seed_;
};

/// Throws std::invalid_argument when K or L is zero.
FileStore build_file_store(std::size_t files, std::size_t file_bits, std::uint64_t seed);

/// Cached index sets H_1..H_N. The data center (database 0) implicitly holds
/// every address and is not listed. Each set is kept sorted.
struct CacheRealization {
  std::size_t budget = 0;
  std::vector<std::vector<BitAddress>> sets;

  std::size_t databases() const { return sets.size(); }
};

/// Checks sortedness, duplicates, address ranges and |H_d| <= budget.
/// Throws std::invalid_argument (or BudgetViolation) describing the first problem.
void check_realization(const CacheRealization& realization, std::size_t files,
                       std::size_t file_bits);

nlohmann::json realization_to_json(const CacheRealization& realization);
CacheRealization realization_from_json(const nlohmann::json& doc);

/// A set of databases that always contains the data center, as a bitmask
/// (bit d set when DB_d is a member, bit 0 always set).
class StorageSet {
 public:
  static constexpr std::size_t kMaxDatabases = 63;

  StorageSet() = default;
  explicit StorageSet(std::uint64_t mask);

  std::uint64_t mask() const { return mask_; }
  std::size_t size() const;
  bool contains(std::size_t database) const { return (mask_ >> database) & 1U; }
  std::vector<std::size_t> members() const;

  friend auto operator<=>(const StorageSet&, const StorageSet&) = default;

 private:
  std::uint64_t mask_ = 1;
};

/// Bits stored by exactly the databases of one storage set.
struct PartitionEntry {
  StorageSet set;
  /// Per file, ascending positions of that file's bits held by exactly `set`.
  std::vector<std::vector<std::uint32_t>> positions;
  /// Common symbol-array length used by the retrieval scheme. For |S| >= 2 the
  /// smallest multiple of |S|^K not below the longest list; for |S| = 1 the
  /// per-file lists are used at their raw lengths and this holds the longest.
  std::uint64_t padded_length = 0;

  std::size_t max_length() const;
  std::size_t total_bits() const;
};

struct StorageSetPartition {
  std::size_t files = 0;
  std::size_t file_bits = 0;
  std::size_t databases = 0;
  std::vector<PartitionEntry> entries;  // ordered by mask

  const PartitionEntry* find(StorageSet set) const;
};

/// n^K with overflow detection (throws std::overflow_error).
std::uint64_t block_length(std::size_t replicas, std::size_t files);

/// Groups every address by the exact set {0} ∪ {d : address ∈ H_d}.
StorageSetPartition partition_by_storage_set(const CacheRealization& realization,
                                             std::size_t files, std::size_t file_bits);

}  // namespace pircache
