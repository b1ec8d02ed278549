#include "pircache/core_model.hpp"

#include "pircache/errors.hpp"
#include "pircache/random.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>
#include <string>

namespace pircache {

FileStore::FileStore(BitMatrix bits, std::uint64_t seed) : bits_(std::move(bits)), seed_(seed) {}

std::vector<Bit> FileStore::file(std::size_t index) const {
  std::vector<Bit> out(file_bits());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bits_(index, i);
  return out;
}

FileStore build_file_store(std::size_t files, std::size_t file_bits, std::uint64_t seed) {
  if (files == 0 || file_bits == 0)
    throw std::invalid_argument("file store needs K >= 1 and L >= 1");

  Rng rng(mix_seed(seed));
  FileStore::BitMatrix bits(files, file_bits);
  std::uint64_t word = 0;
  int left = 0;
  for (std::size_t k = 0; k < files; ++k) {
    for (std::size_t i = 0; i < file_bits; ++i) {
      if (left == 0) {
        word = rng();
        left = 64;
      }
      bits(k, i) = static_cast<Bit>(word & 1U);
      word >>= 1;
      --left;
    }
  }
  return FileStore(std::move(bits), seed);
}

void check_realization(const CacheRealization& realization, std::size_t files,
                       std::size_t file_bits) {
  if (realization.databases() > StorageSet::kMaxDatabases)
    throw std::invalid_argument("at most 63 databases are supported");
  for (std::size_t d = 0; d < realization.sets.size(); ++d) {
    const auto& set = realization.sets[d];
    const std::string who = "database " + std::to_string(d + 1);
    if (set.size() > realization.budget)
      throw BudgetViolation(who + " caches " + std::to_string(set.size()) +
                            " bits, budget is " + std::to_string(realization.budget));
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i].file >= files || set[i].position >= file_bits)
        throw std::invalid_argument(who + " holds an out-of-range address");
      if (i > 0 && !(set[i - 1] < set[i]))
        throw std::invalid_argument(who + " set is unsorted or has duplicates");
    }
  }
}

nlohmann::json realization_to_json(const CacheRealization& realization) {
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& set : realization.sets) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& a : set) entries.push_back({a.file + 1, a.position + 1});
    sets.push_back(std::move(entries));
  }
  return {{"N", realization.databases()}, {"budget", realization.budget}, {"sets", sets}};
}

CacheRealization realization_from_json(const nlohmann::json& doc) {
  CacheRealization out;
  out.budget = doc.at("budget").get<std::size_t>();
  const auto& sets = doc.at("sets");
  if (doc.at("N").get<std::size_t>() != sets.size())
    throw std::invalid_argument("realization: N does not match the number of sets");
  for (const auto& set : sets) {
    std::vector<BitAddress> addrs;
    for (const auto& pair : set) {
      auto file = pair.at(0).get<std::int64_t>();
      auto pos = pair.at(1).get<std::int64_t>();
      if (file < 1 || pos < 1) throw std::invalid_argument("realization: indices are 1-based");
      addrs.push_back({static_cast<std::uint32_t>(file - 1), static_cast<std::uint32_t>(pos - 1)});
    }
    std::sort(addrs.begin(), addrs.end());
    out.sets.push_back(std::move(addrs));
  }
  return out;
}

StorageSet::StorageSet(std::uint64_t mask) : mask_(mask) {
  if (!(mask & 1U)) throw std::invalid_argument("storage set must contain the data center");
}

std::size_t StorageSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> StorageSet::members() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < 64; ++d)
    if (contains(d)) out.push_back(d);
  return out;
}

std::size_t PartitionEntry::max_length() const {
  std::size_t m = 0;
  for (const auto& p : positions) m = std::max(m, p.size());
  return m;
}

std::size_t PartitionEntry::total_bits() const {
  std::size_t t = 0;
  for (const auto& p : positions) t += p.size();
  return t;
}

const PartitionEntry* StorageSetPartition::find(StorageSet set) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), set,
                             [](const PartitionEntry& e, StorageSet s) { return e.set < s; });
  return (it != entries.end() && it->set == set) ? &*it : nullptr;
}

std::uint64_t block_length(std::size_t replicas, std::size_t files) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < files; ++i) {
    if (__builtin_mul_overflow(out, static_cast<std::uint64_t>(replicas), &out))
      throw std::overflow_error("block length n^K exceeds 64 bits");
  }
  return out;
}

StorageSetPartition partition_by_storage_set(const CacheRealization& realization,
                                             std::size_t files, std::size_t file_bits) {
  check_realization(realization, files, file_bits);

  std::vector<std::uint64_t> masks(files * file_bits, 1U);
  for (std::size_t d = 0; d < realization.sets.size(); ++d) {
    for (const auto& a : realization.sets[d])
      masks[a.file * file_bits + a.position] |= std::uint64_t{1} << (d + 1);
  }

  std::map<std::uint64_t, PartitionEntry> grouped;
  for (std::size_t k = 0; k < files; ++k) {
    for (std::size_t i = 0; i < file_bits; ++i) {
      const std::uint64_t m = masks[k * file_bits + i];
      auto [it, fresh] = grouped.try_emplace(m);
      if (fresh) {
        it->second.set = StorageSet(m);
        it->second.positions.resize(files);
      }
      it->second.positions[k].push_back(static_cast<std::uint32_t>(i));
    }
  }

  StorageSetPartition out;
  out.files = files;
  out.file_bits = file_bits;
  out.databases = realization.databases();
  out.entries.reserve(grouped.size());
  for (auto& [mask, entry] : grouped) {
    const std::size_t longest = entry.max_length();
    const std::size_t n = entry.set.size();
    if (n == 1) {
      entry.padded_length = longest;
    } else {
      const std::uint64_t block = block_length(n, files);
      const std::uint64_t blocks = (longest - 1) / block + 1;
      if (__builtin_mul_overflow(blocks, block, &entry.padded_length))
        throw std::overflow_error("padded subfile length exceeds 64 bits");
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace pircache
