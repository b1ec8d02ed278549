#pragma once

#include "pircache/core_model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pircache {

// Replicated-database PIR over GF(2) symbols.
//
// n databases each hold the same K symbol arrays of length lambda. The
// retriever draws an independent uniform permutation per file and asks every
// database for k-sums (XOR of one symbol from each of k distinct files).
// Per block of n^K desired symbols:
//   round 1   every database returns one fresh singleton per file;
//   round k   for each k-subset T of files, in lexicographic order:
//             - theta in T: one desired sum per (k-1)-sum over T \ {theta}
//               downloaded from every other database in round k-1; the sum
//               reuses those undesired symbols plus a fresh desired symbol;
//             - theta not in T: (n-1)^(k-1) sums over fresh symbols.
// Every database therefore sees (n-1)^(k-1) sums per k-subset whatever theta
// is, and no symbol of a file twice.

struct SumTerm {
  std::uint32_t file = 0;
  std::uint64_t index = 0;  // position in the database's symbol array

  friend auto operator<=>(const SumTerm&, const SumTerm&) = default;
};

struct SumQuery {
  std::vector<SumTerm> terms;  // sorted by file, files distinct

  std::size_t order() const { return terms.size(); }
  std::uint64_t file_mask() const;
};

/// A desired sum is decoded by XOR with the answer to this earlier query.
struct SideInfoLink {
  std::size_t database = 0;
  std::size_t query = 0;
};

struct AnswerString {
  std::vector<Bit> bits;
};

struct QueryPlan {
  std::size_t replicas = 0;
  std::size_t files = 0;
  std::size_t desired = 0;                  // zero-based theta
  std::vector<std::uint64_t> file_lengths;  // symbol-array length per file
  /// permutations[f][c] is the array position of file f's c-th fresh symbol.
  std::vector<std::vector<std::uint64_t>> permutations;
  std::vector<std::vector<SumQuery>> per_database;
  std::vector<std::vector<std::optional<SideInfoLink>>> links;

  std::uint64_t desired_length() const { return file_lengths.at(desired); }
  std::size_t total_queries() const;
};

struct PlanOptions {
  /// Identity permutations. Only for negative-control privacy tests.
  bool skip_permutations = false;
};

/// Builds the plan for n replicas, K files, desired file theta (zero-based)
/// and common length lambda. n = 1 degenerates to downloading every symbol.
/// Throws InvalidLength when n >= 2 and lambda is not a multiple of n^K, and
/// std::invalid_argument for theta out of range or n, K equal to zero.
QueryPlan generate_query_plan(std::size_t replicas, std::size_t files, std::size_t theta,
                              std::uint64_t lambda, std::uint64_t seed, PlanOptions options = {});

/// Single-store plan over per-file lengths that may differ: every symbol of
/// every file is requested as a singleton.
QueryPlan download_all_plan(std::size_t files, std::size_t theta,
                            std::vector<std::uint64_t> file_lengths);

using SymbolArrays = std::vector<std::vector<Bit>>;

/// Database side: bit r is the XOR of the symbols named by query r.
/// Throws ProtocolViolation for a reference outside `symbols`.
AnswerString answer_queries(std::span<const SumQuery> queries, const SymbolArrays& symbols);

/// Recovers the desired file's symbols, indexed by array position.
/// Throws ProtocolViolation on missing answers, a missing link, or a desired
/// position left undetermined.
std::vector<Bit> decode_desired(const QueryPlan& plan, std::span<const AnswerString> answers);

/// (order k, file mask) -> number of queries, one map per database.
using PrivacyHistogram = std::map<std::pair<std::size_t, std::uint64_t>, std::size_t>;

std::vector<PrivacyHistogram> structural_privacy_histogram(const QueryPlan& plan);

/// One query per line in generation order, each as space-separated
/// "file:index" pairs (both 1-based) sorted by file.
std::string serialize_transcript(const QueryPlan& plan, std::size_t database);

/// Queries per database per n^K block: sum_k C(K,k) (n-1)^(k-1).
std::uint64_t queries_per_database_per_block(std::size_t replicas, std::size_t files);

/// Answer bits downloaded for a subfile of the given per-file lengths over
/// n replicas, without building the plan. Matches total_queries() of the plan
/// generated for the same lengths.
std::uint64_t subfile_download_cost(std::size_t replicas, std::span<const std::uint64_t> lengths);

}  // namespace pircache
