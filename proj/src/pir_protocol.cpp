#include "pircache/pir_protocol.hpp"

#include "pircache/errors.hpp"
#include "pircache/random.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pircache {

std::uint64_t SumQuery::file_mask() const {
  std::uint64_t m = 0;
  for (const auto& t : terms) m |= std::uint64_t{1} << t.file;
  return m;
}

std::size_t QueryPlan::total_queries() const {
  std::size_t n = 0;
  for (const auto& q : per_database) n += q.size();
  return n;
}

namespace {

// k-subsets of {0..K-1} in lexicographic order, as sorted index lists.
std::vector<std::vector<std::uint32_t>> subsets_of_size(std::size_t files, std::size_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0U);
  while (true) {
    out.push_back(pick);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == files - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

std::uint64_t mask_of(std::span<const std::uint32_t> files) {
  std::uint64_t m = 0;
  for (auto f : files) m |= std::uint64_t{1} << f;
  return m;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i)
    if (__builtin_mul_overflow(out, base, &out)) throw std::overflow_error("count exceeds 64 bits");
  return out;
}

}  // namespace

std::uint64_t queries_per_database_per_block(std::size_t replicas, std::size_t files) {
  // sum_k C(K,k)(n-1)^(k-1) = (n^K - 1) / (n - 1)
  if (replicas < 2) throw std::invalid_argument("block structure needs at least two replicas");
  return (block_length(replicas, files) - 1) / (replicas - 1);
}

std::uint64_t subfile_download_cost(std::size_t replicas, std::span<const std::uint64_t> lengths) {
  if (replicas == 1) return std::accumulate(lengths.begin(), lengths.end(), std::uint64_t{0});
  const std::uint64_t lambda = lengths.empty() ? 0 : lengths.front();
  for (auto len : lengths)
    if (len != lambda) throw InvalidLength("replicated subfiles must share one padded length");
  const std::uint64_t block = block_length(replicas, lengths.size());
  if (lambda % block != 0) throw InvalidLength("subfile length is not a multiple of n^K");
  std::uint64_t out = 0;
  const std::uint64_t per_block = queries_per_database_per_block(replicas, lengths.size());
  if (__builtin_mul_overflow(lambda / block, per_block * replicas, &out))
    throw std::overflow_error("download cost exceeds 64 bits");
  return out;
}

QueryPlan download_all_plan(std::size_t files, std::size_t theta,
                            std::vector<std::uint64_t> file_lengths) {
  if (files == 0 || file_lengths.size() != files)
    throw std::invalid_argument("download-all plan needs one length per file");
  if (theta >= files) throw std::invalid_argument("desired file index out of range");

  QueryPlan plan;
  plan.replicas = 1;
  plan.files = files;
  plan.desired = theta;
  plan.file_lengths = std::move(file_lengths);
  plan.permutations.resize(files);
  plan.per_database.resize(1);
  for (std::uint32_t f = 0; f < files; ++f) {
    auto& perm = plan.permutations[f];
    perm.resize(plan.file_lengths[f]);
    std::iota(perm.begin(), perm.end(), std::uint64_t{0});
    for (std::uint64_t i = 0; i < plan.file_lengths[f]; ++i)
      plan.per_database[0].push_back(SumQuery{{SumTerm{f, i}}});
  }
  plan.links.assign(1, std::vector<std::optional<SideInfoLink>>(plan.per_database[0].size()));
  return plan;
}

QueryPlan generate_query_plan(std::size_t replicas, std::size_t files, std::size_t theta,
                              std::uint64_t lambda, std::uint64_t seed, PlanOptions options) {
  if (replicas == 0 || files == 0) throw std::invalid_argument("plan needs n >= 1 and K >= 1");
  if (files > 63) throw std::invalid_argument("at most 63 files are supported");
  if (theta >= files) throw std::invalid_argument("desired file index out of range");
  if (replicas == 1) return download_all_plan(files, theta, std::vector<std::uint64_t>(files, lambda));

  const std::uint64_t block = block_length(replicas, files);
  if (lambda % block != 0)
    throw InvalidLength("subfile length " + std::to_string(lambda) +
                        " is not a multiple of n^K = " + std::to_string(block));

  QueryPlan plan;
  plan.replicas = replicas;
  plan.files = files;
  plan.desired = theta;
  plan.file_lengths.assign(files, lambda);
  plan.per_database.resize(replicas);
  plan.links.resize(replicas);

  Rng rng(mix_seed(seed));
  plan.permutations.resize(files);
  for (auto& perm : plan.permutations) {
    perm.resize(lambda);
    std::iota(perm.begin(), perm.end(), std::uint64_t{0});
    if (!options.skip_permutations) std::shuffle(perm.begin(), perm.end(), rng);
  }

  std::vector<std::vector<std::vector<std::uint32_t>>> subsets(files + 1);
  for (std::size_t k = 1; k <= files; ++k) subsets[k] = subsets_of_size(files, k);

  const std::uint64_t blocks = lambda / block;
  std::vector<std::uint64_t> counter(files);

  auto fresh = [&](std::uint32_t f) {
    return SumTerm{f, plan.permutations[f][counter[f]++]};
  };
  auto emit = [&](std::size_t d, SumQuery q, std::optional<SideInfoLink> link) {
    std::sort(q.terms.begin(), q.terms.end());
    plan.per_database[d].push_back(std::move(q));
    plan.links[d].push_back(link);
    return plan.per_database[d].size() - 1;
  };

  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::fill(counter.begin(), counter.end(), b * block);

    // Purely undesired sums of the previous round: per database, file mask -> query ids.
    std::vector<std::map<std::uint64_t, std::vector<std::size_t>>> previous(replicas);

    for (std::size_t d = 0; d < replicas; ++d) {
      for (std::uint32_t f = 0; f < files; ++f) {
        const auto id = emit(d, SumQuery{{fresh(f)}}, std::nullopt);
        if (f != theta) previous[d][std::uint64_t{1} << f].push_back(id);
      }
    }

    for (std::size_t k = 2; k <= files; ++k) {
      std::vector<std::map<std::uint64_t, std::vector<std::size_t>>> current(replicas);
      const std::uint64_t undesired_copies = checked_pow(replicas - 1, k - 1);
      for (std::size_t d = 0; d < replicas; ++d) {
        for (const auto& subset : subsets[k]) {
          const std::uint64_t mask = mask_of(subset);
          if ((mask >> theta) & 1U) {
            const std::uint64_t side_mask = mask & ~(std::uint64_t{1} << theta);
            for (std::size_t other = 0; other < replicas; ++other) {
              if (other == d) continue;
              auto it = previous[other].find(side_mask);
              if (it == previous[other].end()) continue;
              for (std::size_t source : it->second) {
                SumQuery q = plan.per_database[other][source];
                q.terms.push_back(fresh(static_cast<std::uint32_t>(theta)));
                emit(d, std::move(q), SideInfoLink{other, source});
              }
            }
          } else {
            for (std::uint64_t c = 0; c < undesired_copies; ++c) {
              SumQuery q;
              for (auto f : subset) q.terms.push_back(fresh(f));
              current[d][mask].push_back(emit(d, std::move(q), std::nullopt));
            }
          }
        }
      }
      previous = std::move(current);
    }
  }
  return plan;
}

AnswerString answer_queries(std::span<const SumQuery> queries, const SymbolArrays& symbols) {
  AnswerString out;
  out.bits.reserve(queries.size());
  for (const auto& q : queries) {
    Bit acc = 0;
    for (const auto& t : q.terms) {
      if (t.file >= symbols.size() || t.index >= symbols[t.file].size())
        throw ProtocolViolation("query references symbol " + std::to_string(t.index) +
                                " of file " + std::to_string(t.file + 1) +
                                " which the database does not hold");
      acc ^= symbols[t.file][t.index];
    }
    out.bits.push_back(acc);
  }
  return out;
}

std::vector<Bit> decode_desired(const QueryPlan& plan, std::span<const AnswerString> answers) {
  if (answers.size() != plan.per_database.size())
    throw ProtocolViolation("expected one answer string per database");
  for (std::size_t d = 0; d < answers.size(); ++d)
    if (answers[d].bits.size() != plan.per_database[d].size())
      throw ProtocolViolation("answer string length differs from query count");

  const auto theta = static_cast<std::uint32_t>(plan.desired);
  std::vector<Bit> out(plan.desired_length(), 0);
  std::vector<bool> seen(out.size(), false);

  for (std::size_t d = 0; d < plan.per_database.size(); ++d) {
    const auto& queries = plan.per_database[d];
    for (std::size_t r = 0; r < queries.size(); ++r) {
      auto term = std::find_if(queries[r].terms.begin(), queries[r].terms.end(),
                               [&](const SumTerm& t) { return t.file == theta; });
      if (term == queries[r].terms.end()) continue;
      Bit value = answers[d].bits[r];
      if (queries[r].order() > 1) {
        const auto& link = plan.links[d][r];
        if (!link || link->database >= answers.size() ||
            link->query >= answers[link->database].bits.size())
          throw ProtocolViolation("desired sum without usable side information");
        value ^= answers[link->database].bits[link->query];
      }
      if (term->index >= out.size() || seen[term->index])
        throw ProtocolViolation("desired symbol position repeated or out of range");
      out[term->index] = value;
      seen[term->index] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ProtocolViolation("plan leaves desired symbols undetermined");
  return out;
}

std::vector<PrivacyHistogram> structural_privacy_histogram(const QueryPlan& plan) {
  std::vector<PrivacyHistogram> out(plan.per_database.size());
  for (std::size_t d = 0; d < plan.per_database.size(); ++d)
    for (const auto& q : plan.per_database[d]) ++out[d][{q.order(), q.file_mask()}];
  return out;
}

std::string serialize_transcript(const QueryPlan& plan, std::size_t database) {
  std::ostringstream os;
  for (const auto& q : plan.per_database.at(database)) {
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
      if (i) os << ' ';
      os << q.terms[i].file + 1 << ':' << q.terms[i].index + 1;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace pircache
