#include "pircache/retrieval.hpp"

#include "pircache/errors.hpp"
#include "pircache/parallel.hpp"
#include "pircache/random.hpp"

#include <cmath>
#include <stdexcept>

namespace pircache {

DatabaseNode::DatabaseNode(std::size_t id, const FileStore& store,
                           const CacheRealization& realization)
    : id_(id), store_(&store) {
  if (id == 0) return;
  held_.assign(store.files() * store.file_bits(), false);
  for (const auto& a : realization.sets.at(id - 1)) held_[a.file * store.file_bits() + a.position] = true;
}

bool DatabaseNode::holds(BitAddress a) const {
  return held_.empty() || held_[a.file * store_->file_bits() + a.position];
}

SymbolArrays DatabaseNode::symbols_for(const PartitionEntry& entry) const {
  const bool replicated = entry.set.size() >= 2;
  SymbolArrays out(entry.positions.size());
  for (std::uint32_t f = 0; f < entry.positions.size(); ++f) {
    const auto& positions = entry.positions[f];
    out[f].assign(replicated ? entry.padded_length : positions.size(), 0);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const BitAddress a{f, positions[i]};
      if (!holds(a))
        throw ProtocolViolation("database " + std::to_string(id_) +
                                " asked to serve a bit it does not cache");
      out[f][i] = store_->bit(a);
    }
  }
  return out;
}

AnswerString DatabaseNode::answer(std::span<const SumQuery> queries,
                                  const PartitionEntry& entry) const {
  return answer_queries(queries, symbols_for(entry));
}

namespace {

std::vector<std::uint64_t> raw_lengths(const PartitionEntry& entry) {
  std::vector<std::uint64_t> out;
  for (const auto& p : entry.positions) out.push_back(p.size());
  return out;
}

// Cost of the padding symbols of a replicated partition at its per-symbol rate.
double padding_cost(const PartitionEntry& entry, std::size_t files) {
  const std::size_t n = entry.set.size();
  if (n < 2) return 0.0;
  const double rate = capacity_classical<double>(files, n);
  return static_cast<double>(entry.padded_length - entry.max_length()) * rate;
}

}  // namespace

RetrievalResult retrieve_file(const FileStore& store, const CacheRealization& realization,
                              std::size_t theta, std::uint64_t seed) {
  const std::size_t files = store.files();
  const std::size_t file_bits = store.file_bits();
  if (theta >= files) throw std::invalid_argument("desired file index out of range");

  const auto partition = partition_by_storage_set(realization, files, file_bits);
  std::vector<DatabaseNode> nodes;
  for (std::size_t d = 0; d <= realization.databases(); ++d) nodes.emplace_back(d, store, realization);

  RetrievalResult out;
  out.recovered.assign(file_bits, 0);
  out.cost.per_database.assign(realization.databases() + 1, 0);
  out.cost.file_bits = file_bits;
  double padding = 0;

  for (const auto& entry : partition.entries) {
    const auto members = entry.set.members();
    const std::size_t n = members.size();
    QueryPlan plan = n == 1 ? download_all_plan(files, theta, raw_lengths(entry))
                            : generate_query_plan(n, files, theta, entry.padded_length,
                                                  derive_seed(seed, entry.set.mask()));

    std::vector<AnswerString> answers;
    std::uint64_t downloaded = 0;
    for (std::size_t i = 0; i < n; ++i) {
      answers.push_back(nodes[members[i]].answer(plan.per_database[i], entry));
      out.cost.per_database[members[i]] += answers.back().bits.size();
      downloaded += answers.back().bits.size();
    }

    const auto decoded = decode_desired(plan, answers);
    const auto& positions = entry.positions[theta];
    for (std::size_t i = 0; i < positions.size(); ++i) out.recovered[positions[i]] = decoded[i];

    out.cost.per_partition.emplace_back(entry.set, downloaded);
    out.cost.total += downloaded;
    padding += padding_cost(entry, files);
    out.transcripts.push_back({entry.set, std::move(plan), std::move(answers)});
  }
  out.cost.ideal = static_cast<double>(out.cost.total) - padding;
  return out;
}

CostReport retrieval_cost(const StorageSetPartition& partition) {
  CostReport cost;
  cost.per_database.assign(partition.databases + 1, 0);
  cost.file_bits = partition.file_bits;
  double padding = 0;
  for (const auto& entry : partition.entries) {
    const auto members = entry.set.members();
    const std::size_t n = members.size();
    std::uint64_t downloaded = 0;
    if (n == 1) {
      downloaded = subfile_download_cost(1, raw_lengths(entry));
      cost.per_database[0] += downloaded;
    } else {
      const std::vector<std::uint64_t> lengths(partition.files, entry.padded_length);
      downloaded = subfile_download_cost(n, lengths);
      for (auto d : members) cost.per_database[d] += downloaded / n;
    }
    cost.per_partition.emplace_back(entry.set, downloaded);
    if (__builtin_add_overflow(cost.total, downloaded, &cost.total))
      throw std::overflow_error("download cost exceeds 64 bits");
    padding += padding_cost(entry, partition.files);
  }
  cost.ideal = static_cast<double>(cost.total) - padding;
  return cost;
}

bool check_query_locality(const StorageSetPartition& partition,
                          const CacheRealization& realization,
                          std::span<const PartitionTranscript> transcripts) {
  for (const auto& t : transcripts) {
    const PartitionEntry* entry = partition.find(t.set);
    if (!entry) return false;
    const auto members = t.set.members();
    if (members.size() != t.plan.per_database.size()) return false;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t d = members[i];
      for (const auto& q : t.plan.per_database[i]) {
        for (const auto& term : q.terms) {
          const auto& positions = entry->positions.at(term.file);
          if (term.index >= positions.size()) {
            if (members.size() < 2 || term.index >= entry->padded_length) return false;
            continue;  // zero padding
          }
          if (d == 0) continue;
          const BitAddress a{term.file, positions[term.index]};
          const auto& set = realization.sets.at(d - 1);
          if (!std::binary_search(set.begin(), set.end(), a)) return false;
        }
      }
    }
  }
  return true;
}

bool TrialStatistics::all_reliable() const {
  for (const auto& t : trials)
    if (!t.reliable) return false;
  return true;
}

bool TrialStatistics::all_dominate() const {
  for (const auto& t : trials)
    if (!t.dominates_bound) return false;
  return true;
}

double TrialStatistics::relative_gap() const {
  const double f = to_double(formula);
  return (mean - f) / f;
}

TrialStatistics simulate_trials(const SimulationConfig& config) {
  if (config.trials == 0) throw std::invalid_argument("simulation needs at least one trial");
  if (config.files == 0 || config.file_bits == 0)
    throw std::invalid_argument("simulation needs K >= 1 and L >= 1");

  TrialStatistics stats;
  stats.formula = capacity_decentralized<Rational>(config.files, config.databases, config.mu);
  stats.trials.resize(config.trials);

  PlacementPolicy policy = config.policy;
  policy.mu = config.mu;

  parallel_for(
      config.trials,
      [&](std::size_t t) {
        TrialRecord& rec = stats.trials[t];
        rec.trial = t;
        rec.theta = t % config.files;
        rec.seed = derive_seed(config.seed, t);

        const auto realization = sample_placement(policy, config.files, config.file_bits,
                                                  config.databases, derive_seed(rec.seed, 1));
        const auto partition =
            partition_by_storage_set(realization, config.files, config.file_bits);
        rec.converse_bound = converse_bound_realization(partition).bound;

        CostReport cost;
        if (config.mode == SimulationMode::FullProtocol) {
          const auto store =
              build_file_store(config.files, config.file_bits, derive_seed(rec.seed, 2));
          auto result = retrieve_file(store, realization, rec.theta, derive_seed(rec.seed, 3));
          rec.reliable = result.recovered == store.file(rec.theta) &&
                         check_query_locality(partition, realization, result.transcripts);
          cost = std::move(result.cost);
        } else {
          cost = retrieval_cost(partition);
        }
        rec.total = cost.total;
        rec.ideal = cost.ideal;
        rec.normalized = cost.normalized();
        rec.dominates_bound = Rational(rec.total) >= rec.converse_bound;
      },
      config.threads);

  double sum = 0;
  double ideal_sum = 0;
  for (const auto& t : stats.trials) {
    sum += t.normalized;
    ideal_sum += t.ideal / static_cast<double>(config.file_bits);
  }
  const auto count = static_cast<double>(stats.trials.size());
  stats.mean = sum / count;
  stats.ideal_mean = ideal_sum / count;
  if (stats.trials.size() > 1) {
    double ss = 0;
    for (const auto& t : stats.trials) ss += (t.normalized - stats.mean) * (t.normalized - stats.mean);
    stats.stddev = std::sqrt(ss / (count - 1));
  }
  return stats;
}

}  // namespace pircache
