#pragma once

#include "pircache/core_model.hpp"
#include "pircache/marginal_profile.hpp"
#include "pircache/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pircache {

// Closed-form download-cost formulas. Every evaluator is generic in Scalar:
// Rational gives exact values, double is used by the optimizer and sweeps.

template <typename Scalar>
Scalar ipow(Scalar base, std::size_t exp) {
  Scalar out(1);
  while (exp) {
    if (exp & 1U) out *= base;
    base *= base;
    exp >>= 1U;
  }
  return out;
}

template <typename Scalar>
Scalar binomial(std::size_t n, std::size_t k) {
  if (k > n) return Scalar(0);
  k = std::min(k, n - k);
  Scalar out(1);
  for (std::size_t i = 0; i < k; ++i) out = out * Scalar(n - i) / Scalar(i + 1);
  return out;
}

/// 1 + 1/n + ... + 1/n^(K-1): normalized cost of K files over n replicas.
template <typename Scalar>
Scalar capacity_classical(std::size_t files, std::size_t replicas) {
  if (replicas == 0) throw std::invalid_argument("classical capacity needs n >= 1");
  Scalar out(0);
  Scalar term(1);
  for (std::size_t m = 0; m < files; ++m) {
    out += term;
    term /= Scalar(replicas);
  }
  return out;
}

/// 1/l + ... + 1/l^(K-1), the weight of x_l in the per-realization bound.
template <typename Scalar>
Scalar harmonic_weight(std::size_t files, std::size_t l) {
  return capacity_classical<Scalar>(files, l) - Scalar(1);
}

/// Probability that a bit cached independently with probability p by each of
/// N databases ends up in a storage set of size l (data center included):
/// C(N, l-1) p^(l-1) (1-p)^(N+1-l).
template <typename Scalar>
Scalar storage_set_size_probability(std::size_t databases, std::size_t l, const Scalar& p) {
  return binomial<Scalar>(databases, l - 1) * ipow(p, l - 1) *
         ipow(Scalar(Scalar(1) - p), databases + 1 - l);
}

template <typename Scalar>
void check_ratio(const Scalar& mu) {
  if (mu < Scalar(0) || mu > Scalar(1))
    throw std::invalid_argument("storage ratio mu must lie in [0, 1]");
}

/// Expected normalized download cost of uniform decentralized caching with
/// per-partition replicated PIR:
///   sum_{n=1}^{N+1} C(N,n-1) mu^(n-1) (1-mu)^(N+1-n) (1 + 1/n + ... + 1/n^(K-1)).
/// This is also the optimal cost over all decentralized uncoded placements.
template <typename Scalar>
Scalar capacity_decentralized(std::size_t files, std::size_t databases, const Scalar& mu) {
  if (files == 0) throw std::invalid_argument("capacity needs K >= 1");
  check_ratio(mu);
  Scalar out(0);
  for (std::size_t n = 1; n <= databases + 1; ++n)
    out += storage_set_size_probability(databases, n, mu) * capacity_classical<Scalar>(files, n);
  return out;
}

template <typename Scalar>
struct EnvelopePoint {
  Scalar mu;
  Scalar cost;
};

/// Storage/download tradeoff of centralized uncoded caching when the data
/// center also takes part in retrieval: lower convex envelope of
/// (t/N, sum_{k<K} (t+1)^-k), t = 0..N.
template <typename Scalar>
class CentralizedEnvelope {
 public:
  CentralizedEnvelope(std::size_t files, std::size_t databases) {
    if (databases == 0) throw std::invalid_argument("centralized envelope needs N >= 1");
    std::vector<EnvelopePoint<Scalar>> points;
    for (std::size_t t = 0; t <= databases; ++t)
      points.push_back({Scalar(t) / Scalar(databases), capacity_classical<Scalar>(files, t + 1)});
    // Lower hull by monotone chain; points are already sorted by mu.
    for (const auto& pt : points) {
      while (hull_.size() >= 2) {
        const auto& a = hull_[hull_.size() - 2];
        const auto& b = hull_.back();
        const Scalar cross = (b.mu - a.mu) * (pt.cost - a.cost) - (b.cost - a.cost) * (pt.mu - a.mu);
        if (cross > Scalar(0)) break;
        hull_.pop_back();
      }
      hull_.push_back(pt);
    }
    corners_ = std::move(points);
  }

  /// All (t/N, D_t) pairs, including any that lie above the envelope.
  const std::vector<EnvelopePoint<Scalar>>& corners() const { return corners_; }
  const std::vector<EnvelopePoint<Scalar>>& hull() const { return hull_; }

  Scalar operator()(const Scalar& mu) const {
    check_ratio(mu);
    for (std::size_t i = 1; i < hull_.size(); ++i) {
      const auto& a = hull_[i - 1];
      const auto& b = hull_[i];
      if (mu <= b.mu) return a.cost + (b.cost - a.cost) * (mu - a.mu) / (b.mu - a.mu);
    }
    return hull_.back().cost;
  }

 private:
  std::vector<EnvelopePoint<Scalar>> corners_;
  std::vector<EnvelopePoint<Scalar>> hull_;
};

/// Lower bound on the bits any private scheme downloads for one cache
/// realization: L + sum_l C(N+1,l) h_l x_l with
/// x_l = (1 / (K C(N+1,l))) * (bits whose storage set has size l).
template <typename Scalar>
struct ConverseTerms {
  std::vector<Scalar> x;        // x[l-1] for l = 1..N+1
  std::vector<Scalar> weights;  // h_l
  Scalar bound;
};

/// Throws std::invalid_argument when the partition is not a disjoint cover of
/// the K*L addresses.
ConverseTerms<Rational> converse_bound_realization(const StorageSetPartition& partition);

/// The same bound for K = 3, N = 2 written through conditional entropies of
/// the uncoded caches:
///   L + 4/27 sum_k H(W_k) + 11/108 sum_i sum_k H(W_k|Z_i)
///     + 17/54 sum_i sum_k H(W_k | Z_{[0:2] \ i}).
/// Evaluated directly on the realization by bit counting.
Rational converse_bound_three_files_two_databases(const CacheRealization& realization,
                                                  std::size_t file_bits);

/// E[x_l] for l = 1..N+1 under per-bit marginals p:
/// C(N,l-1) / (K C(N+1,l)) * sum_{i,j} p^(l-1) (1-p)^(N+1-l).
template <typename Scalar>
std::vector<Scalar> expected_storage_weights(const MarginalProfile<Scalar>& marginals,
                                             std::size_t databases) {
  const auto files = static_cast<std::size_t>(marginals.files());
  std::vector<Scalar> out;
  for (std::size_t l = 1; l <= databases + 1; ++l) {
    const Scalar mass = marginals.p
                            .unaryExpr([&](const Scalar& p) -> Scalar {
                              return ipow(p, l - 1) * ipow(Scalar(Scalar(1) - p), databases + 1 - l);
                            })
                            .sum();
    out.push_back(binomial<Scalar>(databases, l - 1) /
                  (Scalar(files) * binomial<Scalar>(databases + 1, l)) * mass);
  }
  return out;
}

/// Throws std::invalid_argument for entries outside [0,1] or sum p > mu K L.
template <typename Scalar>
void check_marginals(const MarginalProfile<Scalar>& marginals) {
  check_ratio(marginals.mu);
  if (marginals.p.size() == 0)
    throw std::invalid_argument("marginal profile is empty");
  if (marginals.p.minCoeff() < Scalar(0) || marginals.p.maxCoeff() > Scalar(1))
    throw std::invalid_argument("marginal probabilities must lie in [0, 1]");
  const Scalar budget = marginals.mu * Scalar(marginals.files()) * Scalar(marginals.file_bits());
  if (marginals.p.sum() > budget)
    throw std::invalid_argument("marginal probabilities exceed the storage budget");
}

/// Expected value of the per-realization bound: L + sum_l C(N+1,l) h_l E[x_l].
template <typename Scalar>
Scalar expected_converse_bound(const MarginalProfile<Scalar>& marginals, std::size_t databases) {
  check_marginals(marginals);
  const auto files = static_cast<std::size_t>(marginals.files());
  const auto weights = expected_storage_weights(marginals, databases);
  Scalar out(marginals.file_bits());
  for (std::size_t l = 1; l <= databases + 1; ++l)
    out += binomial<Scalar>(databases + 1, l) * harmonic_weight<Scalar>(files, l) * weights[l - 1];
  return out;
}

struct OptimizerOptions {
  std::size_t restarts = 20;
  std::uint64_t seed = 1;
  std::size_t max_iterations = 100000;
  double tolerance = 1e-12;  // on the projected-gradient norm
};

struct OptimizerResult {
  Eigen::ArrayXXd best;          // K x L
  double best_value = 0;
  double uniform_value = 0;
  double gradient_norm_at_uniform = 0;
  double gradient_norm_at_best = 0;
  bool converged = false;        // every restart met the tolerance
  std::size_t restarts = 0;
  std::vector<double> restart_values;
};

/// Minimizes the expected bound over p in [0,1]^(K x L) with sum p <= mu K L
/// by projected gradient descent from random feasible starts.
OptimizerResult minimize_expected_bound(std::size_t files, std::size_t databases, double mu,
                                        std::size_t file_bits, const OptimizerOptions& options);

/// Minimizes E[x_l] alone for one l (not part of the bound's optimality claim;
/// reported as a diagnostic).
OptimizerResult minimize_expected_storage_weight(std::size_t files, std::size_t databases,
                                                 std::size_t l, double mu, std::size_t file_bits,
                                                 const OptimizerOptions& options);

/// Euclidean projection onto {p in [0,1]^m : sum p <= budget}.
Eigen::ArrayXd project_capped_simplex(const Eigen::ArrayXd& v, double budget);

}  // namespace pircache
