#include <doctest.h>

#include "pircache/errors.hpp"
#include "pircache/placement.hpp"
#include "pircache/random.hpp"

#include <cmath>

using namespace pircache;

TEST_CASE("uniform placement stores exactly the budget") {
  // K=3, L=4, mu=1/3: each database holds 4 of the 12 bits.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = sample_placement(PlacementPolicy::uniform(Rational(1, 3)), 3, 4, 4, seed);
    CHECK(r.budget == 4);
    REQUIRE(r.sets.size() == 4);
    for (const auto& h : r.sets) CHECK(h.size() == 4);
    CHECK(validate_budget(r, Rational(1, 3), 3, 4).ok());
  }
}

TEST_CASE("uniform placement at mu = 1 stores everything") {
  const auto r = sample_placement(PlacementPolicy::uniform(Rational(1)), 2, 5, 3, 9);
  for (const auto& h : r.sets) CHECK(h.size() == 10);
}

TEST_CASE("budget floors mu K L") {
  CHECK(storage_budget(Rational(1, 3), 2, 5) == 3);
  CHECK(storage_budget(Rational(0), 10, 10) == 0);
  CHECK(storage_budget(Rational(1), 3, 7) == 21);
  CHECK_THROWS_AS(storage_budget(Rational(4, 3), 1, 1), std::invalid_argument);
}

TEST_CASE("placement is deterministic under seed") {
  const auto policy = PlacementPolicy::uniform(Rational(1, 2));
  const auto a = sample_placement(policy, 3, 20, 3, 77);
  const auto b = sample_placement(policy, 3, 20, 3, 77);
  const auto c = sample_placement(policy, 3, 20, 3, 78);
  CHECK(a.sets == b.sets);
  CHECK(a.sets != c.sets);
  // Databases do not share randomness.
  CHECK(a.sets[0] != a.sets[1]);
}

TEST_CASE("whole-file placement") {
  const auto r = sample_placement(PlacementPolicy::whole_files(Rational(1, 3), {0}), 3, 4, 2, 1);
  for (const auto& h : r.sets) {
    REQUIRE(h.size() == 4);
    for (std::uint32_t i = 0; i < 4; ++i) CHECK(h[i] == BitAddress{0, i});
  }
  CHECK_THROWS_AS(sample_placement(PlacementPolicy::whole_files(Rational(1, 3), {0, 1}), 3, 4, 2, 1),
                  BudgetViolation);
  CHECK_THROWS_AS(sample_placement(PlacementPolicy::whole_files(Rational(1), {3}), 3, 4, 2, 1),
                  std::invalid_argument);
}

TEST_CASE("explicit sets") {
  // budget floor(1/3 * 12) = 4
  std::vector<BitAddress> five{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}};
  std::vector<BitAddress> four(five.begin(), five.begin() + 4);
  CHECK_THROWS_AS(sample_placement(PlacementPolicy::explicit_sets(Rational(1, 3), {four, five}), 3, 4, 2, 1),
                  BudgetViolation);
  const auto ok = sample_placement(PlacementPolicy::explicit_sets(Rational(1, 3), {four, {}}), 3, 4, 2, 1);
  CHECK(ok.sets[0] == four);
  CHECK(ok.sets[1].empty());
  CHECK_THROWS(sample_placement(PlacementPolicy::explicit_sets(Rational(1, 3), {four}), 3, 4, 2, 1));

  // validate_budget reports offending databases by 1-based id.
  CacheRealization over{5, {four, five}};
  const auto report = validate_budget(over, Rational(1, 3), 3, 4);
  CHECK(report.budget == 4);
  CHECK(report.offending == std::vector<std::size_t>{2});

  CacheRealization empty{0, {{}, {}}};
  CHECK(validate_budget(empty, Rational(0), 3, 4).ok());
}

TEST_CASE("placement kind names") {
  for (auto k : {PlacementKind::UniformRandom, PlacementKind::WholeFiles, PlacementKind::ExplicitSets})
    CHECK(placement_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(placement_kind_from_string("bernoulli"));
}

TEST_CASE("uniform marginals concentrate at mu") {
  const std::size_t K = 2, L = 10, trials = 10000;
  const double mu = 0.3;
  const auto m = empirical_marginals(PlacementPolicy::uniform(Rational(3, 10)), K, L, trials, 5);
  const double se = std::sqrt(mu * (1 - mu) / trials);
  CHECK((m.p - mu).abs().maxCoeff() < 4 * se);  // 20 cells, 3 sigma each is loose enough at 4
  const double mean = m.p.mean();
  CHECK(((m.p - mean).abs() <= 4 * se).all());
  CHECK(std::abs(mean - mu) < 1e-12);  // exact: budget is always exactly 6 of 20
}

TEST_CASE("deterministic marginals") {
  const auto whole = empirical_marginals(PlacementPolicy::whole_files(Rational(1, 3), {0}), 3, 4, 5, 1);
  CHECK((whole.p.row(0) == 1.0).all());
  CHECK((whole.p.bottomRows(2) == 0.0).all());
  const auto zero = empirical_marginals(PlacementPolicy::uniform(Rational(0)), 3, 4, 5, 1);
  CHECK((zero.p == 0.0).all());
}

TEST_CASE("databases cache independently") {
  // P(address in H_1 and H_2) = p^2.
  const std::size_t K = 2, L = 6, trials = 20000;
  const double p = 0.5;
  Eigen::ArrayXXd both = Eigen::ArrayXXd::Zero(K, L);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto r = sample_placement(PlacementPolicy::uniform(Rational(1, 2)), K, L, 2, derive_seed(9, t));
    std::vector<int> hit(K * L, 0);
    for (const auto& a : r.sets[0]) hit[a.file * L + a.position] += 1;
    for (const auto& a : r.sets[1])
      if (hit[a.file * L + a.position]) both(a.file, a.position) += 1;
  }
  both /= static_cast<double>(trials);
  const double se = std::sqrt(p * p * (1 - p * p) / trials);
  CHECK((both - p * p).abs().maxCoeff() < 4 * se);
}
