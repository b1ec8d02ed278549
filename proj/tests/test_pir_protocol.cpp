#include <doctest.h>

#include "pircache/analysis.hpp"
#include "pircache/core_model.hpp"
#include "pircache/errors.hpp"
#include "pircache/pir_protocol.hpp"
#include "pircache/random.hpp"

#include <map>
#include <set>

using namespace pircache;

namespace {

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

std::uint64_t upow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t out = 1;
  while (e--) out *= b;
  return out;
}

SymbolArrays random_symbols(std::size_t K, std::uint64_t lambda, std::uint64_t seed) {
  Rng rng(seed);
  SymbolArrays out(K, std::vector<Bit>(lambda));
  for (auto& f : out)
    for (auto& b : f) b = static_cast<Bit>(rng() & 1U);
  return out;
}

std::vector<AnswerString> answer_all(const QueryPlan& plan, const SymbolArrays& symbols) {
  std::vector<AnswerString> out;
  for (const auto& q : plan.per_database) out.push_back(answer_queries(q, symbols));
  return out;
}

}  // namespace

TEST_CASE("plan counts for n=2 K=3 lambda=8") {
  for (std::size_t theta = 0; theta < 3; ++theta) {
    const auto plan = generate_query_plan(2, 3, theta, 8, 11);
    REQUIRE(plan.per_database.size() == 2);
    CHECK(plan.per_database[0].size() == 7);
    CHECK(plan.per_database[1].size() == 7);
    CHECK(plan.total_queries() == 14);

    // Every (k, T) appears once per database.
    for (const auto& h : structural_privacy_histogram(plan)) {
      CHECK(h.size() == 7);
      for (const auto& [key, count] : h) CHECK(count == 1);
    }
  }
  CHECK(capacity_classical<Rational>(3, 2) == Rational(14, 8));
}

TEST_CASE("plan counts for n=3 K=2 lambda=9") {
  const auto plan = generate_query_plan(3, 2, 1, 9, 3);
  for (const auto& q : plan.per_database) CHECK(q.size() == 4);
  CHECK(plan.total_queries() == 12);
  for (const auto& h : structural_privacy_histogram(plan)) {
    CHECK(h.at({1, 0b01}) == 1);
    CHECK(h.at({1, 0b10}) == 1);
    CHECK(h.at({2, 0b11}) == 2);
  }
}

TEST_CASE("download-all for a single replica") {
  const auto plan = generate_query_plan(1, 3, 2, 5, 1);
  REQUIRE(plan.per_database.size() == 1);
  CHECK(plan.total_queries() == 15);
  const auto symbols = random_symbols(3, 5, 4);
  const auto answers = answer_all(plan, symbols);
  CHECK(decode_desired(plan, answers) == symbols[2]);

  const auto uneven = download_all_plan(2, 0, {3, 1});
  CHECK(uneven.total_queries() == 4);
  CHECK(subfile_download_cost(1, std::vector<std::uint64_t>{3, 1}) == 4);
}

TEST_CASE("single file degenerates to direct download") {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto plan = generate_query_plan(n, 1, 0, n * 3, 8);
    CHECK(plan.total_queries() == n * 3);
    const auto symbols = random_symbols(1, n * 3, n);
    CHECK(decode_desired(plan, answer_all(plan, symbols)) == symbols[0]);
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(generate_query_plan(2, 3, 0, 12, 1), InvalidLength);
  CHECK_THROWS_AS(generate_query_plan(2, 3, 3, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_query_plan(0, 3, 0, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(subfile_download_cost(2, std::vector<std::uint64_t>{8, 4, 8}), InvalidLength);
}

TEST_CASE("answers are GF(2) sums") {
  const SymbolArrays symbols{{1, 0}, {1, 1}};
  const std::vector<SumQuery> qs{
      SumQuery{{SumTerm{0, 0}}},
      SumQuery{{SumTerm{0, 0}, SumTerm{1, 0}}},
      SumQuery{{SumTerm{0, 1}, SumTerm{1, 1}}},
  };
  CHECK(answer_queries(qs, symbols).bits == std::vector<Bit>{1, 0, 1});

  const std::vector<SumQuery> bad{SumQuery{{SumTerm{1, 2}}}};
  CHECK_THROWS_AS(answer_queries(bad, symbols), ProtocolViolation);
}

TEST_CASE("hand-computed n=2 K=2 lambda=4 instance") {
  // Identity permutations make the symbol choice readable:
  //   DB1: W1[1], W2[1], W1[3]+W2[2]
  //   DB2: W1[2], W2[2], W1[4]+W2[1]
  const SymbolArrays store{{1, 0, 1, 1}, {0, 1, 1, 0}};
  PlanOptions opts;
  opts.skip_permutations = true;
  const auto plan = generate_query_plan(2, 2, 0, 4, 1, opts);
  CHECK(serialize_transcript(plan, 0) == "1:1\n2:1\n1:3 2:2\n");
  CHECK(serialize_transcript(plan, 1) == "1:2\n2:2\n1:4 2:1\n");

  const auto answers = answer_all(plan, store);
  CHECK(answers[0].bits == std::vector<Bit>{1, 0, 0});
  CHECK(answers[1].bits == std::vector<Bit>{0, 1, 1});
  CHECK(decode_desired(plan, answers) == store[0]);

  // Desired 2-sum answer 1 cancelled by linked singleton answer 1 gives 0.
  auto flipped = answers;
  flipped[0].bits[2] = 1;
  flipped[1].bits[1] = 1;
  CHECK(decode_desired(plan, flipped)[2] == 0);
}

TEST_CASE("permuted n=2 K=2 instances match brute force") {
  const SymbolArrays store{{1, 0, 1, 1}, {0, 1, 1, 0}};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto plan = generate_query_plan(2, 2, seed % 2, 4, seed);
    const auto answers = answer_all(plan, store);
    std::size_t bits = 0;
    for (std::size_t d = 0; d < 2; ++d) {
      for (std::size_t r = 0; r < plan.per_database[d].size(); ++r) {
        int expect = 0;
        for (const auto& t : plan.per_database[d][r].terms) expect += store[t.file][t.index];
        CHECK(answers[d].bits[r] == expect % 2);
        ++bits;
      }
    }
    CHECK(bits == 6);
    CHECK(decode_desired(plan, answers) == store[seed % 2]);
  }
}

TEST_CASE("count identities and decoding for n in 2..5, K in 1..5") {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (std::size_t K = 1; K <= 5; ++K) {
      const std::uint64_t block = upow(n, K);
      std::uint64_t per_db = 0;
      for (std::size_t k = 1; k <= K; ++k) per_db += choose(K, k) * upow(n - 1, k - 1);
      CHECK(queries_per_database_per_block(n, K) == per_db);

      for (std::size_t theta = 0; theta < K; ++theta) {
        const auto seed = derive_seed(n * 100 + K, theta);
        const auto plan = generate_query_plan(n, K, theta, block, seed);
        std::set<std::uint64_t> desired_seen;
        for (std::size_t d = 0; d < n; ++d) {
          CHECK(plan.per_database[d].size() == per_db);
          std::size_t desired = 0;
          std::set<std::pair<std::uint32_t, std::uint64_t>> used;
          for (const auto& q : plan.per_database[d]) {
            for (const auto& t : q.terms) {
              if (t.file == theta) {
                ++desired;
                CHECK(desired_seen.insert(t.index).second);
              }
            }
          }
          CHECK(desired == upow(n, K - 1));
        }
        // n^K * sum_m n^-m = n (n^K - 1)/(n - 1)
        CHECK(plan.total_queries() == n * (block - 1) / (n - 1));
        CHECK(desired_seen.size() == block);
        CHECK(subfile_download_cost(n, std::vector<std::uint64_t>(K, block)) == plan.total_queries());

        const auto symbols = random_symbols(K, block, seed);
        CHECK(decode_desired(plan, answer_all(plan, symbols)) == symbols[theta]);
      }
    }
  }
}

TEST_CASE("multi-block plans") {
  const auto plan = generate_query_plan(3, 3, 1, 27 * 4, 5);
  CHECK(plan.total_queries() == 4 * 3 * 13);
  const auto symbols = random_symbols(3, 108, 1);
  CHECK(decode_desired(plan, answer_all(plan, symbols)) == symbols[1]);
}

TEST_CASE("side information links are balanced") {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t K = 2; K <= 4; ++K) {
      const auto plan = generate_query_plan(n, K, K - 1, block_length(n, K), n + K);
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> uses;
      for (std::size_t d = 0; d < n; ++d)
        for (std::size_t r = 0; r < plan.per_database[d].size(); ++r)
          if (const auto& link = plan.links[d][r]) {
            CHECK(link->database != d);
            ++uses[{link->database, link->query}];
          }
      // Every undesired sum below order K is reused by n-1 desired sums.
      for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t r = 0; r < plan.per_database[d].size(); ++r) {
          const auto& q = plan.per_database[d][r];
          const bool undesired = !((q.file_mask() >> (K - 1)) & 1U);
          if (undesired && q.order() < K) {
            CHECK(uses[{d, r}] == n - 1);
          } else {
            CHECK(uses.count({d, r}) == 0);
          }
        }
      }
    }
  }
}

TEST_CASE("structural histograms do not depend on theta") {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t K = 1; K <= 4; ++K) {
      const auto reference = structural_privacy_histogram(generate_query_plan(n, K, 0, block_length(n, K), 1));
      for (std::size_t theta = 1; theta < K; ++theta)
        CHECK(structural_privacy_histogram(generate_query_plan(n, K, theta, block_length(n, K), 9)) ==
              reference);
      // (n-1)^(k-1) per exact file set
      for (const auto& [key, count] : reference[0])
        CHECK(count == upow(n - 1, key.first - 1));
    }
  }
}

TEST_CASE("slot layout does not depend on theta") {
  // Query r of each database has the same file set for every theta.
  const auto a = generate_query_plan(2, 4, 0, 16, 3);
  for (std::size_t theta = 1; theta < 4; ++theta) {
    const auto b = generate_query_plan(2, 4, theta, 16, 3);
    for (std::size_t d = 0; d < 2; ++d)
      for (std::size_t r = 0; r < a.per_database[d].size(); ++r)
        CHECK(a.per_database[d][r].file_mask() == b.per_database[d][r].file_mask());
  }
}

TEST_CASE("decoding detects missing side information") {
  auto plan = generate_query_plan(2, 2, 0, 4, 2);
  const auto answers = answer_all(plan, random_symbols(2, 4, 1));
  for (auto& l : plan.links[0]) l.reset();
  CHECK_THROWS_AS(decode_desired(plan, answers), ProtocolViolation);
  std::vector<AnswerString> short_answers(answers.begin(), answers.begin() + 1);
  CHECK_THROWS_AS(decode_desired(plan, short_answers), ProtocolViolation);
}
