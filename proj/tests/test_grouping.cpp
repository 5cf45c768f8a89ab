// SPDX-License-Identifier: Apache-2.0
#include "mmhp/grouping.hpp"

#include "mmhp/channel.hpp"
#include "mmhp/linalg.hpp"
#include "mmhp/precoder.hpp"
#include "mmhp/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/SVD>

using namespace mmhp;

namespace {

CMatrix blockPairMatrix(double strong, double weak) {
  CMatrix r = CMatrix::Zero(4, 4);
  r(0, 0) = r(1, 1) = r(2, 2) = r(3, 3) = 1.0;
  r(0, 1) = r(1, 0) = strong;
  r(2, 3) = r(3, 2) = weak;
  return r;
}

CMatrix randomCorrelation(RandomStream& rng, int nt, int ns, int k) {
  return correlationMatrix(testutil::randomPrecoders(rng, nt, ns, k));
}

// Correlation matrices with the clustered-channel structure the grouping
// heuristics are designed for.
CMatrix channelCorrelation(int ntV, int ntH, std::uint64_t seed) {
  SystemConfig cfg;
  cfg.ntV = ntV;
  cfg.ntH = ntH;
  cfg.nrV = 2;
  cfg.nrH = 2;
  cfg.ntRF = 2;
  cfg.ns = 2;
  cfg.numSubcarriers = 16;
  cfg.delayTaps = 16;
  cfg.numClusters = 8;
  cfg.raysPerCluster = 10;
  const auto channel = generateChannel(cfg, seed);
  return correlationMatrix(optimalFullyDigital(channel, cfg.ns));
}

Grouping randomPartition(RandomStream& rng, int nt, int ntRF) {
  for (;;) {
    Grouping g;
    g.subsets.assign(static_cast<std::size_t>(ntRF), {});
    for (int i = 0; i < nt; ++i) {
      const int r = static_cast<int>(rng.uniform01() * ntRF);
      g.subsets[static_cast<std::size_t>(std::min(r, ntRF - 1))].push_back(i);
    }
    bool ok = true;
    for (const auto& s : g.subsets) {
      ok &= !s.empty();
    }
    if (ok) {
      g.canonicalize();
      return g;
    }
  }
}

} // namespace

TEST_CASE("correlationMatrix is the stacked Gram") {
  SUBCASE("single basis precoder") {
    FullyDigitalPrecoders fd;
    CMatrix f = CMatrix::Zero(3, 1);
    f(0, 0) = 1.0;
    fd.fOpt.push_back(f);
    const CMatrix r = correlationMatrix(fd);
    CHECK(std::abs(r(0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("trace equals K * Ns for orthonormal columns") {
    RandomStream rng(9);
    const auto fd = testutil::randomPrecoders(rng, 6, 2, 5);
    const CMatrix r = correlationMatrix(fd);
    CHECK(std::real(r.trace()) == doctest::Approx(10.0).epsilon(1e-10));
  }
  SUBCASE("matches an entrywise loop oracle") {
    RandomStream rng(10);
    const auto fd = testutil::randomPrecoders(rng, 5, 2, 4);
    const CMatrix r = correlationMatrix(fd);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        Complex sum{0, 0};
        for (const auto& f : fd.fOpt) {
          for (int s = 0; s < 2; ++s) {
            sum += f(i, s) * std::conj(f(j, s));
          }
        }
        CHECK(std::abs(r(i, j) - sum) <= 1e-12);
      }
    }
  }
  SUBCASE("is Hermitian positive semidefinite") {
    RandomStream rng(11);
    const CMatrix r = randomCorrelation(rng, 6, 2, 3);
    CHECK((r - r.adjoint()).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("minkowskiLambdaEstimate on closed-form matrices") {
  SUBCASE("identity block") {
    const CMatrix r = CMatrix::Identity(2, 2);
    CHECK(minkowskiLambdaEstimate(r, {0, 1}) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("all-ones block") {
    CMatrix r(2, 2);
    r << 1, 1, 1, 1;
    CHECK(minkowskiLambdaEstimate(r, {0, 1}) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("ranking tracks the exact eigenvalue across partitions") {
    const int nt = 6;
    double totalCorrelation = 0.0;
    const int instances = 100;
    for (int inst = 0; inst < instances; ++inst) {
      const CMatrix r = channelCorrelation(3, 2, 900 + static_cast<std::uint64_t>(inst));
      std::vector<double> estimated;
      std::vector<double> exact;
      const auto all = exhaustiveGrouping(r, nt, 2, GroupingObjective::kMinkowski);
      // Re-enumerate explicitly to collect both objectives per partition.
      // 2^(nt-1)-1 = 31 partitions for nt=6, ntRF=2.
      for (int code = 1; code < (1 << (nt - 1)); ++code) {
        Grouping g;
        g.subsets.assign(2, {});
        g.subsets[0].push_back(0);
        for (int i = 1; i < nt; ++i) {
          g.subsets[(code >> (i - 1)) & 1 ? 1 : 0].push_back(i);
        }
        estimated.push_back(minkowskiObjectiveSum(r, g));
        exact.push_back(exactLambdaSum(r, g));
      }
      CHECK(all.enumerated == 31);
      totalCorrelation += testutil::spearmanRankCorrelation(estimated, exact);
    }
    CHECK(totalCorrelation / instances >= 0.8);
  }
}

TEST_CASE("mutualCorrelation averages absolute cross entries") {
  CMatrix r = CMatrix::Identity(3, 3);
  r(0, 2) = Complex(0.2, 0.0);
  r(2, 0) = Complex(0.2, 0.0);
  r(1, 2) = Complex(0.0, 0.4);
  r(2, 1) = Complex(0.0, -0.4);

  SUBCASE("singletons reduce to a single modulus") {
    CHECK(mutualCorrelation(r, {0}, {2}) == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("worked two-term average") {
    CHECK(mutualCorrelation(r, {0, 1}, {2}) == doctest::Approx(0.3).epsilon(1e-14));
  }
  SUBCASE("symmetry") {
    CHECK(mutualCorrelation(r, {0, 1}, {2}) == mutualCorrelation(r, {2}, {0, 1}));
  }
  SUBCASE("all-ones matrix gives one for any disjoint pair") {
    CMatrix ones = CMatrix::Constant(4, 4, Complex(1.0, 0.0));
    CHECK(mutualCorrelation(ones, {0, 3}, {1, 2}) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("overlap is rejected") {
    CHECK_THROWS_AS(static_cast<void>(mutualCorrelation(r, {0, 1}, {1, 2})),
                    std::invalid_argument);
  }
}

TEST_CASE("sharedAhc clusters by mutual maxima") {
  SUBCASE("no merging needed") {
    const CMatrix r = CMatrix::Identity(3, 3);
    const Grouping g = sharedAhc(r, 3, 3);
    REQUIRE(g.subsets.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(g.subsets[i] == std::vector<int>{static_cast<int>(i)});
    }
  }
  SUBCASE("block-diagonal pairs merge in one pass") {
    const Grouping g = sharedAhc(blockPairMatrix(0.9, 0.8), 4, 2);
    REQUIRE(g.subsets.size() == 2);
    CHECK(g.subsets[0] == std::vector<int>{0, 1});
    CHECK(g.subsets[1] == std::vector<int>{2, 3});
  }
  SUBCASE("deterministic") {
    RandomStream rng(15);
    const CMatrix r = randomCorrelation(rng, 8, 2, 4);
    const Grouping a = sharedAhc(r, 8, 2);
    const Grouping b = sharedAhc(r, 8, 2);
    CHECK(a.subsets == b.subsets);
  }
  SUBCASE("beats random partitions almost always") {
    RandomStream rng(16);
    int wins = 0;
    const int instances = 20;
    for (int inst = 0; inst < instances; ++inst) {
      const CMatrix r = channelCorrelation(4, 2, 5000 + static_cast<std::uint64_t>(inst));
      const double ahc = exactLambdaSum(r, sharedAhc(r, 8, 2));
      double randomMean = 0.0;
      const int samples = 50;
      for (int s = 0; s < samples; ++s) {
        randomMean += exactLambdaSum(r, randomPartition(rng, 8, 2));
      }
      randomMean /= samples;
      if (ahc >= randomMean) {
        ++wins;
      }
    }
    CHECK(wins >= 18);
  }
  SUBCASE("output always satisfies the partition constraints") {
    RandomStream rng(17);
    for (int inst = 0; inst < 10; ++inst) {
      const int nt = 5 + static_cast<int>(rng.uniform01() * 6);
      const int ntRF = 1 + static_cast<int>(rng.uniform01() * (nt - 1));
      const CMatrix r = randomCorrelation(rng, nt, 2, 3);
      const Grouping g = sharedAhc(r, nt, ntRF);
      CHECK(g.subsets.size() == static_cast<std::size_t>(ntRF));
      CHECK_NOTHROW(g.validate(nt));
    }
  }
}

TEST_CASE("exhaustiveGrouping enumerates exactly the partition count") {
  SUBCASE("two antennas, two chains") {
    const CMatrix r = CMatrix::Identity(2, 2);
    const auto result = exhaustiveGrouping(r, 2, 2, GroupingObjective::kExactLambdaSum);
    CHECK(result.enumerated == 1);
    CHECK(result.grouping.subsets == std::vector<std::vector<int>>{{0}, {1}});
  }
  SUBCASE("eight antennas, two chains enumerate S(8,2) = 127") {
    RandomStream rng(19);
    const CMatrix r = randomCorrelation(rng, 8, 2, 2);
    const auto result = exhaustiveGrouping(r, 8, 2, GroupingObjective::kExactLambdaSum);
    CHECK(result.enumerated == 127);
  }
  SUBCASE("matches sharedAhc on the block-diagonal example") {
    const CMatrix r = blockPairMatrix(0.9, 0.8);
    const auto result = exhaustiveGrouping(r, 4, 2, GroupingObjective::kExactLambdaSum);
    CHECK(result.enumerated == 7);
    const Grouping viaAhc = sharedAhc(r, 4, 2);
    CHECK(result.grouping.subsets == viaAhc.subsets);
    CHECK(result.objective == doctest::Approx(1.9 + 1.8).epsilon(1e-12));
  }
  SUBCASE("enumeration count equals partitionCount for nt <= 10") {
    for (int nt = 1; nt <= 10; ++nt) {
      const CMatrix r = CMatrix::Identity(nt, nt);
      for (int k = 1; k <= nt; ++k) {
        const auto result = exhaustiveGrouping(r, nt, k, GroupingObjective::kMinkowski);
        CHECK(BigInt(result.enumerated) == partitionCount(nt, k));
      }
    }
  }
  SUBCASE("budget refusal") {
    const CMatrix r = CMatrix::Identity(30, 30);
    CHECK_THROWS_AS(
        static_cast<void>(exhaustiveGrouping(r, 30, 10, GroupingObjective::kMinkowski)),
        std::invalid_argument);
  }
}

TEST_CASE("partitionCount evaluates the inclusion-exclusion formula") {
  CHECK(partitionCount(2, 2) == 1);
  CHECK(partitionCount(3, 2) == 3);
  CHECK(partitionCount(8, 2) == 127);
  SUBCASE("the 64-antenna four-chain count matches to five significant digits") {
    const BigInt count = partitionCount(64, 4);
    const std::string digits = count.str();
    CHECK(digits.size() == 38); // 1.4178e37
    CHECK(digits.substr(0, 5) == "14178");
  }
  SUBCASE("agrees with the Stirling recurrence") {
    // S(n, k) = k S(n-1, k) + S(n-1, k-1), an independent route.
    constexpr int maxN = 12;
    BigInt table[maxN + 1][maxN + 1] = {};
    table[0][0] = 1;
    for (int n = 1; n <= maxN; ++n) {
      for (int k = 1; k <= n; ++k) {
        table[n][k] = BigInt(k) * table[n - 1][k] + table[n - 1][k - 1];
      }
    }
    for (int n = 1; n <= maxN; ++n) {
      for (int k = 1; k <= n; ++k) {
        CHECK(partitionCount(n, k) == table[n][k]);
      }
    }
  }
}

TEST_CASE("objective consistency between Gram and stacked routes") {
  RandomStream rng(23);
  const auto fd = testutil::randomPrecoders(rng, 8, 2, 5);
  const CMatrix r = correlationMatrix(fd);
  const Grouping g = randomPartition(rng, 8, 3);

  double stacked = 0.0;
  for (const auto& subset : g.subsets) {
    CMatrix block(subset.size(), static_cast<Eigen::Index>(fd.fOpt.size()) * 2);
    for (std::size_t k = 0; k < fd.fOpt.size(); ++k) {
      for (std::size_t i = 0; i < subset.size(); ++i) {
        block.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k) * 2, 1, 2) =
            fd.fOpt[k].row(subset[i]);
      }
    }
    Eigen::JacobiSVD<CMatrix> svd(block);
    stacked += svd.singularValues()(0) * svd.singularValues()(0);
  }
  const double viaGram = exactLambdaSum(r, g);
  CHECK(stacked == doctest::Approx(viaGram).epsilon(1e-9));
}

TEST_CASE("greedyGrouping seeds by diagonal and grows by estimate") {
  SUBCASE("degenerate singleton case") {
    const CMatrix r = CMatrix::Identity(3, 3);
    const Grouping g = greedyGrouping(r, 3, 3);
    REQUIRE(g.subsets.size() == 3);
  }
  SUBCASE("recovers distinct-diagonal blocks") {
    CMatrix r = blockPairMatrix(0.9, 0.8);
    r(0, 0) = 2.0;  // seeds must land in different blocks
    r(2, 2) = 1.5;
    const Grouping g = greedyGrouping(r, 4, 2);
    REQUIRE(g.subsets.size() == 2);
    CHECK(g.subsets[0] == std::vector<int>{0, 1});
    CHECK(g.subsets[1] == std::vector<int>{2, 3});
  }
  SUBCASE("sharedAhc wins the paired comparison on average") {
    double ahcTotal = 0.0;
    double greedyTotal = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
      const CMatrix r = channelCorrelation(4, 2, 5000 + static_cast<std::uint64_t>(inst));
      ahcTotal += exactLambdaSum(r, sharedAhc(r, 8, 2));
      greedyTotal += exactLambdaSum(r, greedyGrouping(r, 8, 2));
    }
    CHECK(ahcTotal >= greedyTotal);
  }
}

TEST_CASE("grouping JSON round-trips in canonical order") {
  Grouping g;
  g.subsets = {{3, 1}, {0, 2}};
  const std::string text = groupingToJson(g);
  CHECK(text == "[[0,2],[1,3]]");
  const Grouping parsed = groupingFromJson(text);
  CHECK(parsed.subsets == std::vector<std::vector<int>>{{0, 2}, {1, 3}});
  CHECK_THROWS_AS(groupingFromJson("{\"not\":\"a list\"}"), std::invalid_argument);
}

TEST_CASE("grouping validation catches contract violations") {
  Grouping g;
  g.subsets = {{0, 1}, {2}};
  CHECK_NOTHROW(g.validate(3));
  g.subsets = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(g.validate(3), std::invalid_argument);
  g.subsets = {{0, 1}, {}};
  CHECK_THROWS_AS(g.validate(2), std::invalid_argument);
  g.subsets = {{0}};
  CHECK_THROWS_AS(g.validate(2), std::invalid_argument);
}
