// SPDX-License-Identifier: Apache-2.0
#include "mmhp/metrics.hpp"

#include "mmhp/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace mmhp;

namespace {

ChannelRealization scalarChannel(Complex h) {
  ChannelRealization channel;
  CMatrix m(1, 1);
  m(0, 0) = h;
  channel.freq.push_back(m);
  return channel;
}

PowerModel model(AntennaArchitecture arch, ArrayType array) {
  PowerModel m;
  m.architecture = arch;
  m.array = array;
  return m;
}

} // namespace

TEST_CASE("spectralEfficiency computes the log-det rate") {
  SUBCASE("scalar unit link at unit noise") {
    const auto channel = scalarChannel(Complex(1.0, 0.0));
    CMatrix fRF = CMatrix::Identity(1, 1);
    std::vector<CMatrix> fBB{CMatrix::Identity(1, 1)};
    CHECK(spectralEfficiency(channel, fRF, fBB, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero precoder sends nothing") {
    const auto channel = scalarChannel(Complex(0.3, -0.7));
    CMatrix fRF = CMatrix::Identity(1, 1);
    std::vector<CMatrix> fBB{CMatrix::Zero(1, 1)};
    CHECK(spectralEfficiency(channel, fRF, fBB, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("matches an eigenvalue-identity oracle") {
    RandomStream rng(3);
    ChannelRealization channel;
    channel.freq.push_back(testutil::randomComplexMatrix(rng, 2, 4));
    const CMatrix fRF = testutil::randomComplexMatrix(rng, 4, 3);
    std::vector<CMatrix> fBB{testutil::randomComplexMatrix(rng, 3, 2) * 0.6};
    const double noise = 0.8;

    const CMatrix g = channel.freq[0] * fRF * fBB[0];
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g * g.adjoint(), Eigen::EigenvaluesOnly);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      expected += std::log2(1.0 + std::max(0.0, es.eigenvalues()(i)) / noise);
    }
    CHECK(spectralEfficiency(channel, fRF, fBB, noise) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("nonincreasing in the noise variance") {
    RandomStream rng(5);
    ChannelRealization channel;
    channel.freq.push_back(testutil::randomComplexMatrix(rng, 2, 3));
    const CMatrix fRF = CMatrix::Identity(3, 3);
    std::vector<CMatrix> fBB{testutil::randomComplexMatrix(rng, 3, 2)};
    double previous = std::numeric_limits<double>::infinity();
    for (double noise : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      const double se = spectralEfficiency(channel, fRF, fBB, noise);
      CHECK(se <= previous + 1e-12);
      previous = se;
    }
  }
}

TEST_CASE("powerConsumption reproduces the component-count formulas") {
  const int nt = 64;
  const int ntRF = 4;
  CHECK(powerConsumption(model(AntennaArchitecture::kPassive, ArrayType::kPartiallyConnected),
                         nt, ntRF) == doctest::Approx(3448.0));
  CHECK(powerConsumption(model(AntennaArchitecture::kPassive, ArrayType::kFullyConnected), nt,
                         ntRF) == doctest::Approx(9208.0));
  CHECK(powerConsumption(model(AntennaArchitecture::kPassive, ArrayType::kFullyDigital), nt,
                         ntRF) == doctest::Approx(24448.0));
  CHECK(powerConsumption(model(AntennaArchitecture::kActive, ArrayType::kPartiallyConnected),
                         nt, ntRF) == doctest::Approx(11728.0));
  CHECK(powerConsumption(model(AntennaArchitecture::kActive, ArrayType::kFullyConnected), nt,
                         ntRF) == doctest::Approx(17488.0));

  SUBCASE("orderings implied by the formulas") {
    const double fd =
        powerConsumption(model(AntennaArchitecture::kPassive, ArrayType::kFullyDigital), nt, ntRF);
    const double fcaPassive =
        powerConsumption(model(AntennaArchitecture::kPassive, ArrayType::kFullyConnected), nt, ntRF);
    const double pcsPassive = powerConsumption(
        model(AntennaArchitecture::kPassive, ArrayType::kPartiallyConnected), nt, ntRF);
    const double fcaActive =
        powerConsumption(model(AntennaArchitecture::kActive, ArrayType::kFullyConnected), nt, ntRF);
    const double pcsActive = powerConsumption(
        model(AntennaArchitecture::kActive, ArrayType::kPartiallyConnected), nt, ntRF);
    CHECK(fd > fcaPassive);
    CHECK(fcaPassive > pcsPassive);
    CHECK(fcaActive > pcsActive);
  }

  SUBCASE("active and passive PCS differ by the extra amplifiers") {
    const double passive = powerConsumption(
        model(AntennaArchitecture::kPassive, ArrayType::kPartiallyConnected), nt, ntRF);
    const double active = powerConsumption(
        model(AntennaArchitecture::kActive, ArrayType::kPartiallyConnected), nt, ntRF);
    PowerModel defaults;
    CHECK(active - passive == doctest::Approx((nt - ntRF) * defaults.paMw));
  }
}

TEST_CASE("energyEfficiency is rate times bandwidth over watts") {
  SUBCASE("worked example") {
    const double ee = energyEfficiency(10.0, 5e8, 3448.0);
    CHECK(ee == doctest::Approx(10.0 * 5e8 / 3.448).epsilon(1e-12));
    CHECK(ee == doctest::Approx(1.450e9).epsilon(1e-3));
  }
  SUBCASE("zero rate gives zero") {
    CHECK(energyEfficiency(0.0, 5e8, 1000.0) == 0.0);
  }
  SUBCASE("doubling the power halves the efficiency") {
    const double base = energyEfficiency(3.7, 1e8, 700.0);
    CHECK(energyEfficiency(3.7, 1e8, 1400.0) == doctest::Approx(base / 2.0).epsilon(1e-12));
  }
  SUBCASE("nonpositive power is rejected") {
    CHECK_THROWS_AS(static_cast<void>(energyEfficiency(1.0, 1e8, 0.0)), std::invalid_argument);
  }
}
