// SPDX-License-Identifier: Apache-2.0
#include "mmhp/baselines.hpp"

#include "mmhp/channel.hpp"
#include "mmhp/precoder.hpp"
#include "mmhp/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <set>

using namespace mmhp;

namespace {

// Least-squares projection energy of every fOpt[k] onto the given atoms.
double projectionEnergy(const FullyDigitalPrecoders& fOpt, const CMatrix& atoms) {
  const auto solver = (atoms.adjoint() * atoms).ldlt();
  double energy = 0.0;
  for (const auto& f : fOpt.fOpt) {
    const CMatrix coef = solver.solve(atoms.adjoint() * f);
    energy += (atoms * coef).squaredNorm();
  }
  return energy;
}

double totalEnergy(const FullyDigitalPrecoders& fOpt) {
  double energy = 0.0;
  for (const auto& f : fOpt.fOpt) {
    energy += f.squaredNorm();
  }
  return energy;
}

int findAtom(const CMatrix& atoms, const CVector& column) {
  for (Eigen::Index g = 0; g < atoms.cols(); ++g) {
    if ((atoms.col(g) - column).norm() < 1e-12) {
      return static_cast<int>(g);
    }
  }
  return -1;
}

} // namespace

TEST_CASE("steering dictionary columns are unit-norm constant-modulus atoms") {
  const SteeringDictionary dict = makeSteeringDictionary(4, 2, 0.5, 0.5);
  CHECK(dict.atoms.cols() == 4 * 8); // 4x oversampled
  CHECK(dict.angles.size() == 32);
  for (Eigen::Index g = 0; g < dict.atoms.cols(); ++g) {
    CHECK(dict.atoms.col(g).norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i) {
      CHECK(std::abs(dict.atoms(i, g)) ==
            doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sompPrecoder greedily matches the stacked precoders") {
  const SteeringDictionary dict = makeSteeringDictionary(2, 2, 0.5, 0.5);

  SUBCASE("a precoder equal to one atom is found and fully explained") {
    const int target = 7;
    FullyDigitalPrecoders fd;
    for (int k = 0; k < 3; ++k) {
      fd.fOpt.push_back(dict.atoms.col(target));
    }
    const CMatrix analog = sompPrecoder(fd, dict, 1);
    CHECK(findAtom(dict.atoms, analog.col(0)) == target);
    const double residual = totalEnergy(fd) - projectionEnergy(fd, analog);
    CHECK(std::abs(residual) < 1e-10);
  }

  SUBCASE("orthogonal dictionary separates atom scores") {
    // The DFT codebook is an orthonormal dictionary in atom form.
    SteeringDictionary orth;
    orth.atoms = dftCodebook(2, 2);
    FullyDigitalPrecoders fd;
    CVector mix = 0.9 * orth.atoms.col(3) + 0.5 * orth.atoms.col(1);
    mix /= mix.norm();
    fd.fOpt.push_back(mix);
    const CMatrix analog = sompPrecoder(fd, orth, 2);
    CHECK(findAtom(orth.atoms, analog.col(0)) == 3); // larger coefficient first
    CHECK(findAtom(orth.atoms, analog.col(1)) == 1);
  }

  SUBCASE("selecting every atom saturates the span") {
    SteeringDictionary small = makeSteeringDictionary(2, 1, 0.5, 0.5, 2, 1);
    REQUIRE(small.atoms.cols() == 2);
    RandomStream rng(3);
    FullyDigitalPrecoders fd;
    fd.fOpt.push_back(testutil::randomComplexMatrix(rng, 2, 1));
    const CMatrix analog = sompPrecoder(fd, small, 2);
    std::set<int> chosen{findAtom(small.atoms, analog.col(0)),
                         findAtom(small.atoms, analog.col(1))};
    CHECK(chosen == std::set<int>{0, 1});
    CHECK(projectionEnergy(fd, analog) ==
          doctest::Approx(projectionEnergy(fd, small.atoms)).epsilon(1e-10));
  }

  SUBCASE("projection energy is monotone in the iteration count") {
    RandomStream rng(5);
    FullyDigitalPrecoders fd;
    for (int k = 0; k < 4; ++k) {
      fd.fOpt.push_back(testutil::randomOrthonormal(rng, 4, 2));
    }
    const CMatrix analog = sompPrecoder(fd, dict, 3);
    double previous = 0.0;
    for (int t = 1; t <= 3; ++t) {
      const double energy = projectionEnergy(fd, analog.leftCols(t));
      CHECK(energy >= previous - 1e-12);
      previous = energy;
    }
  }
}

TEST_CASE("dftCodebook spans an orthonormal constant-modulus basis") {
  SUBCASE("Gram matrix is the identity") {
    const CMatrix book = dftCodebook(4, 2);
    CHECK((book.adjoint() * book - CMatrix::Identity(8, 8)).norm() <= 1e-12);
  }
  SUBCASE("single antenna is trivial") {
    const CMatrix book = dftCodebook(1, 1);
    REQUIRE(book.rows() == 1);
    CHECK(std::abs(book(0, 0) - Complex(1.0, 0.0)) < 1e-15);
  }
  SUBCASE("a channel aligned with one beam selects it first") {
    const CMatrix book = dftCodebook(2, 2);
    const int beam = 5 % book.cols();
    RandomStream rng(7);
    FullyDigitalPrecoders fd;
    for (int k = 0; k < 2; ++k) {
      fd.fOpt.push_back(book.col(beam));
    }
    const CMatrix analog = dftCodebookPrecoder(fd, 2, 2, 2);
    CHECK((analog.col(0) - book.col(beam)).norm() < 1e-12);
  }
}

TEST_CASE("covarianceEvdPrecoder follows the mean covariance") {
  SUBCASE("rank-one single-subcarrier channel gives the phase-only row direction") {
    RandomStream rng(9);
    const CVector u = testutil::randomUnitVector(rng, 2);
    const CVector v = testutil::randomUnitVector(rng, 4);
    ChannelRealization channel;
    channel.freq.push_back(3.0 * u * v.adjoint());
    const AnalogPrecoder analog = covarianceEvdPrecoder(channel, std::nullopt, 1);
    // Entries carry v's phases up to one global rotation.
    Complex common{0, 0};
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(analog.fRF(i, 0)) == doctest::Approx(0.5).epsilon(1e-12));
      common += analog.fRF(i, 0) * std::conj(v[i] / std::abs(v[i]));
    }
    CHECK(std::abs(common) / 4.0 * 2.0 == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("identity covariance is handled deterministically") {
    ChannelRealization channel;
    channel.freq.push_back(CMatrix::Identity(3, 3));
    const AnalogPrecoder a = covarianceEvdPrecoder(channel, std::nullopt, 2);
    const AnalogPrecoder b = covarianceEvdPrecoder(channel, std::nullopt, 2);
    CHECK((a.fRF - b.fRF).norm() == 0.0);
  }

  SUBCASE("per-subarray vectors match a power-iteration oracle") {
    SystemConfig cfg;
    cfg.ntV = 4;
    cfg.ntH = 2;
    cfg.nrV = 2;
    cfg.nrH = 2;
    cfg.ntRF = 2;
    cfg.ns = 2;
    cfg.numSubcarriers = 8;
    cfg.delayTaps = 4;
    cfg.numClusters = 3;
    cfg.raysPerCluster = 4;
    const auto channel = generateChannel(cfg, 11);
    const Grouping g = fsPattern(FsPatternKind::kVertical, 4, 2, 2);
    const AnalogPrecoder analog = covarianceEvdPrecoder(channel, g, 2);

    // Independent covariance accumulation and power iteration.
    CMatrix covariance = CMatrix::Zero(8, 8);
    for (const auto& h : channel.freq) {
      covariance += h.adjoint() * h;
    }
    covariance /= static_cast<double>(channel.freq.size());

    for (int r = 0; r < 2; ++r) {
      const auto& subset = g.subsets[static_cast<std::size_t>(r)];
      CMatrix sub(subset.size(), subset.size());
      for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = 0; b < subset.size(); ++b) {
          sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              covariance(subset[a], subset[b]);
        }
      }
      const CVector oracle = testutil::powerIteration(sub);
      // The implementation output is the constant-modulus projection, so
      // compare phase patterns up to one global rotation.
      Complex common{0, 0};
      for (std::size_t i = 0; i < subset.size(); ++i) {
        const Complex impl = analog.fRF(subset[i], r) * std::sqrt(double(subset.size()));
        common += impl * std::conj(oracle[static_cast<Eigen::Index>(i)] /
                                   std::abs(oracle[static_cast<Eigen::Index>(i)]));
      }
      CHECK(std::abs(common) / static_cast<double>(subset.size()) >=
            1.0 - 1e-6);
    }
  }
}

TEST_CASE("baseline analog stages satisfy the hybrid precoder invariants") {
  SystemConfig cfg;
  cfg.ntV = 4;
  cfg.ntH = 2;
  cfg.nrV = 2;
  cfg.nrH = 2;
  cfg.ntRF = 2;
  cfg.ns = 2;
  cfg.numSubcarriers = 8;
  cfg.delayTaps = 4;
  cfg.numClusters = 3;
  cfg.raysPerCluster = 4;
  const auto channel = generateChannel(cfg, 13);
  const auto fd = optimalFullyDigital(channel, cfg.ns);
  const Grouping g = fsPattern(FsPatternKind::kVertical, 4, 2, 2);

  const SteeringDictionary dict = makeSteeringDictionary(4, 2, 0.5, 0.5);
  std::vector<std::pair<CMatrix, BoolMask>> candidates;
  candidates.emplace_back(sompPrecoder(fd, dict, 2), BoolMask::Constant(8, 2, true));
  candidates.emplace_back(dftCodebookPrecoder(fd, 4, 2, 2), BoolMask::Constant(8, 2, true));
  const AnalogPrecoder evdFca = covarianceEvdPrecoder(channel, std::nullopt, 2);
  candidates.emplace_back(evdFca.fRF, evdFca.mask);
  const AnalogPrecoder evdFs = covarianceEvdPrecoder(channel, g, 2);
  candidates.emplace_back(evdFs.fRF, evdFs.mask);

  for (const auto& [fRF, mask] : candidates) {
    HybridPrecoder hybrid{fRF, mask, basebandPrecoder(channel, fRF, cfg.ns)};
    CHECK_NOTHROW(validateHybridPrecoder(hybrid));
  }
}
