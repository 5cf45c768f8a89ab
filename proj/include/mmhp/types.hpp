// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mmhp {

inline constexpr double kPi = 3.14159265358979323846;

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Dimensional and physical parameters of one simulated downlink.
///
/// Antenna counts are given per UPA axis (vertical x horizontal); the flat
/// antenna index runs vertical-fastest, i.e. antenna (v, h) maps to
/// h * ntV + v. Both arrays use the same convention.
struct SystemConfig {
  int ntV = 8;  ///< vertical transmit antennas
  int ntH = 8;  ///< horizontal transmit antennas
  int nrV = 2;  ///< vertical receive antennas
  int nrH = 2;  ///< horizontal receive antennas
  int ntRF = 4; ///< transmit RF chains
  int ns = 3;   ///< data streams per subcarrier

  int numSubcarriers = 512; ///< K
  int delayTaps = 64;       ///< D, maximum delay spread in taps
  double bandwidthHz = 500e6;

  int numClusters = 8;
  int raysPerCluster = 10;
  double angleSpreadRad = 7.5 * kPi / 180.0;
  double dvOverLambda = 0.5;
  double dhOverLambda = 0.5;

  double noiseVariance = 1.0;

  /// Phase shifter resolution; nullopt means unquantized (infinite bits).
  std::optional<int> quantBits;

  /// Cluster delays are shared by all rays of the cluster by default;
  /// set false to draw an independent delay per ray.
  bool delayPerCluster = true;

  int nt() const { return ntV * ntH; }
  int nr() const { return nrV * nrH; }
  double symbolPeriod() const { return 1.0 / bandwidthHz; }

  /// Throws std::invalid_argument when any dimensional invariant fails.
  void validate() const;
};

/// One propagation ray of the clustered channel model.
struct RayParameters {
  int clusterIndex = 0;
  int rayIndex = 0;
  Complex gain{0.0, 0.0};
  double delaySeconds = 0.0;
  double aodAzimuth = 0.0;
  double aodElevation = 0.0;
  double aoaAzimuth = 0.0;
  double aoaElevation = 0.0;
};

/// Delay-domain and frequency-domain channel matrices for one random draw.
struct ChannelRealization {
  std::vector<CMatrix> taps; ///< D matrices, each Nr x Nt
  std::vector<CMatrix> freq; ///< K matrices, each Nr x Nt
  std::vector<RayParameters> rays;

  int nr() const { return freq.empty() ? 0 : static_cast<int>(freq.front().rows()); }
  int nt() const { return freq.empty() ? 0 : static_cast<int>(freq.front().cols()); }
};

/// A partition of the transmit antennas into per-RF-chain subsets.
struct Grouping {
  std::vector<std::vector<int>> subsets; ///< 0-based antenna indices

  /// Sorts indices within subsets and orders subsets by smallest member.
  void canonicalize();
  /// Throws std::invalid_argument unless subsets are nonempty, disjoint
  /// and cover {0..nt-1}.
  void validate(int nt) const;
};

/// Per-subcarrier optimal fully-digital precoders and their singular values.
struct FullyDigitalPrecoders {
  std::vector<CMatrix> fOpt;  ///< K matrices, each Nt x Ns
  std::vector<RVector> sigma; ///< K vectors of the top Ns singular values, descending

  int numSubcarriers() const { return static_cast<int>(fOpt.size()); }
  int nt() const { return fOpt.empty() ? 0 : static_cast<int>(fOpt.front().rows()); }
  int ns() const { return fOpt.empty() ? 0 : static_cast<int>(fOpt.front().cols()); }
};

/// Frequency-flat analog precoder with its connectivity mask.
struct AnalogPrecoder {
  CMatrix fRF;   ///< Nt x NtRF, zero exactly where mask is false
  BoolMask mask; ///< Nt x NtRF connectivity
};

/// Full transmit hybrid precoder: analog stage plus per-subcarrier digital stages.
struct HybridPrecoder {
  CMatrix fRF;
  BoolMask mask;
  std::vector<CMatrix> fBB; ///< K matrices, each NtRF x Ns
};

} // namespace mmhp
