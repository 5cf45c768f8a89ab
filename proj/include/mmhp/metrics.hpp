// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/types.hpp"

namespace mmhp {

enum class AntennaArchitecture { kPassive, kActive };
enum class ArrayType { kFullyConnected, kPartiallyConnected, kFullyDigital };

/// Per-component power draws in milliwatts plus the architecture selector.
struct PowerModel {
  double psMw = 30.0;   ///< phase shifter
  double dacMw = 200.0; ///< digital-analog converter
  double mixerMw = 39.0;
  double loMw = 5.0;  ///< local oscillator
  double paMw = 138.0; ///< power amplifier
  AntennaArchitecture architecture = AntennaArchitecture::kPassive;
  ArrayType array = ArrayType::kPartiallyConnected;
};

/// Average spectral efficiency over subcarriers in bits/s/Hz:
/// (1/K) * sum_k log2 det(I + (1/sigma_n^2) H[k] F[k] F[k]^H H[k]^H)
/// with F[k] = fRF * fBB[k].
double spectralEfficiency(const ChannelRealization& channel, const CMatrix& fRF,
                          const std::vector<CMatrix>& fBB, double noiseVariance);

/// Fully-digital evaluation (analog stage implicitly the identity).
double spectralEfficiencyDigital(const ChannelRealization& channel,
                                 const std::vector<CMatrix>& precoders, double noiseVariance);

/// Total transceiver power in milliwatts for the selected architecture.
/// Fully digital ignores the passive/active flag (one PA chain per antenna).
double powerConsumption(const PowerModel& model, int nt, int ntRF);

/// eta = SE * B / (P / 1000), bits per joule; power must be positive.
double energyEfficiency(double seBitsPerSecHz, double bandwidthHz, double powerMilliwatts);

} // namespace mmhp
