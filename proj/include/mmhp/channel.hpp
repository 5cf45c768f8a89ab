// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/types.hpp"

#include <cstdint>
#include <string>

namespace mmhp {

/// UPA steering vector in the array's angle convention: the entry for
/// element (m, n), 0 <= m < nH, 0 <= n < nV, flattened with n fastest, is
///   exp(-j*2*pi*(m*dh*sin(el)*cos(az) + n*dv*sin(az))) / sqrt(nV*nH).
/// Every entry has modulus 1/sqrt(nV*nH) and the vector has unit norm.
CVector steeringVector(double azimuth, double elevation, int nV, int nH,
                       double dvOverLambda, double dhOverLambda);

/// Draws numClusters*raysPerCluster rays. Cluster centers are uniform on
/// [-pi/2, pi/2] for each of the four angles; ray offsets are Laplacian
/// with standard deviation angleSpreadRad; gains are CN(0, 1). Cluster
/// delays are uniform on [0, D*Ts], redrawn in the rare case the nearest
/// tap would fall outside the D-tap grid. Deterministic given the seed.
std::vector<RayParameters> sampleRays(const SystemConfig& config, std::uint64_t seed);

/// Delay-domain channel: tap d accumulates
/// sqrt(Nt*Nr/(Ncl*Nray)) * gain * a_r * a_t^H for every ray whose delay
/// rounds to d. Throws std::invalid_argument when a delay rounds outside
/// the grid.
std::vector<CMatrix> buildDelayTaps(const std::vector<RayParameters>& rays,
                                    const SystemConfig& config);

/// Tap DFT: H[k] = sum_d taps[d] * exp(-j*2*pi*k*d/K), k = 0..K-1.
std::vector<CMatrix> tapsToFrequency(const std::vector<CMatrix>& taps, int numSubcarriers);

/// sampleRays + buildDelayTaps + tapsToFrequency.
ChannelRealization generateChannel(const SystemConfig& config, std::uint64_t seed);

/// Binary fixture format: magic, dimensions header, then row-major
/// (re, im) doubles for taps, frequency matrices and ray parameters.
/// See README for the exact layout.
void saveChannel(const ChannelRealization& channel, const std::string& path);
ChannelRealization loadChannel(const std::string& path);

} // namespace mmhp
