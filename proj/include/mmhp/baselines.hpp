// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/types.hpp"

namespace mmhp {

/// Transmit steering vectors on a uniform azimuth x elevation grid.
struct SteeringDictionary {
  CMatrix atoms;                                ///< Nt x G, unit-norm columns
  std::vector<std::pair<double, double>> angles; ///< (azimuth, elevation) per atom
};

/// Uniform grid over [-pi/2, pi/2]^2 at the midpoints of gridAz x gridEl
/// cells. Defaults (0, 0) expand to 2*nV azimuth and 2*nH elevation points,
/// i.e. a 4x oversampled dictionary.
SteeringDictionary makeSteeringDictionary(int ntV, int ntH, double dvOverLambda,
                                          double dhOverLambda, int gridAz = 0, int gridEl = 0);

/// Simultaneous OMP over all subcarriers: greedily selects the atom with
/// the largest total residual correlation, then refreshes the residuals by
/// least-squares projection of every fOpt[k] onto the selected atoms.
/// Returns the selected atoms as analog columns (fully connected). Ties
/// break to the lowest atom index.
CMatrix sompPrecoder(const FullyDigitalPrecoders& fOpt, const SteeringDictionary& dict,
                     int ntRF);

/// All Nt Kronecker products of the nH-point and nV-point DFT vectors,
/// flattened vertical-fastest; columns are orthonormal with 1/sqrt(Nt)
/// modulus entries.
CMatrix dftCodebook(int ntV, int ntH);

/// Selects the ntRF codebook columns maximizing sum_k ||c^H fOpt[k]||^2
/// without replacement; ties break to the lowest index.
CMatrix dftCodebookPrecoder(const FullyDigitalPrecoders& fOpt, int ntV, int ntH, int ntRF);

/// Mean transmit-side covariance (1/K) * sum_k H[k]^H H[k].
CMatrix averageCovariance(const ChannelRealization& channel);

/// Covariance-EVD analog precoder. Fully connected (no grouping): the
/// constant-modulus projections of the top-ntRF eigenvectors of the mean
/// covariance. With a grouping: per subset, the projection of the dominant
/// eigenvector of the principal submatrix, scattered into the block mask.
AnalogPrecoder covarianceEvdPrecoder(const ChannelRealization& channel,
                                     const std::optional<Grouping>& grouping, int ntRF);

/// Same construction from an already-computed covariance matrix.
AnalogPrecoder covarianceEvdFromMatrix(const CMatrix& covariance,
                                       const std::optional<Grouping>& grouping, int ntRF);

} // namespace mmhp
