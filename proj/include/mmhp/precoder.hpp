// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/types.hpp"

namespace mmhp {

/// Per-subcarrier SVD of H[k]: fOpt[k] holds the top-ns right singular
/// vectors, sigma[k] the matching singular values in descending order.
FullyDigitalPrecoders optimalFullyDigital(const ChannelRealization& channel, int ns);

/// Principal component of the subarray's stacked optimal precoders: the
/// unit eigenvector of F_S * F_S^H where F_S stacks the subset's rows of
/// every fOpt[k] side by side. Phase is fixed (largest-modulus entry
/// real-positive) for reproducibility.
CVector pcaSubarrayVector(const FullyDigitalPrecoders& fOpt, const std::vector<int>& subset);

/// Entrywise projection onto the constant-modulus set: entry i becomes
/// exp(j*arg(u_i)) / sqrt(nSub); zero entries map to phase 0.
CVector projectConstantModulus(const CVector& u, int nSub);

/// Snaps every nonzero entry's phase to the nearest member of
/// {0, 2pi/2^Q, ..., 2pi(2^Q-1)/2^Q}, ties to the smaller phase.
/// bits == nullopt (infinite resolution) returns the input unchanged.
CMatrix quantizePhases(const CMatrix& fRF, std::optional<int> bits);
CVector quantizePhases(const CVector& v, std::optional<int> bits);

enum class FsPatternKind { kVertical, kHorizontal, kSquared, kInterlaced };

/// Fixed-subarray groupings on a nV x nH UPA with vertical-fastest
/// flattening. Vertical/horizontal are contiguous stripes (whole columns
/// or rows whenever the sizes divide evenly); squared tiles the array
/// into ntRF rectangles; interlaced assigns element (v, h) to chain
/// (v mod a)*b + (h mod b) with a*b = ntRF. Throws std::invalid_argument
/// when the dimensions do not admit the pattern.
Grouping fsPattern(FsPatternKind kind, int ntV, int ntH, int ntRF);

/// PCA analog precoder. With a grouping, each subarray column is the
/// quantized constant-modulus projection of pcaSubarrayVector scattered
/// into the block mask. Without one (fully-connected), the columns are
/// projections of the top-ntRF principal components of the full stacked
/// precoder matrix and the mask is all-true.
AnalogPrecoder pcaAnalogPrecoder(const FullyDigitalPrecoders& fOpt,
                                 const std::optional<Grouping>& grouping, int ntRF,
                                 std::optional<int> quantBits);

struct WaterFilling {
  double mu = 0.0;
  std::vector<RVector> allocations; ///< K vectors of per-mode powers
};

/// Solves sum_k sum_i (mu - ns/sigma_i^2[k])^+ = K*ns for mu by bisection
/// (residual below 1e-9 * K * ns) and returns the per-mode allocations.
/// Modes with zero singular value get zero power; throws
/// std::invalid_argument when no mode is usable.
WaterFilling waterFilling(const std::vector<RVector>& sigmaTilde, int ns);

struct BasebandOptions {
  /// Skip water-filling and use an identity power loading; the power
  /// constraint still holds because the effective precoder columns stay
  /// orthonormal.
  bool unitaryPower = false;
};

/// Per-subcarrier digital precoder for a fixed analog stage:
/// F_BB[k] = (F_RF^H F_RF)^{-1/2} * Vtilde[k]_{:,1:ns} * Lambda[k] where
/// Vtilde/sigma-tilde come from the SVD of H[k] * F_RF (F_RF^H F_RF)^{-1/2}
/// and Lambda carries the water-filling amplitudes. Throws when F_RF is
/// rank deficient.
std::vector<CMatrix> basebandPrecoder(const ChannelRealization& channel, const CMatrix& fRF,
                                      int ns, const BasebandOptions& options = {});

/// Effective singular values sigma-tilde[k] of H[k] * F_RF (F_RF^H F_RF)^{-1/2}
/// (top ns), as used by the water-filling stage.
std::vector<RVector> effectiveSingularValues(const ChannelRealization& channel,
                                             const CMatrix& fRF, int ns);

/// Mask consistency, constant modulus per subarray column and the
/// sum-power constraint; throws std::runtime_error on violation.
void validateHybridPrecoder(const HybridPrecoder& precoder, double tol = 1e-6);

} // namespace mmhp
