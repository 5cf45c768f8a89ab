// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/types.hpp"

namespace mmhp {

/// Unit eigenvector of the largest eigenvalue of a Hermitian PSD matrix.
/// The global phase is fixed by making the largest-modulus entry
/// real-positive (ties to the lowest index) so results are reproducible.
CVector dominantEigenvector(const CMatrix& hermitian);

/// Top-n eigenvectors of a Hermitian PSD matrix, descending eigenvalue
/// order, phase-fixed as in dominantEigenvector().
CMatrix topEigenvectors(const CMatrix& hermitian, int n);

/// Largest eigenvalue of a Hermitian matrix.
double largestEigenvalue(const CMatrix& hermitian);

/// Inverse square root of a Hermitian positive-definite matrix.
/// Throws std::invalid_argument when the matrix is numerically singular
/// (smallest eigenvalue below tol times the largest).
CMatrix inverseSqrtPsd(const CMatrix& gram, double tol = 1e-12);

/// Applies the reproducible phase-fix convention in place.
void fixGlobalPhase(CVector& v);

/// Rows of `m` restricted to `rows`, in the given order.
CMatrix selectRows(const CMatrix& m, const std::vector<int>& rows);

} // namespace mmhp
