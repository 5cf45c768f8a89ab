// SPDX-License-Identifier: Apache-2.0
#include "mmhp/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace mmhp {

void fixGlobalPhase(CVector& v) {
  Eigen::Index best = 0;
  double bestMag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > bestMag) {
      bestMag = mag;
      best = i;
    }
  }
  if (bestMag <= 0.0) {
    return;
  }
  const Complex rot = std::conj(v[best]) / bestMag;
  v *= rot;
  v[best] = Complex(std::abs(v[best]), 0.0); // exact up to roundoff anyway
}

CVector dominantEigenvector(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  CVector v = es.eigenvectors().col(hermitian.cols() - 1); // eigenvalues ascending
  fixGlobalPhase(v);
  return v;
}

CMatrix topEigenvectors(const CMatrix& hermitian, int n) {
  if (n < 1 || n > hermitian.cols()) {
    throw std::invalid_argument("topEigenvectors: invalid count");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  CMatrix out(hermitian.rows(), n);
  for (int j = 0; j < n; ++j) {
    CVector v = es.eigenvectors().col(hermitian.cols() - 1 - j);
    fixGlobalPhase(v);
    out.col(j) = v;
  }
  return out;
}

double largestEigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  return es.eigenvalues()(hermitian.cols() - 1);
}

CMatrix inverseSqrtPsd(const CMatrix& gram, double tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const auto& evals = es.eigenvalues();
  const double largest = evals(evals.size() - 1);
  if (largest <= 0.0 || evals(0) < tol * largest) {
    throw std::invalid_argument("inverseSqrtPsd: matrix is numerically rank deficient");
  }
  return es.eigenvectors() * evals.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().adjoint();
}

CMatrix selectRows(const CMatrix& m, const std::vector<int>& rows) {
  CMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

} // namespace mmhp
