// SPDX-License-Identifier: Apache-2.0
#include "mmhp/precoder.hpp"

#include "mmhp/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace mmhp {

FullyDigitalPrecoders optimalFullyDigital(const ChannelRealization& channel, int ns) {
  if (channel.freq.empty()) {
    throw std::invalid_argument("optimalFullyDigital: channel has no subcarriers");
  }
  const Eigen::Index nr = channel.freq.front().rows();
  const Eigen::Index nt = channel.freq.front().cols();
  if (ns < 1 || ns > std::min(nr, nt)) {
    throw std::invalid_argument("optimalFullyDigital: ns exceeds min(Nr, Nt)");
  }

  FullyDigitalPrecoders out;
  out.fOpt.reserve(channel.freq.size());
  out.sigma.reserve(channel.freq.size());
  for (const CMatrix& h : channel.freq) {
    Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinV);
    out.fOpt.push_back(svd.matrixV().leftCols(ns));
    out.sigma.push_back(svd.singularValues().head(ns));
  }
  return out;
}

CVector pcaSubarrayVector(const FullyDigitalPrecoders& fOpt, const std::vector<int>& subset) {
  if (subset.empty()) {
    throw std::invalid_argument("pcaSubarrayVector: empty subset");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(subset.size());
  CMatrix corr = CMatrix::Zero(n, n);
  for (const CMatrix& f : fOpt.fOpt) {
    const CMatrix rows = selectRows(f, subset);
    corr.noalias() += rows * rows.adjoint();
  }
  return dominantEigenvector(corr);
}

CVector projectConstantModulus(const CVector& u, int nSub) {
  if (u.size() != nSub) {
    throw std::invalid_argument("projectConstantModulus: length mismatch");
  }
  const double mag = 1.0 / std::sqrt(static_cast<double>(nSub));
  CVector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double phase = (u[i] == Complex(0.0, 0.0)) ? 0.0 : std::arg(u[i]);
    out[i] = std::polar(mag, phase);
  }
  return out;
}

namespace {

double quantizePhase(double phase, int bits) {
  const double levels = std::ldexp(1.0, bits); // 2^Q
  const double step = 2.0 * kPi / levels;
  double wrapped = phase < 0.0 ? phase + 2.0 * kPi : phase;
  if (wrapped >= 2.0 * kPi) {
    wrapped -= 2.0 * kPi;
  }
  double low = std::floor(wrapped / step);
  if (low >= levels) {
    low = levels - 1.0;
  }
  const double dLow = wrapped - low * step;
  const double dHigh = step - dLow;
  const double phaseLow = low * step;
  const double phaseHigh = (low + 1.0 >= levels) ? 0.0 : (low + 1.0) * step;
  if (std::abs(dLow - dHigh) <= 1e-12 * step) {
    return std::min(phaseLow, phaseHigh); // tie: smaller phase
  }
  return dLow < dHigh ? phaseLow : phaseHigh;
}

} // namespace

CVector quantizePhases(const CVector& v, std::optional<int> bits) {
  if (!bits) {
    return v;
  }
  if (*bits < 1) {
    throw std::invalid_argument("quantizePhases: bits must be positive");
  }
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == Complex(0.0, 0.0)) {
      out[i] = v[i];
    } else {
      out[i] = std::polar(std::abs(v[i]), quantizePhase(std::arg(v[i]), *bits));
    }
  }
  return out;
}

CMatrix quantizePhases(const CMatrix& fRF, std::optional<int> bits) {
  if (!bits) {
    return fRF;
  }
  CMatrix out(fRF.rows(), fRF.cols());
  for (Eigen::Index c = 0; c < fRF.cols(); ++c) {
    out.col(c) = quantizePhases(CVector(fRF.col(c)), bits);
  }
  return out;
}

namespace {

// Factorization a*b = ntRF compatible with the array sides, preferring the
// most square tiling; ties go to the smaller a.
std::pair<int, int> tileFactorization(int ntV, int ntH, int ntRF) {
  int bestA = -1;
  int bestScore = -1;
  for (int a = 1; a <= ntRF; ++a) {
    if (ntRF % a != 0) {
      continue;
    }
    const int b = ntRF / a;
    if (ntV % a != 0 || ntH % b != 0) {
      continue;
    }
    const int score = std::abs(ntV / a - ntH / b);
    if (bestA < 0 || score < bestScore) {
      bestA = a;
      bestScore = score;
    }
  }
  if (bestA < 0) {
    throw std::invalid_argument("fsPattern: ntRF admits no rectangular factorization for this array");
  }
  return {bestA, ntRF / bestA};
}

} // namespace

Grouping fsPattern(FsPatternKind kind, int ntV, int ntH, int ntRF) {
  if (ntV < 1 || ntH < 1 || ntRF < 1 || ntRF > ntV * ntH) {
    throw std::invalid_argument("fsPattern: invalid dimensions");
  }
  const int nt = ntV * ntH;
  Grouping g;
  g.subsets.assign(static_cast<std::size_t>(ntRF), {});

  switch (kind) {
  case FsPatternKind::kVertical: {
    if (nt % ntRF != 0) {
      throw std::invalid_argument("fsPattern: ntRF must divide the antenna count");
    }
    const int nSub = nt / ntRF;
    for (int i = 0; i < nt; ++i) {
      g.subsets[static_cast<std::size_t>(i / nSub)].push_back(i);
    }
    break;
  }
  case FsPatternKind::kHorizontal: {
    if (nt % ntRF != 0) {
      throw std::invalid_argument("fsPattern: ntRF must divide the antenna count");
    }
    const int nSub = nt / ntRF;
    for (int v = 0; v < ntV; ++v) {
      for (int h = 0; h < ntH; ++h) {
        const int rowMajor = v * ntH + h;
        g.subsets[static_cast<std::size_t>(rowMajor / nSub)].push_back(h * ntV + v);
      }
    }
    break;
  }
  case FsPatternKind::kSquared: {
    const auto [a, b] = tileFactorization(ntV, ntH, ntRF);
    const int tileV = ntV / a;
    const int tileH = ntH / b;
    for (int v = 0; v < ntV; ++v) {
      for (int h = 0; h < ntH; ++h) {
        const int chain = (v / tileV) * b + (h / tileH);
        g.subsets[static_cast<std::size_t>(chain)].push_back(h * ntV + v);
      }
    }
    break;
  }
  case FsPatternKind::kInterlaced: {
    const auto [a, b] = tileFactorization(ntV, ntH, ntRF);
    for (int v = 0; v < ntV; ++v) {
      for (int h = 0; h < ntH; ++h) {
        const int chain = (v % a) * b + (h % b);
        g.subsets[static_cast<std::size_t>(chain)].push_back(h * ntV + v);
      }
    }
    break;
  }
  }

  g.canonicalize();
  g.validate(nt);
  return g;
}

AnalogPrecoder pcaAnalogPrecoder(const FullyDigitalPrecoders& fOpt,
                                 const std::optional<Grouping>& grouping, int ntRF,
                                 std::optional<int> quantBits) {
  const int nt = fOpt.nt();
  if (nt < 1) {
    throw std::invalid_argument("pcaAnalogPrecoder: empty precoder set");
  }

  AnalogPrecoder out;
  out.fRF = CMatrix::Zero(nt, ntRF);

  if (!grouping) {
    // Fully connected: constant-modulus projections of the top principal
    // components of the full stacked precoder matrix.
    if (ntRF < 1 || ntRF > nt) {
      throw std::invalid_argument("pcaAnalogPrecoder: invalid ntRF");
    }
    CMatrix corr = CMatrix::Zero(nt, nt);
    for (const CMatrix& f : fOpt.fOpt) {
      corr.noalias() += f * f.adjoint();
    }
    const CMatrix components = topEigenvectors(corr, ntRF);
    for (int r = 0; r < ntRF; ++r) {
      out.fRF.col(r) = quantizePhases(projectConstantModulus(components.col(r), nt), quantBits);
    }
    out.mask = BoolMask::Constant(nt, ntRF, true);
    return out;
  }

  grouping->validate(nt);
  if (static_cast<int>(grouping->subsets.size()) != ntRF) {
    throw std::invalid_argument("pcaAnalogPrecoder: grouping size does not match ntRF");
  }
  out.mask = BoolMask::Constant(nt, ntRF, false);
  for (int r = 0; r < ntRF; ++r) {
    const std::vector<int>& subset = grouping->subsets[static_cast<std::size_t>(r)];
    const CVector u = pcaSubarrayVector(fOpt, subset);
    const CVector col =
        quantizePhases(projectConstantModulus(u, static_cast<int>(subset.size())), quantBits);
    for (std::size_t i = 0; i < subset.size(); ++i) {
      out.fRF(subset[i], r) = col[static_cast<Eigen::Index>(i)];
      out.mask(subset[i], r) = true;
    }
  }
  return out;
}

WaterFilling waterFilling(const std::vector<RVector>& sigmaTilde, int ns) {
  if (sigmaTilde.empty()) {
    throw std::invalid_argument("waterFilling: empty singular value list");
  }
  const int numSubcarriers = static_cast<int>(sigmaTilde.size());
  const double target = static_cast<double>(numSubcarriers) * ns;

  std::vector<double> costs; // ns / sigma^2 per usable mode
  for (const RVector& s : sigmaTilde) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] < 0.0) {
        throw std::invalid_argument("waterFilling: negative singular value");
      }
      if (s[i] > 0.0) {
        costs.push_back(static_cast<double>(ns) / (s[i] * s[i]));
      }
    }
  }
  if (costs.empty()) {
    throw std::invalid_argument("waterFilling: no usable modes");
  }

  const auto allocated = [&costs](double mu) {
    double sum = 0.0;
    for (double c : costs) {
      sum += std::max(0.0, mu - c);
    }
    return sum;
  };

  // The best single mode alone cannot exceed the budget, so the water level
  // is bracketed by min cost + budget.
  double lo = 0.0;
  double hi = *std::min_element(costs.begin(), costs.end()) + target;
  double mu = hi;
  const double tol = 1e-9 * target;
  for (int iter = 0; iter < 2000; ++iter) {
    mu = 0.5 * (lo + hi);
    const double sum = allocated(mu);
    if (std::abs(sum - target) <= tol) {
      break;
    }
    if (sum < target) {
      lo = mu;
    } else {
      hi = mu;
    }
  }

  WaterFilling out;
  out.mu = mu;
  out.allocations.reserve(sigmaTilde.size());
  for (const RVector& s : sigmaTilde) {
    RVector p = RVector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] > 0.0) {
        p[i] = std::max(0.0, mu - static_cast<double>(ns) / (s[i] * s[i]));
      }
    }
    out.allocations.push_back(std::move(p));
  }
  return out;
}

namespace {

struct EffectiveModes {
  std::vector<CMatrix> vTilde; ///< K matrices, NtRF x ns
  std::vector<RVector> sigma;  ///< K vectors, ns
  CMatrix gramInvSqrt;
};

EffectiveModes effectiveModes(const ChannelRealization& channel, const CMatrix& fRF, int ns) {
  if (channel.freq.empty()) {
    throw std::invalid_argument("basebandPrecoder: channel has no subcarriers");
  }
  const Eigen::Index ntRF = fRF.cols();
  if (ns < 1 || ns > ntRF) {
    throw std::invalid_argument("basebandPrecoder: ns exceeds the RF chain count");
  }

  EffectiveModes modes;
  try {
    modes.gramInvSqrt = inverseSqrtPsd(fRF.adjoint() * fRF);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("basebandPrecoder: analog precoder is rank deficient");
  }
  const CMatrix orthonormal = fRF * modes.gramInvSqrt;

  modes.vTilde.reserve(channel.freq.size());
  modes.sigma.reserve(channel.freq.size());
  for (const CMatrix& h : channel.freq) {
    const CMatrix effective = h * orthonormal; // same singular pairs as Sigma V^H F_RF (..)^{-1/2}
    Eigen::JacobiSVD<CMatrix> svd(effective, Eigen::ComputeThinV);
    modes.vTilde.push_back(svd.matrixV().leftCols(ns));
    modes.sigma.push_back(svd.singularValues().head(ns));
  }
  return modes;
}

} // namespace

std::vector<RVector> effectiveSingularValues(const ChannelRealization& channel,
                                             const CMatrix& fRF, int ns) {
  return effectiveModes(channel, fRF, ns).sigma;
}

std::vector<CMatrix> basebandPrecoder(const ChannelRealization& channel, const CMatrix& fRF,
                                      int ns, const BasebandOptions& options) {
  EffectiveModes modes = effectiveModes(channel, fRF, ns);

  std::vector<CMatrix> fBB;
  fBB.reserve(modes.vTilde.size());
  if (options.unitaryPower) {
    for (const CMatrix& v : modes.vTilde) {
      fBB.push_back(modes.gramInvSqrt * v);
    }
    return fBB;
  }

  const WaterFilling wf = waterFilling(modes.sigma, ns);
  for (std::size_t k = 0; k < modes.vTilde.size(); ++k) {
    const RVector amplitudes = wf.allocations[k].cwiseSqrt();
    fBB.push_back(modes.gramInvSqrt * modes.vTilde[k] * amplitudes.asDiagonal());
  }
  return fBB;
}

void validateHybridPrecoder(const HybridPrecoder& precoder, double tol) {
  const Eigen::Index nt = precoder.fRF.rows();
  const Eigen::Index ntRF = precoder.fRF.cols();
  if (precoder.mask.rows() != nt || precoder.mask.cols() != ntRF) {
    throw std::runtime_error("hybrid precoder: mask shape mismatch");
  }
  for (Eigen::Index r = 0; r < ntRF; ++r) {
    Eigen::Index connected = 0;
    for (Eigen::Index i = 0; i < nt; ++i) {
      if (precoder.mask(i, r)) {
        ++connected;
      }
    }
    if (connected == 0) {
      throw std::runtime_error("hybrid precoder: RF chain with no antennas");
    }
    const double expected = 1.0 / std::sqrt(static_cast<double>(connected));
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double mag = std::abs(precoder.fRF(i, r));
      if (!precoder.mask(i, r)) {
        if (mag != 0.0) {
          throw std::runtime_error("hybrid precoder: nonzero entry outside the mask");
        }
      } else if (std::abs(mag - expected) > 1e-9) {
        throw std::runtime_error("hybrid precoder: constant-modulus violation");
      }
    }
  }

  if (!precoder.fBB.empty()) {
    double power = 0.0;
    for (const CMatrix& bb : precoder.fBB) {
      power += (precoder.fRF * bb).squaredNorm();
    }
    const double target =
        static_cast<double>(precoder.fBB.size()) * static_cast<double>(precoder.fBB.front().cols());
    if (std::abs(power - target) > tol * target) {
      throw std::runtime_error("hybrid precoder: sum power constraint violated");
    }
  }
}

} // namespace mmhp
