// SPDX-License-Identifier: Apache-2.0
#include "mmhp/baselines.hpp"

#include "mmhp/channel.hpp"
#include "mmhp/linalg.hpp"
#include "mmhp/precoder.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmhp {

SteeringDictionary makeSteeringDictionary(int ntV, int ntH, double dvOverLambda,
                                          double dhOverLambda, int gridAz, int gridEl) {
  if (ntV < 1 || ntH < 1) {
    throw std::invalid_argument("makeSteeringDictionary: invalid array size");
  }
  if (gridAz <= 0) {
    gridAz = 2 * ntV;
  }
  if (gridEl <= 0) {
    gridEl = 2 * ntH;
  }
  const int nt = ntV * ntH;
  SteeringDictionary dict;
  dict.atoms.resize(nt, static_cast<Eigen::Index>(gridAz) * gridEl);
  dict.angles.reserve(static_cast<std::size_t>(gridAz) * gridEl);

  int column = 0;
  for (int ia = 0; ia < gridAz; ++ia) {
    const double az = -kPi / 2.0 + (ia + 0.5) * kPi / gridAz;
    for (int ie = 0; ie < gridEl; ++ie) {
      const double el = -kPi / 2.0 + (ie + 0.5) * kPi / gridEl;
      dict.atoms.col(column) = steeringVector(az, el, ntV, ntH, dvOverLambda, dhOverLambda);
      dict.angles.emplace_back(az, el);
      ++column;
    }
  }
  return dict;
}

CMatrix sompPrecoder(const FullyDigitalPrecoders& fOpt, const SteeringDictionary& dict,
                     int ntRF) {
  const Eigen::Index numAtoms = dict.atoms.cols();
  if (ntRF < 1 || numAtoms < ntRF) {
    throw std::invalid_argument("sompPrecoder: dictionary smaller than ntRF");
  }
  const int numSubcarriers = fOpt.numSubcarriers();
  if (numSubcarriers == 0) {
    throw std::invalid_argument("sompPrecoder: empty precoder set");
  }

  // Correlations A^H fOpt[k] are precomputed; residual correlations then
  // need only the small Gram-times-coefficient update per iteration.
  std::vector<CMatrix> corr(static_cast<std::size_t>(numSubcarriers));
  for (int k = 0; k < numSubcarriers; ++k) {
    corr[static_cast<std::size_t>(k)] = dict.atoms.adjoint() * fOpt.fOpt[static_cast<std::size_t>(k)];
  }
  const CMatrix gram = dict.atoms.adjoint() * dict.atoms;

  std::vector<int> selected;
  std::vector<bool> used(static_cast<std::size_t>(numAtoms), false);
  std::vector<CMatrix> coefficients(static_cast<std::size_t>(numSubcarriers));

  for (int step = 0; step < ntRF; ++step) {
    Eigen::Index best = -1;
    double bestScore = -1.0;
    for (Eigen::Index gidx = 0; gidx < numAtoms; ++gidx) {
      if (used[static_cast<std::size_t>(gidx)]) {
        continue;
      }
      double score = 0.0;
      for (int k = 0; k < numSubcarriers; ++k) {
        const auto& c = corr[static_cast<std::size_t>(k)];
        if (selected.empty()) {
          score += c.row(gidx).squaredNorm();
        } else {
          CVector residualRow = c.row(gidx).transpose();
          for (std::size_t s = 0; s < selected.size(); ++s) {
            residualRow -= gram(gidx, selected[s]) *
                           coefficients[static_cast<std::size_t>(k)].row(static_cast<Eigen::Index>(s)).transpose();
          }
          score += residualRow.squaredNorm();
        }
      }
      if (score > bestScore) {
        bestScore = score;
        best = gidx;
      }
    }
    selected.push_back(static_cast<int>(best));
    used[static_cast<std::size_t>(best)] = true;

    // Joint least squares of every fOpt[k] on the selected atoms.
    CMatrix atomsSel(dict.atoms.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t s = 0; s < selected.size(); ++s) {
      atomsSel.col(static_cast<Eigen::Index>(s)) = dict.atoms.col(selected[s]);
    }
    const auto solver = (atomsSel.adjoint() * atomsSel).ldlt();
    for (int k = 0; k < numSubcarriers; ++k) {
      coefficients[static_cast<std::size_t>(k)] =
          solver.solve(atomsSel.adjoint() * fOpt.fOpt[static_cast<std::size_t>(k)]);
    }
  }

  CMatrix analog(dict.atoms.rows(), ntRF);
  for (int r = 0; r < ntRF; ++r) {
    analog.col(r) = dict.atoms.col(selected[static_cast<std::size_t>(r)]);
  }
  return analog;
}

CMatrix dftCodebook(int ntV, int ntH) {
  if (ntV < 1 || ntH < 1) {
    throw std::invalid_argument("dftCodebook: invalid array size");
  }
  const int nt = ntV * ntH;
  const double scale = 1.0 / std::sqrt(static_cast<double>(nt));
  CMatrix book(nt, nt);
  for (int p = 0; p < ntH; ++p) {
    for (int q = 0; q < ntV; ++q) {
      const int column = p * ntV + q;
      for (int m = 0; m < ntH; ++m) {
        for (int v = 0; v < ntV; ++v) {
          const double phase = -2.0 * kPi * (static_cast<double>(m) * p / ntH +
                                             static_cast<double>(v) * q / ntV);
          book(m * ntV + v, column) = std::polar(scale, phase);
        }
      }
    }
  }
  return book;
}

CMatrix dftCodebookPrecoder(const FullyDigitalPrecoders& fOpt, int ntV, int ntH, int ntRF) {
  const CMatrix book = dftCodebook(ntV, ntH);
  if (ntRF < 1 || ntRF > book.cols()) {
    throw std::invalid_argument("dftCodebookPrecoder: invalid ntRF");
  }
  std::vector<double> scores(static_cast<std::size_t>(book.cols()), 0.0);
  for (const CMatrix& f : fOpt.fOpt) {
    const CMatrix projection = book.adjoint() * f;
    for (Eigen::Index c = 0; c < book.cols(); ++c) {
      scores[static_cast<std::size_t>(c)] += projection.row(c).squaredNorm();
    }
  }

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](int a, int b) { return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)]; });

  CMatrix analog(book.rows(), ntRF);
  for (int r = 0; r < ntRF; ++r) {
    analog.col(r) = book.col(order[static_cast<std::size_t>(r)]);
  }
  return analog;
}

CMatrix averageCovariance(const ChannelRealization& channel) {
  if (channel.freq.empty()) {
    throw std::invalid_argument("averageCovariance: channel has no subcarriers");
  }
  const Eigen::Index nt = channel.freq.front().cols();
  CMatrix covariance = CMatrix::Zero(nt, nt);
  for (const CMatrix& h : channel.freq) {
    covariance.noalias() += h.adjoint() * h;
  }
  covariance /= static_cast<double>(channel.freq.size());
  return covariance;
}

AnalogPrecoder covarianceEvdFromMatrix(const CMatrix& covariance,
                                       const std::optional<Grouping>& grouping, int ntRF) {
  const Eigen::Index nt = covariance.rows();

  AnalogPrecoder out;
  out.fRF = CMatrix::Zero(nt, ntRF);
  if (!grouping) {
    if (ntRF < 1 || ntRF > nt) {
      throw std::invalid_argument("covarianceEvdPrecoder: invalid ntRF");
    }
    const CMatrix components = topEigenvectors(covariance, ntRF);
    for (int r = 0; r < ntRF; ++r) {
      out.fRF.col(r) = projectConstantModulus(components.col(r), static_cast<int>(nt));
    }
    out.mask = BoolMask::Constant(nt, ntRF, true);
    return out;
  }

  grouping->validate(static_cast<int>(nt));
  if (static_cast<int>(grouping->subsets.size()) != ntRF) {
    throw std::invalid_argument("covarianceEvdPrecoder: grouping size does not match ntRF");
  }
  out.mask = BoolMask::Constant(nt, ntRF, false);
  for (int r = 0; r < ntRF; ++r) {
    const auto& subset = grouping->subsets[static_cast<std::size_t>(r)];
    CMatrix sub(subset.size(), subset.size());
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = 0; b < subset.size(); ++b) {
        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            covariance(subset[a], subset[b]);
      }
    }
    const CVector projected =
        projectConstantModulus(dominantEigenvector(sub), static_cast<int>(subset.size()));
    for (std::size_t i = 0; i < subset.size(); ++i) {
      out.fRF(subset[i], r) = projected[static_cast<Eigen::Index>(i)];
      out.mask(subset[i], r) = true;
    }
  }
  return out;
}

AnalogPrecoder covarianceEvdPrecoder(const ChannelRealization& channel,
                                     const std::optional<Grouping>& grouping, int ntRF) {
  return covarianceEvdFromMatrix(averageCovariance(channel), grouping, ntRF);
}

} // namespace mmhp
