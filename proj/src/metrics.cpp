// SPDX-License-Identifier: Apache-2.0
#include "mmhp/metrics.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace mmhp {

namespace {

double logDetCapacityTerm(const CMatrix& effective, double noiseVariance) {
  // log2 det(I + (1/sigma^2) G G^H) via the Cholesky factor of the smaller
  // Gram matrix; det(I + A B) = det(I + B A).
  const Eigen::Index rows = effective.rows();
  const Eigen::Index cols = effective.cols();
  CMatrix gram;
  if (cols <= rows) {
    gram = CMatrix::Identity(cols, cols) + effective.adjoint() * effective / noiseVariance;
  } else {
    gram = CMatrix::Identity(rows, rows) + effective * effective.adjoint() / noiseVariance;
  }
  const Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("spectralEfficiency: Cholesky factorization failed");
  }
  double logDet = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    logDet += 2.0 * std::log2(llt.matrixL()(i, i).real());
  }
  return logDet;
}

} // namespace

double spectralEfficiency(const ChannelRealization& channel, const CMatrix& fRF,
                          const std::vector<CMatrix>& fBB, double noiseVariance) {
  if (noiseVariance <= 0.0) {
    throw std::invalid_argument("spectralEfficiency: noise variance must be positive");
  }
  if (channel.freq.size() != fBB.size()) {
    throw std::invalid_argument("spectralEfficiency: precoder count does not match subcarriers");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < channel.freq.size(); ++k) {
    sum += logDetCapacityTerm(channel.freq[k] * fRF * fBB[k], noiseVariance);
  }
  return sum / static_cast<double>(channel.freq.size());
}

double spectralEfficiencyDigital(const ChannelRealization& channel,
                                 const std::vector<CMatrix>& precoders, double noiseVariance) {
  if (noiseVariance <= 0.0) {
    throw std::invalid_argument("spectralEfficiency: noise variance must be positive");
  }
  if (channel.freq.size() != precoders.size()) {
    throw std::invalid_argument("spectralEfficiency: precoder count does not match subcarriers");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < channel.freq.size(); ++k) {
    sum += logDetCapacityTerm(channel.freq[k] * precoders[k], noiseVariance);
  }
  return sum / static_cast<double>(channel.freq.size());
}

double powerConsumption(const PowerModel& model, int nt, int ntRF) {
  if (nt < 1 || ntRF < 1) {
    throw std::invalid_argument("powerConsumption: counts must be positive");
  }
  const double ntD = nt;
  const double rfD = ntRF;
  switch (model.array) {
  case ArrayType::kFullyDigital:
    return ntD * (model.paMw + model.dacMw + model.mixerMw + model.loMw);
  case ArrayType::kFullyConnected:
    if (model.architecture == AntennaArchitecture::kPassive) {
      return ntD * rfD * model.psMw + rfD * (model.dacMw + model.mixerMw + model.paMw + model.loMw);
    }
    return ntD * rfD * model.psMw + ntD * model.paMw + rfD * (model.dacMw + model.mixerMw + model.loMw);
  case ArrayType::kPartiallyConnected:
    if (model.architecture == AntennaArchitecture::kPassive) {
      return ntD * model.psMw + rfD * (model.dacMw + model.mixerMw + model.paMw + model.loMw);
    }
    return ntD * model.psMw + ntD * model.paMw + rfD * (model.dacMw + model.mixerMw + model.loMw);
  }
  throw std::logic_error("powerConsumption: unknown array type");
}

double energyEfficiency(double seBitsPerSecHz, double bandwidthHz, double powerMilliwatts) {
  if (powerMilliwatts <= 0.0) {
    throw std::invalid_argument("energyEfficiency: power must be positive");
  }
  return seBitsPerSecHz * bandwidthHz / (powerMilliwatts / 1000.0);
}

} // namespace mmhp
