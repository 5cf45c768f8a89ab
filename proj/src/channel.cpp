// SPDX-License-Identifier: Apache-2.0
#include "mmhp/channel.hpp"

#include "mmhp/rng.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace mmhp {

void SystemConfig::validate() const {
  auto requirePositive = [](int v, const char* name) {
    if (v < 1) {
      throw std::invalid_argument(std::string("SystemConfig: ") + name + " must be positive");
    }
  };
  requirePositive(ntV, "ntV");
  requirePositive(ntH, "ntH");
  requirePositive(nrV, "nrV");
  requirePositive(nrH, "nrH");
  requirePositive(ntRF, "ntRF");
  requirePositive(ns, "ns");
  requirePositive(numSubcarriers, "numSubcarriers");
  requirePositive(delayTaps, "delayTaps");
  requirePositive(numClusters, "numClusters");
  requirePositive(raysPerCluster, "raysPerCluster");
  if (ntRF > nt()) {
    throw std::invalid_argument("SystemConfig: ntRF must not exceed the antenna count");
  }
  if (ns > ntRF) {
    throw std::invalid_argument("SystemConfig: ns must not exceed ntRF");
  }
  if (ns > nr()) {
    throw std::invalid_argument("SystemConfig: ns must not exceed the receive antenna count");
  }
  if (delayTaps > numSubcarriers) {
    throw std::invalid_argument("SystemConfig: delayTaps must not exceed numSubcarriers");
  }
  if (bandwidthHz <= 0.0) {
    throw std::invalid_argument("SystemConfig: bandwidthHz must be positive");
  }
  if (noiseVariance <= 0.0) {
    throw std::invalid_argument("SystemConfig: noiseVariance must be positive");
  }
  if (angleSpreadRad < 0.0) {
    throw std::invalid_argument("SystemConfig: angleSpreadRad must be nonnegative");
  }
  if (dvOverLambda <= 0.0 || dhOverLambda <= 0.0) {
    throw std::invalid_argument("SystemConfig: antenna spacing must be positive");
  }
  if (quantBits && *quantBits < 1) {
    throw std::invalid_argument("SystemConfig: quantBits must be positive or unset");
  }
}

CVector steeringVector(double azimuth, double elevation, int nV, int nH,
                       double dvOverLambda, double dhOverLambda) {
  if (nV < 1 || nH < 1) {
    throw std::invalid_argument("steeringVector: dimensions must be positive");
  }
  const int n = nV * nH;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double horiz = dhOverLambda * std::sin(elevation) * std::cos(azimuth);
  const double vert = dvOverLambda * std::sin(azimuth);
  CVector a(n);
  for (int m = 0; m < nH; ++m) {
    for (int v = 0; v < nV; ++v) {
      const double phase = -2.0 * kPi * (m * horiz + v * vert);
      a[m * nV + v] = std::polar(scale, phase);
    }
  }
  return a;
}

std::vector<RayParameters> sampleRays(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  RandomStream rng(seed);
  const double ts = config.symbolPeriod();
  const double maxDelay = config.delayTaps * ts;

  auto drawDelay = [&]() {
    // Redraw the rare tail that would round onto tap index D.
    for (;;) {
      const double tau = rng.uniform(0.0, maxDelay);
      if (std::llround(tau / ts) < config.delayTaps) {
        return tau;
      }
    }
  };

  std::vector<RayParameters> rays;
  rays.reserve(static_cast<std::size_t>(config.numClusters) * config.raysPerCluster);
  for (int c = 0; c < config.numClusters; ++c) {
    const double aodAz = rng.uniform(-kPi / 2.0, kPi / 2.0);
    const double aodEl = rng.uniform(-kPi / 2.0, kPi / 2.0);
    const double aoaAz = rng.uniform(-kPi / 2.0, kPi / 2.0);
    const double aoaEl = rng.uniform(-kPi / 2.0, kPi / 2.0);
    const double clusterDelay = drawDelay();
    for (int l = 0; l < config.raysPerCluster; ++l) {
      RayParameters ray;
      ray.clusterIndex = c;
      ray.rayIndex = l;
      ray.aodAzimuth = aodAz + rng.laplace(config.angleSpreadRad);
      ray.aodElevation = aodEl + rng.laplace(config.angleSpreadRad);
      ray.aoaAzimuth = aoaAz + rng.laplace(config.angleSpreadRad);
      ray.aoaElevation = aoaEl + rng.laplace(config.angleSpreadRad);
      ray.delaySeconds = config.delayPerCluster ? clusterDelay : drawDelay();
      ray.gain = rng.complexGaussian();
      rays.push_back(ray);
    }
  }
  return rays;
}

std::vector<CMatrix> buildDelayTaps(const std::vector<RayParameters>& rays,
                                    const SystemConfig& config) {
  const int nr = config.nr();
  const int nt = config.nt();
  const double ts = config.symbolPeriod();
  const double scale = std::sqrt(static_cast<double>(nt) * nr /
                                 (static_cast<double>(config.numClusters) * config.raysPerCluster));

  std::vector<CMatrix> taps(static_cast<std::size_t>(config.delayTaps),
                            CMatrix::Zero(nr, nt));
  for (const RayParameters& ray : rays) {
    const long long d = std::llround(ray.delaySeconds / ts);
    if (d < 0 || d >= config.delayTaps) {
      throw std::invalid_argument("buildDelayTaps: ray delay falls outside the tap grid");
    }
    const CVector ar = steeringVector(ray.aoaAzimuth, ray.aoaElevation, config.nrV, config.nrH,
                                      config.dvOverLambda, config.dhOverLambda);
    const CVector at = steeringVector(ray.aodAzimuth, ray.aodElevation, config.ntV, config.ntH,
                                      config.dvOverLambda, config.dhOverLambda);
    taps[static_cast<std::size_t>(d)].noalias() += (scale * ray.gain) * (ar * at.adjoint());
  }
  return taps;
}

std::vector<CMatrix> tapsToFrequency(const std::vector<CMatrix>& taps, int numSubcarriers) {
  if (taps.empty()) {
    throw std::invalid_argument("tapsToFrequency: empty tap list");
  }
  const int numTaps = static_cast<int>(taps.size());
  if (numTaps > numSubcarriers) {
    throw std::invalid_argument("tapsToFrequency: more taps than subcarriers");
  }
  const Eigen::Index nr = taps.front().rows();
  const Eigen::Index nt = taps.front().cols();

  // Flatten taps into (Nr*Nt) x D so the DFT over taps is a single product.
  CMatrix flat(nr * nt, numTaps);
  for (int d = 0; d < numTaps; ++d) {
    flat.col(d) = Eigen::Map<const CVector>(taps[static_cast<std::size_t>(d)].data(), nr * nt);
  }
  CMatrix dft(numTaps, numSubcarriers);
  for (int d = 0; d < numTaps; ++d) {
    for (int k = 0; k < numSubcarriers; ++k) {
      dft(d, k) = std::polar(1.0, -2.0 * kPi * k * d / numSubcarriers);
    }
  }
  const CMatrix freqFlat = flat * dft;

  std::vector<CMatrix> freq(static_cast<std::size_t>(numSubcarriers));
  for (int k = 0; k < numSubcarriers; ++k) {
    freq[static_cast<std::size_t>(k)] =
        Eigen::Map<const CMatrix>(freqFlat.col(k).data(), nr, nt);
  }
  return freq;
}

ChannelRealization generateChannel(const SystemConfig& config, std::uint64_t seed) {
  ChannelRealization out;
  out.rays = sampleRays(config, seed);
  out.taps = buildDelayTaps(out.rays, config);
  out.freq = tapsToFrequency(out.taps, config.numSubcarriers);
  return out;
}

namespace {

constexpr char kMagic[8] = {'M', 'M', 'H', 'P', 'C', 'H', 'N', '1'};

void writeU32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t readU32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void writeMatrix(std::ostream& os, const CMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = m(r, c).real();
      const double im = m(r, c).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof(re));
      os.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
}

CMatrix readMatrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double re = 0.0;
      double im = 0.0;
      is.read(reinterpret_cast<char*>(&re), sizeof(re));
      is.read(reinterpret_cast<char*>(&im), sizeof(im));
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

void writeDouble(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

double readDouble(std::istream& is) {
  double v = 0.0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

} // namespace

void saveChannel(const ChannelRealization& channel, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("saveChannel: cannot open " + path);
  }
  os.write(kMagic, sizeof(kMagic));
  const std::uint32_t nr = channel.taps.empty() ? 0 : static_cast<std::uint32_t>(channel.taps.front().rows());
  const std::uint32_t nt = channel.taps.empty() ? 0 : static_cast<std::uint32_t>(channel.taps.front().cols());
  writeU32(os, nr);
  writeU32(os, nt);
  writeU32(os, static_cast<std::uint32_t>(channel.taps.size()));
  writeU32(os, static_cast<std::uint32_t>(channel.freq.size()));
  writeU32(os, static_cast<std::uint32_t>(channel.rays.size()));
  for (const CMatrix& tap : channel.taps) {
    writeMatrix(os, tap);
  }
  for (const CMatrix& h : channel.freq) {
    writeMatrix(os, h);
  }
  for (const RayParameters& ray : channel.rays) {
    writeU32(os, static_cast<std::uint32_t>(ray.clusterIndex));
    writeU32(os, static_cast<std::uint32_t>(ray.rayIndex));
    writeDouble(os, ray.gain.real());
    writeDouble(os, ray.gain.imag());
    writeDouble(os, ray.delaySeconds);
    writeDouble(os, ray.aodAzimuth);
    writeDouble(os, ray.aodElevation);
    writeDouble(os, ray.aoaAzimuth);
    writeDouble(os, ray.aoaElevation);
  }
  if (!os) {
    throw std::runtime_error("saveChannel: write failed for " + path);
  }
}

ChannelRealization loadChannel(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("loadChannel: cannot open " + path);
  }
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("loadChannel: bad magic in " + path);
  }
  const std::uint32_t nr = readU32(is);
  const std::uint32_t nt = readU32(is);
  const std::uint32_t numTaps = readU32(is);
  const std::uint32_t numFreq = readU32(is);
  const std::uint32_t numRays = readU32(is);

  ChannelRealization channel;
  channel.taps.reserve(numTaps);
  for (std::uint32_t d = 0; d < numTaps; ++d) {
    channel.taps.push_back(readMatrix(is, nr, nt));
  }
  channel.freq.reserve(numFreq);
  for (std::uint32_t k = 0; k < numFreq; ++k) {
    channel.freq.push_back(readMatrix(is, nr, nt));
  }
  channel.rays.reserve(numRays);
  for (std::uint32_t i = 0; i < numRays; ++i) {
    RayParameters ray;
    ray.clusterIndex = static_cast<int>(readU32(is));
    ray.rayIndex = static_cast<int>(readU32(is));
    const double re = readDouble(is);
    const double im = readDouble(is);
    ray.gain = Complex(re, im);
    ray.delaySeconds = readDouble(is);
    ray.aodAzimuth = readDouble(is);
    ray.aodElevation = readDouble(is);
    ray.aoaAzimuth = readDouble(is);
    ray.aoaElevation = readDouble(is);
    channel.rays.push_back(ray);
  }
  if (!is) {
    throw std::runtime_error("loadChannel: truncated file " + path);
  }
  return channel;
}

} // namespace mmhp
