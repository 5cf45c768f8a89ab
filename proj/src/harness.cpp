// SPDX-License-Identifier: Apache-2.0
#include "mmhp/harness.hpp"

#include "mmhp/baselines.hpp"
#include "mmhp/channel.hpp"
#include "mmhp/grouping.hpp"
#include "mmhp/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>
#include <tuple>

namespace mmhp {

using nlohmann::json;

std::string SchemeSpec::name() const {
  switch (kind) {
  case SchemeKind::kFullyDigital:
    return "FD";
  case SchemeKind::kPcaFca:
    return "PCA-FCA";
  case SchemeKind::kPcaFs:
    return "PCA-FS";
  case SchemeKind::kPcaDs:
    return "PCA-DS";
  case SchemeKind::kSomp:
    return "SOMP";
  case SchemeKind::kDftCodebook:
    return "DFT";
  case SchemeKind::kEvdFca:
    return "EVD-FCA";
  case SchemeKind::kEvdFs:
    return "EVD-FS";
  case SchemeKind::kGreedyDs:
    return "GREEDY-DS";
  }
  throw std::logic_error("unknown scheme kind");
}

std::string SchemeSpec::patternName() const {
  if (!pattern) {
    return "";
  }
  switch (*pattern) {
  case FsPatternKind::kVertical:
    return "vertical";
  case FsPatternKind::kHorizontal:
    return "horizontal";
  case FsPatternKind::kSquared:
    return "squared";
  case FsPatternKind::kInterlaced:
    return "interlaced";
  }
  throw std::logic_error("unknown pattern kind");
}

ArrayType SchemeSpec::arrayType() const {
  switch (kind) {
  case SchemeKind::kFullyDigital:
    return ArrayType::kFullyDigital;
  case SchemeKind::kPcaFca:
  case SchemeKind::kSomp:
  case SchemeKind::kDftCodebook:
  case SchemeKind::kEvdFca:
    return ArrayType::kFullyConnected;
  default:
    return ArrayType::kPartiallyConnected;
  }
}

namespace {

std::optional<FsPatternKind> parsePattern(const std::string& text) {
  if (text == "vertical") {
    return FsPatternKind::kVertical;
  }
  if (text == "horizontal") {
    return FsPatternKind::kHorizontal;
  }
  if (text == "squared") {
    return FsPatternKind::kSquared;
  }
  if (text == "interlaced") {
    return FsPatternKind::kInterlaced;
  }
  return std::nullopt;
}

bool needsPattern(SchemeKind kind) {
  return kind == SchemeKind::kPcaFs || kind == SchemeKind::kEvdFs;
}

} // namespace

SchemeSpec parseScheme(const std::string& text) {
  std::string base = text;
  std::string patternText;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    base = text.substr(0, colon);
    patternText = text.substr(colon + 1);
  }

  SchemeSpec spec;
  if (base == "FD") {
    spec.kind = SchemeKind::kFullyDigital;
  } else if (base == "PCA-FCA") {
    spec.kind = SchemeKind::kPcaFca;
  } else if (base == "PCA-FS") {
    spec.kind = SchemeKind::kPcaFs;
  } else if (base == "PCA-DS") {
    spec.kind = SchemeKind::kPcaDs;
  } else if (base == "SOMP") {
    spec.kind = SchemeKind::kSomp;
  } else if (base == "DFT") {
    spec.kind = SchemeKind::kDftCodebook;
  } else if (base == "EVD-FCA") {
    spec.kind = SchemeKind::kEvdFca;
  } else if (base == "EVD-FS") {
    spec.kind = SchemeKind::kEvdFs;
  } else if (base == "GREEDY-DS") {
    spec.kind = SchemeKind::kGreedyDs;
  } else {
    throw std::invalid_argument("unknown scheme '" + base + "'");
  }

  if (needsPattern(spec.kind)) {
    spec.pattern = parsePattern(patternText);
    if (!spec.pattern) {
      throw std::invalid_argument("scheme '" + base +
                                  "' needs a pattern suffix (e.g. '" + base + ":vertical')");
    }
  } else if (!patternText.empty()) {
    throw std::invalid_argument("scheme '" + base + "' does not take a pattern");
  }
  return spec;
}

void ExperimentSpec::validate() const {
  config.validate();
  if (schemes.empty()) {
    throw std::invalid_argument("ExperimentSpec: scheme list is empty");
  }
  if (snrGridDb.empty()) {
    throw std::invalid_argument("ExperimentSpec: SNR grid is empty");
  }
  if (trials < 1) {
    throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
  }
  if (!runPassive && !runActive) {
    throw std::invalid_argument("ExperimentSpec: no antenna architecture selected");
  }
}

namespace {

void failUnknownKeys(const json& object, std::initializer_list<const char*> known,
                     const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (const char* candidate : known) {
      if (key == candidate) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
  }
}

void applyConfigJson(const json& doc, SystemConfig& config) {
  failUnknownKeys(doc,
                  {"ntV", "ntH", "nrV", "nrH", "ntRF", "ns", "K", "D", "bandwidthHz", "nCl",
                   "nRay", "angleSpreadRad", "dvOverLambda", "dhOverLambda", "noiseVariance",
                   "quantBits", "delayPerCluster"},
                  "config");
  config.ntV = doc.value("ntV", config.ntV);
  config.ntH = doc.value("ntH", config.ntH);
  config.nrV = doc.value("nrV", config.nrV);
  config.nrH = doc.value("nrH", config.nrH);
  config.ntRF = doc.value("ntRF", config.ntRF);
  config.ns = doc.value("ns", config.ns);
  config.numSubcarriers = doc.value("K", config.numSubcarriers);
  config.delayTaps = doc.value("D", config.delayTaps);
  config.bandwidthHz = doc.value("bandwidthHz", config.bandwidthHz);
  config.numClusters = doc.value("nCl", config.numClusters);
  config.raysPerCluster = doc.value("nRay", config.raysPerCluster);
  config.angleSpreadRad = doc.value("angleSpreadRad", config.angleSpreadRad);
  config.dvOverLambda = doc.value("dvOverLambda", config.dvOverLambda);
  config.dhOverLambda = doc.value("dhOverLambda", config.dhOverLambda);
  config.noiseVariance = doc.value("noiseVariance", config.noiseVariance);
  config.delayPerCluster = doc.value("delayPerCluster", config.delayPerCluster);
  if (doc.contains("quantBits")) {
    const json& q = doc.at("quantBits");
    if (q.is_string()) {
      if (q.get<std::string>() != "infinite") {
        throw std::invalid_argument("config.quantBits must be an integer or \"infinite\"");
      }
      config.quantBits.reset();
    } else if (q.is_number_integer()) {
      config.quantBits = q.get<int>();
    } else {
      throw std::invalid_argument("config.quantBits must be an integer or \"infinite\"");
    }
  }
}

json* navigate(json& doc, const std::string& dottedKey, std::string& leaf) {
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dottedKey.find('.', start);
    if (dot == std::string::npos) {
      leaf = dottedKey.substr(start);
      return node;
    }
    const std::string part = dottedKey.substr(start, dot - start);
    if (!node->contains(part)) {
      (*node)[part] = json::object();
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void applyOverride(json& doc, const std::string& expr) {
  const std::size_t eq = expr.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value, got '" + expr + "'");
  }
  const std::string key = expr.substr(0, eq);
  const std::string valueText = expr.substr(eq + 1);
  std::string leaf;
  json* node = navigate(doc, key, leaf);
  json value;
  try {
    value = json::parse(valueText);
  } catch (const json::exception&) {
    value = valueText; // plain string
  }
  (*node)[leaf] = value;
}

} // namespace

ExperimentSpec parseExperimentSpec(const std::string& jsonText,
                                   const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(jsonText);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("spec must be a JSON object");
  }
  for (const std::string& expr : overrides) {
    applyOverride(doc, expr);
  }

  failUnknownKeys(doc,
                  {"config", "schemes", "snrGridDb", "trials", "seed", "architecture",
                   "outputPath", "power", "quantizeBeforeBaseband"},
                  "spec");

  ExperimentSpec spec;
  if (doc.contains("config")) {
    applyConfigJson(doc.at("config"), spec.config);
  }
  if (doc.contains("schemes")) {
    spec.schemes.clear();
    for (const auto& entry : doc.at("schemes")) {
      spec.schemes.push_back(parseScheme(entry.get<std::string>()));
    }
  } else {
    spec.schemes = {parseScheme("FD"), parseScheme("PCA-FCA"), parseScheme("PCA-DS")};
  }
  if (doc.contains("snrGridDb")) {
    spec.snrGridDb = doc.at("snrGridDb").get<std::vector<double>>();
  }
  spec.trials = doc.value("trials", spec.trials);
  spec.seed = doc.value("seed", spec.seed);
  if (doc.contains("architecture")) {
    const std::string arch = doc.at("architecture").get<std::string>();
    if (arch == "passive") {
      spec.runPassive = true;
      spec.runActive = false;
    } else if (arch == "active") {
      spec.runPassive = false;
      spec.runActive = true;
    } else if (arch == "both") {
      spec.runPassive = true;
      spec.runActive = true;
    } else {
      throw std::invalid_argument("architecture must be passive, active or both");
    }
  }
  spec.outputPath = doc.value("outputPath", spec.outputPath);
  if (doc.contains("power")) {
    const json& p = doc.at("power");
    failUnknownKeys(p, {"pPS", "pDAC", "pMix", "pLO", "pPA"}, "power");
    spec.power.psMw = p.value("pPS", spec.power.psMw);
    spec.power.dacMw = p.value("pDAC", spec.power.dacMw);
    spec.power.mixerMw = p.value("pMix", spec.power.mixerMw);
    spec.power.loMw = p.value("pLO", spec.power.loMw);
    spec.power.paMw = p.value("pPA", spec.power.paMw);
  }
  spec.quantizeBeforeBaseband = doc.value("quantizeBeforeBaseband", spec.quantizeBeforeBaseband);

  spec.validate();
  return spec;
}

ExperimentSpec loadExperimentSpec(const std::string& path,
                                  const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) {
    throw std::invalid_argument("cannot open spec file " + path);
  }
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parseExperimentSpec(text, overrides);
}

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct DesignedScheme {
  bool fullyDigital = false;
  CMatrix fRF;
  std::vector<CMatrix> precoders; ///< fBB, or the full precoder when fullyDigital
  double designMs = 0.0;
};

// Everything derived from the channel that schemes share within a trial.
struct TrialContext {
  ChannelRealization channel;
  FullyDigitalPrecoders fOpt;
  std::optional<CMatrix> rF;
  std::optional<CMatrix> covariance;

  const CMatrix& correlation() {
    if (!rF) {
      rF = correlationMatrix(fOpt);
    }
    return *rF;
  }
  const CMatrix& meanCovariance() {
    if (!covariance) {
      covariance = averageCovariance(channel);
    }
    return *covariance;
  }
};

DesignedScheme designScheme(const ExperimentSpec& spec, const SchemeSpec& scheme,
                            TrialContext& ctx, const SteeringDictionary* dict) {
  const auto start = Clock::now();
  const SystemConfig& cfg = spec.config;
  const std::optional<int> analogBits =
      spec.quantizeBeforeBaseband ? cfg.quantBits : std::nullopt;

  DesignedScheme out;
  if (scheme.kind == SchemeKind::kFullyDigital) {
    out.fullyDigital = true;
    const WaterFilling wf = waterFilling(ctx.fOpt.sigma, cfg.ns);
    out.precoders.reserve(ctx.fOpt.fOpt.size());
    for (std::size_t k = 0; k < ctx.fOpt.fOpt.size(); ++k) {
      out.precoders.push_back(ctx.fOpt.fOpt[k] *
                              wf.allocations[k].cwiseSqrt().asDiagonal());
    }
    out.designMs = msSince(start);
    return out;
  }

  CMatrix fRF;
  switch (scheme.kind) {
  case SchemeKind::kPcaFca:
    fRF = pcaAnalogPrecoder(ctx.fOpt, std::nullopt, cfg.ntRF, analogBits).fRF;
    break;
  case SchemeKind::kPcaFs: {
    const Grouping grouping = fsPattern(*scheme.pattern, cfg.ntV, cfg.ntH, cfg.ntRF);
    fRF = pcaAnalogPrecoder(ctx.fOpt, grouping, cfg.ntRF, analogBits).fRF;
    break;
  }
  case SchemeKind::kPcaDs: {
    const Grouping grouping = sharedAhc(ctx.correlation(), cfg.nt(), cfg.ntRF);
    fRF = pcaAnalogPrecoder(ctx.fOpt, grouping, cfg.ntRF, analogBits).fRF;
    break;
  }
  case SchemeKind::kSomp:
    fRF = quantizePhases(sompPrecoder(ctx.fOpt, *dict, cfg.ntRF), analogBits);
    break;
  case SchemeKind::kDftCodebook:
    fRF = quantizePhases(dftCodebookPrecoder(ctx.fOpt, cfg.ntV, cfg.ntH, cfg.ntRF), analogBits);
    break;
  case SchemeKind::kEvdFca:
    fRF = quantizePhases(covarianceEvdFromMatrix(ctx.meanCovariance(), std::nullopt, cfg.ntRF).fRF,
                         analogBits);
    break;
  case SchemeKind::kEvdFs: {
    const Grouping grouping = fsPattern(*scheme.pattern, cfg.ntV, cfg.ntH, cfg.ntRF);
    fRF = quantizePhases(covarianceEvdFromMatrix(ctx.meanCovariance(), grouping, cfg.ntRF).fRF,
                         analogBits);
    break;
  }
  case SchemeKind::kGreedyDs: {
    const Grouping grouping = greedyGrouping(ctx.correlation(), cfg.nt(), cfg.ntRF);
    fRF = quantizePhases(covarianceEvdFromMatrix(ctx.meanCovariance(), grouping, cfg.ntRF).fRF,
                         analogBits);
    break;
  }
  default:
    throw std::logic_error("unreachable scheme kind");
  }

  std::vector<CMatrix> fBB = basebandPrecoder(ctx.channel, fRF, cfg.ns);

  if (!spec.quantizeBeforeBaseband && cfg.quantBits) {
    // Baseband was designed against the exact analog stage; quantize now
    // and rescale to restore the sum power constraint.
    fRF = quantizePhases(fRF, cfg.quantBits);
    double power = 0.0;
    for (const CMatrix& bb : fBB) {
      power += (fRF * bb).squaredNorm();
    }
    const double target = static_cast<double>(fBB.size()) * cfg.ns;
    if (power > 0.0) {
      const double scale = std::sqrt(target / power);
      for (CMatrix& bb : fBB) {
        bb *= scale;
      }
    }
  }

  out.fRF = std::move(fRF);
  out.precoders = std::move(fBB);
  out.designMs = msSince(start);
  return out;
}

} // namespace

std::vector<ResultRow> runExperiment(const ExperimentSpec& spec, int threads) {
  spec.validate();
  const SystemConfig& cfg = spec.config;

  const bool wantsSomp = std::any_of(spec.schemes.begin(), spec.schemes.end(),
                                     [](const SchemeSpec& s) { return s.kind == SchemeKind::kSomp; });
  std::optional<SteeringDictionary> dict;
  if (wantsSomp) {
    dict = makeSteeringDictionary(cfg.ntV, cfg.ntH, cfg.dvOverLambda, cfg.dhOverLambda);
  }

  std::vector<std::string> architectures;
  if (spec.runPassive) {
    architectures.emplace_back("passive");
  }
  if (spec.runActive) {
    architectures.emplace_back("active");
  }

  std::vector<std::vector<ResultRow>> perTrial(static_cast<std::size_t>(spec.trials));
  std::vector<std::string> warnings(static_cast<std::size_t>(spec.trials));

  auto runTrial = [&](int trial) {
    TrialContext ctx;
    ctx.channel = generateChannel(cfg, mixSeed(spec.seed, static_cast<std::uint64_t>(trial)));
    ctx.fOpt = optimalFullyDigital(ctx.channel, cfg.ns);

    std::vector<DesignedScheme> designs;
    designs.reserve(spec.schemes.size());
    for (const SchemeSpec& scheme : spec.schemes) {
      designs.push_back(designScheme(spec, scheme, ctx, dict ? &*dict : nullptr));
    }

    std::vector<ResultRow>& rows = perTrial[static_cast<std::size_t>(trial)];
    std::vector<double> fdSe(spec.snrGridDb.size(), -1.0);
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      const SchemeSpec& scheme = spec.schemes[s];
      const DesignedScheme& design = designs[s];
      for (std::size_t q = 0; q < spec.snrGridDb.size(); ++q) {
        const double snrDb = spec.snrGridDb[q];
        const double noiseVar = cfg.noiseVariance * std::pow(10.0, -snrDb / 10.0);
        const auto evalStart = Clock::now();
        const double se =
            design.fullyDigital
                ? spectralEfficiencyDigital(ctx.channel, design.precoders, noiseVar)
                : spectralEfficiency(ctx.channel, design.fRF, design.precoders, noiseVar);
        const double evalMs = msSince(evalStart);
        if (scheme.kind == SchemeKind::kFullyDigital) {
          fdSe[q] = se;
        }
        for (const std::string& arch : architectures) {
          PowerModel model = spec.power;
          model.architecture =
              arch == "passive" ? AntennaArchitecture::kPassive : AntennaArchitecture::kActive;
          model.array = scheme.arrayType();
          const double power = powerConsumption(model, cfg.nt(), cfg.ntRF);
          ResultRow row;
          row.scheme = scheme.name();
          row.pattern = scheme.patternName();
          row.snrDb = snrDb;
          row.trialIndex = trial;
          row.architecture = arch;
          row.seBitsPerSecHz = se;
          row.powerMilliwatts = power;
          row.eeBitsPerJoule = energyEfficiency(se, cfg.bandwidthHz, power);
          row.wallClockMs = design.designMs + evalMs;
          rows.push_back(std::move(row));
        }
      }
    }

    // The fully-digital scheme is the reference; flag any hybrid that lands
    // above it (can only happen through the noise-blind power loading at
    // extreme SNR mismatch).
    for (std::size_t q = 0; q < spec.snrGridDb.size(); ++q) {
      if (fdSe[q] < 0.0) {
        continue;
      }
      for (const ResultRow& row : rows) {
        if (row.scheme != "FD" && row.snrDb == spec.snrGridDb[q] &&
            row.seBitsPerSecHz > fdSe[q] * (1.0 + 1e-9)) {
          warnings[static_cast<std::size_t>(trial)] +=
              "warning: trial " + std::to_string(trial) + " scheme " + row.scheme +
              " exceeds the fully-digital reference at " + std::to_string(row.snrDb) + " dB\n";
          break;
        }
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || spec.trials == 1) {
    for (int t = 0; t < spec.trials; ++t) {
      runTrial(t);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workerCount = std::min(threads, spec.trials);
    pool.reserve(static_cast<std::size_t>(workerCount));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workerCount));
    for (int w = 0; w < workerCount; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            const int t = next.fetch_add(1);
            if (t >= spec.trials) {
              return;
            }
            runTrial(t);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (std::thread& worker : pool) {
      worker.join();
    }
    for (const std::exception_ptr& err : errors) {
      if (err) {
        std::rethrow_exception(err);
      }
    }
  }

  for (const std::string& warning : warnings) {
    if (!warning.empty()) {
      std::cerr << warning;
    }
  }

  std::vector<ResultRow> rows;
  for (auto& trialRows : perTrial) {
    rows.insert(rows.end(), std::make_move_iterator(trialRows.begin()),
                std::make_move_iterator(trialRows.end()));
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scheme, a.pattern, a.snrDb, a.trialIndex, a.architecture) <
           std::tie(b.scheme, b.pattern, b.snrDb, b.trialIndex, b.architecture);
  });
  return rows;
}

namespace {

std::string formatDouble(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

} // namespace

std::string renderResults(const std::vector<ResultRow>& rows, OutputFormat format,
                          bool includeTimings) {
  std::string out;
  if (format == OutputFormat::kCsv) {
    out = "scheme,pattern,snrDb,trialIndex,architecture,seBitsPerSecHz,powerMilliwatts,"
          "eeBitsPerJoule";
    if (includeTimings) {
      out += ",wallClockMs";
    }
    out += '\n';
    for (const ResultRow& row : rows) {
      out += row.scheme + ',' + row.pattern + ',' + formatDouble(row.snrDb) + ',' +
             std::to_string(row.trialIndex) + ',' + row.architecture + ',' +
             formatDouble(row.seBitsPerSecHz) + ',' + formatDouble(row.powerMilliwatts) + ',' +
             formatDouble(row.eeBitsPerJoule);
      if (includeTimings) {
        out += ',' + formatDouble(row.wallClockMs);
      }
      out += '\n';
    }
    return out;
  }

  out = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& row = rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"scheme\":\"" + row.scheme + "\",\"pattern\":\"" + row.pattern +
           "\",\"snrDb\":" + formatDouble(row.snrDb) +
           ",\"trialIndex\":" + std::to_string(row.trialIndex) + ",\"architecture\":\"" +
           row.architecture + "\",\"seBitsPerSecHz\":" + formatDouble(row.seBitsPerSecHz) +
           ",\"powerMilliwatts\":" + formatDouble(row.powerMilliwatts) +
           ",\"eeBitsPerJoule\":" + formatDouble(row.eeBitsPerJoule);
    if (includeTimings) {
      out += ",\"wallClockMs\":" + formatDouble(row.wallClockMs);
    }
    out += "}";
  }
  out += "\n]\n";
  return out;
}

void emitResults(const std::vector<ResultRow>& rows, OutputFormat format,
                 const std::string& path, bool includeTimings) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("emitResults: cannot open " + path);
  }
  os << renderResults(rows, format, includeTimings);
  if (!os) {
    throw std::runtime_error("emitResults: write failed for " + path);
  }
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  struct Accumulator {
    int count = 0;
    double seSum = 0.0, seSq = 0.0;
    double eeSum = 0.0, eeSq = 0.0;
  };
  std::map<std::tuple<std::string, std::string, std::string, double>, Accumulator> groups;
  for (const ResultRow& row : rows) {
    Accumulator& acc = groups[{row.scheme, row.pattern, row.architecture, row.snrDb}];
    ++acc.count;
    acc.seSum += row.seBitsPerSecHz;
    acc.seSq += row.seBitsPerSecHz * row.seBitsPerSecHz;
    acc.eeSum += row.eeBitsPerJoule;
    acc.eeSq += row.eeBitsPerJoule * row.eeBitsPerJoule;
  }

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    SummaryRow row;
    row.scheme = std::get<0>(key);
    row.pattern = std::get<1>(key);
    row.architecture = std::get<2>(key);
    row.snrDb = std::get<3>(key);
    row.count = acc.count;
    const double n = acc.count;
    row.seMean = acc.seSum / n;
    row.eeMean = acc.eeSum / n;
    if (acc.count > 1) {
      const double seVar = std::max(0.0, (acc.seSq - n * row.seMean * row.seMean) / (n - 1.0));
      const double eeVar = std::max(0.0, (acc.eeSq - n * row.eeMean * row.eeMean) / (n - 1.0));
      row.seStdErr = std::sqrt(seVar / n);
      row.eeStdErr = std::sqrt(eeVar / n);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string renderSummary(const std::vector<SummaryRow>& rows, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::kCsv) {
    out = "scheme,pattern,architecture,snrDb,count,seMean,seStdErr,eeMean,eeStdErr\n";
    for (const SummaryRow& row : rows) {
      out += row.scheme + ',' + row.pattern + ',' + row.architecture + ',' +
             formatDouble(row.snrDb) + ',' + std::to_string(row.count) + ',' +
             formatDouble(row.seMean) + ',' + formatDouble(row.seStdErr) + ',' +
             formatDouble(row.eeMean) + ',' + formatDouble(row.eeStdErr) + '\n';
    }
    return out;
  }
  out = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SummaryRow& row = rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"scheme\":\"" + row.scheme + "\",\"pattern\":\"" + row.pattern +
           "\",\"architecture\":\"" + row.architecture + "\",\"snrDb\":" + formatDouble(row.snrDb) +
           ",\"count\":" + std::to_string(row.count) + ",\"seMean\":" + formatDouble(row.seMean) +
           ",\"seStdErr\":" + formatDouble(row.seStdErr) + ",\"eeMean\":" + formatDouble(row.eeMean) +
           ",\"eeStdErr\":" + formatDouble(row.eeStdErr) + "}";
  }
  out += "\n]\n";
  return out;
}

void emitSummary(const std::vector<SummaryRow>& rows, OutputFormat format,
                 const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("emitSummary: cannot open " + path);
  }
  os << renderSummary(rows, format);
  if (!os) {
    throw std::runtime_error("emitSummary: write failed for " + path);
  }
}

} // namespace mmhp
