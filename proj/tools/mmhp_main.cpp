// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: `run` executes a Monte-Carlo sweep described by a
// JSON spec file, `count-partitions` prints the exact dynamic-subarray
// search-space size, and `selftest` exercises the numerical identities the
// library is built on. Validation failures print one machine-readable JSON
// line on stderr and exit nonzero.

#include "mmhp/channel.hpp"
#include "mmhp/grouping.hpp"
#include "mmhp/harness.hpp"
#include "mmhp/metrics.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>

namespace {

int fail(const std::string& message) {
  nlohmann::json err{{"error", message}};
  std::cerr << err.dump() << '\n';
  return 2;
}

int runCommand(const std::string& specPath, std::string outPath, const std::string& format,
               int threads, const std::vector<std::string>& overrides, bool timings,
               const std::string& summaryPath) {
  mmhp::ExperimentSpec spec = mmhp::loadExperimentSpec(specPath, overrides);
  if (!outPath.empty()) {
    spec.outputPath = outPath;
  }
  if (spec.outputPath.empty()) {
    throw std::invalid_argument("no output path: set outputPath in the spec or pass --out");
  }
  const mmhp::OutputFormat fmt =
      format == "json" ? mmhp::OutputFormat::kJson : mmhp::OutputFormat::kCsv;

  const std::vector<mmhp::ResultRow> rows = mmhp::runExperiment(spec, threads);
  mmhp::emitResults(rows, fmt, spec.outputPath, timings);
  if (!summaryPath.empty()) {
    mmhp::emitSummary(mmhp::summarize(rows), fmt, summaryPath);
  }
  std::cout << "wrote " << rows.size() << " rows to " << spec.outputPath << '\n';
  return 0;
}

bool check(const char* label, bool ok) {
  std::printf("%s %s\n", ok ? "PASS" : "FAIL", label);
  return ok;
}

// Numerical identities on freshly generated instances: tap-DFT energy,
// hybrid sum power, water-filling residual and the two routes to the
// grouping objective.
int selftest() {
  using namespace mmhp;
  bool allOk = true;

  SystemConfig cfg;
  cfg.ntV = 4;
  cfg.ntH = 2;
  cfg.nrV = 2;
  cfg.nrH = 2;
  cfg.ntRF = 2;
  cfg.ns = 2;
  cfg.numSubcarriers = 32;
  cfg.delayTaps = 8;
  cfg.numClusters = 4;
  cfg.raysPerCluster = 5;

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const ChannelRealization channel = generateChannel(cfg, seed);

    double tapEnergy = 0.0;
    for (const CMatrix& tap : channel.taps) {
      tapEnergy += tap.squaredNorm();
    }
    double freqEnergy = 0.0;
    for (const CMatrix& h : channel.freq) {
      freqEnergy += h.squaredNorm();
    }
    const double energyError =
        std::abs(freqEnergy - cfg.numSubcarriers * tapEnergy) / (cfg.numSubcarriers * tapEnergy);
    allOk &= check("channel DFT energy identity (<= 1e-8 relative)", energyError <= 1e-8);

    const FullyDigitalPrecoders fOpt = optimalFullyDigital(channel, cfg.ns);
    const AnalogPrecoder analog = pcaAnalogPrecoder(fOpt, std::nullopt, cfg.ntRF, std::nullopt);
    const std::vector<CMatrix> fBB = basebandPrecoder(channel, analog.fRF, cfg.ns);
    double power = 0.0;
    for (const CMatrix& bb : fBB) {
      power += (analog.fRF * bb).squaredNorm();
    }
    const double target = static_cast<double>(cfg.numSubcarriers) * cfg.ns;
    allOk &= check("hybrid precoder sum power = K*Ns (<= 1e-6 relative)",
                   std::abs(power - target) <= 1e-6 * target);

    const std::vector<RVector> sigma = effectiveSingularValues(channel, analog.fRF, cfg.ns);
    const WaterFilling wf = waterFilling(sigma, cfg.ns);
    double allocated = 0.0;
    for (const RVector& p : wf.allocations) {
      allocated += p.sum();
    }
    allOk &= check("water-filling residual (<= 1e-9 * K*Ns)",
                   std::abs(allocated - target) <= 1e-9 * target);

    const CMatrix rF = correlationMatrix(fOpt);
    const Grouping grouping = sharedAhc(rF, cfg.nt(), cfg.ntRF);
    double stacked = 0.0;
    for (const auto& subset : grouping.subsets) {
      CMatrix block(subset.size(), static_cast<Eigen::Index>(fOpt.fOpt.size()) * cfg.ns);
      for (std::size_t k = 0; k < fOpt.fOpt.size(); ++k) {
        for (std::size_t i = 0; i < subset.size(); ++i) {
          block.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k) * cfg.ns, 1,
                      cfg.ns) = fOpt.fOpt[k].row(subset[i]);
        }
      }
      Eigen::JacobiSVD<CMatrix> svd(block);
      const double top = svd.singularValues()(0);
      stacked += top * top;
    }
    const double viaGram = exactLambdaSum(rF, grouping);
    allOk &= check("grouping objective: Gram route matches stacked route (<= 1e-9 relative)",
                   std::abs(stacked - viaGram) <= 1e-9 * std::max(1.0, std::abs(viaGram)));
  }

  std::printf("%s\n", allOk ? "selftest passed" : "selftest FAILED");
  return allOk ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadband mmWave hybrid precoding simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a Monte-Carlo sweep from a JSON spec");
  std::string specPath;
  std::string outPath;
  std::string format = "csv";
  std::string summaryPath;
  int threads = 1;
  bool timings = false;
  std::vector<std::string> overrides;
  run->add_option("--spec", specPath, "Experiment spec JSON file")->required();
  run->add_option("--out", outPath, "Output path (overrides the spec's outputPath)");
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "Concurrent trials")->check(CLI::PositiveNumber);
  run->add_option("--override", overrides, "Spec override, e.g. config.K=64 (repeatable)");
  run->add_flag("--timings", timings, "Include the wallClockMs column (nondeterministic)");
  run->add_option("--summary-out", summaryPath, "Also write per-scheme mean/stderr summary");

  auto* count = app.add_subcommand("count-partitions", "Exact dynamic-subarray search-space size");
  int nt = 0;
  int nrf = 0;
  count->add_option("--nt", nt, "Number of transmit antennas")->required();
  count->add_option("--nrf", nrf, "Number of RF chains")->required();

  app.add_subcommand("selftest", "Run the built-in numerical identity checks");

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      return runCommand(specPath, outPath, format, threads, overrides, timings, summaryPath);
    }
    if (count->parsed()) {
      std::cout << mmhp::partitionCount(nt, nrf).str() << '\n';
      return 0;
    }
    return selftest();
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}
