// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/metrics.hpp"
#include "mmhp/precoder.hpp"
#include "mmhp/types.hpp"

#include <cstdint>
#include <string>

namespace mmhp {

enum class SchemeKind {
  kFullyDigital,
  kPcaFca,
  kPcaFs,
  kPcaDs,
  kSomp,
  kDftCodebook,
  kEvdFca,
  kEvdFs,
  kGreedyDs,
};

struct SchemeSpec {
  SchemeKind kind = SchemeKind::kFullyDigital;
  std::optional<FsPatternKind> pattern; ///< required for the FS kinds

  std::string name() const;        ///< e.g. "PCA-FS"
  std::string patternName() const; ///< e.g. "vertical"; empty when unused
  ArrayType arrayType() const;
};

/// Parses "FD", "PCA-FCA", "PCA-FS:vertical", "EVD-FS:squared", ... and
/// rejects invalid scheme/pattern combinations.
SchemeSpec parseScheme(const std::string& text);

struct ExperimentSpec {
  SystemConfig config;
  std::vector<SchemeSpec> schemes;
  std::vector<double> snrGridDb{0.0};
  int trials = 1;
  std::uint64_t seed = 1;
  bool runPassive = true;
  bool runActive = false;
  std::string outputPath;
  PowerModel power; ///< component draws; architecture/array set per row
  bool quantizeBeforeBaseband = true;

  void validate() const;
};

/// Builds a spec from a JSON document (see README for the schema; missing
/// config fields fall back to the default simulation setup). `overrides`
/// entries look like "config.K=64" or "trials=10" and are applied on top.
ExperimentSpec parseExperimentSpec(const std::string& jsonText,
                                   const std::vector<std::string>& overrides = {});
ExperimentSpec loadExperimentSpec(const std::string& path,
                                  const std::vector<std::string>& overrides = {});

struct ResultRow {
  std::string scheme;
  std::string pattern;
  double snrDb = 0.0;
  int trialIndex = 0;
  std::string architecture; ///< "passive" or "active"
  double seBitsPerSecHz = 0.0;
  double powerMilliwatts = 0.0;
  double eeBitsPerJoule = 0.0;
  double wallClockMs = 0.0;
};

/// Runs every scheme on the same per-trial channel realization at every
/// SNR point. Trials execute concurrently up to `threads`; rows come back
/// sorted by (scheme, pattern, snr, trial, architecture) so the output
/// never depends on scheduling. The per-trial seed is a splitmix of
/// (spec.seed, trial index).
std::vector<ResultRow> runExperiment(const ExperimentSpec& spec, int threads = 1);

enum class OutputFormat { kCsv, kJson };

/// Renders rows as CSV (header + one line per row, '\n' endings, '.'
/// decimal point) or as a JSON array of objects. Floats use 17 significant
/// digits so values round-trip exactly. Wall-clock timings are only
/// emitted on request; they are the one nondeterministic column.
std::string renderResults(const std::vector<ResultRow>& rows, OutputFormat format,
                          bool includeTimings = false);
void emitResults(const std::vector<ResultRow>& rows, OutputFormat format,
                 const std::string& path, bool includeTimings = false);

struct SummaryRow {
  std::string scheme;
  std::string pattern;
  std::string architecture;
  double snrDb = 0.0;
  int count = 0;
  double seMean = 0.0;
  double seStdErr = 0.0;
  double eeMean = 0.0;
  double eeStdErr = 0.0;
};

/// Mean and standard error of SE and EE per (scheme, pattern, snr,
/// architecture) group, in deterministic key order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string renderSummary(const std::vector<SummaryRow>& rows, OutputFormat format);
void emitSummary(const std::vector<SummaryRow>& rows, OutputFormat format,
                 const std::string& path);

} // namespace mmhp
