// SPDX-License-Identifier: Apache-2.0
#include "mmhp/baselines.hpp"
#include "mmhp/channel.hpp"
#include "mmhp/grouping.hpp"
#include "mmhp/harness.hpp"
#include "mmhp/linalg.hpp"
#include "mmhp/metrics.hpp"
#include "mmhp/precoder.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mmhp;

namespace {

Grouping groupingFromLists(const std::vector<std::vector<int>>& subsets) {
  Grouping g;
  g.subsets = subsets;
  g.canonicalize();
  return g;
}

std::optional<Grouping> optionalGrouping(const std::optional<std::vector<std::vector<int>>>& subsets) {
  if (!subsets) {
    return std::nullopt;
  }
  return groupingFromLists(*subsets);
}

FsPatternKind patternFromName(const std::string& name) {
  if (name == "vertical") {
    return FsPatternKind::kVertical;
  }
  if (name == "horizontal") {
    return FsPatternKind::kHorizontal;
  }
  if (name == "squared") {
    return FsPatternKind::kSquared;
  }
  if (name == "interlaced") {
    return FsPatternKind::kInterlaced;
  }
  throw std::invalid_argument("unknown pattern '" + name + "'");
}

PowerModel powerModelFrom(const std::string& architecture, const std::string& array,
                          double ps, double dac, double mixer, double lo, double pa) {
  PowerModel model;
  model.psMw = ps;
  model.dacMw = dac;
  model.mixerMw = mixer;
  model.loMw = lo;
  model.paMw = pa;
  if (architecture == "passive") {
    model.architecture = AntennaArchitecture::kPassive;
  } else if (architecture == "active") {
    model.architecture = AntennaArchitecture::kActive;
  } else {
    throw std::invalid_argument("architecture must be 'passive' or 'active'");
  }
  if (array == "FCA") {
    model.array = ArrayType::kFullyConnected;
  } else if (array == "PCS") {
    model.array = ArrayType::kPartiallyConnected;
  } else if (array == "FD") {
    model.array = ArrayType::kFullyDigital;
  } else {
    throw std::invalid_argument("array must be 'FCA', 'PCS' or 'FD'");
  }
  return model;
}

py::dict rowToDict(const ResultRow& row) {
  py::dict d;
  d["scheme"] = row.scheme;
  d["pattern"] = row.pattern;
  d["snrDb"] = row.snrDb;
  d["trialIndex"] = row.trialIndex;
  d["architecture"] = row.architecture;
  d["seBitsPerSecHz"] = row.seBitsPerSecHz;
  d["powerMilliwatts"] = row.powerMilliwatts;
  d["eeBitsPerJoule"] = row.eeBitsPerJoule;
  d["wallClockMs"] = row.wallClockMs;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Broadband mmWave MIMO-OFDM hybrid precoding simulator";

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("ntV", &SystemConfig::ntV)
      .def_readwrite("ntH", &SystemConfig::ntH)
      .def_readwrite("nrV", &SystemConfig::nrV)
      .def_readwrite("nrH", &SystemConfig::nrH)
      .def_readwrite("ntRF", &SystemConfig::ntRF)
      .def_readwrite("ns", &SystemConfig::ns)
      .def_readwrite("K", &SystemConfig::numSubcarriers)
      .def_readwrite("D", &SystemConfig::delayTaps)
      .def_readwrite("bandwidthHz", &SystemConfig::bandwidthHz)
      .def_readwrite("nCl", &SystemConfig::numClusters)
      .def_readwrite("nRay", &SystemConfig::raysPerCluster)
      .def_readwrite("angleSpreadRad", &SystemConfig::angleSpreadRad)
      .def_readwrite("dvOverLambda", &SystemConfig::dvOverLambda)
      .def_readwrite("dhOverLambda", &SystemConfig::dhOverLambda)
      .def_readwrite("noiseVariance", &SystemConfig::noiseVariance)
      .def_readwrite("quantBits", &SystemConfig::quantBits)
      .def_readwrite("delayPerCluster", &SystemConfig::delayPerCluster)
      .def_property_readonly("nt", &SystemConfig::nt)
      .def_property_readonly("nr", &SystemConfig::nr)
      .def("validate", &SystemConfig::validate);

  py::class_<RayParameters>(m, "RayParameters")
      .def_readonly("clusterIndex", &RayParameters::clusterIndex)
      .def_readonly("rayIndex", &RayParameters::rayIndex)
      .def_readonly("gain", &RayParameters::gain)
      .def_readonly("delaySeconds", &RayParameters::delaySeconds)
      .def_readonly("aodAzimuth", &RayParameters::aodAzimuth)
      .def_readonly("aodElevation", &RayParameters::aodElevation)
      .def_readonly("aoaAzimuth", &RayParameters::aoaAzimuth)
      .def_readonly("aoaElevation", &RayParameters::aoaElevation);

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def_readonly("taps", &ChannelRealization::taps)
      .def_readonly("freq", &ChannelRealization::freq)
      .def_readonly("rays", &ChannelRealization::rays);

  py::class_<FullyDigitalPrecoders>(m, "FullyDigitalPrecoders")
      .def_readonly("fOpt", &FullyDigitalPrecoders::fOpt)
      .def_readonly("sigma", &FullyDigitalPrecoders::sigma);

  m.def("steering_vector", &steeringVector, py::arg("azimuth"), py::arg("elevation"),
        py::arg("nV"), py::arg("nH"), py::arg("dvOverLambda") = 0.5,
        py::arg("dhOverLambda") = 0.5);

  m.def("sample_rays", &sampleRays, py::arg("config"), py::arg("seed"));
  m.def("generate_channel", &generateChannel, py::arg("config"), py::arg("seed"));
  m.def(
      "channel_from_freq",
      [](const std::vector<CMatrix>& freq) {
        ChannelRealization channel;
        channel.freq = freq;
        return channel;
      },
      py::arg("freq"), "Wrap per-subcarrier matrices as a channel realization");
  m.def("save_channel", &saveChannel, py::arg("channel"), py::arg("path"));
  m.def("load_channel", &loadChannel, py::arg("path"));

  m.def("optimal_fully_digital", &optimalFullyDigital, py::arg("channel"), py::arg("ns"));
  m.def(
      "pca_subarray_vector",
      [](const FullyDigitalPrecoders& fOpt, const std::vector<int>& subset) {
        return pcaSubarrayVector(fOpt, subset);
      },
      py::arg("fOpt"), py::arg("subset"));
  m.def("project_constant_modulus", &projectConstantModulus, py::arg("u"), py::arg("nSub"));
  m.def(
      "quantize_phases",
      [](const CMatrix& fRF, std::optional<int> bits) { return quantizePhases(fRF, bits); },
      py::arg("fRF"), py::arg("bits"));
  m.def(
      "fs_pattern",
      [](const std::string& kind, int ntV, int ntH, int ntRF) {
        return fsPattern(patternFromName(kind), ntV, ntH, ntRF).subsets;
      },
      py::arg("kind"), py::arg("ntV"), py::arg("ntH"), py::arg("ntRF"));
  m.def(
      "pca_analog_precoder",
      [](const FullyDigitalPrecoders& fOpt,
         const std::optional<std::vector<std::vector<int>>>& grouping, int ntRF,
         std::optional<int> quantBits) {
        const AnalogPrecoder analog =
            pcaAnalogPrecoder(fOpt, optionalGrouping(grouping), ntRF, quantBits);
        return py::make_tuple(analog.fRF, analog.mask.cast<bool>().matrix());
      },
      py::arg("fOpt"), py::arg("grouping") = std::nullopt, py::arg("ntRF") = 1,
      py::arg("quantBits") = std::nullopt);
  m.def(
      "water_filling",
      [](const std::vector<RVector>& sigma, int ns) {
        const WaterFilling wf = waterFilling(sigma, ns);
        return py::make_tuple(wf.mu, wf.allocations);
      },
      py::arg("sigmaTilde"), py::arg("ns"));
  m.def(
      "baseband_precoder",
      [](const ChannelRealization& channel, const CMatrix& fRF, int ns, bool unitaryPower) {
        return basebandPrecoder(channel, fRF, ns, BasebandOptions{unitaryPower});
      },
      py::arg("channel"), py::arg("fRF"), py::arg("ns"), py::arg("unitaryPower") = false);
  m.def("effective_singular_values", &effectiveSingularValues, py::arg("channel"),
        py::arg("fRF"), py::arg("ns"));

  m.def("correlation_matrix", &correlationMatrix, py::arg("fOpt"));
  m.def("minkowski_lambda_estimate", &minkowskiLambdaEstimate, py::arg("rF"), py::arg("subset"));
  m.def("mutual_correlation", &mutualCorrelation, py::arg("rF"), py::arg("setA"),
        py::arg("setB"));
  m.def(
      "exact_lambda_sum",
      [](const CMatrix& rF, const std::vector<std::vector<int>>& grouping) {
        return exactLambdaSum(rF, groupingFromLists(grouping));
      },
      py::arg("rF"), py::arg("grouping"));
  m.def(
      "shared_ahc",
      [](const CMatrix& rF, int nt, int ntRF) { return sharedAhc(rF, nt, ntRF).subsets; },
      py::arg("rF"), py::arg("nt"), py::arg("ntRF"));
  m.def(
      "greedy_grouping",
      [](const CMatrix& rF, int nt, int ntRF) { return greedyGrouping(rF, nt, ntRF).subsets; },
      py::arg("rF"), py::arg("nt"), py::arg("ntRF"));
  m.def(
      "exhaustive_grouping",
      [](const CMatrix& rF, int nt, int ntRF, const std::string& objective,
         std::uint64_t budget) {
        const GroupingObjective obj = objective == "minkowski"
                                          ? GroupingObjective::kMinkowski
                                          : GroupingObjective::kExactLambdaSum;
        const ExhaustiveResult result = exhaustiveGrouping(rF, nt, ntRF, obj, budget);
        return py::make_tuple(result.grouping.subsets, result.objective, result.enumerated);
      },
      py::arg("rF"), py::arg("nt"), py::arg("ntRF"), py::arg("objective") = "exact",
      py::arg("budget") = 1000000ULL);
  m.def(
      "partition_count",
      [](int nt, int ntRF) {
        const std::string digits = partitionCount(nt, ntRF).str();
        PyObject* value = PyLong_FromString(digits.c_str(), nullptr, 10);
        if (value == nullptr) {
          throw py::error_already_set();
        }
        return py::reinterpret_steal<py::int_>(value);
      },
      py::arg("nt"), py::arg("ntRF"));
  m.def("grouping_to_json",
        [](const std::vector<std::vector<int>>& grouping) {
          return groupingToJson(groupingFromLists(grouping));
        });
  m.def("grouping_from_json",
        [](const std::string& text) { return groupingFromJson(text).subsets; });

  m.def(
      "make_steering_dictionary",
      [](int ntV, int ntH, double dv, double dh, int gridAz, int gridEl) {
        const SteeringDictionary dict = makeSteeringDictionary(ntV, ntH, dv, dh, gridAz, gridEl);
        return py::make_tuple(dict.atoms, dict.angles);
      },
      py::arg("ntV"), py::arg("ntH"), py::arg("dvOverLambda") = 0.5,
      py::arg("dhOverLambda") = 0.5, py::arg("gridAz") = 0, py::arg("gridEl") = 0);
  m.def(
      "somp_precoder",
      [](const FullyDigitalPrecoders& fOpt, const CMatrix& atoms, int ntRF) {
        SteeringDictionary dict;
        dict.atoms = atoms;
        return sompPrecoder(fOpt, dict, ntRF);
      },
      py::arg("fOpt"), py::arg("atoms"), py::arg("ntRF"));
  m.def("dft_codebook", &dftCodebook, py::arg("ntV"), py::arg("ntH"));
  m.def("dft_codebook_precoder", &dftCodebookPrecoder, py::arg("fOpt"), py::arg("ntV"),
        py::arg("ntH"), py::arg("ntRF"));
  m.def("average_covariance", &averageCovariance, py::arg("channel"));
  m.def(
      "covariance_evd_precoder",
      [](const ChannelRealization& channel,
         const std::optional<std::vector<std::vector<int>>>& grouping, int ntRF) {
        const AnalogPrecoder analog =
            covarianceEvdPrecoder(channel, optionalGrouping(grouping), ntRF);
        return py::make_tuple(analog.fRF, analog.mask.cast<bool>().matrix());
      },
      py::arg("channel"), py::arg("grouping") = std::nullopt, py::arg("ntRF") = 1);

  m.def("spectral_efficiency", &spectralEfficiency, py::arg("channel"), py::arg("fRF"),
        py::arg("fBB"), py::arg("noiseVariance"));
  m.def("spectral_efficiency_digital", &spectralEfficiencyDigital, py::arg("channel"),
        py::arg("precoders"), py::arg("noiseVariance"));
  m.def(
      "power_consumption",
      [](int nt, int ntRF, const std::string& architecture, const std::string& array, double ps,
         double dac, double mixer, double lo, double pa) {
        return powerConsumption(powerModelFrom(architecture, array, ps, dac, mixer, lo, pa), nt,
                                ntRF);
      },
      py::arg("nt"), py::arg("ntRF"), py::arg("architecture") = "passive",
      py::arg("array") = "PCS", py::arg("pPS") = 30.0, py::arg("pDAC") = 200.0,
      py::arg("pMix") = 39.0, py::arg("pLO") = 5.0, py::arg("pPA") = 138.0);
  m.def("energy_efficiency", &energyEfficiency, py::arg("seBitsPerSecHz"),
        py::arg("bandwidthHz"), py::arg("powerMilliwatts"));

  m.def(
      "run_experiment",
      [](const std::string& specJson, int threads, const std::vector<std::string>& overrides) {
        const ExperimentSpec spec = parseExperimentSpec(specJson, overrides);
        const auto rows = runExperiment(spec, threads);
        py::list out;
        for (const auto& row : rows) {
          out.append(rowToDict(row));
        }
        return out;
      },
      py::arg("specJson"), py::arg("threads") = 1,
      py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "render_results_csv",
      [](const std::string& specJson, int threads) {
        const ExperimentSpec spec = parseExperimentSpec(specJson);
        return renderResults(runExperiment(spec, threads), OutputFormat::kCsv);
      },
      py::arg("specJson"), py::arg("threads") = 1);

  m.attr("__version__") = "0.1.0";
}
