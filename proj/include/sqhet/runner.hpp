#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sqhet/analytic.hpp"
#include "sqhet/config.hpp"
#include "sqhet/interferometer.hpp"
#include "sqhet/parallel.hpp"
#include "sqhet/spectrum.hpp"

namespace sqhet {

/// The three acquisitions of one spectrum experiment. The value is the run
/// id used to derive RNG substreams.
enum class RunRole : std::uint32_t { background = 0, reference = 1, target = 2 };

std::string to_string(RunRole r);

struct BandResult {
    std::string name;
    BandSpec band;
    Reduction measured;
    NoiseBudget budget;
    double prediction_db = 0.0;  ///< NaN when no closed form applies
};

struct RunSummary {
    std::string name;
    ExperimentKind kind = ExperimentKind::spectrum;
    std::vector<BandResult> bands;
    std::size_t frames = 0;
    double wall_time_s = 0.0;
    std::string config_hash;
    std::uint64_t seed = 0;
    /// Experiment-specific scalars, in output order.
    std::vector<std::pair<std::string, double>> metrics;
};

/// A delimited text output: commented header lines, a column line, rows.
struct OutputTable {
    std::string file;
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunResult {
    RunSummary summary;
    std::vector<std::pair<std::string, SpectrumEstimate>> spectra;
    std::vector<OutputTable> tables;
};

struct RunOptions {
    std::size_t workers = default_workers();
};

/// Optical setup of one acquisition. Background runs carry no light.
InterferometerSetup build_setup(const ExperimentConfig& c, RunRole role);

/// Closed-form floor for a band of the analyzed spectrum `axis`, averaged
/// over the same bins (weighted by the detector gain) as the measurement.
NoiseBudget band_budget(const ExperimentConfig& c, const SpectrumEstimate& axis, const BandSpec& band);

/// Runs the experiment in memory. Results are independent of the worker
/// count. Throws ConfigError / DegenerateSubtraction.
RunResult run_experiment(const ExperimentConfig& c, const RunOptions& options = {});

/// key=value text, one entry per line. Wall time is not included so that
/// reruns are byte-identical.
std::string format_summary(const RunSummary& s);

std::string format_table(const OutputTable& t);

/// Writes config.json, every table and summary.txt into `dir`.
void write_outputs(const RunResult& result, const ExperimentConfig& c, const std::string& dir);

}  // namespace sqhet
