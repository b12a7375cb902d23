#pragma once

// Entry points behind the `vinesense` subcommands, usable in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinesense/calibration.hpp"
#include "vinesense/contact_controller.hpp"
#include "vinesense/scenario.hpp"
#include "vinesense/sensitivity_table.hpp"

namespace vinesense {

inline constexpr double kReproduceSlopeTol = 1e-6;
inline constexpr double kReproduceInterceptTol = 1e-6;

struct ReproducedRow {
  SensitivityRow row;
  std::string label;
  std::optional<LinearFit> fit;
  bool pass = false;
};

struct ReproduceResult {
  std::vector<ReproducedRow> rows;
  FactorReport report;
  bool all_pass = false;
};

// Regenerates every table condition with noiseless synthetic trials, fits it
// and checks the fit against the tabulated slope.
ReproduceResult reproduce_table(const SensitivityTable& table);

// "preset,face,disk,pressure[,noise=σ][,seed=n][,trials=n][,subpocket=i][,lengthwise=cm]"
// where disk is small|medium|large.
struct SyntheticSpec {
  PocketPreset preset = PocketPreset::Control;
  RadialFace face = RadialFace::Top;
  Disk disk = kMediumDisk;
  double initial_pressure_kpa = 0.4;
  double noise_sigma_kpa = 0.0;
  std::uint64_t seed = 1;
  int trials = kTrialsPerScenario;
  std::optional<int> subpocket_index;
  std::optional<double> lengthwise_cm;
  std::string label;
};

SyntheticSpec parse_synthetic(std::string_view spec, std::uint64_t default_seed);
std::vector<CalibrationSample> generate(const SyntheticSpec& spec,
                                        const SensitivityTable& table = SensitivityTable::builtin());

// Groups samples that share pocket and contact factors, in first-seen order.
SampleGroups group_samples(std::span<const CalibrationSample> samples);

struct DemoOptions {
  double speed = 1.0;
  std::optional<std::uint64_t> seed;
};

struct DemoResult {
  std::uint64_t ticks = 0;
  std::vector<Mode> sequence;
  double wall_s = 0.0;
};

// Runs a scenario headless, writing one snapshot record per tick to `trace`
// and, when given, one line per state change to `progress`.
DemoResult run_demo(Scenario scenario, const DemoOptions& options, std::ostream* trace, std::ostream* progress);

// Extracts the "state" field of a snapshot record.
std::optional<Mode> record_state(std::string_view record);

}  // namespace vinesense
