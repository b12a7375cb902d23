#pragma once

// Least-squares calibration of pocket sensitivity from force / pressure
// trials, plus a synthetic trial generator that re-enacts the weighing
// procedure through the pocket model.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vinesense/error.hpp"
#include "vinesense/pocket_model.hpp"
#include "vinesense/sensitivity_table.hpp"

namespace vinesense {

struct Disk {
  std::string_view name;
  double area_cm2;
  double mass_g;
};

inline constexpr Disk kSmallDisk{"small", 6.9, 4.36};
inline constexpr Disk kMediumDisk{"medium", 12.5, 8.75};
inline constexpr Disk kLargeDisk{"large", 25.0, 17.6};
inline constexpr std::array<Disk, 3> kDisks{kSmallDisk, kMediumDisk, kLargeDisk};

inline constexpr std::array<double, 3> kTrialMasses_g{150.0, 300.0, 450.0};
inline constexpr int kTrialsPerScenario = 3;

// Disk whose contact area equals area_cm2, if any.
std::optional<Disk> disk_for_area(double area_cm2);

// Total weight of a mass on a disk, in newtons.
inline double weight_n(double mass_g, double disk_mass_g) { return (mass_g + disk_mass_g) * 1e-3 * kGravity; }

struct TrialFactors {
  RadialFace face = RadialFace::Top;
  std::optional<double> lengthwise_cm;
  double contact_area_cm2 = 12.5;
  double initial_pressure_kpa = 0.4;
  std::optional<int> subpocket_index;
};

struct CalibrationSample {
  std::string pocket_id;
  int trial = 1;
  double applied_force_n = 0.0;  // added mass plus disk
  double delta_pressure_kpa = 0.0;
  TrialFactors factors;
};

struct LinearFit {
  double slope = 0.0;      // kPa/N
  double intercept = 0.0;  // kPa
  double r_squared = 0.0;
  std::size_t n_samples = 0;
};

/// Ordinary least squares of y on x with a free intercept.
///
/// r_squared is 1 when y has no variance (the line reproduces it exactly).
/// Throws Error(DegenerateData) for fewer than two points or when all x are
/// equal.
template <typename DerivedX, typename DerivedY>
LinearFit fit_line(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const auto n = x.size();
  if (n != y.size()) throw Error(ErrorCode::InvalidArgument, "x and y differ in length");
  if (n < 2) throw Error(ErrorCode::DegenerateData, "need at least two samples");
  if (x.maxCoeff() == x.minCoeff()) throw Error(ErrorCode::DegenerateData, "all forces are equal");

  const Scalar x_mean = x.mean();
  const Scalar y_mean = y.mean();
  const auto xc = (x.array() - x_mean).eval();
  const auto yc = (y.array() - y_mean).eval();
  const Scalar sxx = xc.square().sum();
  const Scalar slope = (xc * yc).sum() / sxx;
  const Scalar intercept = y_mean - slope * x_mean;
  const Scalar ss_res = ((y.array() - intercept) - slope * x.array()).square().sum();
  const Scalar ss_tot = yc.square().sum();
  Scalar r2 = ss_tot > Scalar(0) ? Scalar(1) - ss_res / ss_tot : Scalar(1);
  r2 = std::clamp(r2, Scalar(0), Scalar(1));
  return {static_cast<double>(slope), static_cast<double>(intercept), static_cast<double>(r2),
          static_cast<std::size_t>(n)};
}

LinearFit fit_line(std::span<const CalibrationSample> samples);

// Synthetic re-enactment of the weighing procedure: every mass is placed on
// the disk `trials` times and the settled pressure change is read through
// Gaussian noise. Deterministic for a fixed seed.
std::vector<CalibrationSample> generate_trials(const PocketConfig& config, const ContactSpec& contact,
                                               std::span<const double> masses_g, double disk_mass_g,
                                               int trials, double noise_sigma_kpa, std::uint64_t seed,
                                               std::string pocket_id = {},
                                               const SensitivityTable& table = SensitivityTable::builtin());

using SampleGroups = std::vector<std::pair<std::string, std::vector<CalibrationSample>>>;

struct GroupResult {
  std::string label;
  std::optional<LinearFit> fit;
  std::optional<ErrorCode> error;
  std::string detail;
  std::vector<CalibrationSample> samples;
};

struct SlopeRatio {
  std::string numerator;
  std::string denominator;
  double ratio = 0.0;
};

struct FactorReport {
  std::vector<GroupResult> groups;
  std::vector<SlopeRatio> ratios;  // later group over earlier group, every fitted pair

  // One JSON record per line: group rows {group, slope, intercept, r2, n},
  // failed groups {group, error, detail}, then ratios.
  void write_records(std::ostream& out) const;
  // CSV sidecar: series,kind,force_n,delta_pressure_kpa (kind is point|fit).
  void write_plot_data(std::ostream& out) const;
};

FactorReport factor_report(const SampleGroups& groups);

struct RowError {
  int line = 0;
  ErrorCode code = ErrorCode::MalformedRow;
  std::string message;
};

struct IngestResult {
  std::vector<CalibrationSample> samples;
  std::vector<RowError> errors;
};

// Column names of the calibration CSV, in canonical order.
inline constexpr std::array<std::string_view, 9> kCsvColumns{
    "pocket_id",        "trial",          "radial_face", "lengthwise_cm",     "contact_area_cm2",
    "initial_pressure_kpa", "subpocket_index", "force_n",     "delta_pressure_kpa"};

// Reads the calibration CSV. A missing header or column throws
// Error(MissingColumn); bad rows are skipped and reported with their line.
IngestResult ingest_csv(std::istream& in);
void write_csv(std::ostream& out, std::span<const CalibrationSample> samples);

}  // namespace vinesense
