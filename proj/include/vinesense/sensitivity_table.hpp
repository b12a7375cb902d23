#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vinesense/pocket_model.hpp"

namespace vinesense {

// One measured condition and its best-fit slope.
struct SensitivityRow {
  PocketPreset preset = PocketPreset::Control;
  RadialFace face = RadialFace::Top;
  std::optional<double> lengthwise_cm;  // empty: middle of the pocket
  double contact_area_cm2 = 12.5;
  double initial_pressure_kpa = 0.4;
  std::optional<int> subpocket_index;
  double slope_kpa_per_n = 0.0;
  std::string source_figure;  // measurement series the row belongs to
};

// Versioned table of measured sensitivities. The on-disk form is CSV with a
// leading "# vinesense-sensitivity-table v<N>" line and the columns
//   config_preset,radial_face,lengthwise_cm,contact_area_cm2,
//   initial_pressure_kPa,subpocket_index,slope_kpa_per_n,source_figure
class SensitivityTable {
 public:
  static constexpr int kFormatVersion = 1;

  SensitivityTable() = default;
  explicit SensitivityTable(std::vector<SensitivityRow> rows);

  // The measured table compiled into the library.
  static const SensitivityTable& builtin();

  static SensitivityTable load(std::istream& in);
  void save(std::ostream& out) const;

  const std::vector<SensitivityRow>& rows() const { return rows_; }

  // First row whose condition equals the query (lengthwise position ignored).
  const SensitivityRow* find(PocketPreset preset, RadialFace face, double area_cm2, double pressure_kpa,
                             std::optional<int> subpocket) const;

  // Default contact location on a sealed pocket: the second sub-pocket.
  static constexpr int kDefaultSealedSubpocket = 1;
  static constexpr double kDefaultArea = 12.5;
  static constexpr double kDefaultPressure = 0.4;

 private:
  std::vector<SensitivityRow> rows_;
};

}  // namespace vinesense
