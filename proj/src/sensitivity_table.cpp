#include "vinesense/sensitivity_table.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "vinesense/error.hpp"

namespace vinesense {

namespace {

constexpr double kMatchTol = 1e-9;

const char* kHeader =
    "config_preset,radial_face,lengthwise_cm,contact_area_cm2,initial_pressure_kPa,subpocket_index,"
    "slope_kpa_per_n,source_figure";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

bool same(double a, double b) { return std::abs(a - b) <= kMatchTol; }

std::vector<SensitivityRow> measured_rows() {
  using P = PocketPreset;
  using F = RadialFace;
  auto row = [](P p, F f, std::optional<double> len, double area, double pressure, std::optional<int> sub,
                double slope, const char* fig) {
    return SensitivityRow{p, f, len, area, pressure, sub, slope, fig};
  };
  return {
      row(P::Control, F::Top, {}, 12.5, 0.4, {}, 0.31, "lengthwise"),
      row(P::Control, F::Top, 7.0, 12.5, 0.4, {}, 0.31, "lengthwise"),
      row(P::Control, F::Top, 13.0, 12.5, 0.4, {}, 0.31, "lengthwise"),
      row(P::Control, F::Top, 19.0, 12.5, 0.4, {}, 0.31, "lengthwise"),
      row(P::Control, F::Side, {}, 12.5, 0.4, {}, 0.51, "face"),
      row(P::Sealed, F::Top, {}, 12.5, 0.4, 1, 0.38, "subpocket"),
      row(P::Sealed, F::Top, {}, 12.5, 0.4, 2, 0.39, "subpocket"),
      row(P::Control, F::Top, {}, 6.9, 0.4, {}, 0.34, "area"),
      row(P::Control, F::Top, {}, 25.0, 0.4, {}, 0.30, "area"),
      row(P::Sealed, F::Top, {}, 6.9, 0.4, 1, 0.41, "sealed_area"),
      row(P::Sealed, F::Top, {}, 25.0, 0.4, 1, 0.34, "sealed_area"),
      row(P::Control, F::Top, {}, 12.5, 0.7, {}, 0.28, "pressure"),
      row(P::Control, F::Top, {}, 12.5, 1.0, {}, 0.24, "pressure"),
      row(P::Thin, F::Top, {}, 12.5, 0.4, {}, 0.32, "thickness"),
      row(P::Small, F::Top, {}, 12.5, 0.4, {}, 0.42, "size"),
  };
}

}  // namespace

SensitivityTable::SensitivityTable(std::vector<SensitivityRow> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (!(r.slope_kpa_per_n > 0.0))
      throw Error(ErrorCode::InvalidArgument, "sensitivity table slopes must be positive");
  }
}

const SensitivityTable& SensitivityTable::builtin() {
  static const SensitivityTable table(measured_rows());
  return table;
}

SensitivityTable SensitivityTable::load(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool version_seen = false;
  bool header_seen = false;
  std::vector<SensitivityRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# vinesense-sensitivity-table v";
      if (line.rfind(tag, 0) == 0) {
        int version = static_cast<int>(to_double(line.substr(tag.size()), line_no));
        if (version != kFormatVersion)
          throw Error(ErrorCode::UnsupportedConfig, "unsupported table version " + std::to_string(version));
        version_seen = true;
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) throw Error(ErrorCode::MissingColumn, "unexpected table header: " + line);
      header_seen = true;
      continue;
    }
    auto cells = split(line);
    if (cells.size() != 8)
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected 8 columns");
    SensitivityRow r;
    auto preset = parse_preset(cells[0]);
    auto face = parse_face(cells[1]);
    if (!preset || !face)
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": unknown preset or face");
    r.preset = *preset;
    r.face = *face;
    if (!cells[2].empty()) r.lengthwise_cm = to_double(cells[2], line_no);
    r.contact_area_cm2 = to_double(cells[3], line_no);
    r.initial_pressure_kpa = to_double(cells[4], line_no);
    if (!cells[5].empty()) r.subpocket_index = static_cast<int>(to_double(cells[5], line_no));
    r.slope_kpa_per_n = to_double(cells[6], line_no);
    r.source_figure = cells[7];
    rows.push_back(std::move(r));
  }
  if (!version_seen) throw Error(ErrorCode::MissingColumn, "missing table version line");
  if (!header_seen) throw Error(ErrorCode::MissingColumn, "missing table header");
  return SensitivityTable(std::move(rows));
}

void SensitivityTable::save(std::ostream& out) const {
  out << "# vinesense-sensitivity-table v" << kFormatVersion << '\n' << kHeader << '\n';
  for (const auto& r : rows_) {
    out << to_string(r.preset) << ',' << to_string(r.face) << ',';
    if (r.lengthwise_cm) out << *r.lengthwise_cm;
    out << ',' << r.contact_area_cm2 << ',' << r.initial_pressure_kpa << ',';
    if (r.subpocket_index) out << *r.subpocket_index;
    out << ',' << r.slope_kpa_per_n << ',' << r.source_figure << '\n';
  }
}

const SensitivityRow* SensitivityTable::find(PocketPreset preset, RadialFace face, double area_cm2,
                                             double pressure_kpa, std::optional<int> subpocket) const {
  for (const auto& r : rows_) {
    if (r.preset == preset && r.face == face && same(r.contact_area_cm2, area_cm2) &&
        same(r.initial_pressure_kpa, pressure_kpa) && r.subpocket_index == subpocket)
      return &r;
  }
  return nullptr;
}

}  // namespace vinesense
