#include "vinesense/pocket_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vinesense/error.hpp"
#include "vinesense/sensitivity_table.hpp"

namespace vinesense {

namespace {

constexpr double kGeomTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kGeomTol; }

struct CurvePoint {
  double x;
  double slope;
};

// Slope curve of one preset along one continuous factor, all other factors
// at their defaults. Empty when the table holds fewer than two points.
enum class Axis { Area, Pressure };

std::optional<int> default_subpocket(PocketPreset preset) {
  if (preset == PocketPreset::Sealed) return SensitivityTable::kDefaultSealedSubpocket;
  return std::nullopt;
}

std::vector<CurvePoint> curve(const SensitivityTable& table, PocketPreset preset, Axis axis) {
  std::vector<CurvePoint> pts;
  const auto sub = default_subpocket(preset);
  for (const auto& r : table.rows()) {
    if (r.preset != preset || r.face != RadialFace::Top || r.subpocket_index != sub) continue;
    double x = 0.0;
    if (axis == Axis::Area) {
      if (!near(r.initial_pressure_kpa, SensitivityTable::kDefaultPressure)) continue;
      x = r.contact_area_cm2;
    } else {
      if (!near(r.contact_area_cm2, SensitivityTable::kDefaultArea)) continue;
      x = r.initial_pressure_kpa;
    }
    bool dup = std::any_of(pts.begin(), pts.end(), [&](const CurvePoint& p) { return near(p.x, x); });
    if (!dup) pts.push_back({x, r.slope_kpa_per_n});
  }
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
  if (pts.size() < 2) pts.clear();
  return pts;
}

std::optional<double> interpolate(const std::vector<CurvePoint>& pts, double x) {
  if (pts.empty()) return std::nullopt;
  if (x < pts.front().x - kGeomTol || x > pts.back().x + kGeomTol) return std::nullopt;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[i + 1];
    if (x <= b.x + kGeomTol) {
      if (near(x, a.x)) return a.slope;
      if (near(x, b.x)) return b.slope;
      const double w = (x - a.x) / (b.x - a.x);
      return a.slope + w * (b.slope - a.slope);
    }
  }
  return pts.back().slope;
}

// Multiplicative effect of moving one continuous factor away from its
// default, using the preset's own curve when tabulated and the control
// pocket's otherwise.
double axis_ratio(const SensitivityTable& table, PocketPreset preset, Axis axis, double x) {
  const double x0 = axis == Axis::Area ? SensitivityTable::kDefaultArea : SensitivityTable::kDefaultPressure;
  if (near(x, x0)) return 1.0;
  auto pts = curve(table, preset, axis);
  if (pts.empty()) pts = curve(table, PocketPreset::Control, axis);
  auto v = interpolate(pts, x);
  auto v0 = interpolate(pts, x0);
  const char* what = axis == Axis::Area ? "contact area" : "initial pressure";
  if (!v || !v0) throw Error(ErrorCode::UnsupportedConfig, std::string(what) + " outside the tabulated range");
  return *v / *v0;
}

}  // namespace

std::string_view to_string(PocketPreset preset) {
  switch (preset) {
    case PocketPreset::Control: return "control";
    case PocketPreset::Small: return "small";
    case PocketPreset::Thin: return "thin";
    case PocketPreset::Sealed: return "sealed";
  }
  return "control";
}

std::optional<PocketPreset> parse_preset(std::string_view name) {
  for (auto p : {PocketPreset::Control, PocketPreset::Small, PocketPreset::Thin, PocketPreset::Sealed})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

std::string_view to_string(RadialFace face) { return face == RadialFace::Top ? "top" : "side"; }

std::optional<RadialFace> parse_face(std::string_view name) {
  if (name == "top") return RadialFace::Top;
  if (name == "side") return RadialFace::Side;
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::PaperTable: return "table";
    case Provenance::Fitted: return "fitted";
    case Provenance::Interpolated: return "interpolated";
  }
  return "table";
}

PocketConfig PocketConfig::control() { return PocketConfig{}; }

PocketConfig PocketConfig::small() {
  PocketConfig c;
  c.pre_inflated_length_cm = 15.0;
  return c;
}

PocketConfig PocketConfig::thin() {
  PocketConfig c;
  c.membrane_thickness_mm = 0.05;
  return c;
}

PocketConfig PocketConfig::sealed() {
  PocketConfig c;
  c.interior_seal_count = 3;
  c.subpocket_lengths_cm = {8.0, 5.75, 5.75, 8.0};
  return c;
}

PocketConfig PocketConfig::preset(PocketPreset p) {
  switch (p) {
    case PocketPreset::Control: return control();
    case PocketPreset::Small: return small();
    case PocketPreset::Thin: return thin();
    case PocketPreset::Sealed: return sealed();
  }
  return control();
}

void PocketConfig::validate() const {
  if (!(membrane_thickness_mm > 0.0) || !(pre_inflated_length_cm > 0.0) || !(lay_flat_diameter_cm > 0.0))
    throw Error(ErrorCode::InvalidArgument, "pocket lengths must be positive");
  if (!(initial_pressure_kpa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "initial pressure must be >= 0");
  if (interior_seal_count < 0) throw Error(ErrorCode::InvalidArgument, "negative seal count");
  if (interior_seal_count == 0) {
    if (!subpocket_lengths_cm.empty())
      throw Error(ErrorCode::InvalidArgument, "subpocket lengths given for an unsealed pocket");
    return;
  }
  if (static_cast<int>(subpocket_lengths_cm.size()) != interior_seal_count + 1)
    throw Error(ErrorCode::InvalidArgument, "need seal_count + 1 subpocket lengths");
  for (double l : subpocket_lengths_cm)
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "subpocket lengths must be positive");
  const double total = std::accumulate(subpocket_lengths_cm.begin(), subpocket_lengths_cm.end(), 0.0);
  if (total > pre_inflated_length_cm + kGeomTol)
    throw Error(ErrorCode::InvalidArgument, "subpockets exceed the pocket length");
}

std::optional<PocketPreset> identify_preset(const PocketConfig& config) {
  for (auto p : {PocketPreset::Control, PocketPreset::Small, PocketPreset::Thin, PocketPreset::Sealed}) {
    const auto ref = PocketConfig::preset(p);
    if (!near(ref.membrane_thickness_mm, config.membrane_thickness_mm)) continue;
    if (!near(ref.pre_inflated_length_cm, config.pre_inflated_length_cm)) continue;
    if (!near(ref.lay_flat_diameter_cm, config.lay_flat_diameter_cm)) continue;
    if (ref.interior_seal_count != config.interior_seal_count) continue;
    if (!std::equal(ref.subpocket_lengths_cm.begin(), ref.subpocket_lengths_cm.end(),
                    config.subpocket_lengths_cm.begin(), config.subpocket_lengths_cm.end(), near))
      continue;
    return p;
  }
  return std::nullopt;
}

void ContactSpec::validate(const PocketConfig& config) const {
  if (!(lengthwise_fraction >= 0.0 && lengthwise_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "lengthwise fraction must lie in [0, 1]");
  if (!(contact_area_cm2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "contact area must be positive");
  if (subpocket_index && (*subpocket_index < 0 || *subpocket_index >= config.subpocket_count()))
    throw Error(ErrorCode::InvalidArgument, "subpocket index out of range");
}

Sensitivity sensitivity_for(const PocketConfig& config, const ContactSpec& contact) {
  return sensitivity_for(config, contact, SensitivityTable::builtin());
}

Sensitivity sensitivity_for(const PocketConfig& config, const ContactSpec& contact,
                            const SensitivityTable& table) {
  config.validate();
  contact.validate(config);
  const auto preset = identify_preset(config);
  if (!preset) throw Error(ErrorCode::UnsupportedConfig, "pocket geometry matches no preset");

  std::optional<int> sub = contact.subpocket_index;
  if (config.interior_seal_count == 0)
    sub.reset();
  else if (!sub)
    sub = default_subpocket(*preset);

  const double area = contact.contact_area_cm2;
  const double pressure = config.initial_pressure_kpa;
  if (const auto* row = table.find(*preset, contact.face, area, pressure, sub))
    return {row->slope_kpa_per_n, Provenance::PaperTable};

  const auto dsub = default_subpocket(*preset);
  const auto* base = table.find(*preset, RadialFace::Top, SensitivityTable::kDefaultArea,
                                SensitivityTable::kDefaultPressure, dsub);
  if (!base) throw Error(ErrorCode::UnsupportedConfig, "no baseline row for preset");

  double s = base->slope_kpa_per_n;
  s *= axis_ratio(table, *preset, Axis::Area, area);
  s *= axis_ratio(table, *preset, Axis::Pressure, pressure);

  if (contact.face == RadialFace::Side) {
    const auto* side = table.find(*preset, RadialFace::Side, SensitivityTable::kDefaultArea,
                                  SensitivityTable::kDefaultPressure, dsub);
    const auto* top = base;
    if (!side) {
      side = table.find(PocketPreset::Control, RadialFace::Side, SensitivityTable::kDefaultArea,
                        SensitivityTable::kDefaultPressure, std::nullopt);
      top = table.find(PocketPreset::Control, RadialFace::Top, SensitivityTable::kDefaultArea,
                       SensitivityTable::kDefaultPressure, std::nullopt);
    }
    if (!side || !top) throw Error(ErrorCode::UnsupportedConfig, "no side-contact data");
    s *= side->slope_kpa_per_n / top->slope_kpa_per_n;
  }

  if (sub != dsub) {
    const auto* at = table.find(*preset, RadialFace::Top, SensitivityTable::kDefaultArea,
                                SensitivityTable::kDefaultPressure, sub);
    if (!at) throw Error(ErrorCode::UnsupportedConfig, "no data for sub-pocket " + std::to_string(*sub));
    s *= at->slope_kpa_per_n / base->slope_kpa_per_n;
  }
  return {s, Provenance::Interpolated};
}

double estimate_force(const PressureState& state, const Sensitivity& s) {
  if (!(s.slope_kpa_per_n > 0.0)) throw Error(ErrorCode::InvalidArgument, "sensitivity must be positive");
  return (state.p_sensed_kpa - state.p_initial_kpa) / s.slope_kpa_per_n;
}

double predict_pressure_change(double force_n, const Sensitivity& s) {
  if (!(force_n >= 0.0)) throw Error(ErrorCode::InvalidArgument, "force must be >= 0");
  return s.slope_kpa_per_n * force_n;
}

PocketResponse::PocketResponse(double p_initial_kpa, Sensitivity s, DynamicsConfig dynamics)
    : p_initial_(p_initial_kpa), s_(s), dynamics_(dynamics), state_(p_initial_kpa) {
  if (!(dynamics_.time_constant_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "time constant must be > 0");
  if (!(dynamics_.noise_sigma_kpa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
}

double PocketResponse::advance(double force_n, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  const double target = p_initial_ + s_.slope_kpa_per_n * std::max(force_n, 0.0);
  const double decay = std::exp(-dt / dynamics_.time_constant_s);
  state_ = target + (state_ - target) * decay;
  if (dynamics_.noise_sigma_kpa == 0.0) return state_;
  std::normal_distribution<double> noise(0.0, dynamics_.noise_sigma_kpa);
  return state_ + noise(rng);
}

std::vector<double> response_with_dynamics(std::span<const double> force_n, const Sensitivity& s,
                                           double p_initial_kpa, double dt,
                                           const DynamicsConfig& dynamics, std::uint64_t seed) {
  PocketResponse pocket(p_initial_kpa, s, dynamics);
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(force_n.size());
  for (double f : force_n) out.push_back(pocket.advance(f, dt, rng));
  return out;
}

}  // namespace vinesense
