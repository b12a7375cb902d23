#pragma once

// Physical description of an air-pocket force sensor and its linear
// pressure/force model.
//
// Units are fixed across the library: gauge kPa, N, cm, s.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace vinesense {

class SensitivityTable;

using Rng = std::mt19937_64;

inline constexpr double kGravity = 9.81;  // m/s^2

enum class PocketPreset { Control, Small, Thin, Sealed };

std::string_view to_string(PocketPreset preset);
std::optional<PocketPreset> parse_preset(std::string_view name);

struct PocketConfig {
  double membrane_thickness_mm = 0.10;
  double pre_inflated_length_cm = 27.5;
  double lay_flat_diameter_cm = 10.2;
  int interior_seal_count = 0;
  std::vector<double> subpocket_lengths_cm;  // empty when interior_seal_count == 0
  double initial_pressure_kpa = 0.4;

  static PocketConfig control();
  static PocketConfig small();
  static PocketConfig thin();
  static PocketConfig sealed();
  static PocketConfig preset(PocketPreset p);

  int subpocket_count() const { return interior_seal_count > 0 ? interior_seal_count + 1 : 1; }

  // Throws Error(InvalidArgument) when an invariant is broken.
  void validate() const;
};

// Geometry match against the four built-in presets (pressure is ignored).
std::optional<PocketPreset> identify_preset(const PocketConfig& config);

enum class RadialFace { Top, Side };

std::string_view to_string(RadialFace face);
std::optional<RadialFace> parse_face(std::string_view name);

struct ContactSpec {
  double lengthwise_fraction = 0.5;
  RadialFace face = RadialFace::Top;
  double contact_area_cm2 = 12.5;
  std::optional<int> subpocket_index;  // zero-based, counted from the sensor end

  void validate(const PocketConfig& config) const;
};

enum class Provenance { PaperTable, Fitted, Interpolated };

std::string_view to_string(Provenance p);

struct Sensitivity {
  double slope_kpa_per_n = 0.0;
  Provenance provenance = Provenance::PaperTable;
};

struct PressureState {
  double p_initial_kpa = 0.0;
  double p_sensed_kpa = 0.0;
};

/// Sensitivity of a pocket under a given contact.
///
/// Exact table conditions return the tabulated slope. Other conditions are
/// composed multiplicatively from the preset's baseline: each factor that
/// deviates contributes the ratio it produces on the table, with piecewise
/// linear interpolation on initial pressure and contact area. Conditions
/// outside the tabulated ranges throw Error(UnsupportedConfig).
Sensitivity sensitivity_for(const PocketConfig& config, const ContactSpec& contact);
Sensitivity sensitivity_for(const PocketConfig& config, const ContactSpec& contact,
                            const SensitivityTable& table);

// (p_sensed - p_initial) / s. Negative results are returned unclamped.
double estimate_force(const PressureState& state, const Sensitivity& s);

// s * F.
double predict_pressure_change(double force_n, const Sensitivity& s);

struct DynamicsConfig {
  double time_constant_s = 1.0;
  double noise_sigma_kpa = 0.01;
};

// First-order lag of the pocket pressure toward p_initial + s*F, read through
// additive Gaussian noise. The noise never feeds back into the state.
class PocketResponse {
 public:
  PocketResponse(double p_initial_kpa, Sensitivity s, DynamicsConfig dynamics = {});

  // Integrates one step of length dt under constant force and returns the
  // noisy reading at the end of the step.
  double advance(double force_n, double dt, Rng& rng);

  double state() const { return state_; }
  double p_initial() const { return p_initial_; }
  const Sensitivity& sensitivity() const { return s_; }
  void reset() { state_ = p_initial_; }

 private:
  double p_initial_;
  Sensitivity s_;
  DynamicsConfig dynamics_;
  double state_;
};

// Sample k of the result is the reading at t = (k + 1) * dt after force[k]
// was applied over [k*dt, (k+1)*dt).
std::vector<double> response_with_dynamics(std::span<const double> force_n, const Sensitivity& s,
                                           double p_initial_kpa, double dt,
                                           const DynamicsConfig& dynamics, std::uint64_t seed);

}  // namespace vinesense
