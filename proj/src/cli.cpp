#include "vinesense/cli.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <algorithm>
#include <iterator>
#include <sstream>

#include "format.hpp"
#include "vinesense/session.hpp"

namespace vinesense {

namespace {

std::string row_label(const SensitivityRow& r) {
  std::ostringstream s;
  s << to_string(r.preset) << '/' << to_string(r.face) << '/' << detail::format_double(r.contact_area_cm2) << "cm2/"
    << detail::format_double(r.initial_pressure_kpa) << "kPa";
  if (r.lengthwise_cm) s << '/' << detail::format_double(*r.lengthwise_cm) << "cm";
  if (r.subpocket_index) s << "/sub" << *r.subpocket_index;
  return s.str();
}

}  // namespace

ReproduceResult reproduce_table(const SensitivityTable& table) {
  ReproduceResult result;
  SampleGroups groups;
  for (const auto& row : table.rows()) {
    ReproducedRow out{row, row_label(row), std::nullopt, false};
    auto config = PocketConfig::preset(row.preset);
    config.initial_pressure_kpa = row.initial_pressure_kpa;
    ContactSpec contact;
    contact.face = row.face;
    contact.contact_area_cm2 = row.contact_area_cm2;
    contact.subpocket_index = row.subpocket_index;
    if (row.lengthwise_cm) contact.lengthwise_fraction = *row.lengthwise_cm / config.pre_inflated_length_cm;
    const auto disk = disk_for_area(row.contact_area_cm2);
    const double disk_mass = disk ? disk->mass_g : kMediumDisk.mass_g;
    auto samples = generate_trials(config, contact, kTrialMasses_g, disk_mass, kTrialsPerScenario, 0.0, 0,
                                   std::string(to_string(row.preset)), table);
    groups.emplace_back(out.label, std::move(samples));
    result.rows.push_back(std::move(out));
  }
  result.report = factor_report(groups);
  result.all_pass = !result.rows.empty();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    auto& r = result.rows[i];
    r.fit = result.report.groups[i].fit;
    r.pass = r.fit && std::abs(r.fit->slope - r.row.slope_kpa_per_n) <= kReproduceSlopeTol &&
             std::abs(r.fit->intercept) < kReproduceInterceptTol;
    result.all_pass = result.all_pass && r.pass;
  }
  return result;
}

SyntheticSpec parse_synthetic(std::string_view spec, std::uint64_t default_seed) {
  SyntheticSpec out;
  out.seed = default_seed;
  out.label = std::string(spec);
  std::vector<std::string> parts;
  {
    std::string cell;
    std::istringstream ss{std::string(spec)};
    while (std::getline(ss, cell, ',')) parts.emplace_back(detail::trim(cell));
  }
  auto bad = [&](const std::string& why) { return Error(ErrorCode::InvalidArgument, "synthetic spec: " + why); };
  if (parts.size() < 4) throw bad("expected preset,face,disk,pressure");
  auto preset = parse_preset(parts[0]);
  auto face = parse_face(parts[1]);
  if (!preset) throw bad("unknown preset '" + parts[0] + "'");
  if (!face) throw bad("unknown face '" + parts[1] + "'");
  out.preset = *preset;
  out.face = *face;
  bool disk_found = false;
  for (const auto& d : kDisks) {
    if (parts[2] == d.name) {
      out.disk = d;
      disk_found = true;
    }
  }
  if (!disk_found) throw bad("unknown disk '" + parts[2] + "'");
  auto p = detail::parse_double(parts[3]);
  if (!p) throw bad("bad pressure '" + parts[3] + "'");
  out.initial_pressure_kpa = *p;
  for (std::size_t i = 4; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw bad("expected key=value, got '" + parts[i] + "'");
    const std::string key = parts[i].substr(0, eq);
    const std::string val = parts[i].substr(eq + 1);
    const auto num = detail::parse_double(val);
    if (!num) throw bad("bad value for " + key);
    if (key == "noise")
      out.noise_sigma_kpa = *num;
    else if (key == "seed")
      out.seed = static_cast<std::uint64_t>(*num);
    else if (key == "trials")
      out.trials = static_cast<int>(*num);
    else if (key == "subpocket")
      out.subpocket_index = static_cast<int>(*num);
    else if (key == "lengthwise")
      out.lengthwise_cm = *num;
    else
      throw bad("unknown option '" + key + "'");
  }
  return out;
}

std::vector<CalibrationSample> generate(const SyntheticSpec& spec, const SensitivityTable& table) {
  auto config = PocketConfig::preset(spec.preset);
  config.initial_pressure_kpa = spec.initial_pressure_kpa;
  ContactSpec contact;
  contact.face = spec.face;
  contact.contact_area_cm2 = spec.disk.area_cm2;
  contact.subpocket_index = spec.subpocket_index;
  if (spec.lengthwise_cm) contact.lengthwise_fraction = *spec.lengthwise_cm / config.pre_inflated_length_cm;
  return generate_trials(config, contact, kTrialMasses_g, spec.disk.mass_g, spec.trials, spec.noise_sigma_kpa,
                         spec.seed, std::string(to_string(spec.preset)), table);
}

SampleGroups group_samples(std::span<const CalibrationSample> samples) {
  SampleGroups groups;
  for (const auto& s : samples) {
    std::ostringstream key;
    key << s.pocket_id << '/' << to_string(s.factors.face) << '/' << detail::format_double(s.factors.contact_area_cm2)
        << "cm2/" << detail::format_double(s.factors.initial_pressure_kpa) << "kPa";
    if (s.factors.lengthwise_cm) key << '/' << detail::format_double(*s.factors.lengthwise_cm) << "cm";
    if (s.factors.subpocket_index) key << "/sub" << *s.factors.subpocket_index;
    const auto label = key.str();
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == label; });
    if (it == groups.end()) {
      groups.emplace_back(label, std::vector<CalibrationSample>{});
      it = std::prev(groups.end());
    }
    it->second.push_back(s);
  }
  return groups;
}

std::optional<Mode> record_state(std::string_view record) {
  constexpr std::string_view key = "\"state\":\"";
  const auto at = record.find(key);
  if (at == std::string_view::npos) return std::nullopt;
  const auto start = at + key.size();
  const auto end = record.find('"', start);
  if (end == std::string_view::npos) return std::nullopt;
  return parse_mode(record.substr(start, end - start));
}

DemoResult run_demo(Scenario scenario, const DemoOptions& options, std::ostream* trace, std::ostream* progress) {
  if (options.seed) scenario.setup.seed = *options.seed;
  DemoResult result;
  const auto start = std::chrono::steady_clock::now();
  result.ticks = run_headless(scenario, options.speed, [&](const std::string& rec) {
    if (trace) *trace << rec << '\n';
    const auto mode = record_state(rec);
    if (mode && (result.sequence.empty() || result.sequence.back() != *mode)) {
      result.sequence.push_back(*mode);
      if (progress) {
        const auto t0 = rec.find("\"t\":");
        const auto t1 = rec.find(',', t0);
        *progress << "t=" << rec.substr(t0 + 4, t1 - t0 - 4) << "s " << to_string(*mode) << '\n';
      }
    }
  });
  result.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace vinesense
