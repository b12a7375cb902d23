#include "vinesense/calibration.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "format.hpp"

namespace vinesense {

using detail::format_double;
using json = nlohmann::json;

std::optional<Disk> disk_for_area(double area_cm2) {
  for (const auto& d : kDisks)
    if (std::abs(d.area_cm2 - area_cm2) < 1e-9) return d;
  return std::nullopt;
}

LinearFit fit_line(std::span<const CalibrationSample> samples) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(samples.size()));
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = samples[static_cast<std::size_t>(i)].applied_force_n;
    y[i] = samples[static_cast<std::size_t>(i)].delta_pressure_kpa;
  }
  return fit_line(x, y);
}

std::vector<CalibrationSample> generate_trials(const PocketConfig& config, const ContactSpec& contact,
                                               std::span<const double> masses_g, double disk_mass_g,
                                               int trials, double noise_sigma_kpa, std::uint64_t seed,
                                               std::string pocket_id, const SensitivityTable& table) {
  if (masses_g.empty()) throw Error(ErrorCode::InvalidArgument, "no masses given");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(noise_sigma_kpa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  if (!(disk_mass_g >= 0.0)) throw Error(ErrorCode::InvalidArgument, "disk mass must be >= 0");

  const Sensitivity s = sensitivity_for(config, contact, table);
  if (pocket_id.empty()) {
    auto preset = identify_preset(config);
    pocket_id = preset ? std::string(to_string(*preset)) : "pocket";
  }

  TrialFactors factors;
  factors.face = contact.face;
  factors.lengthwise_cm = contact.lengthwise_fraction * config.pre_inflated_length_cm;
  factors.contact_area_cm2 = contact.contact_area_cm2;
  factors.initial_pressure_kpa = config.initial_pressure_kpa;
  factors.subpocket_index = contact.subpocket_index;

  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma_kpa > 0.0 ? noise_sigma_kpa : 1.0);
  std::vector<CalibrationSample> out;
  out.reserve(masses_g.size() * static_cast<std::size_t>(trials));
  for (int t = 1; t <= trials; ++t) {
    for (double m : masses_g) {
      if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "masses must be positive");
      const double f = weight_n(m, disk_mass_g);
      double dp = predict_pressure_change(f, s);
      if (noise_sigma_kpa > 0.0) dp += noise(rng);
      out.push_back({pocket_id, t, f, dp, factors});
    }
  }
  return out;
}

FactorReport factor_report(const SampleGroups& groups) {
  FactorReport report;
  for (const auto& [label, samples] : groups) {
    GroupResult g;
    g.label = label;
    g.samples = samples;
    try {
      g.fit = fit_line(samples);
    } catch (const Error& e) {
      g.error = e.code();
      g.detail = e.detail();
    }
    report.groups.push_back(std::move(g));
  }
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < report.groups.size(); ++j) {
      const auto& a = report.groups[i];
      const auto& b = report.groups[j];
      if (!a.fit || !b.fit || a.fit->slope == 0.0) continue;
      report.ratios.push_back({b.label, a.label, b.fit->slope / a.fit->slope});
    }
  }
  return report;
}

void FactorReport::write_records(std::ostream& out) const {
  for (const auto& g : groups) {
    json rec;
    rec["group"] = g.label;
    if (g.fit) {
      rec["slope"] = g.fit->slope;
      rec["intercept"] = g.fit->intercept;
      rec["r2"] = g.fit->r_squared;
      rec["n"] = g.fit->n_samples;
    } else {
      rec["error"] = std::string(to_string(*g.error));
      rec["detail"] = g.detail;
    }
    out << rec.dump() << '\n';
  }
  for (const auto& r : ratios) {
    json rec;
    rec["numerator"] = r.numerator;
    rec["denominator"] = r.denominator;
    rec["ratio"] = r.ratio;
    out << rec.dump() << '\n';
  }
}

void FactorReport::write_plot_data(std::ostream& out) const {
  out << "series,kind,force_n,delta_pressure_kpa\n";
  for (const auto& g : groups) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& s : g.samples) {
      out << g.label << ",point," << format_double(s.applied_force_n) << ','
          << format_double(s.delta_pressure_kpa) << '\n';
      lo = first ? s.applied_force_n : std::min(lo, s.applied_force_n);
      hi = first ? s.applied_force_n : std::max(hi, s.applied_force_n);
      first = false;
    }
    if (!g.fit) continue;
    for (double f : {lo, hi})
      out << g.label << ",fit," << format_double(f) << ',' << format_double(g.fit->intercept + g.fit->slope * f)
          << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

IngestResult ingest_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::MissingColumn, "empty input: no header row");

  std::unordered_map<std::string, std::size_t> index;
  const auto header = split_csv(line);
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(std::string(detail::trim(header[i])), i);
  std::array<std::size_t, kCsvColumns.size()> col{};
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
    auto it = index.find(std::string(kCsvColumns[c]));
    if (it == index.end()) throw Error(ErrorCode::MissingColumn, "missing column " + std::string(kCsvColumns[c]));
    col[c] = it->second;
  }

  IngestResult result;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = split_csv(line);
    auto fail = [&](const std::string& msg) {
      result.errors.push_back({line_no, ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + msg});
    };
    auto cell = [&](std::size_t c) -> std::string_view {
      const auto i = col[c];
      return i < cells.size() ? detail::trim(cells[i]) : std::string_view{};
    };

    CalibrationSample s;
    s.pocket_id = std::string(cell(0));
    const auto trial = detail::parse_int(cell(1));
    const auto face = parse_face(cell(2));
    const auto area = detail::parse_double(cell(4));
    const auto pressure = detail::parse_double(cell(5));
    const auto force = detail::parse_double(cell(7));
    const auto dp = detail::parse_double(cell(8));
    if (!force || !std::isfinite(*force)) { fail("non-numeric force_n '" + std::string(cell(7)) + "'"); continue; }
    if (!dp || !std::isfinite(*dp)) { fail("non-numeric delta_pressure_kpa '" + std::string(cell(8)) + "'"); continue; }
    if (!(*force > 0.0)) { fail("force_n must be positive"); continue; }
    if (!trial || *trial < 1) { fail("trial must be an integer >= 1"); continue; }
    if (!face) { fail("radial_face must be top or side"); continue; }
    if (!area || !(*area > 0.0)) { fail("contact_area_cm2 must be positive"); continue; }
    if (!pressure || !(*pressure >= 0.0)) { fail("initial_pressure_kpa must be >= 0"); continue; }
    if (!cell(3).empty()) {
      auto l = detail::parse_double(cell(3));
      if (!l) { fail("non-numeric lengthwise_cm"); continue; }
      s.factors.lengthwise_cm = *l;
    }
    if (!cell(6).empty()) {
      auto sub = detail::parse_int(cell(6));
      if (!sub || *sub < 0) { fail("subpocket_index must be a non-negative integer"); continue; }
      s.factors.subpocket_index = static_cast<int>(*sub);
    }
    s.trial = static_cast<int>(*trial);
    s.applied_force_n = *force;
    s.delta_pressure_kpa = *dp;
    s.factors.face = *face;
    s.factors.contact_area_cm2 = *area;
    s.factors.initial_pressure_kpa = *pressure;
    result.samples.push_back(std::move(s));
  }
  return result;
}

void write_csv(std::ostream& out, std::span<const CalibrationSample> samples) {
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) out << (c ? "," : "") << kCsvColumns[c];
  out << '\n';
  for (const auto& s : samples) {
    out << s.pocket_id << ',' << s.trial << ',' << to_string(s.factors.face) << ',';
    if (s.factors.lengthwise_cm) out << format_double(*s.factors.lengthwise_cm);
    out << ',' << format_double(s.factors.contact_area_cm2) << ',' << format_double(s.factors.initial_pressure_kpa)
        << ',';
    if (s.factors.subpocket_index) out << *s.factors.subpocket_index;
    out << ',' << format_double(s.applied_force_n) << ',' << format_double(s.delta_pressure_kpa) << '\n';
  }
}

}  // namespace vinesense
