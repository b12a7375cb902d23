// vinesense: calibration, headless demo replay and live session server.

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "vinesense/calibration.hpp"
#include "vinesense/cli.hpp"
#include "vinesense/error.hpp"
#include "vinesense/server.hpp"
#include "vinesense/session.hpp"

using namespace vinesense;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

int fail(const Error& e) {
  nlohmann::ordered_json rec;
  rec["error"] = std::string(to_string(e.code()));
  rec["detail"] = e.detail();
  std::cerr << rec.dump() << '\n';
  return 2;
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    stream = &file;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Air-pocket force sensing toolkit for a simulated vine robot"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double speed = 1.0;
  std::string output;

  auto* calibrate = app.add_subcommand("calibrate", "Fit sensitivity lines from trial data");
  std::string input, synthetic, plot, table_path;
  bool reproduce = false;
  auto* in_opt = calibrate->add_option("--input", input, "Calibration CSV");
  auto* syn_opt = calibrate->add_option("--synthetic", synthetic, "preset,face,disk,pressure[,noise=..][,seed=..]");
  auto* rep_opt = calibrate->add_flag("--reproduce-paper", reproduce,
                                      "Regenerate every table condition noiselessly and check the fitted slopes");
  in_opt->excludes(syn_opt)->excludes(rep_opt);
  syn_opt->excludes(rep_opt);
  calibrate->add_option("--output", output, "Report path (default stdout)");
  calibrate->add_option("--plot", plot, "Optional plot-data CSV sidecar");
  calibrate->add_option("--table", table_path, "Sensitivity table file instead of the built-in one");
  calibrate->add_option("--seed", seed, "Default seed for synthetic data");

  auto* demo = app.add_subcommand("demo", "Replay a scenario and write a snapshot trace");
  std::string scenario_path;
  bool headless = false;
  demo->add_option("--scenario", scenario_path, "Scenario file")->required();
  demo->add_flag("--headless", headless, "No progress output");
  demo->add_option("--speed", speed, "Sim seconds per wall second (0 = unpaced)");
  auto* demo_seed = demo->add_option("--seed", seed, "Override the scenario seed");
  demo->add_option("--output", output, "Trace path (default <scenario>.trace.jsonl)");

  auto* serve = app.add_subcommand("serve", "Serve a live session over WebSocket");
  std::string bind = "127.0.0.1:8765";
  serve->add_option("--scenario", scenario_path, "Scenario file")->required();
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--speed", speed, "Sim seconds per wall second");
  auto* serve_seed = serve->add_option("--seed", seed, "Override the scenario seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) {
      SensitivityTable loaded;
      const SensitivityTable* table = &SensitivityTable::builtin();
      if (!table_path.empty()) {
        std::ifstream tin(table_path);
        if (!tin) throw Error(ErrorCode::InvalidArgument, "cannot open " + table_path);
        loaded = SensitivityTable::load(tin);
        table = &loaded;
      }
      Output out(output);
      FactorReport report;
      int status = 0;
      if (reproduce) {
        auto r = reproduce_table(*table);
        report = r.report;
        for (const auto& row : r.rows) {
          if (row.pass) continue;
          std::cerr << "mismatch: " << row.label << " expected " << row.row.slope_kpa_per_n << " got "
                    << (row.fit ? row.fit->slope : 0.0) << '\n';
        }
        if (!r.all_pass) status = 1;
      } else if (!synthetic.empty()) {
        const auto spec = parse_synthetic(synthetic, seed);
        report = factor_report({{spec.label, generate(spec, *table)}});
      } else {
        if (input.empty()) throw Error(ErrorCode::InvalidArgument, "give --input, --synthetic or --reproduce-paper");
        std::ifstream in(input);
        if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + input);
        auto ingested = ingest_csv(in);
        for (const auto& e : ingested.errors) {
          nlohmann::ordered_json rec;
          rec["line"] = e.line;
          rec["error"] = std::string(to_string(e.code));
          rec["detail"] = e.message;
          std::cerr << rec.dump() << '\n';
        }
        if (ingested.samples.empty()) throw Error(ErrorCode::DegenerateData, "no usable samples");
        report = factor_report(group_samples(ingested.samples));
        for (const auto& g : report.groups)
          if (!g.fit) status = 2;
      }
      report.write_records(*out.stream);
      if (!plot.empty()) {
        Output p(plot);
        report.write_plot_data(*p.stream);
      }
      return status;
    }

    Scenario scenario = load_scenario(scenario_path);

    if (*demo) {
      DemoOptions opts;
      opts.speed = speed;
      if (*demo_seed) opts.seed = seed;
      if (output.empty()) output = scenario.name + ".trace.jsonl";
      Output out(output);
      const auto result = run_demo(scenario, opts, out.stream, headless ? nullptr : &std::cout);
      if (!headless) std::cout << result.ticks << " ticks written to " << output << '\n';
      return 0;
    }

    if (*serve) {
      if (*serve_seed) scenario.setup.seed = seed;
      SessionOptions sopts;
      sopts.speed = speed > 0.0 ? speed : 1.0;
      Session session(scenario, sopts);
      Server server(session, parse_bind(bind));
      server.start();
      std::cout << "serving " << scenario.name << " on ws://" << bind.substr(0, bind.rfind(':') + 1) << server.port()
                << '\n'
                << std::flush;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      session.start();
      while (!g_interrupted && !session.finished()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      session.stop();
      session.join();
      server.stop();
      return 0;
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(Error(ErrorCode::InvalidArgument, e.what()));
  }
  return 0;
}
