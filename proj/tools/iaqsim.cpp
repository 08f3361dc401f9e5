// iaqsim: simulate a duty-cycled ZigBee indoor air-quality sensor network.
//
// Subcommands:
//   validate  check a scenario file, list violations with field paths
//   run       simulate and export event log + figure data + summary
//   sweep     re-run a scenario over a parameter grid with derived seeds

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iaqsim/iaqsim.hpp"

namespace fs = std::filesystem;
using namespace iaqsim;

namespace {

constexpr const char* kVersion = "iaqsim 0.1.0";

// exit codes (documented in the README)
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

std::string default_out_root() {
  if (const char* env = std::getenv("IAQSIM_OUT_ROOT")) return env;
  return "out";
}

std::optional<Scenario> load_or_report(const std::string& path, int& exit_code) {
  std::vector<std::string> issues;
  Scenario sc;
  try {
    sc = load_scenario_file(path, issues);
  } catch (const ScenarioParseError& e) {
    std::cerr << path << ':' << e.line << ':' << e.column << ": parse error: "
              << e.what() << '\n';
    exit_code = kExitValidation;
    return std::nullopt;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    exit_code = kExitIo;
    return std::nullopt;
  }
  if (!issues.empty()) {
    for (const auto& v : issues) std::cerr << v << '\n';
    exit_code = kExitValidation;
    return std::nullopt;
  }
  return sc;
}

void write_file(const fs::path& p, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  body(os);
}

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const fs::path& p, const std::string& content) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
  }
  fs::rename(tmp, p);
}

struct RunOutputs {
  Metrics metrics;
};

RunOutputs run_and_export(const Scenario& sc, const fs::path& out_dir) {
  RunResult result = iaqsim::run(sc);
  Metrics m = compute_metrics(result, sc);

  write_file(out_dir / "events.csv",
             [&](std::ostream& os) { write_event_log_csv(os, result.log); });
  write_file(out_dir / "throughput_daily.csv",
             [&](std::ostream& os) { write_throughput_daily_csv(os, m); });
  write_file(out_dir / "energy_by_node.csv",
             [&](std::ostream& os) { write_energy_csv(os, m); });
  for (const auto& room : sc.rooms)
    write_file(out_dir / ("hourly_" + room.room_id + ".csv"), [&](std::ostream& os) {
      write_hourly_csv(os, result.log, sc, room.room_id);
    });
  write_file(out_dir / "daily_aqi.csv",
             [&](std::ostream& os) { write_daily_aqi_csv(os, result.log, sc); });
  write_file(out_dir / "summary.json",
             [&](std::ostream& os) { write_summary_json(os, m); });
  return {std::move(m)};
}

void print_headline(const Metrics& m, const std::string& format) {
  if (format == "json") {
    write_summary_json(std::cout, m);
    return;
  }
  std::cout << "throughput: ";
  if (m.throughput) std::cout << *m.throughput;
  else std::cout << "n/a (no messages generated)";
  std::cout << "  (" << m.delivered_total << '/' << m.generated_total << ")\n";
  for (const auto& [id, e] : m.energy)
    std::cout << "energy " << id << ": " << e.total_j << " J\n";
}

// -- sweep parameter registry -------------------------------------------------

const std::map<std::string, void (*)(Scenario&, double)> kSweepParams = {
    {"links.delivery_probability",
     [](Scenario& sc, double v) {
       for (auto& [child, lp] : sc.topology.link) lp.delivery_probability = v;
     }},
    {"sensors.gas.warmup_s",
     [](Scenario& sc, double v) { sc.sensors.gas.warmup_ms = seconds(v); }},
    {"nodes.sampling_period_s",
     [](Scenario& sc, double v) {
       for (auto& n : sc.nodes) n.sampling_period = seconds(v);
     }},
    {"nodes.reporting_interval_s",
     [](Scenario& sc, double v) {
       for (auto& n : sc.nodes) n.reporting_interval = seconds(v);
     }},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ZigBee indoor air-quality sensor network simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scenario_path;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  std::string out_dir;
  std::string format = "csv";

  auto* validate = app.add_subcommand("validate", "Validate a scenario file");
  validate->add_option("--scenario", scenario_path, "Scenario file")->required();

  auto* run_cmd = app.add_subcommand("run", "Run a simulation and export metrics");
  run_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  run_cmd->add_option("--seed", seed_override, "Master seed override")
      ->each([&](const std::string&) { seed_given = true; });
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--format", format, "Headline output format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string sweep_param;
  std::vector<double> sweep_values;
  int replicas = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep with derived seeds");
  sweep_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  sweep_cmd->add_option("--param", sweep_param, "Scenario parameter path")->required();
  sweep_cmd->add_option("--values", sweep_values, "Values to sweep")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--replicas", replicas, "Replicas per value")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      int code = kExitOk;
      auto sc = load_or_report(scenario_path, code);
      if (!sc) return code;
      std::cout << "ok\n";
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      int code = kExitOk;
      auto sc = load_or_report(scenario_path, code);
      if (!sc) return code;
      if (seed_given) sc->master_seed = seed_override;

      fs::path out = out_dir.empty() ? fs::path(default_out_root()) / "run" : fs::path(out_dir);
      std::error_code ec;
      fs::create_directories(out, ec);
      // probe writability before spending time simulating
      {
        std::ofstream probe(out / ".write_probe");
        if (!probe) {
          std::cerr << "error: output directory not writable: " << out << '\n';
          return kExitIo;
        }
      }
      fs::remove(out / ".write_probe", ec);

      auto t0 = std::chrono::steady_clock::now();
      RunOutputs outputs = run_and_export(*sc, out);
      auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

      std::ostringstream manifest;
      manifest << "{\n"
               << "  \"scenario\": \"" << scenario_path << "\",\n"
               << "  \"master_seed\": " << sc->master_seed << ",\n"
               << "  \"tool_version\": \"" << kVersion << "\",\n"
               << "  \"output_dir\": \"" << out.string() << "\",\n"
               << "  \"wall_clock_ms\": " << wall_ms << "\n}\n";
      write_file_atomic(out / "manifest.json", manifest.str());

      print_headline(outputs.metrics, format);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      int code = kExitOk;
      auto sc = load_or_report(scenario_path, code);
      if (!sc) return code;

      auto pit = kSweepParams.find(sweep_param);
      if (pit == kSweepParams.end()) {
        std::cerr << "error: unknown parameter path '" << sweep_param
                  << "'. Recognized paths:\n";
        for (const auto& [name, fn] : kSweepParams) std::cerr << "  " << name << '\n';
        return kExitValidation;
      }

      fs::path out = out_dir.empty() ? fs::path(default_out_root()) / "sweep" : fs::path(out_dir);
      std::error_code ec;
      fs::create_directories(out, ec);
      std::ofstream os(out / "sweep.csv");
      if (!os) {
        std::cerr << "error: output directory not writable: " << out << '\n';
        return kExitIo;
      }

      os << "param,value,replica,seed,generated,delivered,throughput";
      for (const auto& n : sc->nodes) os << ",energy_" << n.node_id << "_j";
      os << '\n';
      for (double value : sweep_values) {
        for (int rep = 0; rep < replicas; ++rep) {
          Scenario variant = *sc;
          pit->second(variant, value);
          variant.master_seed = derive_seed(sc->master_seed, static_cast<std::uint64_t>(rep));
          auto issues = validate_scenario(variant);
          if (!issues.empty()) {
            std::cerr << "sweep value " << value << " produces an invalid scenario:\n";
            for (const auto& v : issues) std::cerr << "  " << v << '\n';
            return kExitValidation;
          }
          RunResult result = iaqsim::run(variant);
          Metrics m = compute_metrics(result, variant);
          os << sweep_param << ',' << value << ',' << rep << ',' << variant.master_seed
             << ',' << m.generated_total << ',' << m.delivered_total << ',';
          if (m.throughput) os << *m.throughput;
          for (const auto& n : variant.nodes)
            os << ',' << m.energy.at(n.node_id).total_j;
          os << '\n';
        }
      }
      std::cout << "wrote " << (out / "sweep.csv").string() << '\n';
      return kExitOk;
    }
  } catch (const ScenarioInvalid& e) {
    for (const auto& v : e.violations) std::cerr << v << '\n';
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
