// hamforge — batch front end for the Hamiltonian-structure library.
//
//   hamforge validate <scenario.json> [--out DIR] [--random N] [--sweep ...]
//   hamforge equiv    <scenario.json> [--out DIR]
//   hamforge spectrum <scenario.json> [--out DIR] [--oracle] [--cutoff N]
//                                     [--sweep param=a:b:step]
//   hamforge integrate <scenario.json> [--out DIR]
//   hamforge catalog
//
// Exit codes: 0 success, 1 usage/parse error, 2 validation or domain error,
// 3 comparison-failure verdict. HAMFORGE_THREADS caps sweep workers.

#include "hamforge/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using hamforge::RunReport;
using hamforge::Scenario;

void write_outputs(const RunReport& rep, const std::string& out_dir,
                   const std::string& report_name,
                   const std::string& side_prefix = "") {
  if (out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / report_name);
    f << rep.payload.dump(2) << "\n";
  }
  for (const auto& [name, contents] : rep.files) {
    std::ofstream f(fs::path(out_dir) / (side_prefix + name));
    f << contents;
  }
}

std::string value_key(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return std::string(buf);
}

int run_with_sweep(const Scenario& base, const std::string& sweep,
                   const std::string& out_dir, const std::string& command,
                   const std::function<RunReport(const Scenario&)>& job) {
  if (sweep.empty()) {
    RunReport rep = job(base);
    std::cout << rep.payload.dump(2) << std::endl;
    write_outputs(rep, out_dir, command + ".json");
    return rep.exit_code;
  }
  hamforge::SweepSpec spec = hamforge::parse_sweep(sweep);
  auto results = hamforge::run_sweep(base, spec, job);
  int worst = hamforge::kExitOk;
  hamforge::Json summary;
  summary["command"] = command + " --sweep";
  summary["parameter"] = spec.param;
  summary["jobs"] = hamforge::Json::array();
  for (const auto& [value, rep] : results) {
    hamforge::Json line;
    line[spec.param] = value;
    line["exit_code"] = rep.exit_code;
    if (rep.payload.contains("error")) line["error"] = rep.payload["error"];
    summary["jobs"].push_back(line);
    worst = std::max(worst, rep.exit_code);
    std::string key = spec.param + "_" + value_key(value);
    write_outputs(rep, out_dir, command + "_" + key + ".json", key + "_");
  }
  std::cout << summary.dump(2) << std::endl;
  if (!out_dir.empty()) {
    std::ofstream f(std::filesystem::path(out_dir) / (command + "_sweep.json"));
    f << summary.dump(2) << "\n";
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamforge: inequivalent Hamiltonian structures for linear "
               "second-order flows — construction, validation, integration "
               "and quantum spectra"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, sweep;
  bool with_oracle = false;
  int cutoff = 0;
  int random_count = 0;

  auto* validate = app.add_subcommand("validate", "structural checks");
  validate->add_option("scenario", scenario_path, "scenario JSON file");
  validate->add_option("--out", out_dir, "output directory");
  validate->add_option("--random", random_count,
                       "run property checks on N random models");
  validate->add_option("--sweep", sweep, "param=a:b:step parameter grid");

  auto* equiv = app.add_subcommand("equiv", "classical s-equivalence");
  equiv->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  equiv->add_option("--out", out_dir, "output directory");

  auto* spectrum = app.add_subcommand("spectrum", "normal modes and levels");
  spectrum->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  spectrum->add_option("--out", out_dir, "output directory");
  spectrum->add_flag("--oracle", with_oracle, "add Fock-basis cross-check");
  spectrum->add_option("--cutoff", cutoff, "override oracle cutoff");
  spectrum->add_option("--sweep", sweep, "param=a:b:step parameter grid");

  auto* integrate = app.add_subcommand("integrate", "fixed-step integration");
  integrate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  integrate->add_option("--out", out_dir, "output directory");

  auto* catalog = app.add_subcommand("catalog", "list named scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? hamforge::kExitOk : hamforge::kExitUsage;
  }

  auto started = std::chrono::steady_clock::now();
  int code = hamforge::kExitOk;
  try {
    if (catalog->parsed()) {
      RunReport rep = hamforge::cmd_catalog();
      std::cout << rep.payload.dump(2) << std::endl;
      write_outputs(rep, out_dir, "catalog.json");
      code = rep.exit_code;
    } else if (validate->parsed() && random_count > 0) {
      uint64_t seed = 0;
      if (!scenario_path.empty())
        seed = hamforge::load_scenario(scenario_path).seed;
      RunReport rep = hamforge::cmd_validate_random(seed, random_count);
      std::cout << rep.payload.dump(2) << std::endl;
      write_outputs(rep, out_dir, "validate_random.json");
      code = rep.exit_code;
    } else {
      if (scenario_path.empty())
        throw hamforge::Error("a scenario file is required");
      Scenario sc = hamforge::load_scenario(scenario_path);
      if (validate->parsed()) {
        code = run_with_sweep(sc, sweep, out_dir, "validate",
                              [](const Scenario& s) { return cmd_validate(s); });
      } else if (equiv->parsed()) {
        RunReport rep = hamforge::cmd_equiv(sc);
        std::cout << rep.payload.dump(2) << std::endl;
        write_outputs(rep, out_dir, "equiv.json");
        code = rep.exit_code;
      } else if (spectrum->parsed()) {
        std::optional<int> cut;
        if (cutoff > 0) cut = cutoff;
        code = run_with_sweep(sc, sweep, out_dir, "spectrum",
                              [&](const Scenario& s) {
                                return cmd_spectrum(s, with_oracle, cut);
                              });
      } else if (integrate->parsed()) {
        RunReport rep = hamforge::cmd_integrate(sc);
        std::cout << rep.payload.dump(2) << std::endl;
        write_outputs(rep, out_dir, "integrate.json");
        code = rep.exit_code;
      }
    }
  } catch (const hamforge::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    code = hamforge::kExitUsage;
  } catch (const hamforge::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    code = hamforge::kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    code = hamforge::kExitUsage;
  }

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  std::cerr << "completed in " << elapsed << " ms" << std::endl;
  return code;
}
