#include "krf/errors.hpp"
#include "krf/report.hpp"
#include "krf/scenario.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitUsage = 64;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

void apply_thread_override() {
  const char* v = std::getenv("KRF_THREADS");
  if (!v || !*v) return;
  const int n = std::atoi(v);
  if (n < 1) throw krf::ConfigError("KRF_THREADS must be a positive integer");
  omp_set_num_threads(n);
}

void print_summary(const krf::RunResult& r, const std::filesystem::path& out) {
  const auto& tr = r.trajectory;
  std::printf("scenario %s: %s, regime %s, T = %.12g\n", r.config.id.c_str(), tr.geometry->describe().c_str(),
              krf::describe(tr.geometry->path().regime()).c_str(), tr.geometry->singular_time());
  std::printf("  termination %s at t = %.10g after %ld steps (%ld rejected)\n", krf::to_string(tr.termination).c_str(),
              tr.final_time(), tr.accepted_steps, tr.rejected_steps);
  for (const auto& rep : r.suites.reports)
    std::printf("  %-28s C = %-14.8g %s\n", rep.name.c_str(), rep.C, krf::to_string(rep.verdict).c_str());
  if (r.suites.fit)
    std::printf("  fit_exponent k_hat = %.6f (k = %d)\n", r.suites.fit->k_hat, r.suites.fit->k_reference);
  for (const auto& f : r.failures) std::printf("  FAIL %s\n", f.c_str());
  std::printf("  outputs in %s, exit %d\n", out.string().c_str(), r.exit_code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"krflab: Kähler-Ricci flow experiment harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one scenario and write trajectory.csv, report.json, plot.gp-data");
  std::string config_path, preset, out_dir;
  auto* cfg_opt = run->add_option("--config", config_path, "Scenario config file");
  run->add_option("--preset", preset, "Shipped preset name")->excludes(cfg_opt);
  run->add_option("--out", out_dir, "Output directory (env KRF_OUT)");

  auto* sw = app.add_subcommand("sweep", "Classify a grid of initial classes into regimes");
  std::string model, grid, sweep_out;
  bool run_flow = false;
  sw->add_option("--model", model, "Model spec, e.g. hirzebruch:1")->required();
  sw->add_option("--grid", grid, "Axes separated by ';', each 'a:b:n' or 'v1,v2,...'")->required();
  sw->add_option("--out", sweep_out, "Output directory (env KRF_OUT)");
  sw->add_flag("--run", run_flow, "Also run the flow and record inf u");

  auto* pr = app.add_subcommand("presets", "List shipped presets");
  std::string show;
  pr->add_option("--show", show, "Print the config text of one preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    apply_thread_override();
    if (*run) {
      if (config_path.empty() && preset.empty()) throw krf::ConfigError("run needs --config or --preset");
      krf::ScenarioConfig cfg = preset.empty() ? krf::load_config(config_path) : krf::preset_config(preset);
      const std::filesystem::path out = out_dir.empty() ? env_or("KRF_OUT", cfg.out_dir) : out_dir;
      const krf::RunResult r = krf::run_scenario(cfg);
      krf::write_run_outputs(r, out);
      print_summary(r, out);
      return r.exit_code;
    }
    if (*sw) {
      const auto rows = krf::sweep(model, grid, run_flow);
      const std::string csv = krf::sweep_csv(rows);
      const std::string dir = sweep_out.empty() ? env_or("KRF_OUT", "") : sweep_out;
      if (dir.empty()) {
        std::cout << csv;
      } else {
        std::filesystem::create_directories(dir);
        std::ofstream(std::filesystem::path(dir) / "regimes.csv") << csv;
        std::printf("%zu rows written to %s\n", rows.size(), (std::filesystem::path(dir) / "regimes.csv").c_str());
      }
      return 0;
    }
    if (*pr) {
      if (!show.empty()) {
        for (const auto& p : krf::presets())
          if (p.name == show) {
            std::cout << p.text;
            return 0;
          }
        throw krf::ConfigError("unknown preset '" + show + "'");
      }
      for (const auto& p : krf::presets()) std::printf("%-26s %-24s %s\n", p.name.c_str(), p.regime.c_str(), p.summary.c_str());
      return 0;
    }
  } catch (const krf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const krf::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  }
  return 0;
}
