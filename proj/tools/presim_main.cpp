#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "presim/engine.hpp"
#include "presim/relcalc.hpp"
#include "presim/report.hpp"
#include "presim/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void print_diagnostics(const presim::cfg::Diagnostics& diags) {
  for (const auto& d : diags) std::cerr << d.str() << "\n";
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Loads and validates, printing every violation. Returns nullopt on failure.
std::optional<presim::Scenario> load_or_complain(const std::string& path) {
  presim::ValidationResult vr = presim::load_scenario_file(path);
  print_diagnostics(vr.errors);
  print_warnings(vr.warnings);
  if (!vr.ok()) return std::nullopt;
  return std::move(vr.scenario);
}

bool probe_writable(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string probe = dir + "/.write_probe";
  std::ofstream f(probe, std::ios::binary);
  if (!f) return false;
  f << "x";
  f.close();
  std::filesystem::remove(probe, ec);
  return true;
}

double print_value(const char* label, double v) {
  std::printf("%s = %.10g\n", label, v);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"presim: threat-driven simulator for long-term preservation systems"};
  app.require_subcommand(1);

  // --- run ---
  auto* cmd_run = app.add_subcommand("run", "execute one scenario run");
  std::string run_file, run_out = "out";
  std::uint64_t run_seed = 0;
  cmd_run->add_option("file", run_file, "scenario file")->required();
  cmd_run->add_option("--seed", run_seed, "master seed")->capture_default_str();
  cmd_run->add_option("--out", run_out, "output directory")->capture_default_str();

  // --- sweep ---
  auto* cmd_sweep = app.add_subcommand("sweep", "run a parameter sweep");
  std::string sweep_file, sweep_axis, sweep_out = "sweep_out";
  int sweep_seeds = 8, sweep_jobs = 0;
  cmd_sweep->add_option("file", sweep_file, "scenario file")->required();
  cmd_sweep->add_option("--axis", sweep_axis, "KEY=v1,v2,... (dotted config path)")
      ->required();
  cmd_sweep->add_option("--seeds", sweep_seeds, "paired seeds per point")
      ->capture_default_str();
  cmd_sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();
  cmd_sweep->add_option("--jobs", sweep_jobs, "parallel runs (0 = all processors)")
      ->capture_default_str();

  // --- calc ---
  auto* cmd_calc = app.add_subcommand("calc", "closed-form reliability arithmetic");
  cmd_calc->require_subcommand(1);
  auto* calc_fre = cmd_calc->add_subcommand(
      "full-read-error-prob", "probability a full read hits an unrecoverable bit error");
  double fre_gb = 0.0, fre_uber = 0.0;
  calc_fre->add_option("--capacity-gb", fre_gb, "capacity in GB (1e9 bytes)")->required();
  calc_fre->add_option("--uber", fre_uber, "unrecoverable bit error rate per bit")
      ->required();
  auto* calc_latent = cmd_calc->add_subcommand(
      "latent-errors", "expected unrecoverable bit errors over a service life");
  double lat_uber = 0.0, lat_rate = 64.0, lat_duty = 0.01, lat_years = 5.0;
  calc_latent->add_option("--uber", lat_uber)->required();
  calc_latent->add_option("--rate-mb-s", lat_rate, "sustained transfer rate, MB/s")
      ->capture_default_str();
  calc_latent->add_option("--duty", lat_duty, "duty cycle fraction")->capture_default_str();
  calc_latent->add_option("--years", lat_years)->capture_default_str();
  auto* calc_hazard = cmd_calc->add_subcommand(
      "hazard", "annual hazard from a probability-of-failure-in-service spec");
  double hz_p = 0.0, hz_years = 5.0;
  calc_hazard->add_option("--prob", hz_p, "failure probability over the service period")
      ->required();
  calc_hazard->add_option("--years", hz_years)->capture_default_str();
  auto* calc_loss = cmd_calc->add_subcommand(
      "replica-loss", "probability all n unrepaired replicas fail by t");
  int rl_n = 1;
  double rl_lambda = 0.0, rl_years = 0.0;
  calc_loss->add_option("--replicas", rl_n)->required();
  calc_loss->add_option("--hazard", rl_lambda, "per-replica annual hazard")->required();
  calc_loss->add_option("--years", rl_years)->required();

  // --- report ---
  auto* cmd_report = app.add_subcommand("report", "emit the disclosure report");
  std::string report_file;
  cmd_report->add_option("file", report_file, "scenario file")->required();

  // --- validate ---
  auto* cmd_validate = app.add_subcommand("validate", "validate a scenario file");
  std::string validate_file;
  cmd_validate->add_option("file", validate_file, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitRuntime;
  }

  try {
    if (*cmd_run) {
      auto sc = load_or_complain(run_file);
      if (!sc) return kExitValidation;
      if (!probe_writable(run_out)) {
        std::cerr << "error: output directory '" << run_out << "' is not writable\n";
        return kExitRuntime;
      }
      const presim::RunResult r = presim::run(*sc, run_seed);
      presim::write_run_outputs(r, run_out);
      std::printf("run complete: %s seed=%llu fraction_lost=%.6g -> %s\n",
                  sc->name.c_str(), static_cast<unsigned long long>(run_seed),
                  r.final.fraction_lost, run_out.c_str());
      return kExitOk;
    }
    if (*cmd_sweep) {
      const auto eq = sweep_axis.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "error: --axis must look like KEY=v1,v2,...\n";
        return kExitRuntime;
      }
      presim::SweepOptions opt;
      opt.axis_key = sweep_axis.substr(0, eq);
      for (const std::string& v : presim::cfg::split_list(sweep_axis.substr(eq + 1)))
        opt.axis_values.push_back(v);
      if (opt.axis_values.empty() || sweep_seeds < 1) {
        std::cerr << "error: need at least one axis value and one seed\n";
        return kExitRuntime;
      }
      opt.seeds = sweep_seeds;
      opt.jobs = sweep_jobs;
      opt.out_dir = sweep_out;

      presim::cfg::ParseResult parsed = presim::cfg::parse_file(sweep_file);
      if (!parsed.ok()) {
        print_diagnostics(parsed.diagnostics);
        return kExitValidation;
      }
      {
        // The base file must validate on its own before any point rewrite.
        presim::ValidationResult base = presim::build_scenario(parsed.root, sweep_file);
        print_warnings(base.warnings);
        if (!base.ok()) {
          print_diagnostics(base.errors);
          return kExitValidation;
        }
      }
      if (!probe_writable(sweep_out)) {
        std::cerr << "error: output directory '" << sweep_out << "' is not writable\n";
        return kExitRuntime;
      }
      const presim::SweepResult r = presim::run_sweep(parsed.root, sweep_file, opt);
      if (!r.ok()) {
        print_diagnostics(r.errors);
        return kExitValidation;
      }
      presim::write_sweep_outputs(r, opt);
      std::printf("sweep complete: %zu points x %d seeds -> %s\n", r.points.size(),
                  sweep_seeds, sweep_out.c_str());
      return kExitOk;
    }
    if (*cmd_calc) {
      using namespace presim::relcalc;
      if (*calc_fre) {
        const double p = full_read_error_prob(fre_gb * 1e9, fre_uber);
        print_value("full_read_error_prob", p);
        if (p > 0.0) print_value("one_in_every_n_reads", 1.0 / p);
      } else if (*calc_latent) {
        print_value("expected_unrecoverable_bit_errors",
                    service_life_latent_errors(lat_uber, lat_rate * 1e6, lat_duty,
                                               lat_years));
      } else if (*calc_hazard) {
        const double lambda = hazard_from_service_prob(hz_p, hz_years);
        print_value("annual_hazard", lambda);
        print_value("mttf_hours", MediaSpec::mttf_hours_from_hazard(lambda));
        print_value("round_trip_prob", service_prob_from_hazard(lambda, hz_years));
      } else if (*calc_loss) {
        print_value("replica_loss_prob", replica_loss_prob(rl_n, rl_lambda, rl_years));
      }
      return kExitOk;
    }
    if (*cmd_report) {
      auto sc = load_or_complain(report_file);
      if (!sc) return kExitValidation;
      std::cout << presim::disclosure_report(*sc);
      return kExitOk;
    }
    if (*cmd_validate) {
      auto sc = load_or_complain(validate_file);
      if (!sc) return kExitValidation;
      std::cout << "OK: " << validate_file << " (scenario '" << sc->name << "', hash "
                << sc->source_hash_hex << ")\n";
      return kExitOk;
    }
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
