// hqcsim: fidelity sweeps of holonomic gates under parametric noise.
//
//   hqcsim sweep             --config run.toml [--seed N] [--out DIR] [--threads N]
//   hqcsim trajectory        --config run.toml [--seed N] [--out DIR] [--n-r N] [--samples N]
//   hqcsim compare-dynamical --config run.toml [--seed N] [--out DIR] [--threads N]
//   hqcsim ideal-gate        --config run.toml [--points N]

#include <hqc/hqc.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void addCommon(CLI::App* cmd, CommonOptions& o, bool withThreads) {
  cmd->add_option("--config", o.config, "key-value run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "override the base seed");
  cmd->add_option("--out", o.out, "output directory");
  if (withThreads) cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

hqc::SweepConfig loadConfig(const CommonOptions& o) {
  auto kv = hqc::KeyValueConfig::load(o.config);
  if (o.seed) kv.set("seed", std::to_string(*o.seed));
  if (o.out) kv.set("out", *o.out);
  if (o.threads) kv.set("threads", std::to_string(*o.threads));
  return hqc::SweepConfig::fromKeyValues(kv);
}

std::ofstream openOutput(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path);
  if (!f) throw hqc::ConfigError("cannot write '" + path.string() + "'");
  std::cerr << "writing " << path.string() << '\n';
  return f;
}

void warnAdiabatic(const hqc::LoopSchedule& s) {
  if (s.adiabaticWarning())
    fmt::print(stderr, "warning: W T = {:.3g} is below 50; adiabatic errors will be visible\n", s.adiabaticity());
}

int runSweepCommand(const CommonOptions& o) {
  const hqc::SweepConfig cfg = loadConfig(o);
  warnAdiabatic(cfg.schedule());
  std::atomic<std::size_t> done{0};
  const std::size_t total = cfg.extractions.size() * static_cast<std::size_t>(cfg.nStates * cfg.realizations);
  std::jthread reporter([&](std::stop_token st) {
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    while (!cv.wait_for(lock, st, std::chrono::seconds(2), [] { return false; }) && !st.stop_requested())
      fmt::print(stderr, "\r{}/{} evolutions", done.load(), total);
  });
  const hqc::SweepResult res = hqc::runSweep(cfg, &done);
  reporter.request_stop();
  fmt::print(stderr, "\r{}/{} evolutions in {:.1f} s\n", total, total, res.wallSeconds);

  auto csv = openOutput(cfg.outputPath, "sweep.csv");
  hqc::writeSweepCsv(res, csv);
  auto manifest = openOutput(cfg.outputPath, "sweep.manifest.json");
  manifest << hqc::sweepManifest(res).dump(2) << '\n';
  for (const auto& r : res.records)
    fmt::print("n_r {:>6}  F = {:.4f} +- {:.4f}  leakage G {:.3e} E0 {:.3e}\n", r.nExtractions, r.meanFidelity,
               r.standardError(), r.leakageG, r.leakageE0);
  return 0;
}

int runTrajectoryCommand(const CommonOptions& o, int extractions, int samples) {
  const hqc::SweepConfig cfg = loadConfig(o);
  const hqc::LoopSchedule schedule = cfg.schedule();
  const auto spec = hqc::NoiseSpec::forSchedule(schedule, cfg.channel, cfg.sigma, extractions,
                                                hqc::deriveSeed(cfg.baseSeed, 0, 0));
  auto loop = openOutput(cfg.outputPath, "trajectory.csv");
  hqc::dumpLoopTrajectory(schedule, spec, samples, loop);
  auto noise = openOutput(cfg.outputPath, "noise.csv");
  hqc::writeTrajectoryCsv(hqc::sampleTrajectory(spec), noise);
  return 0;
}

int runCompareCommand(const CommonOptions& o) {
  const hqc::SweepConfig cfg = loadConfig(o);
  const hqc::ComparisonResult res = hqc::compareDynamical(cfg);
  auto csv = openOutput(cfg.outputPath, "compare_dynamical.csv");
  hqc::writeComparisonCsv(res, csv);
  fmt::print("T_dyn = {:.3f} fs, T_ad = {:.1f} fs (ratio {:.1f})\n", res.dynamicalTime, cfg.adiabaticTime,
             cfg.adiabaticTime / res.dynamicalTime);
  for (const auto& r : res.rows)
    fmt::print("T_ad/T_n {:>6}  n_dyn {:>3}  F_holo {:.4f}  F_dyn {:.4f}\n", r.holonomicExtractions,
               r.dynamicalExtractions, r.holonomic.meanFidelity, r.dynamical.meanFidelity);
  return 0;
}

int runIdealGateCommand(const CommonOptions& o, int points) {
  const hqc::SweepConfig cfg = loadConfig(o);
  const hqc::LoopSchedule schedule = cfg.schedule();
  warnAdiabatic(schedule);
  hqc::printIdealGateReport(schedule, hqc::idealGateReport(schedule, points, cfg.omegaStep), std::cout);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holonomic gate fidelity under parametric control noise"};
  app.require_subcommand(1);

  CommonOptions sweepOpts, trajOpts, compareOpts, idealOpts;
  int trajExtractions = 2;
  int trajSamples = 50;
  int wzPoints = 10000;

  auto* sweep = app.add_subcommand("sweep", "fidelity versus number of noise extractions");
  addCommon(sweep, sweepOpts, true);
  auto* traj = app.add_subcommand("trajectory", "clean and noisy control-parameter loop");
  addCommon(traj, trajOpts, false);
  traj->add_option("--n-r", trajExtractions, "number of noise extractions")->check(CLI::PositiveNumber);
  traj->add_option("--samples", trajSamples, "samples per noise interval")->check(CLI::PositiveNumber);
  auto* compare = app.add_subcommand("compare-dynamical", "holonomic gate versus pi pulse under the same noise");
  addCommon(compare, compareOpts, true);
  auto* ideal = app.add_subcommand("ideal-gate", "analytic, Wilczek-Zee and evolved gate overlaps");
  addCommon(ideal, idealOpts, false);
  ideal->add_option("--points", wzPoints, "loop points for the Wilczek-Zee product")->check(CLI::Range(100, 10000000));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return runSweepCommand(sweepOpts);
    if (*traj) return runTrajectoryCommand(trajOpts, trajExtractions, trajSamples);
    if (*compare) return runCompareCommand(compareOpts);
    if (*ideal) return runIdealGateCommand(idealOpts, wzPoints);
  } catch (const hqc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
