#pragma once

// Sweep engine and the table writers behind the command-line tool.
//
// Sweep CSV (schema version 1), one row per n_r:
//   n_r, mean_fidelity, std_fidelity, leakage_G, leakage_E0, fidelity_s00 .. fidelity_sNN
// The sidecar manifest (JSON) records the schema version, the software
// version, the config hash, the echoed configuration and the wall time.

#include "config.hpp"
#include "fidelity.hpp"
#include "holonomy.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace hqc {

inline constexpr std::string_view kSoftwareVersion = "0.3.1";
inline constexpr int kSweepSchemaVersion = 1;

/// Slow-fluctuation grid (1 <= n_r <= 100) and fast-fluctuation grid.
inline const std::vector<int> kSlowGrid{1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 100};
inline const std::vector<int> kFastGrid{50, 100, 200, 500, 1000, 2000, 5000};

struct SweepConfig {
  Gate gate = Gate::Mixing;
  NoiseChannel channel = NoiseChannel::Intensity;
  double sigma = 0.1;
  double omega = 0.02;              ///< fs^-1
  double adiabaticTime = 7500.0;    ///< fs
  std::vector<int> extractions = kSlowGrid;
  int realizations = 5;
  std::uint64_t baseSeed = 1;
  double targetAngle = std::numbers::pi / 2;
  double detuningMeV = 5.0;
  double omegaSingleMeV = 5.0 / 15.0;
  int nStates = kBlochSampleSize;
  double omegaStep = kDefaultOmegaStep;
  unsigned threads = 1;
  std::string outputPath = ".";

  static SweepConfig fromKeyValues(const KeyValueConfig& kv) {
    static const std::vector<std::string> known{
        "gate",     "channel",   "sigma",     "omega_inv_fs", "t_ad_fs",  "n_r",     "realizations", "seed",
        "target_angle", "delta_mev", "omega_single_mev", "n_states", "omega_step", "threads", "out"};
    for (const auto& [key, value] : kv.entries())
      if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");

    SweepConfig c;
    c.gate = parseGate(kv.getString("gate", "mixing"));
    c.channel = parseChannel(kv.getString("channel", "intensity"));
    c.sigma = kv.getDouble("sigma", 0.1);
    const double omegaInv = kv.getDouble("omega_inv_fs", 50.0);
    if (!(omegaInv > 0.0)) throw ConfigError("omega_inv_fs must be positive");
    c.omega = 1.0 / omegaInv;
    c.adiabaticTime = kv.getDouble("t_ad_fs", c.gate == Gate::TwoQubitPhase ? 0.8 * units::kFsPerNs : 7500.0);
    c.extractions = kv.getIntList("n_r", kSlowGrid);
    c.realizations = static_cast<int>(kv.getInt("realizations", 5));
    c.baseSeed = kv.getUint("seed", 1);
    c.targetAngle = kv.getDouble("target_angle", std::numbers::pi / 2);
    c.detuningMeV = kv.getDouble("delta_mev", 5.0);
    c.omegaSingleMeV = kv.getDouble("omega_single_mev", c.detuningMeV / 15.0);
    c.nStates = static_cast<int>(kv.getInt("n_states", kBlochSampleSize));
    c.omegaStep = kv.getDouble("omega_step", kDefaultOmegaStep);
    c.threads = static_cast<unsigned>(kv.getInt("threads", 1));
    c.outputPath = kv.getString("out", ".");
    c.validate();
    return c;
  }

  static SweepConfig load(const std::string& path) { return fromKeyValues(KeyValueConfig::load(path)); }

  void validate() const {
    if (extractions.empty()) throw ConfigError("n_r list is empty");
    for (std::size_t i = 0; i < extractions.size(); ++i) {
      if (extractions[i] < 1) throw ConfigError("n_r values must be >= 1");
      if (i > 0 && extractions[i] <= extractions[i - 1]) throw ConfigError("n_r list must be strictly ascending");
    }
    if (realizations < 1) throw ConfigError("realizations must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be finite and >= 0");
    if (nStates < 1 || nStates > kBlochSampleSize) throw ConfigError("n_states must be in [1, 18]");
    if (!(omegaStep > 0.0) || omegaStep > kMaxOmegaStep)
      throw ConfigError(fmt::format("omega_step must lie in (0, {}]", kMaxOmegaStep));
    if (!(adiabaticTime > 0.0)) throw ConfigError("t_ad_fs must be positive");
  }

  /// Canonical text of every result-affecting field.
  std::string canonical() const {
    std::string nr;
    for (std::size_t i = 0; i < extractions.size(); ++i) nr += (i ? "," : "") + std::to_string(extractions[i]);
    return fmt::format(
        "gate={};channel={};sigma={:.17g};omega={:.17g};t_ad={:.17g};n_r={};realizations={};seed={};"
        "target_angle={:.17g};delta_mev={:.17g};omega_single_mev={:.17g};n_states={};omega_step={:.17g}",
        toString(gate), toString(channel), sigma, omega, adiabaticTime, nr, realizations, baseSeed, targetAngle,
        detuningMeV, omegaSingleMeV, nStates, omegaStep);
  }

  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 0x100000001B3ULL;
    }
    return h;
  }

  LoopSchedule schedule() const {
    switch (gate) {
      case Gate::Mixing: return mixingLoop(omega, adiabaticTime, targetAngle);
      case Gate::PhaseShift: return phaseShiftLoop(omega, adiabaticTime, targetAngle);
      case Gate::TwoQubitPhase: return twoQubitSchedule(detuningMeV, omegaSingleMeV, adiabaticTime, targetAngle);
      case Gate::DynamicalPi: return dynamicalPiPulse(omega);
    }
    throw ConfigError("unsupported gate");
  }

  FidelityOptions fidelityOptions() const { return {nStates, 0, omegaStep, threads}; }
};

struct SweepResult {
  SweepConfig config;
  std::vector<FidelityRecord> records;
  std::uint64_t configHash = 0;
  double wallSeconds = 0.0;
};

/// Fidelity records for several (n_r) points of one schedule. All
/// (n_r, state, realization) units share one worker pool; records are
/// assembled in index order, so the thread count never changes the output.
inline std::vector<FidelityRecord> fidelitySweep(const LoopSchedule& schedule, NoiseChannel channel, double sigma,
                                                 const std::vector<int>& extractions, int realizations,
                                                 std::uint64_t baseSeed, const FidelityOptions& opt,
                                                 std::atomic<std::size_t>* progress = nullptr) {
  std::vector<FidelityRun> runs;
  runs.reserve(extractions.size());
  for (int n : extractions)
    runs.emplace_back(schedule, NoiseSpec::forSchedule(schedule, channel, sigma, n, baseSeed), realizations, opt);

  std::vector<std::size_t> offsets{0};
  for (const auto& r : runs) offsets.push_back(offsets.back() + r.size());
  std::vector<RunOutcome> outcomes(offsets.back());
  parallelFor(outcomes.size(), opt.threads, [&](std::size_t unit) {
    const auto which = static_cast<std::size_t>(std::upper_bound(offsets.begin(), offsets.end(), unit) - offsets.begin()) - 1;
    outcomes[unit] = runs[which].evaluate(unit - offsets[which]);
    if (progress != nullptr) ++*progress;
  });

  std::vector<FidelityRecord> records;
  for (std::size_t i = 0; i < runs.size(); ++i)
    records.push_back(runs[i].aggregate(std::span(outcomes).subspan(offsets[i], runs[i].size())));
  return records;
}

inline SweepResult runSweep(const SweepConfig& config, std::atomic<std::size_t>* progress = nullptr) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const LoopSchedule schedule = config.schedule();
  SweepResult res{config, {}, config.hash(), 0.0};
  res.records = fidelitySweep(schedule, config.channel, config.sigma, config.extractions, config.realizations,
                              config.baseSeed, config.fidelityOptions(), progress);
  res.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

inline void writeSweepCsv(const SweepResult& res, std::ostream& out) {
  out << "n_r,mean_fidelity,std_fidelity,leakage_G,leakage_E0";
  for (int s = 0; s < res.config.nStates; ++s) fmt::print(out, ",fidelity_s{:02d}", s);
  out << '\n';
  for (const auto& r : res.records) {
    fmt::print(out, "{},{:.12f},{:.12f},{:.12e},{:.12e}", r.nExtractions, r.meanFidelity, r.stdFidelity, r.leakageG,
               r.leakageE0);
    for (double f : r.perState) fmt::print(out, ",{:.12f}", f);
    out << '\n';
  }
}

inline nlohmann::json gateMetadata(const LoopSchedule& schedule, NoiseChannel channel) {
  nlohmann::json g{{"gate", toString(schedule.gate())},
                   {"omega_fs_inv", schedule.omega()},
                   {"t_gate_fs", schedule.adiabaticTime()},
                   {"omega_t", schedule.adiabaticity()},
                   {"target_solid_angle", schedule.targetSolidAngle()},
                   {"basis", schedule.basis().labels}};
  if (const auto& tq = schedule.twoQubit()) {
    g["delta_mev"] = tq->detuningMeV;
    g["omega_single_mev"] = tq->omegaSingleMeV;
    g["omega_eff_mev"] = tq->omegaEffMeV;
    if (channel != NoiseChannel::None) g["noise_target"] = "omega_eff";
  }
  return g;
}

inline nlohmann::json sweepManifest(const SweepResult& res) {
  const SweepConfig& c = res.config;
  nlohmann::json cols = nlohmann::json::array({"n_r", "mean_fidelity", "std_fidelity", "leakage_G", "leakage_E0"});
  for (int s = 0; s < c.nStates; ++s) cols.push_back(fmt::format("fidelity_s{:02d}", s));
  return {{"schema", "hqc-sweep"},
          {"schema_version", kSweepSchemaVersion},
          {"software_version", kSoftwareVersion},
          {"config_hash", fmt::format("{:016x}", res.configHash)},
          {"config",
           {{"gate", toString(c.gate)},
            {"channel", toString(c.channel)},
            {"sigma", c.sigma},
            {"omega_inv_fs", 1.0 / c.omega},
            {"t_ad_fs", c.adiabaticTime},
            {"n_r", c.extractions},
            {"realizations", c.realizations},
            {"seed", c.baseSeed},
            {"target_angle", c.targetAngle},
            {"delta_mev", c.detuningMeV},
            {"omega_single_mev", c.omegaSingleMeV},
            {"n_states", c.nStates},
            {"omega_step", c.omegaStep}}},
          {"gate_metadata", gateMetadata(c.schedule(), c.channel)},
          {"columns", cols},
          {"rows", res.records.size()},
          {"wall_time_s", res.wallSeconds}};
}

// ---------------------------------------------------------------------------
// Parameter-space trajectories

/// Clean and noisy control vectors normalized by W, sampled at the midpoints
/// of `samplesPerInterval` sub-steps of every noise interval. Coordinates are
/// the real parts of (W+, W-, W0); noisy_norm is |W_noisy| / W.
inline void dumpLoopTrajectory(const LoopSchedule& schedule, const std::optional<NoiseSpec>& noise,
                               int samplesPerInterval, std::ostream& out) {
  if (samplesPerInterval < 1) throw std::invalid_argument("samplesPerInterval must be >= 1");
  NoiseTrajectory traj = NoiseTrajectory::silent(schedule.adiabaticTime());
  if (noise) {
    noise->validate(schedule.adiabaticTime());
    traj = sampleTrajectory(*noise);
  }
  const double w = schedule.omega();
  out << "t_fs,clean_x,clean_y,clean_z,noisy_x,noisy_y,noisy_z,noisy_norm\n";
  for (std::size_t k = 0; k < traj.perInterval.size(); ++k) {
    for (int j = 0; j < samplesPerInterval; ++j) {
      const double t = traj.noiseTime * (static_cast<double>(k) + (j + 0.5) / samplesPerInterval);
      const ControlField c = buildControlField(schedule, t);
      const ControlField n = perturbField(c, traj, t);
      fmt::print(out, "{:.10g},{:.15g},{:.15g},{:.15g},{:.15g},{:.15g},{:.15g},{:.15g}\n", t, c.plus.real() / w,
                 c.minus.real() / w, c.zero.real() / w, n.plus.real() / w, n.minus.real() / w, n.zero.real() / w,
                 n.norm() / w);
    }
  }
}

// ---------------------------------------------------------------------------
// Holonomic versus dynamical gate

/// Extractions seen by the dynamical pulse when the holonomic gate sees
/// n_r: the dynamical gate is taken 100 times faster, with at least one.
inline int dynamicalExtractions(int holonomicExtractions) {
  return std::max(1, (holonomicExtractions + 99) / 100);
}

struct ComparisonRow {
  int holonomicExtractions = 0;
  int dynamicalExtractions = 0;
  double dynamicalTimeOverNoiseTime = 0.0;  ///< T_dyn / T_n for T_n = T_ad / n_r
  FidelityRecord holonomic;
  FidelityRecord dynamical;
};

struct ComparisonResult {
  SweepConfig config;
  double dynamicalTime = 0.0;
  std::vector<ComparisonRow> rows;
};

/// Holonomic sweep from `config` and the pi pulse with the same W, channel,
/// sigma and base seed. The pulse is scored on the Bloch sample of {|G>, |E+>}.
inline ComparisonResult compareDynamical(const SweepConfig& config) {
  config.validate();
  const LoopSchedule holo = config.schedule();
  const LoopSchedule dyn = dynamicalPiPulse(config.omega);
  const FidelityOptions opt = config.fidelityOptions();
  std::vector<int> dynGrid;
  for (int n : config.extractions) {
    const int d = dynamicalExtractions(n);
    if (std::find(dynGrid.begin(), dynGrid.end(), d) == dynGrid.end()) dynGrid.push_back(d);
  }
  const auto holoRecords = fidelitySweep(holo, config.channel, config.sigma, config.extractions, config.realizations,
                                         config.baseSeed, opt);
  const auto dynRecords =
      fidelitySweep(dyn, config.channel, config.sigma, dynGrid, config.realizations, config.baseSeed, opt);

  ComparisonResult res{config, dyn.adiabaticTime(), {}};
  for (std::size_t i = 0; i < config.extractions.size(); ++i) {
    const int n = config.extractions[i];
    const int d = dynamicalExtractions(n);
    const auto j = static_cast<std::size_t>(std::find(dynGrid.begin(), dynGrid.end(), d) - dynGrid.begin());
    res.rows.push_back({n, d, dyn.adiabaticTime() * n / holo.adiabaticTime(), holoRecords[i], dynRecords[j]});
  }
  return res;
}

inline void writeComparisonCsv(const ComparisonResult& res, std::ostream& out) {
  out << "t_ad_over_t_n,n_r_dyn,t_dyn_over_t_n,holo_mean_fidelity,holo_std_fidelity,dyn_mean_fidelity,"
         "dyn_std_fidelity,fidelity_gap\n";
  for (const auto& r : res.rows)
    fmt::print(out, "{},{},{:.6f},{:.12f},{:.12f},{:.12f},{:.12f},{:.12f}\n", r.holonomicExtractions,
               r.dynamicalExtractions, r.dynamicalTimeOverNoiseTime, r.holonomic.meanFidelity,
               r.holonomic.stdFidelity, r.dynamical.meanFidelity, r.dynamical.stdFidelity,
               r.holonomic.meanFidelity - r.dynamical.meanFidelity);
}

// ---------------------------------------------------------------------------
// Ideal gate cross-check

struct IdealGateReport {
  IdealGate analytic;
  Mat2 wilczekZee;
  Mat2 connection;
  Mat2 evolved;          ///< logical block of the noiseless propagator
  double evolvedLeakage; ///< max over logical inputs of 1 - |logical block column|^2
  int steps = 0;
};

/// Per-basis-state overlaps |<U e_j | V e_j>|, j = 0, 1.
inline std::array<double, 2> columnOverlaps(const Mat2& u, const Mat2& v) {
  return {std::abs(u.col(0).dot(v.col(0))), std::abs(u.col(1).dot(v.col(1)))};
}

inline IdealGateReport idealGateReport(const LoopSchedule& schedule, int wzPoints = 10000,
                                       double omegaStep = kDefaultOmegaStep) {
  IdealGateReport rep;
  rep.analytic = idealGate(schedule);
  rep.wilczekZee = wilczekZeeHolonomy(schedule, wzPoints);
  rep.connection = holonomyFromConnection(schedule, wzPoints);
  rep.steps = defaultStepsPerInterval(schedule, 1, omegaStep);
  const Mat4 u = evolve(schedule, std::nullopt, QuantumState::basisState(basis::EPlus), rep.steps).propagator.matrix;
  const Frame b = logicalFrame();
  rep.evolved = b.adjoint() * u * b;
  rep.evolvedLeakage = 0.0;
  for (int j = 0; j < 2; ++j) rep.evolvedLeakage = std::max(rep.evolvedLeakage, 1.0 - rep.evolved.col(j).squaredNorm());
  return rep;
}

inline void printIdealGateReport(const LoopSchedule& schedule, const IdealGateReport& rep, std::ostream& out) {
  auto fmtMat = [](const Mat2& m) {
    return fmt::format("[[{:+.6f}{:+.6f}i, {:+.6f}{:+.6f}i], [{:+.6f}{:+.6f}i, {:+.6f}{:+.6f}i]]", m(0, 0).real(),
                       m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(), m(1, 0).real(), m(1, 0).imag(),
                       m(1, 1).real(), m(1, 1).imag());
  };
  fmt::print(out, "gate {}  W T = {:.4g}  geometric angle {:.12f}  evolution steps {}\n", toString(schedule.gate()),
             schedule.adiabaticity(), rep.analytic.geomPhase, rep.steps);
  fmt::print(out, "{:<12}{}\n", "analytic", fmtMat(rep.analytic.logicalUnitary));
  fmt::print(out, "{:<12}{}\n", "wilczek-zee", fmtMat(rep.wilczekZee));
  fmt::print(out, "{:<12}{}\n", "connection", fmtMat(rep.connection));
  fmt::print(out, "{:<12}{}\n", "evolved", fmtMat(rep.evolved));
  fmt::print(out, "\n{:<26}{:>14}{:>14}{:>14}\n", "pair", "overlap(0_L)", "overlap(1_L)", "max|diff|");
  auto row = [&](std::string_view name, const Mat2& a, const Mat2& b) {
    const auto ov = columnOverlaps(a, b);
    fmt::print(out, "{:<26}{:>14.10f}{:>14.10f}{:>14.3e}\n", name, ov[0], ov[1], maxAbs(a - b));
  };
  row("analytic vs wilczek-zee", rep.analytic.logicalUnitary, rep.wilczekZee);
  row("analytic vs connection", rep.analytic.logicalUnitary, rep.connection);
  row("analytic vs evolved", rep.analytic.logicalUnitary, rep.evolved);
  row("wilczek-zee vs evolved", rep.wilczekZee, rep.evolved);
  fmt::print(out, "evolved leakage out of the logical space: {:.3e}\n", rep.evolvedLeakage);
}

} // namespace hqc
