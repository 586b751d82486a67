#pragma once

// Gate fidelity under noise: F = |<psi_ref|psi_noisy>| averaged over noise
// realizations and over 18 logical initial states on the Bloch sphere.
// psi_ref is the noiseless evolution on the same step grid, so F isolates
// the effect of the noise from the finite-time adiabatic error.

#include "noise.hpp"
#include "parallel.hpp"
#include "propagate.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hqc {

inline constexpr int kBlochSampleSize = 18;

/// Logical amplitudes (alpha, beta) of the sampled initial states.
struct StateSample {
  std::array<Vec2, kBlochSampleSize> states;
};

/// Poles (2 states) plus rings at polar angles pi/3 and 2pi/3 with eight
/// equispaced azimuths each (16 states). Entry 0 is the north pole |0_L>,
/// entry 1 the south pole |1_L>.
inline StateSample blochSample() {
  StateSample s;
  auto point = [](double polar, double azimuth) {
    return Vec2(std::cos(0.5 * polar), std::polar(std::sin(0.5 * polar), azimuth));
  };
  s.states[0] = Vec2(1.0, 0.0);
  s.states[1] = Vec2(0.0, 1.0);
  std::size_t k = 2;
  for (double polar : {std::numbers::pi / 3, 2 * std::numbers::pi / 3})
    for (int j = 0; j < 8; ++j) s.states[k++] = point(polar, 2 * std::numbers::pi * j / 8);
  return s;
}

/// Basis indices of the logical qubit a gate acts on.
inline std::pair<int, int> logicalPair(Gate gate) {
  return gate == Gate::DynamicalPi ? std::pair{basis::G, basis::EPlus} : std::pair{basis::EPlus, basis::EMinus};
}

inline QuantumState liftLogical(const Vec2& amplitudes, std::pair<int, int> pair) {
  return QuantumState::superposition(pair.first, amplitudes(0), pair.second, amplitudes(1));
}

inline double stateFidelity(const QuantumState& ideal, const QuantumState& noisy) {
  requireNormalized(ideal, "reference state");
  requireNormalized(noisy, "noisy state");
  const double overlap = std::abs(ideal.amplitudes.dot(noisy.amplitudes));
  // normalizing by sqrt(|a|^2 |b|^2) gives exactly 1 for identical inputs
  const double f = overlap / std::sqrt(ideal.amplitudes.squaredNorm() * noisy.amplitudes.squaredNorm());
  return std::clamp(f, 0.0, 1.0);
}

struct FidelityRecord {
  int nExtractions = 0;
  double noiseTime = 0.0;
  std::vector<double> perState;
  std::vector<double> perStateStdDev;
  double meanFidelity = 0.0;
  double stdFidelity = 0.0;  ///< sample std-dev over all (state, realization) runs
  int runs = 0;
  double leakageG = 0.0;
  double leakageE0 = 0.0;
  std::vector<std::uint64_t> seeds;

  /// Standard error of meanFidelity.
  double standardError() const { return runs > 1 ? stdFidelity / std::sqrt(static_cast<double>(runs)) : 0.0; }
};

struct FidelityOptions {
  int nStates = kBlochSampleSize;  ///< use the first n entries of the Bloch sample
  int stepsPerInterval = 0;        ///< 0 selects W h <= omegaStep
  double omegaStep = kDefaultOmegaStep;
  unsigned threads = 1;
};

/// Outcome of one (state, realization) evolution.
struct RunOutcome {
  double fidelity = 0.0;
  double leakageG = 0.0;
  double leakageE0 = 0.0;
  std::uint64_t seed = 0;
};

/// All evolutions behind one FidelityRecord, addressable as independent
/// units so callers can schedule them in any order.
class FidelityRun {
public:
  FidelityRun(const LoopSchedule& schedule, const NoiseSpec& noise, int realizations, const FidelityOptions& opt)
      : schedule_(&schedule), noise_(noise), realizations_(realizations), nStates_(opt.nStates),
        pair_(logicalPair(schedule.gate())), sample_(blochSample()) {
    if (realizations < 1) throw ConfigError("realizations must be >= 1");
    if (nStates_ < 1 || nStates_ > kBlochSampleSize) throw ConfigError("state count must be in [1, 18]");
    noise_.validate(schedule.adiabaticTime());
    steps_ = opt.stepsPerInterval > 0 ? opt.stepsPerInterval
                                      : defaultStepsPerInterval(schedule, noise_.extractions, opt.omegaStep);
    const NoiseTrajectory silent = NoiseTrajectory::silent(schedule.adiabaticTime(), noise_.extractions);
    reference_ = evolveIntervals(schedule, silent, 0, silent.perInterval.size(), steps_).matrix;
  }

  std::size_t size() const { return static_cast<std::size_t>(nStates_) * static_cast<std::size_t>(realizations_); }
  int stepsPerInterval() const { return steps_; }
  const Mat4& referencePropagator() const { return reference_; }

  /// Unit u = state * realizations + realization.
  RunOutcome evaluate(std::size_t unit) const {
    const auto state = unit / static_cast<std::size_t>(realizations_);
    const auto realization = unit % static_cast<std::size_t>(realizations_);
    NoiseSpec spec = noise_;
    spec.seed = deriveSeed(noise_.seed, state, realization);
    const QuantumState psi0 = liftLogical(sample_.states[state], pair_);
    const QuantumState ref{reference_ * psi0.amplitudes};
    const Evolution out = evolve(*schedule_, sampleTrajectory(spec), psi0, steps_);
    const Leakage leak = leakagePopulations(out.state);
    return {stateFidelity(ref, out.state), leak.ground, leak.ancilla, spec.seed};
  }

  FidelityRecord aggregate(std::span<const RunOutcome> outcomes) const {
    if (outcomes.size() != size()) throw std::invalid_argument("outcome count does not match the run");
    FidelityRecord rec;
    rec.nExtractions = noise_.extractions;
    rec.noiseTime = noise_.noiseTime;
    rec.runs = static_cast<int>(outcomes.size());
    const auto r = static_cast<std::size_t>(realizations_);
    double sum = 0.0, sumSq = 0.0;
    for (int s = 0; s < nStates_; ++s) {
      double m = 0.0;
      for (std::size_t k = 0; k < r; ++k) m += outcomes[static_cast<std::size_t>(s) * r + k].fidelity;
      m /= static_cast<double>(r);
      double v = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        const double d = outcomes[static_cast<std::size_t>(s) * r + k].fidelity - m;
        v += d * d;
      }
      rec.perState.push_back(m);
      rec.perStateStdDev.push_back(r > 1 ? std::sqrt(v / static_cast<double>(r - 1)) : 0.0);
    }
    for (const RunOutcome& o : outcomes) {
      sum += o.fidelity;
      sumSq += o.fidelity * o.fidelity;
      rec.leakageG += o.leakageG;
      rec.leakageE0 += o.leakageE0;
      rec.seeds.push_back(o.seed);
    }
    const double n = static_cast<double>(outcomes.size());
    double meanOfStates = 0.0;
    for (double f : rec.perState) meanOfStates += f;
    rec.meanFidelity = meanOfStates / static_cast<double>(rec.perState.size());
    const double mu = sum / n;
    rec.stdFidelity = outcomes.size() > 1 ? std::sqrt(std::max(0.0, (sumSq - n * mu * mu) / (n - 1.0))) : 0.0;
    rec.leakageG /= n;
    rec.leakageE0 /= n;
    return rec;
  }

private:
  const LoopSchedule* schedule_;
  NoiseSpec noise_;
  int realizations_;
  int nStates_;
  std::pair<int, int> pair_;
  StateSample sample_;
  int steps_ = 1;
  Mat4 reference_;
};

/// Noisy evolutions of every sampled state, `realizations` times each with
/// seeds deriveSeed(noise.seed, state, realization), compared against the
/// noiseless evolution.
inline FidelityRecord gateFidelity(const LoopSchedule& schedule, const NoiseSpec& noise, int realizations = 5,
                                   const FidelityOptions& opt = {}) {
  const FidelityRun run(schedule, noise, realizations, opt);
  std::vector<RunOutcome> outcomes(run.size());
  parallelFor(run.size(), opt.threads, [&](std::size_t i) { outcomes[i] = run.evaluate(i); });
  return run.aggregate(outcomes);
}

} // namespace hqc
