#pragma once

// Time-dependent Schroedinger integration.
//
// Each step of width h uses the Hamiltonian frozen at the step midpoint,
// U_step = exp(-i H(t + h/2) h), which is the second-order Magnus scheme.
// Steps never straddle a noise interval, so every step sees a single set of
// noise values. Step exponentials are exact, so U is unitary to round-off.

#include "model.hpp"
#include "noise.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace hqc {

/// Refuse steps with W h above this.
inline constexpr double kMaxOmegaStep = 0.1;
/// Default accuracy target for W h.
inline constexpr double kDefaultOmegaStep = 0.02;

struct QuantumState {
  Vec4 amplitudes = Vec4::Zero();

  static QuantumState basisState(int index) {
    QuantumState s;
    s.amplitudes(index) = 1.0;
    return s;
  }

  /// alpha |a> + beta |b>.
  static QuantumState superposition(int a, cplx alpha, int b, cplx beta) {
    QuantumState s;
    s.amplitudes(a) = alpha;
    s.amplitudes(b) += beta;
    return s;
  }

  double norm() const { return amplitudes.norm(); }
  double population(int index) const { return std::norm(amplitudes(index)); }
};

struct Propagator {
  Mat4 matrix = Mat4::Identity();
  double tStart = 0.0;
  double tEnd = 0.0;
};

struct Evolution {
  QuantumState state;
  Propagator propagator;
};

inline void requireNormalized(const QuantumState& psi, std::string_view what) {
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw std::invalid_argument(fmt::format("{} is not normalized (norm {:.12g})", what, psi.norm()));
}

/// Smallest steps-per-interval count with W h <= omegaStep.
inline int defaultStepsPerInterval(const LoopSchedule& schedule, int extractions,
                                   double omegaStep = kDefaultOmegaStep) {
  const double h = omegaStep / schedule.omega();
  const double interval = schedule.adiabaticTime() / extractions;
  return std::max(1, static_cast<int>(std::ceil(interval / h - 1e-9)));
}

/// Propagator of interval k of a trajectory, from `steps` midpoint steps.
inline Mat4 intervalPropagator(const LoopSchedule& schedule, const NoiseTrajectory& traj, std::size_t k, int steps) {
  const double t0 = traj.noiseTime * static_cast<double>(k);
  const double h = traj.noiseTime / steps;
  Mat4 u = Mat4::Identity();
  for (int j = 0; j < steps; ++j) {
    const double tm = t0 + (j + 0.5) * h;
    const ControlField f = perturbField(buildControlField(schedule, tm), traj, tm);
    u = couplingPropagator(f, h) * u;
  }
  return u;
}

/// Propagator over the intervals [first, last) of a trajectory.
inline Propagator evolveIntervals(const LoopSchedule& schedule, const NoiseTrajectory& traj, std::size_t first,
                                  std::size_t last, int stepsPerInterval) {
  if (stepsPerInterval < 1) throw std::invalid_argument("stepsPerInterval must be >= 1");
  if (first > last || last > traj.perInterval.size()) throw std::out_of_range("interval range outside trajectory");
  const double h = traj.noiseTime / stepsPerInterval;
  if (schedule.omega() * h > kMaxOmegaStep * (1.0 + 1e-12))
    throw std::invalid_argument(fmt::format("step W*h = {:.4g} exceeds {} (T_n = {} fs, {} steps per interval)",
                                            schedule.omega() * h, kMaxOmegaStep, traj.noiseTime, stepsPerInterval));
  Propagator p;
  p.tStart = traj.noiseTime * static_cast<double>(first);
  p.tEnd = traj.noiseTime * static_cast<double>(last);
  for (std::size_t k = first; k < last; ++k) p.matrix = intervalPropagator(schedule, traj, k, stepsPerInterval) * p.matrix;
  return p;
}

inline Evolution evolve(const LoopSchedule& schedule, const NoiseTrajectory& traj, const QuantumState& psi0,
                        int stepsPerInterval) {
  requireNormalized(psi0, "initial state");
  if (std::abs(traj.duration() - schedule.adiabaticTime()) > 1e-9 * schedule.adiabaticTime())
    throw ConfigError("noise trajectory does not cover the gate time");
  Propagator p = evolveIntervals(schedule, traj, 0, traj.perInterval.size(), stepsPerInterval);
  return {QuantumState{p.matrix * psi0.amplitudes}, p};
}

/// Evolve under an optional noise spec. Without noise the whole gate is one
/// interval of `stepsPerInterval` steps.
inline Evolution evolve(const LoopSchedule& schedule, const std::optional<NoiseSpec>& noise, const QuantumState& psi0,
                        int stepsPerInterval) {
  if (!noise) return evolve(schedule, NoiseTrajectory::silent(schedule.adiabaticTime()), psi0, stepsPerInterval);
  noise->validate(schedule.adiabaticTime());
  return evolve(schedule, sampleTrajectory(*noise), psi0, stepsPerInterval);
}

struct Leakage {
  double ground = 0.0;  ///< |<G|psi>|^2
  double ancilla = 0.0; ///< |<E0|psi>|^2
};

inline Leakage leakagePopulations(const QuantumState& psi) {
  return {psi.population(basis::G), psi.population(basis::EZero)};
}

/// Debug dump of an evolution: t, four populations and |W(t)|, sampled every
/// `stride` steps.
inline void writeEvolutionCsv(const LoopSchedule& schedule, const NoiseTrajectory& traj, const QuantumState& psi0,
                              int stepsPerInterval, int stride, std::ostream& out) {
  requireNormalized(psi0, "initial state");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const auto labels = schedule.basis().labels;
  fmt::print(out, "t_fs,p_{},p_{},p_{},p_{},omega_norm\n", labels[0], labels[1], labels[2], labels[3]);
  Vec4 psi = psi0.amplitudes;
  const double h = traj.noiseTime / stepsPerInterval;
  long step = 0;
  auto emit = [&](double t, const ControlField& f) {
    fmt::print(out, "{:.10g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", t, std::norm(psi(0)), std::norm(psi(1)),
               std::norm(psi(2)), std::norm(psi(3)), f.norm());
  };
  emit(0.0, perturbField(buildControlField(schedule, 0.0), traj, 0.0));
  for (std::size_t k = 0; k < traj.perInterval.size(); ++k) {
    for (int j = 0; j < stepsPerInterval; ++j) {
      const double tm = traj.noiseTime * static_cast<double>(k) + (j + 0.5) * h;
      const ControlField f = perturbField(buildControlField(schedule, tm), traj, tm);
      psi = couplingPropagator(f, h) * psi;
      if (++step % stride == 0) emit(tm + 0.5 * h, f);
    }
  }
}

} // namespace hqc
