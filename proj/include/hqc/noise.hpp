#pragma once

// Piecewise-constant parametric noise on the three control lasers.
//
// The gate time is split into n_r intervals of length T_n. Each interval
// holds a constant intensity offset dW_i ~ N(0, (sigma W)^2) and a constant
// phase xi_i ~ N(0, sigma^2) per laser i in (+, -, 0).
//
// Random numbers: xoshiro256** seeded through SplitMix64; normal deviates
// from the Marsaglia polar method. Every interval consumes six deviates in
// the order dW+, dW-, dW0, xi+, xi-, xi0 whatever the channel, so intensity
// and combined runs with one seed share their intensity offsets.

#include "errors.hpp"
#include "model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace hqc {

enum class NoiseChannel { None, Intensity, Phase, Both };

inline std::string_view toString(NoiseChannel c) {
  switch (c) {
    case NoiseChannel::None: return "none";
    case NoiseChannel::Intensity: return "intensity";
    case NoiseChannel::Phase: return "phase";
    case NoiseChannel::Both: return "both";
  }
  return "?";
}

inline NoiseChannel parseChannel(std::string_view s) {
  if (s == "none") return NoiseChannel::None;
  if (s == "intensity") return NoiseChannel::Intensity;
  if (s == "phase") return NoiseChannel::Phase;
  if (s == "both") return NoiseChannel::Both;
  throw ConfigError("unknown noise channel '" + std::string(s) + "'");
}

inline bool hasIntensity(NoiseChannel c) { return c == NoiseChannel::Intensity || c == NoiseChannel::Both; }
inline bool hasPhase(NoiseChannel c) { return c == NoiseChannel::Phase || c == NoiseChannel::Both; }

// ---------------------------------------------------------------------------
// Random numbers

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** 1.0 (Blackman & Vigna).
class Xoshiro256 {
public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static Xoshiro256 fromState(const std::array<std::uint64_t, 4>& state) {
    Xoshiro256 g(0);
    g.s_ = state;
    return g;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
  std::array<std::uint64_t, 4> s_{};
};

/// Standard normal deviates by the Marsaglia polar method.
class NormalSource {
public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * rng_.uniform() - 1.0;
      v = 2.0 * rng_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    hasSpare_ = true;
    return u * f;
  }

private:
  Xoshiro256 rng_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

/// Seed of one (initial state, realization) work unit.
inline std::uint64_t deriveSeed(std::uint64_t baseSeed, std::uint64_t stateIndex, std::uint64_t realizationIndex) {
  std::uint64_t s = baseSeed;
  std::uint64_t h = splitmix64(s);
  s = h ^ (stateIndex + 0x632BE59BD9B4E019ULL);
  h = splitmix64(s);
  s = h ^ (realizationIndex + 0x8CB92BA72F3D8DD7ULL);
  return splitmix64(s);
}

// ---------------------------------------------------------------------------
// Noise model

struct NoiseSpec {
  NoiseChannel channel = NoiseChannel::None;
  double sigma = 0.0;       ///< relative intensity std-dev; also the phase std-dev in rad
  double omega = 0.0;       ///< Rabi scale W the intensity offsets are relative to [fs^-1]
  double noiseTime = 0.0;   ///< T_n [fs]
  std::uint64_t seed = 0;
  int extractions = 1;      ///< n_r = T_ad / T_n

  /// Spec with T_n = T_ad / n_r for a schedule.
  static NoiseSpec forSchedule(const LoopSchedule& schedule, NoiseChannel channel, double sigma, int extractions,
                               std::uint64_t seed) {
    if (extractions < 1) throw ConfigError("number of extractions must be >= 1");
    return {channel, sigma, schedule.omega(), schedule.adiabaticTime() / extractions, seed, extractions};
  }

  double duration() const { return noiseTime * extractions; }

  /// Throws unless n_r * T_n reproduces the gate time.
  void validate(double adiabaticTime) const {
    if (extractions < 1) throw ConfigError("number of extractions must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be finite and >= 0");
    if (!(noiseTime > 0.0)) throw ConfigError("noise time must be positive");
    if (std::abs(duration() - adiabaticTime) > 1e-9 * adiabaticTime)
      throw ConfigError(fmt::format("gate time {} fs is not n_r = {} times T_n = {} fs", adiabaticTime,
                                    extractions, noiseTime));
  }
};

struct NoiseInterval {
  std::array<double, 3> dOmega{};  ///< intensity offsets (+, -, 0) [fs^-1]
  std::array<double, 3> xi{};      ///< phases (+, -, 0) [rad]
};

struct NoiseTrajectory {
  NoiseChannel channel = NoiseChannel::None;
  double noiseTime = 0.0;
  std::vector<NoiseInterval> perInterval;

  int extractions() const { return static_cast<int>(perInterval.size()); }
  double duration() const { return noiseTime * static_cast<double>(perInterval.size()); }

  /// Noiseless "trajectory" of n intervals covering `duration`.
  static NoiseTrajectory silent(double duration, int intervals = 1) {
    if (intervals < 1) throw ConfigError("number of extractions must be >= 1");
    return {NoiseChannel::None, duration / intervals, std::vector<NoiseInterval>(static_cast<std::size_t>(intervals))};
  }

  std::size_t intervalIndex(double t) const {
    if (!(t >= 0.0) || !(t < duration()))
      throw std::domain_error(fmt::format("time {} fs outside the noise window [0, {})", t, duration()));
    const auto k = static_cast<std::size_t>(std::floor(t / noiseTime));
    return std::min(k, perInterval.size() - 1);
  }
};

inline NoiseTrajectory sampleTrajectory(const NoiseSpec& spec) {
  if (spec.extractions < 1) throw ConfigError("number of extractions must be >= 1");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw ConfigError("noise sigma must be finite and >= 0");
  if (!(spec.noiseTime > 0.0)) throw ConfigError("noise time must be positive");
  NoiseTrajectory traj{spec.channel, spec.noiseTime, std::vector<NoiseInterval>(static_cast<std::size_t>(spec.extractions))};
  if (spec.channel == NoiseChannel::None) return traj;
  NormalSource normal(spec.seed);
  const double intensityScale = spec.sigma * spec.omega;
  for (auto& iv : traj.perInterval) {
    for (auto& d : iv.dOmega) d = intensityScale * normal();
    for (auto& x : iv.xi) x = spec.sigma * normal();
    if (!hasIntensity(spec.channel)) iv.dOmega = {};
    if (!hasPhase(spec.channel)) iv.xi = {};
  }
  return traj;
}

/// Noisy field at time t: phase factors e^{i xi_i} first, then additive offsets.
inline ControlField perturbField(const ControlField& clean, const NoiseTrajectory& traj, double t) {
  const NoiseInterval& iv = traj.perInterval[traj.intervalIndex(t)];
  if (traj.channel == NoiseChannel::None) return clean;
  std::array<cplx, 3> w = clean.components();
  if (hasPhase(traj.channel))
    for (std::size_t i = 0; i < 3; ++i) w[i] *= std::polar(1.0, iv.xi[i]);
  if (hasIntensity(traj.channel))
    for (std::size_t i = 0; i < 3; ++i) w[i] += iv.dOmega[i];
  return {w[0], w[1], w[2]};
}

/// Audit dump: interval, dOmegaPlus, dOmegaMinus, dOmegaZero, xiPlus, xiMinus, xiZero.
inline void writeTrajectoryCsv(const NoiseTrajectory& traj, std::ostream& out) {
  out << "interval,dOmegaPlus,dOmegaMinus,dOmegaZero,xiPlus,xiMinus,xiZero\n";
  for (std::size_t k = 0; k < traj.perInterval.size(); ++k) {
    const auto& iv = traj.perInterval[k];
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", k, iv.dOmega[0], iv.dOmega[1],
               iv.dOmega[2], iv.xi[0], iv.xi[1], iv.xi[2]);
  }
}

} // namespace hqc
