#pragma once

// Driven four-level model: basis, control fields, Hamiltonians and loop schedules.
//
// Basis order (fixed): 0 = |G>, 1 = |E+>, 2 = |E->, 3 = |E0>. The two-qubit
// gate reuses the same slots for |GG>, |E+E+>, |E-E->, |A> (ancilla).
//
// Hamiltonian with hbar = 1:
//   H = -(W+ |E+> + W- |E-> + W0 |E0>) <G| + h.c.
// so H(i,0) = -W_i and H(0,i) = -conj(W_i).

#include "errors.hpp"
#include "linalg.hpp"
#include "units.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hqc {

namespace basis {
inline constexpr int G = 0;
inline constexpr int EPlus = 1;
inline constexpr int EMinus = 2;
inline constexpr int EZero = 3;
} // namespace basis

struct Basis {
  std::array<std::string, 4> labels;

  static Basis singleQubit() { return {{"G", "E+", "E-", "E0"}}; }
  static Basis twoQubit() { return {{"GG", "E+E+", "E-E-", "A"}}; }
};

enum class Gate { Mixing, PhaseShift, TwoQubitPhase, DynamicalPi };

inline std::string_view toString(Gate g) {
  switch (g) {
    case Gate::Mixing: return "mixing";
    case Gate::PhaseShift: return "phase_shift";
    case Gate::TwoQubitPhase: return "two_qubit_phase";
    case Gate::DynamicalPi: return "dynamical_pi";
  }
  return "?";
}

inline Gate parseGate(std::string_view s) {
  if (s == "mixing") return Gate::Mixing;
  if (s == "phase_shift" || s == "phase") return Gate::PhaseShift;
  if (s == "two_qubit_phase" || s == "two_qubit") return Gate::TwoQubitPhase;
  if (s == "dynamical_pi" || s == "dynamical") return Gate::DynamicalPi;
  throw ConfigError("unknown gate '" + std::string(s) + "'");
}

inline bool isHolonomic(Gate g) { return g != Gate::DynamicalPi; }

/// Complex Rabi frequencies [fs^-1] of the three lasers at one instant.
struct ControlField {
  cplx plus{};
  cplx minus{};
  cplx zero{};

  std::array<cplx, 3> components() const { return {plus, minus, zero}; }
  double norm() const { return std::sqrt(std::norm(plus) + std::norm(minus) + std::norm(zero)); }
  bool finite() const {
    for (const cplx& c : components())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }
  friend bool operator==(const ControlField&, const ControlField&) = default;
};

struct HamiltonianSample {
  Mat4 matrix;
  double time = 0.0;
};

/// Piecewise-smooth path t -> (theta, phi) in a gate's control chart.
/// `breakpoints` holds the ends of the smooth pieces, including 0 and T.
struct ChartPath {
  std::function<double(double)> theta;
  std::function<double(double)> phi;
  std::function<double(double)> thetaRate;
  std::function<double(double)> phiRate;
  std::vector<double> breakpoints;
};

/// Metadata for the effective two-photon two-qubit gate.
struct TwoQubitParams {
  double detuningMeV = 0.0;
  double omegaSingleMeV = 0.0;
  double omegaEffMeV = 0.0;
};

/// A deterministic gate schedule: chart path plus the Rabi radius and duration.
class LoopSchedule {
public:
  LoopSchedule(Gate gate, double omega, double adiabaticTime, double targetSolidAngle, ChartPath path,
               std::optional<TwoQubitParams> twoQubit = std::nullopt)
      : gate_(gate), omega_(omega), adiabaticTime_(adiabaticTime), targetSolidAngle_(targetSolidAngle),
        path_(std::move(path)), twoQubit_(twoQubit) {
    if (!(omega_ > 0.0) || !std::isfinite(omega_)) throw ConfigError("Rabi frequency must be positive");
    if (!(adiabaticTime_ > 0.0) || !std::isfinite(adiabaticTime_)) throw ConfigError("gate time must be positive");
    if (path_.breakpoints.size() < 2) throw ConfigError("chart path needs at least one piece");
  }

  Gate gate() const { return gate_; }
  double omega() const { return omega_; }
  double adiabaticTime() const { return adiabaticTime_; }
  double targetSolidAngle() const { return targetSolidAngle_; }
  const std::optional<TwoQubitParams>& twoQubit() const { return twoQubit_; }
  const std::vector<double>& breakpoints() const { return path_.breakpoints; }

  double theta(double t) const { return path_.theta(t); }
  double phi(double t) const { return path_.phi(t); }
  double thetaRate(double t) const { return path_.thetaRate(t); }
  double phiRate(double t) const { return path_.phiRate(t); }

  /// Omega * T_ad. Values below 50 are outside the comfortable adiabatic regime.
  double adiabaticity() const { return omega_ * adiabaticTime_; }
  bool adiabaticWarning() const { return isHolonomic(gate_) && adiabaticity() < 50.0; }

  Basis basis() const { return gate_ == Gate::TwoQubitPhase ? Basis::twoQubit() : Basis::singleQubit(); }

private:
  Gate gate_;
  double omega_;
  double adiabaticTime_;
  double targetSolidAngle_;
  ChartPath path_;
  std::optional<TwoQubitParams> twoQubit_;
};

/// Noiseless Rabi triple of a gate's chart at (theta, phi).
///   Mixing:     W- = W sin(th) cos(ph), W+ = W sin(th) sin(ph), W0 = W cos(th)
///   PhaseShift: W- = 0, W+ = -W sin(th/2) e^{i ph}, W0 = W cos(th/2)
///   DynamicalPi: constant W+ = W, the other lasers off.
inline ControlField chartField(Gate gate, double omega, double theta, double phi) {
  switch (gate) {
    case Gate::Mixing:
      return {omega * std::sin(theta) * std::sin(phi), omega * std::sin(theta) * std::cos(phi),
              omega * std::cos(theta)};
    case Gate::PhaseShift:
    case Gate::TwoQubitPhase:
      return {-omega * std::sin(0.5 * theta) * std::polar(1.0, phi), cplx{0.0, 0.0}, omega * std::cos(0.5 * theta)};
    case Gate::DynamicalPi:
      return {omega, 0.0, 0.0};
  }
  return {};
}

inline ControlField buildControlField(const LoopSchedule& schedule, double t) {
  if (!(t >= 0.0 && t <= schedule.adiabaticTime()))
    throw std::domain_error("time " + std::to_string(t) + " fs outside [0, " +
                            std::to_string(schedule.adiabaticTime()) + "]");
  return chartField(schedule.gate(), schedule.omega(), schedule.theta(t), schedule.phi(t));
}

inline HamiltonianSample assembleHamiltonian(const ControlField& field, double time = 0.0) {
  Mat4 h = Mat4::Zero();
  const auto w = field.components();
  for (int i = 0; i < 3; ++i) {
    h(i + 1, 0) = -w[static_cast<std::size_t>(i)];
    h(0, i + 1) = -std::conj(w[static_cast<std::size_t>(i)]);
  }
  return {h, time};
}

/// exp(-i H dt) for the coupling Hamiltonian, in closed form.
///
/// With |v> = sum_i W_i |E_i>, r = |v|, |b> = |v>/r and X = |b><G| + |G><b|,
/// H = -r X and X^2 projects onto span{|G>, |b>}, hence
///   exp(-i H dt) = 1 + (cos(r dt) - 1) X^2 + i sin(r dt) X.
/// This is the spectral decomposition for eigenvalues {+r, -r, 0, 0}.
inline Mat4 couplingPropagator(const ControlField& field, double dt) {
  Mat4 u = Mat4::Identity();
  const double r = field.norm();
  if (r == 0.0) return u;
  const auto w = field.components();
  std::array<cplx, 3> b{};
  for (std::size_t i = 0; i < 3; ++i) b[i] = w[i] / r;
  const double half = 0.5 * r * dt;
  const double cm1 = -2.0 * std::sin(half) * std::sin(half);  // cos(r dt) - 1
  const cplx is = kI * std::sin(r * dt);
  u(0, 0) = 1.0 + cm1;
  for (int j = 0; j < 3; ++j) {
    const cplx bj = b[static_cast<std::size_t>(j)];
    u(0, j + 1) = is * std::conj(bj);
    u(j + 1, 0) = is * bj;
    for (int k = 0; k < 3; ++k) u(j + 1, k + 1) += cm1 * bj * std::conj(b[static_cast<std::size_t>(k)]);
  }
  return u;
}

namespace detail {

/// Three geodesic legs from the north pole: theta 0 -> thetaMax at phi = 0,
/// phi 0 -> phiMax at theta = thetaMax, theta thetaMax -> 0 at phi = phiMax.
/// Each leg takes T/3 at constant rate.
inline ChartPath threeLegPath(double duration, double thetaMax, double phiMax) {
  const double leg = duration / 3.0;
  const double t1 = leg;
  const double t2 = 2.0 * leg;
  ChartPath p;
  p.theta = [=](double t) {
    if (t < t1) return thetaMax * (t / leg);
    if (t < t2) return thetaMax;
    return thetaMax * ((duration - t) / leg);  // exactly 0 at t = T
  };
  p.phi = [=](double t) {
    if (t < t1) return 0.0;
    if (t < t2) return phiMax * ((t - t1) / leg);
    return phiMax;
  };
  p.thetaRate = [=](double t) {
    if (t < t1) return thetaMax / leg;
    if (t < t2) return 0.0;
    return -thetaMax / leg;
  };
  p.phiRate = [=](double t) { return (t >= t1 && t < t2) ? phiMax / leg : 0.0; };
  p.breakpoints = {0.0, t1, t2, duration};
  return p;
}

inline ChartPath constantPath(double duration, double theta, double phi) {
  ChartPath p;
  p.theta = [=](double) { return theta; };
  p.phi = [=](double) { return phi; };
  p.thetaRate = [](double) { return 0.0; };
  p.phiRate = [](double) { return 0.0; };
  p.breakpoints = {0.0, duration};
  return p;
}

} // namespace detail

/// Mixing-gate loop enclosing solid angle `targetAngle`. The holonomy is
/// exp(i targetAngle sigma_y) on span{|E+>, |E->}.
inline LoopSchedule mixingLoop(double omega, double adiabaticTime, double targetAngle = std::numbers::pi / 2) {
  if (!(targetAngle >= 0.0 && targetAngle < 2.0 * std::numbers::pi))
    throw ConfigError("mixing loop solid angle must lie in [0, 2pi)");
  return LoopSchedule(Gate::Mixing, omega, adiabaticTime, targetAngle,
                      detail::threeLegPath(adiabaticTime, std::numbers::pi / 2, targetAngle));
}

/// Phase-gate loop with geometric phase `targetPhase` = 1/2 * (enclosed chart area).
inline LoopSchedule phaseShiftLoop(double omega, double adiabaticTime, double targetPhase = std::numbers::pi / 2) {
  if (!(targetPhase >= 0.0 && targetPhase < std::numbers::pi))
    throw ConfigError("phase-shift geometric phase must lie in [0, pi)");
  return LoopSchedule(Gate::PhaseShift, omega, adiabaticTime, targetPhase,
                      detail::threeLegPath(adiabaticTime, std::numbers::pi / 2, 2.0 * targetPhase));
}

/// Effective two-photon Rabi frequency 2 W^2 / delta, all in meV.
inline double effectiveRabiMeV(double detuningMeV, double omegaSingleMeV) {
  if (!(detuningMeV > 0.0) || !std::isfinite(detuningMeV))
    throw ConfigError("two-photon detuning must be positive and finite");
  return 2.0 * omegaSingleMeV * omegaSingleMeV / detuningMeV;
}

/// Two-qubit phase gate driven by the effective two-photon Rabi frequency.
inline LoopSchedule twoQubitSchedule(double detuningMeV, double omegaSingleMeV, double adiabaticTime,
                                     double targetPhase = std::numbers::pi / 2) {
  const double effMeV = effectiveRabiMeV(detuningMeV, omegaSingleMeV);
  if (!(targetPhase >= 0.0 && targetPhase < std::numbers::pi))
    throw ConfigError("two-qubit geometric phase must lie in [0, pi)");
  return LoopSchedule(Gate::TwoQubitPhase, units::mevToInvFs(effMeV), adiabaticTime, targetPhase,
                      detail::threeLegPath(adiabaticTime, std::numbers::pi / 2, 2.0 * targetPhase),
                      TwoQubitParams{detuningMeV, omegaSingleMeV, effMeV});
}

/// Square pi pulse on {|G>, |E+>}: duration pi / (2 W) inverts the population.
inline LoopSchedule dynamicalPiPulse(double omega) {
  if (!(omega > 0.0)) throw ConfigError("Rabi frequency must be positive");
  const double duration = std::numbers::pi / (2.0 * omega);
  return LoopSchedule(Gate::DynamicalPi, omega, duration, 0.0,
                      detail::constantPath(duration, std::numbers::pi / 2, std::numbers::pi / 2));
}

} // namespace hqc
