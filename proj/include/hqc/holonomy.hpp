#pragma once

// Ideal holonomic gates and numerical holonomy routes.
//
// Logical operators act on span{|E+>, |E->} in that order. For a loop of
// solid angle a the mixing gate is exp(i a sigma_y) with
// i sigma_y = |E+><E-| - |E-><E+|; the phase gates put e^{i a} on |E+>.
//
// Coefficients of a state transported in a dark frame D obey c' = -A c with
// (A_mu)_{ab} = <D_a| d/dmu |D_b>.

#include "errors.hpp"
#include "linalg.hpp"
#include "model.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace hqc {

struct IdealGate {
  Mat2 logicalUnitary = Mat2::Identity();
  double geomPhase = 0.0;
};

struct ConnectionSample {
  Mat2 aTheta = Mat2::Zero();
  Mat2 aPhi = Mat2::Zero();
};

/// Columns |E+>, |E-> of the working basis.
inline Frame logicalFrame() {
  Frame b = Frame::Zero();
  b(basis::EPlus, 0) = 1.0;
  b(basis::EMinus, 1) = 1.0;
  return b;
}

/// True when the noiseless field returns to its starting value.
inline bool isClosedLoop(const LoopSchedule& schedule, double tol = 1e-12) {
  const ControlField a = buildControlField(schedule, 0.0);
  const ControlField b = buildControlField(schedule, schedule.adiabaticTime());
  const auto ca = a.components();
  const auto cb = b.components();
  for (std::size_t i = 0; i < 3; ++i)
    if (std::abs(ca[i] - cb[i]) > tol * schedule.omega()) return false;
  return true;
}

/// Enclosed chart area, integral of (1 - cos theta) dphi along the loop, by
/// 32-point Gauss-Legendre on every smooth piece. Halved for phase gates.
inline double solidAngle(const LoopSchedule& schedule) {
  if (!isHolonomic(schedule.gate())) throw std::invalid_argument("dynamical pulse is not a loop");
  if (!isClosedLoop(schedule)) throw std::invalid_argument("schedule is not a closed loop");
  using Quad = boost::math::quadrature::gauss<double, 32>;
  const auto& bp = schedule.breakpoints();
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    // nodes are interior, so the piece's own rate law applies throughout
    area += Quad::integrate(
        [&](double t) { return (1.0 - std::cos(schedule.theta(t))) * schedule.phiRate(t); }, bp[k], bp[k + 1]);
  }
  return schedule.gate() == Gate::Mixing ? area : 0.5 * area;
}

inline Mat2 mixingUnitary(double angle) {
  Mat2 u;
  u << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  return u;
}

inline Mat2 phaseUnitary(double phase) {
  Mat2 u = Mat2::Identity();
  u(0, 0) = std::polar(1.0, phase);
  return u;
}

inline IdealGate idealGate(const LoopSchedule& schedule) {
  if (!isHolonomic(schedule.gate())) throw std::invalid_argument("ideal holonomy undefined for the dynamical pulse");
  const double a = solidAngle(schedule);
  return {schedule.gate() == Gate::Mixing ? mixingUnitary(a) : phaseUnitary(a), a};
}

// ---------------------------------------------------------------------------
// Analytic dark frames and connection

namespace detail {

struct DarkFrameJet {
  Frame frame;
  Frame dTheta;
  Frame dPhi;
};

/// Smooth dark frame of the chart at (theta, phi) with its derivatives.
///   Mixing: D1 = cos(ph)|E+> - sin(ph)|E->,
///           D2 = cos(th)(sin(ph)|E+> + cos(ph)|E->) - sin(th)|E0>
///   Phase:  D1 = cos(th/2)|E+> + sin(th/2) e^{-i ph}|E0>,  D2 = |E->
inline DarkFrameJet darkFrameJet(Gate gate, double theta, double phi) {
  DarkFrameJet j{Frame::Zero(), Frame::Zero(), Frame::Zero()};
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  using namespace basis;
  if (gate == Gate::Mixing) {
    j.frame(EPlus, 0) = cp;
    j.frame(EMinus, 0) = -sp;
    j.frame(EPlus, 1) = ct * sp;
    j.frame(EMinus, 1) = ct * cp;
    j.frame(EZero, 1) = -st;
    j.dTheta(EPlus, 1) = -st * sp;
    j.dTheta(EMinus, 1) = -st * cp;
    j.dTheta(EZero, 1) = -ct;
    j.dPhi(EPlus, 0) = -sp;
    j.dPhi(EMinus, 0) = -cp;
    j.dPhi(EPlus, 1) = ct * cp;
    j.dPhi(EMinus, 1) = -ct * sp;
  } else if (gate == Gate::PhaseShift || gate == Gate::TwoQubitPhase) {
    const double sh = std::sin(0.5 * theta), ch = std::cos(0.5 * theta);
    const cplx e = std::polar(1.0, -phi);
    j.frame(EPlus, 0) = ch;
    j.frame(EZero, 0) = sh * e;
    j.frame(EMinus, 1) = 1.0;
    j.dTheta(EPlus, 0) = -0.5 * sh;
    j.dTheta(EZero, 0) = 0.5 * ch * e;
    j.dPhi(EZero, 0) = -kI * sh * e;
  } else {
    throw std::invalid_argument("no dark frame for the dynamical pulse");
  }
  return j;
}

} // namespace detail

/// Connection components in the chart coordinates at time t of the loop.
inline ConnectionSample connectionAt(const LoopSchedule& schedule, double t) {
  const auto j = detail::darkFrameJet(schedule.gate(), schedule.theta(t), schedule.phi(t));
  return {j.frame.adjoint() * j.dTheta, j.frame.adjoint() * j.dPhi};
}

/// Holonomy from the analytic connection: path-ordered midpoint exponentials
/// exp(-A dt) over about `nSteps` steps, split so no step crosses a path
/// breakpoint, closed with the frame mismatch at the pole where the chart
/// frame is multivalued.
inline Mat2 holonomyFromConnection(const LoopSchedule& schedule, int nSteps) {
  if (!isHolonomic(schedule.gate())) throw std::invalid_argument("dynamical pulse has no holonomy");
  if (nSteps < 1) throw std::invalid_argument("nSteps must be >= 1");
  const double total = schedule.adiabaticTime();
  const auto& bp = schedule.breakpoints();
  Mat2 c = Mat2::Identity();
  for (std::size_t piece = 0; piece + 1 < bp.size(); ++piece) {
    const double span = bp[piece + 1] - bp[piece];
    const int steps = std::max(1, static_cast<int>(std::lround(nSteps * span / total)));
    const double dt = span / steps;
    for (int k = 0; k < steps; ++k) {
      const double tm = bp[piece] + (k + 0.5) * dt;
      const ConnectionSample a = connectionAt(schedule, tm);
      const Mat2 gen = a.aTheta * schedule.thetaRate(tm) + a.aPhi * schedule.phiRate(tm);
      c = antiHermitianExp<2>(Mat2(-gen * dt)) * c;
    }
  }
  const Frame start = detail::darkFrameJet(schedule.gate(), schedule.theta(0.0), schedule.phi(0.0)).frame;
  const Frame end = detail::darkFrameJet(schedule.gate(), schedule.theta(total), schedule.phi(total)).frame;
  const Frame b = logicalFrame();
  return b.adjoint() * end * c * start.adjoint() * b;
}

// ---------------------------------------------------------------------------
// Wilczek-Zee holonomy from numerically tracked dark states

/// Orthonormal basis of the null space of H(t), from the spectral
/// decomposition. Throws unless exactly two eigenvalues vanish.
inline Frame darkSpace(const LoopSchedule& schedule, double t) {
  const Mat4 h = assembleHamiltonian(buildControlField(schedule, t), t).matrix;
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  // eigenvalues ascend: {-r, 0, 0, +r}
  const auto& ev = es.eigenvalues();
  const double scale = schedule.omega();
  if (std::abs(ev(1)) > 1e-8 * scale || std::abs(ev(2)) > 1e-8 * scale || std::abs(ev(0)) < 1e-3 * scale)
    throw GaugeTrackingError(fmt::format("dark space at t = {} fs is not two-fold: eigenvalues {} {} {} {}", t, ev(0),
                                         ev(1), ev(2), ev(3)));
  return es.eigenvectors().template middleCols<2>(1);
}

/// Wilczek-Zee holonomy on `nPoints` loop points.
///
/// The frame at each point is the previous frame projected onto the new dark
/// space and symmetrically re-orthonormalized (parallel-transport gauge). Each
/// link contributes the unitary part of the frame overlap, which equals
/// exp(-A dt) to second order, and the product is closed with the mismatch
/// between the final and initial frames. A nonzero `gaugeSeed` applies a
/// random U(2) to every frame; the result is gauge invariant.
inline Mat2 wilczekZeeHolonomy(const LoopSchedule& schedule, int nPoints, std::uint64_t gaugeSeed = 0) {
  if (!isHolonomic(schedule.gate())) throw std::invalid_argument("dynamical pulse has no holonomy");
  if (nPoints < 100) throw std::invalid_argument("wilczekZeeHolonomy needs at least 100 points");
  if (!isClosedLoop(schedule)) throw std::invalid_argument("schedule is not a closed loop");

  std::mt19937_64 gaugeRng(gaugeSeed);
  std::normal_distribution<double> gauss;
  auto randomGauge = [&]() -> Mat2 {
    if (gaugeSeed == 0) return Mat2::Identity();
    Mat2 g;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) g(i, k) = cplx(gauss(gaugeRng), gauss(gaugeRng));
    return polarUnitary<2>(g);
  };

  const double total = schedule.adiabaticTime();
  const Frame b = logicalFrame();

  auto project = [](const Frame& dark, const Frame& prev) -> Frame { return dark * (dark.adjoint() * prev); };

  double sMin = 0.0;
  Frame transported = loewdin(project(darkSpace(schedule, 0.0), b), &sMin);
  if (sMin < 0.9) throw GaugeTrackingError("logical states are not dark at the start of the loop");
  Frame previous = transported * randomGauge();
  const Frame first = previous;

  Mat2 links = Mat2::Identity();
  for (int k = 1; k < nPoints; ++k) {
    const double t = total * static_cast<double>(k) / (nPoints - 1);
    transported = loewdin(project(darkSpace(schedule, t), transported), &sMin);
    if (sMin < 0.9)
      throw GaugeTrackingError(fmt::format("dark frame jumped near t = {} fs (overlap {:.3g})", t, sMin));
    const Frame current = transported * randomGauge();
    links = polarUnitary<2>(Mat2(current.adjoint() * previous)) * links;
    previous = current;
  }
  return b.adjoint() * previous * links * first.adjoint() * b;
}

/// |tr(U^dagger V)| / 2.
inline double gateOverlap(const Mat2& u, const Mat2& v) { return std::abs((u.adjoint() * v).trace()) / 2.0; }

} // namespace hqc
