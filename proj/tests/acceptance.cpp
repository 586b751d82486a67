// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Shared settings: W = 0.02 fs^-1, T_ad = 7500 fs, 18 Bloch states x 5
// realizations per point, base seed 20240601. Seeds depend only on
// (state, realization), so every curve is driven by the same noise draws.

#include <hqc/hqc.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace hqc;

namespace {

constexpr double kOmega = 0.02;
constexpr double kTad = 7500.0;
constexpr int kRealizations = 5;
constexpr std::uint64_t kSeed = 20240601;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("[{}] {}: {}\n", ok ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
}

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

using Curve = std::map<int, FidelityRecord>;

Curve sweep(const LoopSchedule& s, NoiseChannel channel, double sigma, const std::vector<int>& grid,
            int realizations = kRealizations) {
  FidelityOptions opt;
  opt.threads = 0;
  const auto records = fidelitySweep(s, channel, sigma, grid, realizations, kSeed, opt);
  Curve c;
  for (const auto& r : records) c[r.nExtractions] = r;
  return c;
}

template <typename Fn>
double meanOver(const Curve& c, int lo, int hi, Fn value) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [k, r] : c)
    if (k >= lo && k <= hi) {
      sum += value(r);
      ++n;
    }
  return n > 0 ? sum / n : std::nan("");
}

double meanFidelity(const Curve& c, int lo, int hi) {
  return meanOver(c, lo, hi, [](const FidelityRecord& r) { return r.meanFidelity; });
}

double meanLeakage(const Curve& c, int lo, int hi) {
  return meanOver(c, lo, hi, [](const FidelityRecord& r) { return r.leakageG + r.leakageE0; });
}

double minFidelity(const Curve& c, int lo, int hi) {
  double m = 2.0;
  for (const auto& [k, r] : c)
    if (k >= lo && k <= hi) m = std::min(m, r.meanFidelity);
  return m;
}

std::vector<int> sharedGrid() {
  std::vector<int> g = kSlowGrid;
  for (int n : kFastGrid)
    if (std::find(g.begin(), g.end(), n) == g.end()) g.push_back(n);
  return g;
}

std::vector<int> denseGrid() {
  std::vector<int> g(100);
  std::iota(g.begin(), g.end(), 1);
  for (int n : {200, 500, 1000, 2000, 5000}) g.push_back(n);
  return g;
}

std::string worstPoint(const Curve& a, const Curve& b, const std::vector<int>& grid) {
  int worst = grid.front();
  double gap = 1e9;
  for (int n : grid) {
    const double d = a.at(n).meanFidelity - b.at(n).meanFidelity;
    if (d < gap) {
      gap = d;
      worst = n;
    }
  }
  return fmt::format("smallest margin {:+.4f} at n_r = {}", gap, worst);
}

// ---------------------------------------------------------------------------

double noiselessLeakage = 1.0;

void idealGateCriterion() {
  const auto start = std::chrono::steady_clock::now();
  const auto s = mixingLoop(kOmega, kTad);
  const IdealGateReport rep = idealGateReport(s, 10000);
  const double secs = seconds(start);
  const auto ov = columnOverlaps(mixingUnitary(std::numbers::pi / 2), rep.evolved);
  const double wz = maxAbs(rep.wilczekZee - mixingUnitary(std::numbers::pi / 2));
  noiselessLeakage = rep.evolvedLeakage;
  report(ov[0] >= 0.99 && ov[1] >= 0.99 && wz <= 1e-3 && secs <= 60.0, "ideal gate",
         fmt::format("overlaps {:.6f} {:.6f} (>= 0.99), WZ max|diff| {:.2e} (<= 1e-3), {:.1f} s (<= 60)", ov[0], ov[1],
                     wz, secs));
}

void regimeCriteria(const Curve& fig1, double secs) {
  const double slow = meanFidelity(fig1, 1, 30);
  const double interMin = minFidelity(fig1, 50, 100);
  const double interMean = meanFidelity(fig1, 50, 100);
  const double plotMean = meanFidelity(fig1, 1, 100);
  const double fast = (fig1.at(1000).meanFidelity + fig1.at(2000).meanFidelity + fig1.at(5000).meanFidelity) / 3.0;
  report(std::abs(slow - 0.875) <= 0.05, "three regimes (a) slow plateau",
         fmt::format("mean over n_r 1..30 = {:.4f} (0.875 +- 0.05)", slow));
  report(interMin <= 0.65 && std::abs(plotMean - 0.632) <= 0.07, "three regimes (b) intermediate dip",
         fmt::format("min over n_r 50..100 = {:.4f} (<= 0.65), mean over n_r 1..100 = {:.4f} (0.632 +- 0.07)",
                     interMin, plotMean));
  report(fast >= 0.91 && std::abs(fast - 0.956) <= 0.03, "three regimes (c) fast recovery",
         fmt::format("mean over n_r 1000, 2000, 5000 = {:.4f} (>= 0.91, 0.956 +- 0.03)", fast));
  report(slow > interMean && fast > interMean && secs <= 3600.0, "three regimes ordering",
         fmt::format("slow {:.4f} > intermediate {:.4f} < fast {:.4f}; sweep {:.0f} s (<= 3600)", slow, interMean,
                     fast, secs));
}

void smallNoiseCriterion(const Curve& big, const Curve& small, const std::vector<int>& grid) {
  bool dominates = true;
  for (int n : grid) dominates = dominates && small.at(n).meanFidelity >= big.at(n).meanFidelity;
  const double fast = meanFidelity(small, 1000, 5000);
  report(dominates && fast >= 0.99, "small noise",
         fmt::format("sigma 0.01 >= sigma 0.1 at all {} points: {} ({}); fast mean {:.5f} (>= 0.99)", grid.size(),
                     dominates ? "yes" : "no", worstPoint(small, big, grid), fast));
}

void phaseCriterion(const Curve& intensity, const Curve& phase, const std::vector<int>& grid) {
  bool ok = true;
  for (int n : grid) ok = ok && phase.at(n).meanFidelity >= intensity.at(n).meanFidelity;
  report(ok, "phase noise benign", fmt::format("phase >= intensity at every n_r: {} ({})", ok ? "yes" : "no",
                                               worstPoint(phase, intensity, grid)));
}

void bothChannelCriterion(const Curve& intensity, const Curve& both, const std::vector<int>& grid) {
  bool ok = true;
  double worstRatio = 0.0;
  int worstN = grid.front();
  for (int n : grid) {
    const auto& i = intensity.at(n);
    const auto& b = both.at(n);
    const double band = 3.0 * std::hypot(i.standardError(), b.standardError());
    const double ratio = std::abs(b.meanFidelity - i.meanFidelity) / std::max(band, 1e-300);
    if (ratio > worstRatio) {
      worstRatio = ratio;
      worstN = n;
    }
    ok = ok && std::abs(b.meanFidelity - i.meanFidelity) <= band;
  }
  report(ok, "both channels track intensity",
         fmt::format("|F_both - F_int| <= 3 combined SE at every n_r; largest |gap|/band {:.2f} at n_r = {}",
                     worstRatio, worstN));
}

void leakageCriterion(const Curve& fig1) {
  const double early = meanLeakage(fig1, 1, 10);
  const double inter = meanLeakage(fig1, 50, 100);
  const double l1 = meanLeakage(fig1, 1000, 1000), l2 = meanLeakage(fig1, 2000, 2000), l5 = meanLeakage(fig1, 5000, 5000);
  const bool ok = inter > early && l1 > l2 && l2 > l5 && l1 < inter && noiselessLeakage <= 0.01;
  report(ok, "leakage profile",
         fmt::format("n_r 1..10 {:.4f} < n_r 50..100 {:.4f}; n_r 1000/2000/5000 {:.4f} > {:.4f} > {:.4f}; "
                     "noiseless {:.2e} (<= 0.01)",
                     early, inter, l1, l2, l5, noiselessLeakage));
}

void dynamicalCriterion() {
  bool rule = dynamicalExtractions(5000) == 50 && dynamicalExtractions(1000) == 10;
  const double tDyn = dynamicalPiPulse(kOmega).adiabaticTime();
  for (int n = 1; n <= 5000; ++n) {
    if (kTad / n >= tDyn) rule = rule && dynamicalExtractions(n) == 1;
    rule = rule && dynamicalExtractions(n) == std::max(1, (n + 99) / 100);
  }
  std::string detail = fmt::format("extraction rule {}", rule ? "ok" : "violated");
  bool ok = rule;
  for (auto [label, channel, sigma] : {std::tuple{"sigma 0.1 both", NoiseChannel::Both, 0.1},
                                      std::tuple{"sigma 0.01 both", NoiseChannel::Both, 0.01}}) {
    SweepConfig cfg;
    cfg.channel = channel;
    cfg.sigma = sigma;
    cfg.extractions = {1000, 2000, 5000};
    cfg.realizations = kRealizations;
    cfg.baseSeed = kSeed;
    cfg.threads = 0;
    const ComparisonResult res = compareDynamical(cfg);
    detail += fmt::format("; {}: |F_holo - F_dyn| (<= 0.05)", label);
    for (const auto& r : res.rows) {
      const double gap = std::abs(r.holonomic.meanFidelity - r.dynamical.meanFidelity);
      ok = ok && gap <= 0.05;
      detail += fmt::format(" {}:{:.4f}", r.holonomicExtractions, gap);
    }
  }
  report(ok, "dynamical comparison", detail);
}

void twoQubitCriterion() {
  const auto s = twoQubitSchedule(5.0, 5.0 / 15, 0.8 * units::kFsPerNs);
  const Curve c = sweep(s, NoiseChannel::Intensity, 0.1, sharedGrid());
  int argmin = 0;
  double minimum = 2.0;
  for (int n : kSlowGrid)
    if (c.at(n).meanFidelity < minimum) {
      minimum = c.at(n).meanFidelity;
      argmin = n;
    }
  const double fast = meanFidelity(c, 1000, 5000);
  report(fast > minimum && argmin >= 10 && argmin <= 30, "two-qubit gate",
         fmt::format("W_eff T = {:.1f}; fast mean {:.4f} > slow-grid minimum {:.4f} at n_r = {} (in [10, 30])",
                     s.adiabaticity(), fast, minimum, argmin));
}

void propertySuite() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const NoiseChannel channels[] = {NoiseChannel::Intensity, NoiseChannel::Phase, NoiseChannel::Both};
  double worstUnitarity = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double tad = 1000.0 + 6500.0 * u01(rng);
    const auto s = trial % 2 == 0 ? mixingLoop(kOmega, tad, 3.0 * u01(rng)) : phaseShiftLoop(kOmega, tad, 3.0 * u01(rng));
    const int n = 1 + static_cast<int>(200 * u01(rng));
    const auto spec = NoiseSpec::forSchedule(s, channels[trial % 3], 0.5 * u01(rng), n, rng());
    const int steps = defaultStepsPerInterval(s, n, 0.1);
    const auto out = evolve(s, spec, QuantumState::basisState(basis::EPlus), steps);
    worstUnitarity = std::max({worstUnitarity, unitarityDefect(out.propagator.matrix), std::abs(out.state.norm() - 1.0)});
  }
  report(worstUnitarity <= 1e-10, "property: unitarity",
         fmt::format("max |U^dag U - 1| over 1000 noisy evolutions {:.2e} (<= 1e-10)", worstUnitarity));

  const auto loop = mixingLoop(kOmega, kTad);
  auto gate = [&](int steps) {
    return evolve(loop, std::nullopt, QuantumState::basisState(basis::EPlus), steps).propagator.matrix;
  };
  const Mat4 reference = gate(96000);
  const double e1 = maxAbs(gate(1500) - reference), e2 = maxAbs(gate(6000) - reference);
  const double slope = std::log(e1 / e2) / std::log(4.0);
  report(std::abs(slope - 2.0) <= 0.2, "property: second-order convergence",
         fmt::format("error slope {:.3f} (2.0 +- 0.2)", slope));

  FidelityOptions opt;
  opt.threads = 0;
  const auto silent = gateFidelity(loop, NoiseSpec::forSchedule(loop, NoiseChannel::Both, 0.0, 10, kSeed), 3, opt);
  report(silent.meanFidelity == 1.0 && *std::min_element(silent.perState.begin(), silent.perState.end()) == 1.0,
         "property: zero-noise fidelity", fmt::format("mean fidelity at sigma 0 = {:.17g}", silent.meanFidelity));

  double quad = std::abs(solidAngle(loop) - std::numbers::pi / 2);
  for (double a : {0.3, 1.0, 2.5, 4.0}) quad = std::max(quad, std::abs(solidAngle(mixingLoop(kOmega, kTad, a)) - a));
  {
    // circle of constant polar angle 0.6 around the pole
    ChartPath p;
    const double w = 2 * std::numbers::pi / kTad;
    p.theta = [](double) { return 0.6; };
    p.phi = [=](double t) { return w * t; };
    p.thetaRate = [](double) { return 0.0; };
    p.phiRate = [=](double) { return w; };
    p.breakpoints = {0.0, kTad};
    const LoopSchedule cap(Gate::Mixing, kOmega, kTad, 0.0, p);
    quad = std::max(quad, std::abs(solidAngle(cap) - 2 * std::numbers::pi * (1 - std::cos(0.6))));
  }
  report(quad <= 1e-9, "property: solid-angle quadrature", fmt::format("max deviation from analytic {:.2e} (<= 1e-9)", quad));

  const std::vector<int> grid{3, 70, 1000};
  const Curve a = sweep(loop, NoiseChannel::Both, 0.1, grid, 2);
  const Curve b = sweep(loop, NoiseChannel::Both, 0.1, grid, 2);
  bool identical = true;
  for (int n : grid)
    identical = identical && a.at(n).perState == b.at(n).perState && a.at(n).leakageG == b.at(n).leakageG &&
                a.at(n).seeds == b.at(n).seeds;
  report(identical, "property: seed determinism", fmt::format("bit-identical reruns: {}", identical ? "yes" : "no"));
}

} // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const auto loop = mixingLoop(kOmega, kTad);
  const std::vector<int> shared = sharedGrid();

  idealGateCriterion();

  const auto fig1Start = std::chrono::steady_clock::now();
  const Curve fig1 = sweep(loop, NoiseChannel::Intensity, 0.1, denseGrid());
  regimeCriteria(fig1, seconds(fig1Start));

  smallNoiseCriterion(fig1, sweep(loop, NoiseChannel::Intensity, 0.01, shared), shared);
  phaseCriterion(fig1, sweep(loop, NoiseChannel::Phase, 0.1, shared), shared);
  bothChannelCriterion(fig1, sweep(loop, NoiseChannel::Both, 0.1, shared), shared);
  leakageCriterion(fig1);
  dynamicalCriterion();
  twoQubitCriterion();
  propertySuite();

  fmt::print("{} criteria failed, total {:.0f} s\n", failures, seconds(start));
  return failures == 0 ? 0 : 1;
}
