#include <hqc/noise.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace hqc;

namespace {

const LoopSchedule kLoop = mixingLoop(0.02, 7500.0);

NoiseSpec spec(NoiseChannel c, double sigma, int n, std::uint64_t seed = 42) {
  return NoiseSpec::forSchedule(kLoop, c, sigma, n, seed);
}

} // namespace

TEST(Rng, SplitMixReferenceStream) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(state), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(splitmix64(state), 0x06c45d188009454fULL);
}

TEST(Rng, XoshiroReferenceStream) {
  auto g = Xoshiro256::fromState({1, 2, 3, 4});
  const std::uint64_t expected[] = {0x2d00ULL, 0x0ULL, 0x5a007080ULL, 0x10e0000000009d80ULL, 0x10e0b61ce1009d80ULL,
                                    0x0870021ce143ad00ULL};
  for (std::uint64_t e : expected) EXPECT_EQ(g(), e);
}

TEST(Rng, UniformInUnitInterval) {
  Xoshiro256 g(3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
  NormalSource n(9);
  const int count = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = n();
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  EXPECT_NEAR(s1 / count, 0.0, 0.01);
  EXPECT_NEAR(s2 / count, 1.0, 0.015);
  EXPECT_NEAR(s4 / count, 3.0, 0.1);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 18; ++s)
    for (std::uint64_t r = 0; r < 100; ++r) seen.insert(deriveSeed(1, s, r));
  EXPECT_EQ(seen.size(), 1800u);
  EXPECT_NE(deriveSeed(1, 0, 0), deriveSeed(2, 0, 0));
  EXPECT_EQ(deriveSeed(7, 3, 4), deriveSeed(7, 3, 4));
}

TEST(Noise, ChannelParsing) {
  EXPECT_EQ(parseChannel("both"), NoiseChannel::Both);
  EXPECT_EQ(toString(NoiseChannel::Phase), "phase");
  EXPECT_THROW(parseChannel("amplitude"), ConfigError);
}

TEST(Noise, ZeroSigmaIsSilent) {
  const auto traj = sampleTrajectory(spec(NoiseChannel::Both, 0.0, 50));
  for (const auto& iv : traj.perInterval) {
    for (double d : iv.dOmega) EXPECT_EQ(d, 0.0);
    for (double x : iv.xi) EXPECT_EQ(x, 0.0);
  }
}

TEST(Noise, IntensityOffsetStatistics) {
  const double sigma = 0.1, omega = 0.02;
  const auto traj = sampleTrajectory(spec(NoiseChannel::Intensity, sigma, 5000, 1));
  for (std::size_t i = 0; i < 3; ++i) {
    double mean = 0.0, sq = 0.0;
    for (const auto& iv : traj.perInterval) {
      mean += iv.dOmega[i] / omega;
      sq += (iv.dOmega[i] / omega) * (iv.dOmega[i] / omega);
    }
    mean /= 5000;
    const double sd = std::sqrt(sq / 5000 - mean * mean);
    // 3 sigma/sqrt(n) = 0.0042
    EXPECT_NEAR(mean, 0.0, 0.0042) << "laser " << i;
    EXPECT_NEAR(sd, sigma, 0.006) << "laser " << i;
  }
  for (const auto& iv : traj.perInterval)
    for (double x : iv.xi) EXPECT_EQ(x, 0.0);
}

TEST(Noise, SameSeedSameTrajectory) {
  const auto a = sampleTrajectory(spec(NoiseChannel::Both, 0.1, 100, 5));
  const auto b = sampleTrajectory(spec(NoiseChannel::Both, 0.1, 100, 5));
  const auto c = sampleTrajectory(spec(NoiseChannel::Both, 0.1, 100, 6));
  bool differs = false;
  for (std::size_t k = 0; k < 100; ++k) {
    EXPECT_EQ(a.perInterval[k].dOmega, b.perInterval[k].dOmega);
    EXPECT_EQ(a.perInterval[k].xi, b.perInterval[k].xi);
    differs = differs || a.perInterval[k].dOmega != c.perInterval[k].dOmega;
  }
  EXPECT_TRUE(differs);
}

TEST(Noise, ChannelsShareDeviates) {
  const auto both = sampleTrajectory(spec(NoiseChannel::Both, 0.1, 20));
  const auto intensity = sampleTrajectory(spec(NoiseChannel::Intensity, 0.1, 20));
  const auto phase = sampleTrajectory(spec(NoiseChannel::Phase, 0.1, 20));
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_EQ(both.perInterval[k].dOmega, intensity.perInterval[k].dOmega);
    EXPECT_EQ(both.perInterval[k].xi, phase.perInterval[k].xi);
  }
}

TEST(Noise, PerturbFieldCases) {
  const ControlField clean{cplx(0.01, 0.0), cplx(0.0, 0.005), cplx(0.015, 0.0)};
  NoiseTrajectory traj{NoiseChannel::None, 100.0, {NoiseInterval{{1e-3, 2e-3, 3e-3}, {0.3, -0.2, 0.1}}}};
  EXPECT_EQ(perturbField(clean, traj, 50.0), clean);

  traj.channel = NoiseChannel::Intensity;
  EXPECT_EQ(perturbField(clean, traj, 50.0),
            (ControlField{clean.plus + 1e-3, clean.minus + 2e-3, clean.zero + 3e-3}));

  traj.channel = NoiseChannel::Phase;
  const ControlField p = perturbField(clean, traj, 50.0);
  EXPECT_NEAR(std::abs(p.plus), std::abs(clean.plus), 1e-14);
  EXPECT_NEAR(std::abs(p.minus), std::abs(clean.minus), 1e-14);
  EXPECT_NEAR(std::abs(p.zero), std::abs(clean.zero), 1e-14);
  EXPECT_NEAR(std::arg(p.plus), 0.3, 1e-14);
  EXPECT_NEAR(std::arg(p.minus), std::numbers::pi / 2 - 0.2, 1e-14);

  traj.channel = NoiseChannel::Both;
  const ControlField b = perturbField(clean, traj, 50.0);
  EXPECT_NEAR(std::abs(b.plus - (clean.plus * std::polar(1.0, 0.3) + 1e-3)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(b.zero - (clean.zero * std::polar(1.0, 0.1) + 3e-3)), 0.0, 1e-16);
}

TEST(Noise, PiecewiseConstantOverIntervals) {
  const auto traj = sampleTrajectory(spec(NoiseChannel::Both, 0.1, 10));
  const ControlField clean{0.02, 0.0, 0.0};
  for (std::size_t k = 0; k < 10; ++k) {
    const double t0 = traj.noiseTime * static_cast<double>(k);
    const ControlField a = perturbField(clean, traj, t0);
    const ControlField b = perturbField(clean, traj, t0 + 0.999 * traj.noiseTime);
    EXPECT_EQ(a, b);
    EXPECT_EQ(traj.intervalIndex(t0 + 0.5 * traj.noiseTime), k);
  }
  EXPECT_NE(perturbField(clean, traj, 0.0), perturbField(clean, traj, traj.noiseTime));
}

TEST(Noise, TimeOutsideWindowIsDomainError) {
  const auto traj = sampleTrajectory(spec(NoiseChannel::Intensity, 0.1, 10));
  EXPECT_THROW(traj.intervalIndex(-1e-6), std::domain_error);
  EXPECT_THROW(traj.intervalIndex(7500.0), std::domain_error);
  EXPECT_THROW(traj.intervalIndex(std::nan("")), std::domain_error);
}

TEST(Noise, ValidateRejectsMismatchedDuration) {
  NoiseSpec s = spec(NoiseChannel::Intensity, 0.1, 7);
  EXPECT_NO_THROW(s.validate(7500.0));
  s.noiseTime *= 1.001;
  EXPECT_THROW(s.validate(7500.0), ConfigError);
  EXPECT_THROW(spec(NoiseChannel::Intensity, 0.1, 0), ConfigError);
  NoiseSpec neg = spec(NoiseChannel::Intensity, -0.1, 5);
  EXPECT_THROW(neg.validate(7500.0), ConfigError);
  EXPECT_THROW(sampleTrajectory(neg), ConfigError);
}

TEST(Noise, NoiseTimeFromExtractions) {
  for (int n : {1, 3, 70, 5000}) {
    const NoiseSpec s = spec(NoiseChannel::Intensity, 0.1, n);
    EXPECT_NEAR(s.noiseTime * n, 7500.0, 1e-9);
    EXPECT_EQ(sampleTrajectory(s).extractions(), n);
  }
}

TEST(Noise, TrajectoryCsv) {
  const auto traj = sampleTrajectory(spec(NoiseChannel::Both, 0.1, 3));
  std::ostringstream out;
  writeTrajectoryCsv(traj, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "interval,dOmegaPlus,dOmegaMinus,dOmegaZero,xiPlus,xiMinus,xiZero");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    const double dPlus = std::stod(line.substr(line.find(',') + 1));
    EXPECT_EQ(dPlus, traj.perInterval[static_cast<std::size_t>(rows)].dOmega[0]);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}
