#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace fdasim;
using namespace fdasim::testing;

namespace {

double phase_of(cdouble z) { return std::arg(z); }

void expect_phasors(const ComplexVector& v, const std::vector<double>& phases) {
  ASSERT_EQ(v.size(), static_cast<Eigen::Index>(phases.size()));
  for (std::size_t i = 0; i < phases.size(); ++i) {
    EXPECT_LT(std::abs(v(static_cast<Eigen::Index>(i)) - std::polar(1.0, phases[i])), 1e-14) << i;
  }
}

}  // namespace

TEST(SpaceTimeFrequencies, Examples) {
  const ArrayConfig cfg = canonical_array(4);
  const auto broadside = space_time_frequencies(cfg, {kPi / 2, 0.3}, 6000.0);
  EXPECT_NEAR(broadside.spatial, 0.0, 1e-16);
  EXPECT_NEAR(broadside.doppler, 0.0, 1e-16);
  const auto f = space_time_frequencies(cfg, {0.0, std::acos(0.94281)}, 6000.0);
  EXPECT_NEAR(f.spatial, 0.47140, 1e-5);
  EXPECT_DOUBLE_EQ(f.range, 400.0);
  EXPECT_DOUBLE_EQ(cfg.beta(), 1.0);
  EXPECT_DOUBLE_EQ(cfg.spacing_ratio(), 0.5);
  EXPECT_EQ(cfg.dimension(), 256);
}

TEST(Steering, ReceiveExamples) {
  ArrayConfig cfg = canonical_array();
  SpaceTimeFrequencies f;
  EXPECT_TRUE(receive_steering(cfg, f).isApprox(ComplexVector::Ones(8)));
  cfg.rx_elements = 4;
  f.spatial = 0.25;
  expect_phasors(receive_steering(cfg, f), {0.0, kPi / 2, kPi, -kPi / 2});
  f.spatial = 0.3719;
  EXPECT_NEAR(receive_steering(cfg, f).cwiseAbs().maxCoeff(), 1.0, 1e-15);
  EXPECT_NEAR(receive_steering(cfg, f).cwiseAbs().minCoeff(), 1.0, 1e-15);
}

TEST(Steering, DopplerExamples) {
  const ArrayConfig cfg = canonical_array();
  EXPECT_TRUE(doppler_steering(cfg, 0.0).isApprox(ComplexVector::Ones(8)));
  const ComplexVector d = doppler_steering(cfg, 0.25);
  for (int k = 0; k < 8; ++k) {
    EXPECT_LT(std::abs(d(k) - std::polar(1.0, kPi * k / 2)), 1e-14);
  }
  // beta = 1: clutter Doppler phases equal the receive phases.
  const auto f = space_time_frequencies(cfg, {0.7, 0.33}, 6000.0);
  EXPECT_LT((doppler_steering(cfg, f) - receive_steering(cfg, f)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(UnitPhasor, ReducesLargeArguments) {
  EXPECT_LT(std::abs(unit_phasor(400.0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(unit_phasor(1e6 + 0.25) - cdouble(0.0, 1.0)), 1e-9);
}

TEST(TransmitGain, PeaksAndNulls) {
  const ArrayConfig pa = canonical_array(1);
  const ArrayConfig fda = canonical_array(4);
  const Angles look = canonical_look();
  EXPECT_DOUBLE_EQ(transmit_gain(pa, look, look, Partition::kPhasedArray), 8.0);
  EXPECT_DOUBLE_EQ(transmit_gain(fda, look, look, Partition::kFdaMimo), 2.0);

  // Dirichlet nulls of an 8-element half-wavelength array sit at du = 2k/8.
  for (int k = 1; k < 4; ++k) {
    EXPECT_NEAR(dirichlet(8, 0.5 * 0.25 * k), 0.0, 1e-13);
  }
  EXPECT_NEAR(dirichlet(8, 0.0625), std::sin(kPi / 2) / std::sin(kPi / 16), 1e-12);
  // Grating lobes: the kernel is periodic up to the sign (-1)^(L-1).
  EXPECT_NEAR(dirichlet(8, 1.0), -8.0, 1e-12);
  EXPECT_NEAR(dirichlet(8, 1.0 + 1e-13), -8.0, 1e-9);
  EXPECT_NEAR(dirichlet(7, 1.0), 7.0, 1e-12);
}

TEST(TransmitGain, MatchesBruteForcePhasorSum) {
  std::mt19937_64 eng(7);
  const ArrayConfig cfg = canonical_array(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Angles look{uniform(eng, 0, kPi), uniform(eng, 0, 1.2)};
    const Angles sc{uniform(eng, -kPi, kPi), uniform(eng, 0, 1.2)};
    const double du = direction_cosine(look) - direction_cosine(sc);
    cdouble sum{};
    for (int m = 0; m < 8; ++m) sum += std::polar(1.0, kTwoPi * m * 0.5 * du);
    EXPECT_NEAR(std::abs(transmit_gain(cfg, look, sc, Partition::kPhasedArray)), std::abs(sum),
                1e-11);
  }
}

TEST(SubarrayVector, Examples) {
  ArrayConfig pa = canonical_array(1);
  const auto f = space_time_frequencies(pa, {0.4, 0.3}, 6000.0);
  ASSERT_EQ(subarray_vector(pa, f).size(), 1);
  EXPECT_EQ(subarray_vector(pa, f)(0), cdouble(1.0, 0.0));

  // phi_R = 400 is an integer: only the spatial term survives.
  ArrayConfig fda = canonical_array(4);
  const auto g = space_time_frequencies(fda, {0.4, 0.3}, 6000.0);
  std::vector<double> phases;
  for (int s = 0; s < 4; ++s) phases.push_back(std::arg(std::polar(1.0, kTwoPi * s * g.spatial)));
  expect_phasors(subarray_vector(fda, g), phases);

  // Broadside with a non-integer range frequency.
  const auto b = space_time_frequencies(fda, {kPi / 2, 0.3}, 6001.5);
  phases.clear();
  for (int s = 0; s < 4; ++s) phases.push_back(-kTwoPi * std::remainder(s * b.range, 1.0));
  expect_phasors(subarray_vector(fda, b), phases);

  // Phase-centre spacing of M_S elements gives the subarray-displacement form.
  fda.subarray_phase_spacing = fda.elements_per_subarray();
  phases.clear();
  for (int s = 0; s < 4; ++s) phases.push_back(phase_of(std::polar(1.0, kTwoPi * s * 2 * g.spatial)));
  expect_phasors(subarray_vector(fda, g), phases);
}

TEST(ClutterSnapshot, Examples) {
  const ArrayConfig pa = canonical_array(1);
  const Angles look = canonical_look();
  const ComplexVector v = clutter_snapshot(pa, look, look, 6000.0);
  ASSERT_EQ(v.size(), 64);
  EXPECT_LT((v - ComplexVector::Constant(64, 8.0)).cwiseAbs().maxCoeff(), 1e-13);

  const ArrayConfig fda = canonical_array(4);
  EXPECT_EQ(clutter_snapshot(fda, look, {0.3, 0.2}, 6000.0).size(), 256);

  const ComplexVector a = clutter_snapshot(fda, look, {0.8, 0.33}, 6000.0);
  const ComplexVector b = clutter_snapshot(fda, look, {-0.8, 0.33}, 6000.0);
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ClutterSnapshot, KroneckerOracle) {
  std::mt19937_64 eng(11);
  for (int S : {1, 2, 4, 8}) {
    const ArrayConfig cfg = canonical_array(S);
    for (int trial = 0; trial < 25; ++trial) {
      const Angles look{uniform(eng, 0, kPi), uniform(eng, 0, 1.2)};
      const Angles sc{uniform(eng, -kPi, kPi), uniform(eng, 0, 1.2)};
      const double rt = uniform(eng, 3000, 9000);
      const ComplexVector v = clutter_snapshot(cfg, look, sc, rt);

      const double u = cfg.spacing_ratio() * direction_cosine(sc);
      const double fd = cfg.beta() * u;
      const double fr = 2.0 * cfg.subarray_freq_increment * rt / kSpeedOfLight;
      const double du = cfg.spacing_ratio() * (direction_cosine(look) - direction_cosine(sc));
      const int L = cfg.elements_per_subarray();
      cdouble gain_sum{};
      for (int m = 0; m < L; ++m) gain_sum += std::polar(1.0, kTwoPi * m * du);
      const double gain = std::abs(gain_sum) * (std::sin(kPi * L * du) / std::sin(kPi * du) < 0 ? -1 : 1);
      double worst = 0;
      for (int k = 0; k < cfg.pulses; ++k) {
        for (int n = 0; n < cfg.rx_elements; ++n) {
          for (int s = 0; s < S; ++s) {
            const double cycles = std::remainder(k * fd, 1.0) + std::remainder(n * u, 1.0) +
                                  std::remainder(s * u, 1.0) - std::remainder(s * fr, 1.0);
            const cdouble expect = gain * std::polar(1.0, kTwoPi * cycles);
            worst = std::max(worst, std::abs(v((k * cfg.rx_elements + n) * S + s) - expect));
          }
        }
      }
      ASSERT_LE(worst, 1e-12) << "S=" << S;
      ASSERT_NEAR(v.squaredNorm(), gain * gain * cfg.dimension(), 1e-9 * v.squaredNorm() + 1e-12);
    }
  }
}

TEST(ClutterSnapshot, RidgeIdentity) {
  const ArrayConfig cfg = canonical_array(4);
  const ScattererRing ring = sample_clutter_ring(canonical_scene(), 361);
  for (const auto& p : ring.points) {
    const auto f = space_time_frequencies(cfg, p.direction, 6000.0);
    EXPECT_EQ(f.doppler, cfg.beta() * f.spatial);
  }
}

TEST(ClutterSnapshot, OneElementPerSubarray) {
  const ArrayConfig cfg = canonical_array(8);
  std::mt19937_64 eng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Angles look{uniform(eng, 0, kPi), uniform(eng, 0, 1.2)};
    const Angles sc{uniform(eng, -kPi, kPi), uniform(eng, 0, 1.2)};
    EXPECT_EQ(transmit_gain(cfg, look, sc, cfg.partition()), 1.0);
    const auto f = space_time_frequencies(cfg, sc, 6000.0);
    const ComplexVector p = subarray_vector(cfg, f);
    ComplexVector brute(8);
    for (int m = 0; m < 8; ++m) {
      const double cycles = std::remainder(m * f.spatial, 1.0) - std::remainder(m * f.range, 1.0);
      brute(m) = std::polar(1.0, kTwoPi * cycles);
    }
    EXPECT_LT((p - brute).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ArrayConfig, Validation) {
  ArrayConfig cfg = canonical_array(3);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.subarrays = 4;
  EXPECT_NO_THROW(cfg.validate());
  cfg.pulse_width = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
